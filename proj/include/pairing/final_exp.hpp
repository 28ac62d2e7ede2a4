#pragma once

#include "pairing/families.hpp"
#include "pairing/miller.hpp"

namespace pairing {

// (q^k - 1)/r = easy1 * easy2 * hard with easy1 = q^{k/i} - 1 for the smallest
// prime i | k, and hard = Phi_k(q)/r.
struct ExponentSplit {
    unsigned i = 0;
    mpz_class easy1, easy2, hard;
    std::vector<mpz_class> easy2_coeffs;  // easy2 = sum c_j q^j
};

ExponentSplit split_exponent(const PairingContext& ctx);

// b^(easy1 * easy2) with Frobenius maps and one inversion.
ExtElement easy_exp(const ExtElement& b, const ExponentSplit& split, const PairingContext& ctx);

// Reference hard part: plain sliding-window b^N.
ExtElement hard_naive(const ExtElement& b, const mpz_class& N);

// Avanzi-Mihailescu: base-q digits, each in base 2^ell, Horner over Frobenius.
ExtElement hard_am04(const ExtElement& b, const mpz_class& N, const PairingContext& ctx,
                     unsigned ell);

// Nogami et al.: ell x ct binary matrix, duplicate columns combined, rows
// folded with ell - 1 Frobenius maps.
ExtElement hard_nmkm08(const ExtElement& b, const mpz_class& N, const PairingContext& ctx,
                       unsigned ell);

struct AdditionSequence {
    std::vector<mpz_class> terms;    // strictly increasing, starts at 1
    std::vector<mpz_class> targets;  // must all appear among terms
};

bool validate_addition_sequence(const AdditionSequence& seq);

// Greedy cover: every gap is closed by halving (even) or by splitting off the
// largest smaller term (odd).
AdditionSequence find_addition_sequence(std::vector<mpz_class> targets);

struct SbcpkResult {
    ExtElement value;  // b^(s * N)
    mpz_class s;       // lcm of the lambda_{ij} denominators
};

// Scott et al. family-dependent hard part; needs the polynomial family the
// context was instantiated from.
SbcpkResult hard_sbcpk09(const ExtElement& b, const PairingContext& ctx, const CurveFamily& f);

enum class HardAlg { Naive, HardNaive, AM04, NMKM08, SBCPK09 };

const char* hard_alg_name(HardAlg a);
HardAlg hard_alg_by_name(const std::string& s);

// Model-based window choice; pi_weight is the measured pi/M2 cost ratio.
unsigned choose_ell(HardAlg alg, const PairingContext& ctx, double pi_weight);
unsigned choose_ell(HardAlg alg, const PairingContext& ctx);  // measures pi/M2 via counters

// Structural pi/M2 estimate: base-field multiplications per operation.
double measure_pi_weight(const PairingContext& ctx);

struct FinalExpResult {
    ExtElement value;
    mpz_class s = 1;       // power of the true pairing that was computed
    unsigned ell = 0;      // window actually used (AM04/NMKM08)
};

// Full (q^k - 1)/r exponentiation through the selected algorithm.
FinalExpResult final_exponentiation(const ExtElement& b, const PairingContext& ctx,
                                    HardAlg alg = HardAlg::HardNaive, unsigned ell = 0);

}  // namespace pairing
