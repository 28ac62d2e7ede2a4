#pragma once

#include <array>
#include <memory>

#include "pairing/curve.hpp"
#include "pairing/poly.hpp"

namespace pairing {

struct Congruence {
    mpz_class modulus = 1;
    std::vector<mpz_class> residues{0};

    bool admits(const mpz_class& x) const {
        mpz_class m = x % modulus;
        if (m < 0) m += modulus;
        for (const auto& r : residues)
            if (m == r) return true;
        return false;
    }
};

// Polynomial parameter family q(x), r(x), t(x) with exact rational
// coefficients; 4q - t^2 = cm_d * y^2 pins the CM structure.
struct CurveFamily {
    std::string name;
    unsigned k = 0;
    unsigned d = 1;  // twist degree
    std::string construction;
    RationalPoly q, r, t, y;
    unsigned cm_d = 3;
    Congruence cong;
    bool allow_r_cofactor = false;
    mpz_class r_cofactor_bound = 1;
    std::array<int, 3> table_degrees{0, 0, 0};  // deg q, deg r, deg t
};

struct FamilyReport {
    bool r_divides_order = false;   // r(x) | q(x) + 1 - t(x)
    bool r_divides_phi = false;     // r(x) | Phi_k(q(x))
    bool cm_equation = false;       // 4q - t^2 == cm_d * y^2
    bool degrees_match = false;
    bool k_minimal_spotcheck = false;
    std::string detail;

    bool all_ok() const {
        return r_divides_order && r_divides_phi && cm_equation && degrees_match &&
               k_minimal_spotcheck;
    }
};

FamilyReport family_verify(const CurveFamily& f);

// Registry: BN (k=12), KSS16, KSS18, the cyclotomic k=9/k=27 families and
// BLS24. Every entry has passed family_verify at first use.
const std::vector<CurveFamily>& family_catalog();
const CurveFamily& family_by_name(const std::string& name);

struct SearchConstraints {
    unsigned max_naf_weight = 8;
    bool require_binomial = false;
    mpz_class r_cofactor_bound = 0;  // 0: use the family default
    std::size_t max_results = 4;
    std::size_t max_tested = 2000000;
};

struct Candidate {
    mpz_class x0, p, r, t;
    mpz_class r_cofactor = 1;
    unsigned naf_weight = 0;
    bool binomial = false;
};

// Candidates ordered by (NAF weight of |x0|, |x0|); empty result means the
// search budget was exhausted, not an error.
std::vector<Candidate> search_x0(const CurveFamily& f, unsigned target_r_bits,
                                 const SearchConstraints& cons = {});

// Full context: primes, curve coefficients, field spec, twist, generators and
// optimal vectors. Throws InvalidContext on bad seeds.
std::unique_ptr<PairingContext> instantiate(const CurveFamily& f, const mpz_class& x0);

// Base-q(x) digit expansion of N(x) = Phi_k(q(x))/r(x): lambda[i][j] is the
// coefficient of x^j q(x)^i. Used by the family-dependent final exponentiation.
std::vector<std::vector<mpq_class>> sbcpk_lambda_table(const CurveFamily& f);

}  // namespace pairing
