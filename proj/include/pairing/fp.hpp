#pragma once

#include <optional>
#include <vector>

#include "pairing/common.hpp"

namespace pairing {

// Miller-Rabin with `rounds` random bases after small-prime trial division.
// Deterministic: bases come from a seed derived from n unless an Rng is given.
bool is_probable_prime(const mpz_class& n, int rounds = 64);
bool is_probable_prime(const mpz_class& n, int rounds, Rng& rng);

class PrimeField {
  public:
    // p must be an odd prime >= 5; verified with 64 Miller-Rabin rounds
    // (error < 2^-128).
    explicit PrimeField(mpz_class p);

    const mpz_class& p() const { return p_; }

    bool operator==(const PrimeField& o) const { return p_ == o.p_; }

  private:
    mpz_class p_;
};

// Canonical residue in [0, p). Value semantics, immutable after construction.
class FpElement {
  public:
    FpElement() : field_(nullptr) {}
    FpElement(const PrimeField& f, mpz_class v);

    const mpz_class& value() const { return v_; }
    const PrimeField& field() const;

    bool is_zero() const { return v_ == 0; }
    bool operator==(const FpElement& o) const;
    bool operator!=(const FpElement& o) const { return !(*this == o); }

    FpElement operator+(const FpElement& o) const;
    FpElement operator-(const FpElement& o) const;
    FpElement operator-() const;
    FpElement operator*(const FpElement& o) const;

  private:
    const PrimeField* field_;
    mpz_class v_;

    void check_same(const FpElement& o) const;
};

FpElement fp_inv(const FpElement& a);

// a^n by sliding-window square-and-multiply; negative n inverts first.
FpElement fp_pow(const FpElement& a, const mpz_class& n, unsigned window = 4);

// Tonelli-Shanks. Returns the lexicographically smaller of the two roots,
// or nullopt when a is a non-residue.
std::optional<FpElement> fp_sqrt(const FpElement& a);

// Euler criterion; a must be nonzero.
bool fp_is_square(const FpElement& a);

// Base-2 signed expansion, digits in {-1,0,1}, most significant first.
struct SignedDigitString {
    std::vector<int> digits;

    mpz_class value() const;
    std::size_t weight() const;  // nonzero digits
};

// Non-adjacent form of x >= 1: no two adjacent nonzero digits.
SignedDigitString naf_encode(const mpz_class& x);

// Plain binary digits of x >= 1 (for double-and-add Miller rows).
SignedDigitString binary_encode(const mpz_class& x);

std::size_t naf_weight(const mpz_class& x);

}  // namespace pairing
