#pragma once

#include <vector>

#include "pairing/common.hpp"

namespace pairing {

// Dense polynomial over Q, coefficient of x^i at index i, no trailing zeros.
// All arithmetic exact.
class RationalPoly {
  public:
    RationalPoly() = default;
    explicit RationalPoly(std::vector<mpq_class> coeffs);
    static RationalPoly constant(const mpq_class& c);
    static RationalPoly monomial(unsigned deg, const mpq_class& c = 1);

    const std::vector<mpq_class>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
    mpq_class coeff(unsigned i) const { return i < c_.size() ? c_[i] : mpq_class(0); }

    bool operator==(const RationalPoly& o) const { return c_ == o.c_; }

    RationalPoly operator+(const RationalPoly& o) const;
    RationalPoly operator-(const RationalPoly& o) const;
    RationalPoly operator*(const RationalPoly& o) const;
    RationalPoly operator*(const mpq_class& s) const;

    // Euclidean division; g must be nonzero.
    static void divmod(const RationalPoly& f, const RationalPoly& g, RationalPoly& q,
                       RationalPoly& r);
    // Exact quotient; throws Error when g does not divide f.
    RationalPoly divide_exact(const RationalPoly& g) const;
    bool divisible_by(const RationalPoly& g) const;

    mpq_class eval(const mpq_class& x) const;
    mpz_class eval_integer(const mpz_class& x) const;  // throws if value not integral
    bool integral_at(const mpz_class& x) const;

    // lcm of coefficient denominators.
    mpz_class denominator_lcm() const;

    std::string str(const std::string& var = "x") const;

  private:
    std::vector<mpq_class> c_;
    void trim();
};

// k-th cyclotomic polynomial over Z, via exact division of x^k - 1 by all
// proper-divisor cyclotomics.
RationalPoly cyclotomic_poly(unsigned k);

// f(g(x)) exactly.
RationalPoly compose(const RationalPoly& f, const RationalPoly& g);

// Square root in Q[x] by coefficient matching; throws if f is not a square.
RationalPoly poly_sqrt(const RationalPoly& f);

}  // namespace pairing
