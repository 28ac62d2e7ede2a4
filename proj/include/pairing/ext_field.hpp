#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "pairing/fp.hpp"

namespace pairing {

enum class ModulusKind { Binomial, Trinomial, Generic };

const char* modulus_kind_name(ModulusKind k);

// F_{p^k} = F_p[X]/(f) as a single extension. Frobenius powers are precomputed
// linear maps: diagonal x permutation for a binomial modulus, dense k x k
// matrices otherwise. Immutable after construction.
class ExtFieldSpec {
  public:
    struct FrobTable {
        bool diag_perm = false;
        std::vector<mpz_class> diag;      // diag_perm: out[perm[j]] = diag[j] * in[j]
        std::vector<unsigned> perm;
        std::vector<std::vector<mpz_class>> dense;  // dense[j] = column for X^j
    };

    static std::shared_ptr<const ExtFieldSpec> make(std::shared_ptr<const PrimeField> base,
                                                    unsigned k, ModulusKind kind,
                                                    std::vector<mpz_class> modulus);
    // Convenience for binomial X^k - a and trinomial X^k + X + a.
    static std::shared_ptr<const ExtFieldSpec> make_binomial(std::shared_ptr<const PrimeField> base,
                                                             unsigned k, const mpz_class& a);
    static std::shared_ptr<const ExtFieldSpec> make_trinomial(std::shared_ptr<const PrimeField> base,
                                                              unsigned k, const mpz_class& a);

    const PrimeField& fp() const { return *base_; }
    std::shared_ptr<const PrimeField> fp_ptr() const { return base_; }
    unsigned k() const { return k_; }
    ModulusKind kind() const { return kind_; }
    const mpz_class& param_a() const { return a_; }
    const std::vector<mpz_class>& modulus() const { return modulus_; }
    const FrobTable& frob_table(unsigned i) const { return frob_.at(i - 1); }
    const mpz_class& order() const { return pk_; }  // p^k
    const mpz_class& p() const { return base_->p(); }

    bool operator==(const ExtFieldSpec& o) const {
        return *base_ == *o.base_ && k_ == o.k_ && modulus_ == o.modulus_;
    }

  private:
    ExtFieldSpec() = default;
    std::shared_ptr<const PrimeField> base_;
    unsigned k_ = 0;
    ModulusKind kind_ = ModulusKind::Generic;
    mpz_class a_;
    std::vector<mpz_class> modulus_;  // monic, size k+1
    std::vector<FrobTable> frob_;
    mpz_class pk_;
};

class ExtElement {
  public:
    ExtElement() : spec_(nullptr) {}
    ExtElement(const ExtFieldSpec& spec, std::vector<mpz_class> coeffs);

    static ExtElement zero(const ExtFieldSpec& spec);
    static ExtElement one(const ExtFieldSpec& spec);
    static ExtElement from_base(const ExtFieldSpec& spec, const mpz_class& c);
    static ExtElement monomial(const ExtFieldSpec& spec, unsigned i, const mpz_class& c = 1);

    const ExtFieldSpec& spec() const;
    const std::vector<mpz_class>& coeffs() const { return c_; }
    FpElement coeff(unsigned i) const { return FpElement(spec().fp(), c_.at(i)); }

    bool is_zero() const;
    // Support contained in {X^0}, i.e. an embedded base-field element.
    bool is_base() const;
    unsigned support_size() const;

    bool operator==(const ExtElement& o) const;
    bool operator!=(const ExtElement& o) const { return !(*this == o); }

    ExtElement operator+(const ExtElement& o) const;
    ExtElement operator-(const ExtElement& o) const;
    ExtElement operator-() const;

  private:
    const ExtFieldSpec* spec_;
    std::vector<mpz_class> c_;  // size k, canonical in [0,p)

    friend ExtElement ext_mul(const ExtElement&, const ExtElement&);
    friend ExtElement ext_square(const ExtElement&);
    friend ExtElement ext_scalar_mul(const mpz_class&, const ExtElement&);
    friend ExtElement frobenius(const ExtElement&, unsigned);
    friend ExtElement ext_inv(const ExtElement&);
    friend ExtElement ext_add_scalar(const ExtElement&, const mpz_class&);
};

ExtElement ext_mul(const ExtElement& a, const ExtElement& b);
ExtElement ext_square(const ExtElement& a);
ExtElement ext_scalar_mul(const mpz_class& s, const ExtElement& a);
ExtElement ext_add_scalar(const ExtElement& a, const mpz_class& s);
inline ExtElement ext_sub_scalar(const ExtElement& a, const mpz_class& s) {
    return ext_add_scalar(a, -s);
}
ExtElement ext_inv(const ExtElement& a);
inline ExtElement ext_div(const ExtElement& a, const ExtElement& b) {
    return ext_mul(a, ext_inv(b));
}

inline ExtElement operator*(const ExtElement& a, const ExtElement& b) { return ext_mul(a, b); }

// a^(p^i), 0 <= i < k; i = 0 is the identity.
ExtElement frobenius(const ExtElement& a, unsigned i);

ExtElement ext_pow(const ExtElement& a, const mpz_class& n, unsigned window = 4);

// true iff a lies in F_{p^e}; e must divide k.
bool is_in_subfield(const ExtElement& a, unsigned e);

// Phi_k(q) by exact integer division of q^k - 1 through the divisor tower.
mpz_class cyclotomic_value(unsigned k, const mpz_class& q);

// Returns a spec for F_{p^k}: binomial X^k - a when the divisibility criterion
// holds (smallest a >= 2), else trinomial X^k + X + a (smallest a within
// bound), else a sparse generic irreducible. Never fails.
std::shared_ptr<const ExtFieldSpec> find_defining_polynomial(
    std::shared_ptr<const PrimeField> base, unsigned k, unsigned trinomial_bound = 400);

bool binomial_criterion_holds(const mpz_class& p, unsigned k);

ExtElement random_element(const ExtFieldSpec& spec, Rng& rng);

// Sum of pi^{e*i}(a) over the d = k/e conjugates; lands in F_{p^e}.
ExtElement trace_to_subfield(const ExtElement& a, unsigned e);

// ell-th root (ell prime) in the multiplicative group of order m, via
// Adleman-Manders-Miller; sampler supplies random group elements for the
// non-residue search. Returns nullopt when a is not an ell-th power.
std::optional<ExtElement> nth_root_in_group(const ExtElement& a, unsigned ell, const mpz_class& m,
                                            const std::function<ExtElement()>& sampler);

// Square root among F_{p^e} elements (a must lie in that subfield).
std::optional<ExtElement> ext_sqrt_subfield(const ExtElement& a, unsigned e, Rng& rng);

// Square root in the full field F_{p^k}.
std::optional<ExtElement> ext_sqrt(const ExtElement& a, Rng& rng);

std::vector<unsigned> prime_factors(unsigned n);

}  // namespace pairing
