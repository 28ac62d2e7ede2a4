#pragma once

#include <string>

#include "pairing/ext_field.hpp"

namespace pairing {

// Element-type shims so the affine group law below works over either field.
inline FpElement elt_mul(const FpElement& a, const FpElement& b) { return a * b; }
inline ExtElement elt_mul(const ExtElement& a, const ExtElement& b) { return ext_mul(a, b); }
inline FpElement elt_sq(const FpElement& a) { return a * a; }
inline ExtElement elt_sq(const ExtElement& a) { return ext_square(a); }
inline FpElement elt_inv_of(const FpElement& a) { return fp_inv(a); }
inline ExtElement elt_inv_of(const ExtElement& a) { return ext_inv(a); }
inline FpElement one_like(const FpElement& a) { return FpElement(a.field(), 1); }
inline ExtElement one_like(const ExtElement& a) { return ExtElement::one(a.spec()); }
inline FpElement zero_like(const FpElement& a) { return FpElement(a.field(), 0); }
inline ExtElement zero_like(const ExtElement& a) { return ExtElement::zero(a.spec()); }
inline FpElement from_int_like(const FpElement& a, long v) { return FpElement(a.field(), v); }
inline ExtElement from_int_like(const ExtElement& a, long v) {
    return ExtElement::from_base(a.spec(), v);
}

// Short Weierstrass y^2 = x^3 + a x + b with nonzero discriminant.
template <class E>
struct CurveT {
    E a, b;

    static CurveT make(E a_, E b_) {
        E disc = from_int_like(a_, 4) * elt_mul(a_, elt_mul(a_, a_)) +
                 from_int_like(a_, 27) * elt_mul(b_, b_);
        if (disc.is_zero()) throw UsageError("singular curve: 4a^3 + 27b^2 = 0");
        return CurveT{std::move(a_), std::move(b_)};
    }

    E rhs(const E& x) const { return elt_mul(x, elt_sq(x)) + elt_mul(a, x) + b; }
};

template <>
inline FpElement CurveT<FpElement>::rhs(const FpElement& x) const {
    return x * x * x + a * x + b;
}

template <class E>
struct Pt {
    bool infinity = true;
    E x, y;

    static Pt at_infinity() { return Pt{}; }
    static Pt make(const CurveT<E>& c, E x_, E y_) {
        if (!(elt_sq(y_) == c.rhs(x_))) throw UsageError("point not on curve");
        return Pt{false, std::move(x_), std::move(y_)};
    }
    // For internal use where the group law guarantees membership.
    static Pt unchecked(E x_, E y_) { return Pt{false, std::move(x_), std::move(y_)}; }

    bool operator==(const Pt& o) const {
        if (infinity || o.infinity) return infinity == o.infinity;
        return x == o.x && y == o.y;
    }
    bool operator!=(const Pt& o) const { return !(*this == o); }
};

template <class E>
bool on_curve(const Pt<E>& P, const CurveT<E>& c) {
    if (P.infinity) return true;
    return elt_sq(P.y) == c.rhs(P.x);
}

template <class E>
Pt<E> point_neg(const Pt<E>& P) {
    if (P.infinity) return P;
    return Pt<E>::unchecked(P.x, -P.y);
}

// Chord/tangent slope of the line through P and Q (P, Q finite, P != -Q).
template <class E>
E line_slope(const Pt<E>& P, const Pt<E>& Q, const CurveT<E>& c) {
    if (P.x == Q.x) {
        // tangent; vertical case (y = 0) must be handled by the caller
        E num = from_int_like(P.x, 3) * elt_sq(P.x) + c.a;
        return elt_mul(num, elt_inv_of(P.y + P.y));
    }
    return elt_mul(Q.y - P.y, elt_inv_of(Q.x - P.x));
}

// One field inversion per addition or doubling (affine coordinates).
template <class E>
Pt<E> point_add(const Pt<E>& P, const Pt<E>& Q, const CurveT<E>& c) {
    if (P.infinity) return Q;
    if (Q.infinity) return P;
    if (P.x == Q.x && (P.y + Q.y).is_zero()) return Pt<E>::at_infinity();
    E lam = line_slope(P, Q, c);
    E x3 = elt_sq(lam) - P.x - Q.x;
    E y3 = elt_mul(lam, P.x - x3) - P.y;
    return Pt<E>::unchecked(std::move(x3), std::move(y3));
}

template <class E>
Pt<E> point_double(const Pt<E>& P, const CurveT<E>& c) {
    return point_add(P, P, c);
}

// n*P by NAF double-add-subtract; negative n negates P.
template <class E>
Pt<E> scalar_mul(const mpz_class& n, const Pt<E>& P, const CurveT<E>& c) {
    if (n == 0 || P.infinity) return Pt<E>::at_infinity();
    Pt<E> base = n < 0 ? point_neg(P) : P;
    mpz_class m = abs(n);
    if (m == 1) return base;
    SignedDigitString naf = naf_encode(m);
    Pt<E> acc = base;
    Pt<E> neg = point_neg(base);
    for (std::size_t i = 1; i < naf.digits.size(); i++) {
        acc = point_add(acc, acc, c);
        if (naf.digits[i] == 1) acc = point_add(acc, base, c);
        if (naf.digits[i] == -1) acc = point_add(acc, neg, c);
    }
    return acc;
}

// #E(F_{p^j}) from the trace via t_{m+1} = t*t_m - p*t_{m-1}.
mpz_class curve_order_ext(const mpz_class& t, const mpz_class& p, unsigned j);

Pt<ExtElement> embed_point(const Pt<FpElement>& P, const ExtFieldSpec& spec);
CurveT<ExtElement> embed_curve(const CurveT<FpElement>& c, const ExtFieldSpec& spec);

// (x, y) -> (x^p^i, y^p^i).
Pt<ExtElement> frobenius_point(const Pt<ExtElement>& P, unsigned i);

struct TwistData {
    unsigned u = 0;                  // selected class; map multiplies by xi^(2u), xi^(3u)
    ExtElement xi;                   // xi^d lies in F_{p^e}
    CurveT<ExtElement> curve;        // E' over F_{p^e}, coefficients in the subfield
    mpz_class order;                 // #E'(F_{p^e})
};

// Coefficients λ_0..λ_n of Σ λ_i base^i = m r, with base q (ate form) or
// T^e (twisted form).
struct OptimalVector {
    std::vector<mpz_class> lambda;
    mpz_class base;
    mpz_class m;
};

struct PairingContext {
    std::shared_ptr<const PrimeField> Fp;
    std::shared_ptr<const ExtFieldSpec> Fpk;
    mpz_class p, r, t;
    unsigned k = 0, d = 1, e = 0;
    mpz_class h1;  // #E(F_p)/r

    std::string family;
    mpz_class x0;
    mpz_class r_cofactor = 1;  // composite factor stripped from r(x0)

    CurveT<FpElement> E1{};
    CurveT<ExtElement> Ek{};

    bool has_twist = false;
    TwistData twist{};

    Pt<FpElement> g1{};
    Pt<ExtElement> g2{};

    bool has_ate_vector = false;
    OptimalVector ate_vec{};
    bool has_twisted_vector = false;
    OptimalVector twisted_vec{};
};

// phi(x', y') = (xi^2u x', xi^3u y') from E' onto the G2 locus in E(F_{p^k}).
Pt<ExtElement> twist_map(const TwistData& tw, const Pt<ExtElement>& P, const CurveT<ExtElement>& Ek);
Pt<ExtElement> twist_map_inverse(const TwistData& tw, const Pt<ExtElement>& Q,
                                 const CurveT<ExtElement>& Etw);

// Selects the twist class whose subfield point group carries the eigenvalue-q
// r-torsion; throws UnsupportedTwist for incompatible curve shapes.
TwistData build_twist(const CurveT<FpElement>& E1, const ExtFieldSpec& spec, unsigned d,
                      const mpz_class& r, const mpz_class& t, Rng& rng);

// Random order-r point of E(F_p) (cofactor cleared), deterministic in seed.
Pt<FpElement> sample_g1(const PairingContext& ctx, std::uint64_t seed);

// Random order-r point with pi(Q) = qQ; twist route when available, otherwise
// cofactor clearing plus the anti-trace projection on E(F_{p^k}).
Pt<ExtElement> sample_g2(const PairingContext& ctx, std::uint64_t seed);

// Random point on E' (F_{p^e} coordinates), used by sampling and twist tests.
Pt<ExtElement> sample_subfield_point(const CurveT<ExtElement>& c, const ExtFieldSpec& spec,
                                     unsigned e, Rng& rng);

}  // namespace pairing
