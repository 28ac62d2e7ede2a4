#pragma once

#include <type_traits>

#include "pairing/curve.hpp"

namespace pairing {

// Numerator and denominator of the function value are kept separate so the
// loop performs no inversions; collapse() pays the single division.
struct FunctionValue {
    ExtElement num, den;

    static FunctionValue one(const ExtFieldSpec& spec) {
        return {ExtElement::one(spec), ExtElement::one(spec)};
    }
    ExtElement collapse() const {
        if (den.is_zero()) throw DivisionByZero("FunctionValue with zero denominator");
        if (den == ExtElement::one(den.spec())) return num;
        return ext_mul(num, ext_inv(den));
    }
    FunctionValue operator*(const FunctionValue& o) const {
        return {ext_mul(num, o.num), ext_mul(den, o.den)};
    }
    FunctionValue inverse() const { return {den, num}; }
};

struct MillerFlags {
    bool denominator_elimination = false;
    bool use_lprime = false;
};

// Mixed loop-field/extension-field arithmetic.
inline ExtElement ext_minus(const ExtElement& a, const FpElement& b) {
    return ext_sub_scalar(a, b.value());
}
inline ExtElement ext_minus(const ExtElement& a, const ExtElement& b) { return a - b; }
inline ExtElement ext_times(const FpElement& s, const ExtElement& a) {
    return ext_scalar_mul(s.value(), a);
}
inline ExtElement ext_times(const ExtElement& s, const ExtElement& a) { return ext_mul(s, a); }

// x(Q) - x(P); 1 when P is at infinity (empty divisor contribution).
template <class L>
ExtElement vertical_eval(const Pt<L>& P, const Pt<ExtElement>& Q, const ExtFieldSpec& spec) {
    if (Q.infinity) throw UsageError("vertical_eval: Q must be finite");
    if (P.infinity) return ExtElement::one(spec);
    ExtElement v = ext_minus(Q.x, P.x);
    if (v.is_zero()) throw DegenerateEval("vertical through Q");
    return v;
}

// Normalized line through R and S evaluated at Q; tangent when R = S,
// vertical fallbacks when the line degenerates.
template <class L>
ExtElement line_eval(const Pt<L>& R, const Pt<L>& S, const Pt<ExtElement>& Q,
                     const CurveT<L>& c, const ExtFieldSpec& spec) {
    if (Q.infinity) throw UsageError("line_eval: Q must be finite");
    if (R.infinity) return vertical_eval(S, Q, spec);
    if (S.infinity) return vertical_eval(R, Q, spec);
    if (R.x == S.x && (R.y + S.y).is_zero()) return vertical_eval(R, Q, spec);
    L lam = line_slope(R, S, c);
    ExtElement val = ext_minus(Q.y, R.y) - ext_times(lam, ext_minus(Q.x, R.x));
    if (val.is_zero()) throw DegenerateEval("Q on the line through R and S");
    return val;
}

// (y(Q) + y(P)) / (x(Q) - x(P)), precomputed once per (P, Q) pair.
struct LprimePrecomp {
    ExtElement ratio;
};

template <class L>
LprimePrecomp make_lprime_precomp(const Pt<L>& P, const Pt<ExtElement>& Q,
                                  const ExtFieldSpec& spec) {
    (void)spec;
    if (P.infinity || Q.infinity) throw UsageError("lprime precomp: finite points required");
    ExtElement den = ext_minus(Q.x, P.x);
    if (den.is_zero()) throw DegenerateEval("lprime precomp: x(Q) = x(P)");
    ExtElement num = [&] {
        if constexpr (std::is_same_v<L, FpElement>) return ext_add_scalar(Q.y, P.y.value());
        else return Q.y + P.y;
    }();
    return {ext_mul(num, ext_inv(den))};
}

// l_{R,-P}(Q) / v_P(Q) = ratio - slope(R, -P); no extension multiplication.
template <class L>
ExtElement lprime_eval(const Pt<L>& R, const Pt<L>& P, const Pt<ExtElement>& Q,
                       const LprimePrecomp& pre, const CurveT<L>& c, const ExtFieldSpec& spec) {
    (void)Q;
    Pt<L> nP = point_neg(P);
    if (R.infinity || R == P) return ExtElement::one(spec);  // line collapses to v_P
    L lam = line_slope(R, nP, c);
    ExtElement val = ext_minus(pre.ratio, lam);
    if (val.is_zero()) throw DegenerateEval("Q on the line through R and -P");
    return val;
}

template <class L>
struct MillerResult {
    FunctionValue fv;
    Pt<L> endpoint;  // x * P
};

// Binary double-and-add special case of the signed-digit loop; digits 0/1.
template <class L>
MillerResult<L> miller_basic(const mpz_class& x, const Pt<L>& P, const Pt<ExtElement>& Q,
                             const CurveT<L>& c, const ExtFieldSpec& spec, MillerFlags flags) {
    if (x < 1) throw UsageError("miller_basic: x >= 1 required");
    if (P.infinity) throw UsageError("miller_basic: P must be finite");
    SignedDigitString digits = binary_encode(x);
    Pt<L> R = P;
    FunctionValue fg = FunctionValue::one(spec);
    const bool elim = flags.denominator_elimination;
    for (std::size_t i = 1; i < digits.digits.size(); i++) {
        count_step();
        fg.num = ext_mul(ext_square(fg.num), line_eval(R, R, Q, c, spec));
        R = point_add(R, R, c);
        if (!elim) fg.den = ext_mul(ext_square(fg.den), vertical_eval(R, Q, spec));
        if (digits.digits[i] == 1) {
            fg.num = ext_mul(fg.num, line_eval(R, P, Q, c, spec));
            R = point_add(R, P, c);
            if (!elim) fg.den = ext_mul(fg.den, vertical_eval(R, Q, spec));
        }
    }
    return {fg, R};
}

// Signed-digit Miller loop; the -1 digit carries the extra v_P factor from
// f_{-1,P} = 1/v_P, or the precomputed l' form when use_lprime is set.
template <class L>
MillerResult<L> miller_naf(const SignedDigitString& x, const Pt<L>& P, const Pt<ExtElement>& Q,
                           const CurveT<L>& c, const ExtFieldSpec& spec, MillerFlags flags) {
    if (x.digits.empty() || x.digits.front() != 1)
        throw UsageError("miller_naf: leading digit must be 1");
    if (P.infinity) throw UsageError("miller_naf: P must be finite");
    const bool elim = flags.denominator_elimination;
    const bool lp = flags.use_lprime && !elim;
    LprimePrecomp pre;
    Pt<L> nP = point_neg(P);
    bool has_pre = false;
    if (lp) {
        pre = make_lprime_precomp(P, Q, spec);
        has_pre = true;
    }
    (void)has_pre;
    Pt<L> R = P;
    FunctionValue fg = FunctionValue::one(spec);
    for (std::size_t i = 1; i < x.digits.size(); i++) {
        count_step();
        fg.num = ext_mul(ext_square(fg.num), line_eval(R, R, Q, c, spec));
        R = point_add(R, R, c);
        if (!elim) fg.den = ext_mul(ext_square(fg.den), vertical_eval(R, Q, spec));
        if (x.digits[i] == 1) {
            fg.num = ext_mul(fg.num, line_eval(R, P, Q, c, spec));
            R = point_add(R, P, c);
            if (!elim) fg.den = ext_mul(fg.den, vertical_eval(R, Q, spec));
        } else if (x.digits[i] == -1) {
            if (lp) {
                fg.num = ext_mul(fg.num, lprime_eval(R, P, Q, pre, c, spec));
                R = point_add(R, nP, c);
                fg.den = ext_mul(fg.den, vertical_eval(R, Q, spec));
            } else {
                fg.num = ext_mul(fg.num, line_eval(R, nP, Q, c, spec));
                R = point_add(R, nP, c);
                if (!elim) {
                    fg.den = ext_mul(fg.den, vertical_eval(R, Q, spec));
                    fg.den = ext_mul(fg.den, vertical_eval(P, Q, spec));
                }
            }
        }
    }
    return {fg, R};
}

// Boxall et al.'s variant: numerator/denominator swap tracked by delta,
// a single inversion at the end. delta starts at (-1)^h where h counts all
// curve doublings, additions and subtractions the loop will perform.
template <class L>
MillerResult<L> miller_boxall(const SignedDigitString& x, const Pt<L>& P, const Pt<ExtElement>& Q,
                              const CurveT<L>& c, const ExtFieldSpec& spec) {
    if (x.digits.empty() || x.digits.front() != 1)
        throw UsageError("miller_boxall: leading digit must be 1");
    if (P.infinity) throw UsageError("miller_boxall: P must be finite");
    const std::size_t n = x.digits.size() - 1;
    const std::size_t h = n + x.weight() - 1;
    int delta = (h % 2 == 0) ? 1 : -1;

    LprimePrecomp pre = make_lprime_precomp(P, Q, spec);
    Pt<L> nP = point_neg(P);
    Pt<L> R = P;
    // Invariant: f_{delta x', P}(Q)^delta = f/g. Start with x' = 1; for
    // delta = -1 this means f/g = v_P, folded in without an inversion.
    FunctionValue fg = FunctionValue::one(spec);
    if (delta == -1) fg.num = vertical_eval(P, Q, spec);

    for (std::size_t i = 1; i <= n; i++) {
        count_step();
        int d = x.digits[i];
        if (delta == 1) {
            fg.num = ext_mul(ext_square(fg.num), line_eval(R, R, Q, c, spec));
            fg.den = ext_square(fg.den);
            R = point_add(R, R, c);
            delta = -delta;
            if (d == 1) {
                fg.den = ext_mul(fg.den, lprime_eval(point_neg(R), P, Q, pre, c, spec));
                R = point_add(R, P, c);
                delta = -delta;
            } else if (d == -1) {
                fg.den = ext_mul(fg.den, line_eval(point_neg(R), P, Q, c, spec));
                R = point_add(R, nP, c);
                delta = -delta;
            }
        } else {
            fg.den = ext_mul(ext_square(fg.den), line_eval(point_neg(R), point_neg(R), Q, c, spec));
            fg.num = ext_square(fg.num);
            R = point_add(R, R, c);
            delta = -delta;
            if (d == 1) {
                fg.num = ext_mul(fg.num, line_eval(R, P, Q, c, spec));
                R = point_add(R, P, c);
                delta = -delta;
            } else if (d == -1) {
                fg.num = ext_mul(fg.num, lprime_eval(R, P, Q, pre, c, spec));
                R = point_add(R, nP, c);
                delta = -delta;
            }
        }
    }
    if (delta != 1) throw Error("miller_boxall: delta parity bookkeeping failed");
    return {fg, R};
}

enum class MillerVariant { DoubleAdd, Naf, BoxallDoubleAdd, BoxallNaf };

const char* miller_variant_name(MillerVariant v);

// f_{x,P}(Q) for x >= 1 through the selected loop variant.
template <class L>
MillerResult<L> miller_eval(MillerVariant variant, const mpz_class& x, const Pt<L>& P,
                            const Pt<ExtElement>& Q, const CurveT<L>& c, const ExtFieldSpec& spec,
                            MillerFlags flags) {
    switch (variant) {
        case MillerVariant::DoubleAdd:
            return miller_basic(x, P, Q, c, spec, flags);
        case MillerVariant::Naf:
            return miller_naf(naf_encode(x), P, Q, c, spec, flags);
        case MillerVariant::BoxallDoubleAdd:
            return miller_boxall(binary_encode(x), P, Q, c, spec);
        case MillerVariant::BoxallNaf:
            return miller_boxall(naf_encode(x), P, Q, c, spec);
    }
    throw UsageError("unknown miller variant");
}

// f_{n,P}(Q) for any nonzero n: f_{-n,P} = 1/(f_{n,P} v_{nP}).
template <class L>
MillerResult<L> miller_signed(MillerVariant variant, const mpz_class& n, const Pt<L>& P,
                              const Pt<ExtElement>& Q, const CurveT<L>& c,
                              const ExtFieldSpec& spec, MillerFlags flags) {
    if (n == 0) throw UsageError("miller_signed: n must be nonzero");
    if (n > 0) return miller_eval(variant, n, P, Q, c, spec, flags);
    MillerResult<L> pos = miller_eval(variant, mpz_class(-n), P, Q, c, spec, flags);
    FunctionValue inv = pos.fv.inverse();
    if (!flags.denominator_elimination && !pos.endpoint.infinity)
        inv.den = ext_mul(inv.den, vertical_eval(pos.endpoint, Q, spec));
    return {inv, point_neg(pos.endpoint)};
}

}  // namespace pairing
