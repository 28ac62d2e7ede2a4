#include "pairing/curve.hpp"

namespace pairing {

namespace {

mpz_class trace_ext(const mpz_class& t, const mpz_class& p, unsigned j) {
    // t_0 = 2, t_1 = t, t_{m+1} = t*t_m - p*t_{m-1}
    mpz_class t0 = 2, t1 = t;
    if (j == 0) return t0;
    for (unsigned m = 1; m < j; m++) {
        mpz_class t2 = t * t1 - p * t0;
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    return t1;
}

// Divide out every factor of r, returning the cofactor and the valuation.
mpz_class strip_r(const mpz_class& n, const mpz_class& r, unsigned& valuation) {
    mpz_class c = n;
    valuation = 0;
    while (c % r == 0) {
        c /= r;
        valuation++;
    }
    return c;
}

// Reduce a point of r-power order to exact order r (or infinity).
template <class E>
Pt<E> to_order_r(Pt<E> S, const mpz_class& r, const CurveT<E>& c) {
    if (S.infinity) return S;
    for (;;) {
        Pt<E> rS = scalar_mul(r, S, c);
        if (rS.infinity) return S;
        S = rS;
    }
}

}  // namespace

mpz_class curve_order_ext(const mpz_class& t, const mpz_class& p, unsigned j) {
    if (j == 0) throw UsageError("curve_order_ext: j >= 1");
    if (t * t > 4 * p) throw UsageError("curve_order_ext: trace violates the Hasse bound");
    mpz_class pj;
    mpz_pow_ui(pj.get_mpz_t(), p.get_mpz_t(), j);
    return pj + 1 - trace_ext(t, p, j);
}

Pt<ExtElement> embed_point(const Pt<FpElement>& P, const ExtFieldSpec& spec) {
    if (P.infinity) return Pt<ExtElement>::at_infinity();
    return Pt<ExtElement>::unchecked(ExtElement::from_base(spec, P.x.value()),
                                     ExtElement::from_base(spec, P.y.value()));
}

CurveT<ExtElement> embed_curve(const CurveT<FpElement>& c, const ExtFieldSpec& spec) {
    return CurveT<ExtElement>{ExtElement::from_base(spec, c.a.value()),
                              ExtElement::from_base(spec, c.b.value())};
}

Pt<ExtElement> frobenius_point(const Pt<ExtElement>& P, unsigned i) {
    if (P.infinity || i == 0) return P;
    return Pt<ExtElement>::unchecked(frobenius(P.x, i), frobenius(P.y, i));
}

Pt<ExtElement> twist_map(const TwistData& tw, const Pt<ExtElement>& P,
                         const CurveT<ExtElement>& Ek) {
    if (P.infinity) return P;
    ExtElement xi2 = ext_pow(tw.xi, 2 * tw.u);
    ExtElement xi3 = ext_pow(tw.xi, 3 * tw.u);
    return Pt<ExtElement>::make(Ek, ext_mul(xi2, P.x), ext_mul(xi3, P.y));
}

Pt<ExtElement> twist_map_inverse(const TwistData& tw, const Pt<ExtElement>& Q,
                                 const CurveT<ExtElement>& Etw) {
    if (Q.infinity) return Q;
    ExtElement xi2 = ext_inv(ext_pow(tw.xi, 2 * tw.u));
    ExtElement xi3 = ext_inv(ext_pow(tw.xi, 3 * tw.u));
    return Pt<ExtElement>::make(Etw, ext_mul(xi2, Q.x), ext_mul(xi3, Q.y));
}

Pt<ExtElement> sample_subfield_point(const CurveT<ExtElement>& c, const ExtFieldSpec& spec,
                                     unsigned e, Rng& rng) {
    mpz_class pe;
    mpz_pow_ui(pe.get_mpz_t(), spec.p().get_mpz_t(), e);
    for (int tries = 0; tries < 4096; tries++) {
        ExtElement x = trace_to_subfield(random_element(spec, rng), e);
        ExtElement rhs = c.rhs(x);
        if (rhs.is_zero()) return Pt<ExtElement>::make(c, x, ExtElement::zero(spec));
        if (ext_pow(rhs, (pe - 1) / 2) != ExtElement::one(spec)) continue;
        auto y = ext_sqrt_subfield(rhs, e, rng);
        if (!y) continue;
        return Pt<ExtElement>::make(c, x, *y);
    }
    throw Error("sample_subfield_point: no point found");
}

TwistData build_twist(const CurveT<FpElement>& E1, const ExtFieldSpec& spec, unsigned d,
                      const mpz_class& r, const mpz_class& t, Rng& rng) {
    unsigned k = spec.k();
    if (!(d == 2 || d == 3 || d == 4 || d == 6) || k % d != 0)
        throw UnsupportedTwist("twist degree must be in {2,3,4,6} and divide k");
    if ((d == 3 || d == 6) && !E1.a.is_zero())
        throw UnsupportedTwist("twists of degree 3/6 need a = 0");
    if (d == 4 && !E1.b.is_zero()) throw UnsupportedTwist("twists of degree 4 need b = 0");
    unsigned e = k / d;
    const mpz_class& p = spec.p();
    mpz_class pe;
    mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), e);

    // xi with xi^d in F_{p^e} and F_{p^e}[xi] = F_{p^k}.
    ExtElement xi = ExtElement::zero(spec);
    if (spec.kind() == ModulusKind::Binomial) {
        xi = ExtElement::monomial(spec, 1);
    } else {
        if (d % 4 == 0 && pe % 4 != 1)
            throw UnsupportedTwist("quartic twist needs p^e = 1 mod 4");
        std::vector<unsigned> ells = prime_factors(d);
        ExtElement D = ExtElement::zero(spec);
        for (int tries = 0; tries < 4096 && D.is_zero(); tries++) {
            ExtElement cand = trace_to_subfield(random_element(spec, rng), e);
            if (cand.is_zero()) continue;
            bool nonres = true;
            for (unsigned ell : ells)
                if (ext_pow(cand, (pe - 1) / ell) == ExtElement::one(spec)) nonres = false;
            if (nonres) D = cand;
        }
        if (D.is_zero()) throw UnsupportedTwist("no degree-d non-residue found in F_{p^e}");
        ExtElement root = D;
        unsigned rem = d;
        auto full_sampler = [&]() { return random_element(spec, rng); };
        while (rem % 3 == 0) {
            auto c = nth_root_in_group(root, 3, spec.order() - 1, full_sampler);
            if (!c) throw Error("build_twist: cube root missing");
            root = *c;
            rem /= 3;
        }
        while (rem % 2 == 0) {
            auto c = nth_root_in_group(root, 2, spec.order() - 1, full_sampler);
            if (!c) throw Error("build_twist: square root missing");
            root = *c;
            rem /= 2;
        }
        xi = root;
    }

    // Candidate orders of the twists over F_{p^e} from the CM decomposition.
    mpz_class te = trace_ext(t, p, e);
    std::vector<mpz_class> traces{te, -te};
    mpz_class disc = 4 * pe - te * te;
    if (E1.a.is_zero()) {
        if (disc % 3 == 0) {
            mpz_class w2 = disc / 3, w, remz;
            mpz_sqrtrem(w.get_mpz_t(), remz.get_mpz_t(), w2.get_mpz_t());
            if (remz == 0) {
                traces.push_back((te + 3 * w) / 2);
                traces.push_back(-(te + 3 * w) / 2);
                traces.push_back((te - 3 * w) / 2);
                traces.push_back(-(te - 3 * w) / 2);
            }
        }
    }
    if (E1.b.is_zero()) {
        mpz_class w, remz;
        mpz_sqrtrem(w.get_mpz_t(), remz.get_mpz_t(), disc.get_mpz_t());
        if (remz == 0) {
            // disc = 4w'^2 with w = 2w'
            traces.push_back(w);
            traces.push_back(-w);
        }
    }
    std::vector<mpz_class> orders;
    for (const auto& tau : traces) {
        if (tau * tau > 4 * pe) continue;
        mpz_class n = pe + 1 - tau;
        if (n % r != 0) continue;
        bool dup = false;
        for (const auto& o : orders) dup = dup || o == n;
        if (!dup) orders.push_back(n);
    }
    if (orders.empty()) throw UnsupportedTwist("no twist order divisible by r");

    CurveT<ExtElement> Ek = embed_curve(E1, spec);
    for (unsigned u = 1; u <= d; u++) {
        ExtElement xiu4 = ext_inv(ext_pow(xi, 4 * u));
        ExtElement xiu6 = ext_inv(ext_pow(xi, 6 * u));
        ExtElement ap = ext_mul(ExtElement::from_base(spec, E1.a.value()), xiu4);
        ExtElement bp = ext_mul(ExtElement::from_base(spec, E1.b.value()), xiu6);
        if (!is_in_subfield(ap, e) || !is_in_subfield(bp, e)) continue;
        CurveT<ExtElement> Etw = CurveT<ExtElement>::make(ap, bp);
        TwistData tw{u, xi, Etw, 0};

        for (const auto& N : orders) {
            bool kills = true;
            for (int i = 0; i < 3 && kills; i++) {
                Pt<ExtElement> R = sample_subfield_point(Etw, spec, e, rng);
                kills = scalar_mul(N, R, Etw).infinity;
            }
            if (!kills) continue;
            // Candidate found; insist on an eigenvalue-q r-torsion point.
            unsigned v = 0;
            mpz_class cof = strip_r(N, r, v);
            for (int i = 0; i < 4; i++) {
                Pt<ExtElement> R = sample_subfield_point(Etw, spec, e, rng);
                Pt<ExtElement> S = to_order_r(scalar_mul(cof, R, Etw), r, Etw);
                if (S.infinity) continue;
                Pt<ExtElement> Q = twist_map(tw, S, Ek);
                if (!scalar_mul(r, Q, Ek).infinity) break;
                if (frobenius_point(Q, 1) == scalar_mul(p, Q, Ek)) {
                    tw.order = N;
                    return tw;
                }
                break;  // order-r point with the wrong eigenvalue: wrong class
            }
        }
    }
    throw UnsupportedTwist("no twist class carries the eigenvalue-q torsion");
}

Pt<FpElement> sample_g1(const PairingContext& ctx, std::uint64_t seed) {
    Rng rng(seed ^ 0x6731ULL);
    const PrimeField& F = *ctx.Fp;
    for (int tries = 0; tries < 65536; tries++) {
        FpElement x(F, rng.below(ctx.p));
        FpElement rhs = ctx.E1.rhs(x);
        std::optional<FpElement> y = fp_sqrt(rhs);
        if (!y) continue;
        Pt<FpElement> P = Pt<FpElement>::make(ctx.E1, x, *y);
        Pt<FpElement> P0 = scalar_mul(ctx.h1, P, ctx.E1);
        if (P0.infinity) continue;
        if (!scalar_mul(ctx.r, P0, ctx.E1).infinity)
            throw Error("sample_g1: cofactor-cleared point not of order r");
        return P0;
    }
    throw Error("sample_g1: exhausted retries");
}

Pt<ExtElement> sample_g2(const PairingContext& ctx, std::uint64_t seed) {
    Rng rng(seed ^ 0x673200ULL);
    const ExtFieldSpec& spec = *ctx.Fpk;

    if (ctx.has_twist) {
        unsigned v = 0;
        mpz_class cof = strip_r(ctx.twist.order, ctx.r, v);
        for (int tries = 0; tries < 4096; tries++) {
            Pt<ExtElement> R = sample_subfield_point(ctx.twist.curve, spec, ctx.e, rng);
            Pt<ExtElement> S = to_order_r(scalar_mul(cof, R, ctx.twist.curve), ctx.r,
                                          ctx.twist.curve);
            if (S.infinity) continue;
            Pt<ExtElement> Q = twist_map(ctx.twist, S, ctx.Ek);
            if (!scalar_mul(ctx.r, Q, ctx.Ek).infinity) throw Error("sample_g2: order check failed");
            if (!(frobenius_point(Q, 1) == scalar_mul(ctx.p, Q, ctx.Ek)))
                throw Error("sample_g2: twist image has wrong Frobenius eigenvalue");
            return Q;
        }
        throw Error("sample_g2: exhausted retries (twist route)");
    }

    // Twist-less fallback: cofactor clearing on E(F_{p^k}) plus the anti-trace
    // projection k*T - sum_i pi^i(T).
    mpz_class nk = curve_order_ext(ctx.t, ctx.p, ctx.k);
    unsigned v = 0;
    mpz_class cof = strip_r(nk, ctx.r, v);
    for (int tries = 0; tries < 4096; tries++) {
        ExtElement x = random_element(spec, rng);
        ExtElement rhs = ctx.Ek.rhs(x);
        auto y = ext_sqrt(rhs, rng);
        if (!y) continue;
        Pt<ExtElement> R = Pt<ExtElement>::make(ctx.Ek, x, *y);
        Pt<ExtElement> T = to_order_r(scalar_mul(cof, R, ctx.Ek), ctx.r, ctx.Ek);
        if (T.infinity) continue;
        Pt<ExtElement> Q = scalar_mul(ctx.k, T, ctx.Ek);
        for (unsigned i = 0; i < ctx.k; i++)
            Q = point_add(Q, point_neg(frobenius_point(T, i)), ctx.Ek);
        if (Q.infinity) continue;
        if (!scalar_mul(ctx.r, Q, ctx.Ek).infinity) continue;
        if (!(frobenius_point(Q, 1) == scalar_mul(ctx.p, Q, ctx.Ek))) continue;
        return Q;
    }
    throw Error("sample_g2: exhausted retries (projection route)");
}

}  // namespace pairing
