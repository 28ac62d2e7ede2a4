#include "pairing/pairings.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "pairing/final_exp.hpp"

namespace pairing {

namespace {

ExtElement reduce(const PairingContext& ctx, const FunctionValue& fv) {
    return final_exponentiation(fv.collapse(), ctx).value;
}

// Frobenius power applied to both parts of a function value.
FunctionValue frob_fv(const FunctionValue& fv, unsigned i) {
    if (i == 0) return fv;
    return {frobenius(fv.num, i), frobenius(fv.den, i)};
}

mpz_class pow_mpz(const mpz_class& b, unsigned e) {
    mpz_class out;
    mpz_pow_ui(out.get_mpz_t(), b.get_mpz_t(), e);
    return out;
}

}  // namespace

bool denominator_elimination_allowed(const PairingContext& ctx) {
    if (ctx.k % 2 != 0) return false;
    if (ctx.g2.infinity) return false;
    return is_in_subfield(ctx.g2.x, ctx.k / 2);
}

MillerFlags default_flags(const PairingContext& ctx) {
    MillerFlags f;
    f.denominator_elimination = denominator_elimination_allowed(ctx);
    f.use_lprime = !f.denominator_elimination;
    return f;
}

FunctionValue tate_unreduced(const PairingContext& ctx, const Pt<FpElement>& P,
                             const Pt<ExtElement>& Q, MillerVariant variant) {
    MillerFlags flags = default_flags(ctx);
    return miller_eval(variant, ctx.r, P, Q, ctx.E1, *ctx.Fpk, flags).fv;
}

FunctionValue weil_unreduced(const PairingContext& ctx, const Pt<FpElement>& P,
                             const Pt<ExtElement>& Q, MillerVariant variant) {
    // No final exponentiation cleans anything up here: keep full values.
    MillerFlags flags;
    flags.use_lprime = true;
    FunctionValue fP = miller_eval(variant, ctx.r, P, Q, ctx.E1, *ctx.Fpk, flags).fv;
    Pt<ExtElement> Pe = embed_point(P, *ctx.Fpk);
    FunctionValue fQ = miller_eval(variant, ctx.r, Q, Pe, ctx.Ek, *ctx.Fpk, flags).fv;
    // (-1)^r = -1 for odd prime r.
    return {-ext_mul(fP.num, fQ.den), ext_mul(fP.den, fQ.num)};
}

FunctionValue ate_unreduced(const PairingContext& ctx, const Pt<FpElement>& P,
                            const Pt<ExtElement>& Q, MillerVariant variant) {
    mpz_class T = ctx.t - 1;
    if (abs(T) <= 1) throw UsageError("ate: |t - 1| <= 1 is degenerate");
    MillerFlags flags = default_flags(ctx);
    Pt<ExtElement> Pe = embed_point(P, *ctx.Fpk);
    return miller_signed(variant, T, Q, Pe, ctx.Ek, *ctx.Fpk, flags).fv;
}

FunctionValue twisted_ate_unreduced(const PairingContext& ctx, const Pt<FpElement>& P,
                                    const Pt<ExtElement>& Q, bool reduce_multiplier,
                                    MillerVariant variant) {
    if (ctx.d <= 1) throw UnsupportedTwist("twisted ate needs a twist (d > 1)");
    mpz_class T = ctx.t - 1;
    mpz_class M = pow_mpz(T, ctx.e);
    if (reduce_multiplier) {
        M %= ctx.r;
        if (M < 0) M += ctx.r;
        if (M == 0) throw UsageError("twisted ate: multiplier vanishes mod r");
    }
    MillerFlags flags = default_flags(ctx);
    return miller_signed(variant, M, P, Q, ctx.E1, *ctx.Fpk, flags).fv;
}

namespace {

// f_{lambda,LoopPt}(EvalPt) with the +-1 shortcuts.
template <class L>
FunctionValue miller_coefficient(MillerVariant variant, const mpz_class& lambda, const Pt<L>& P,
                                 const Pt<ExtElement>& Q, const CurveT<L>& c,
                                 const ExtFieldSpec& spec, MillerFlags flags) {
    FunctionValue one = FunctionValue::one(spec);
    if (lambda == 0 || lambda == 1) return one;
    if (lambda == -1) {
        if (!flags.denominator_elimination) one.den = vertical_eval(P, Q, spec);
        return one;
    }
    return miller_signed(variant, lambda, P, Q, c, spec, flags).fv;
}

}  // namespace

FunctionValue optimal_ate_unreduced(const PairingContext& ctx, const Pt<FpElement>& P,
                                    const Pt<ExtElement>& Q, const OptimalVector& v,
                                    MillerVariant variant) {
    const ExtFieldSpec& spec = *ctx.Fpk;
    std::size_t n = v.lambda.size();
    while (n > 0 && v.lambda[n - 1] == 0) n--;
    if (n == 0) throw UsageError("optimal_ate: zero vector");
    MillerFlags flags = default_flags(ctx);
    const bool elim = flags.denominator_elimination;
    Pt<ExtElement> Pe = embed_point(P, *ctx.Fpk);

    bool eigen = frobenius_point(Q, 1) == scalar_mul(ctx.p, Q, ctx.Ek);

    // U_i = lambda_i q^i Q and the tail sums S_i = sum_{j >= i} lambda_j q^j Q.
    std::vector<Pt<ExtElement>> U(n);
    for (std::size_t i = 0; i < n; i++) {
        if (v.lambda[i] == 0) {
            U[i] = Pt<ExtElement>::at_infinity();
            continue;
        }
        if (eigen) {
            U[i] = frobenius_point(scalar_mul(v.lambda[i], Q, ctx.Ek), static_cast<unsigned>(i));
        } else {
            mpz_class qi;
            mpz_powm_ui(qi.get_mpz_t(), ctx.p.get_mpz_t(), static_cast<unsigned long>(i),
                        ctx.r.get_mpz_t());
            mpz_class s = v.lambda[i] * qi % ctx.r;
            U[i] = scalar_mul(s, Q, ctx.Ek);
        }
    }
    std::vector<Pt<ExtElement>> S(n + 1);
    S[n - 1] = U[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) S[i] = point_add(S[i + 1], U[i], ctx.Ek);
    if (!S[0].infinity) throw Error("optimal_ate: lattice vector does not annihilate Q");

    FunctionValue acc = FunctionValue::one(spec);
    for (std::size_t i = 0; i < n; i++) {
        FunctionValue fi = miller_coefficient(variant, v.lambda[i], Q, Pe, ctx.Ek, spec, flags);
        acc = acc * frob_fv(fi, static_cast<unsigned>(i));
    }
    for (std::size_t i = 0; i + 1 < n; i++) {
        const Pt<ExtElement>& A = S[i + 1];
        const Pt<ExtElement>& B = U[i];
        bool vertical_line =
            A.infinity || B.infinity || (A.x == B.x && (A.y + B.y).is_zero());
        if (!vertical_line)
            acc.num = ext_mul(acc.num, line_eval(A, B, Pe, ctx.Ek, spec));
        else if (!elim && !(A.infinity && B.infinity))
            acc.num = ext_mul(acc.num, vertical_eval(A.infinity ? B : A, Pe, spec));
        if (!elim && !S[i].infinity)
            acc.den = ext_mul(acc.den, vertical_eval(S[i], Pe, spec));
    }
    return acc;
}

FunctionValue optimal_twisted_unreduced(const PairingContext& ctx, const Pt<FpElement>& P,
                                        const Pt<ExtElement>& Q, const OptimalVector& v,
                                        MillerVariant variant) {
    if (!(ctx.d == 3 || ctx.d == 4 || ctx.d == 6))
        return twisted_ate_unreduced(ctx, P, Q, false, variant);
    const ExtFieldSpec& spec = *ctx.Fpk;
    if (v.lambda.empty()) throw UsageError("optimal_twisted: empty vector");
    mpz_class l0 = v.lambda[0];
    mpz_class l1 = v.lambda.size() > 1 ? v.lambda[1] : mpz_class(0);
    MillerFlags flags = default_flags(ctx);

    FunctionValue f0 = miller_coefficient(variant, l0, P, Q, ctx.E1, spec, flags);
    FunctionValue f1 = miller_coefficient(variant, l1, P, Q, ctx.E1, spec, flags);
    FunctionValue acc = f0 * frob_fv(f1, ctx.e);
    if (!flags.denominator_elimination) {
        Pt<FpElement> T0 = scalar_mul(l0, P, ctx.E1);
        if (!T0.infinity) acc.num = ext_mul(acc.num, vertical_eval(T0, Q, spec));
    }
    return acc;
}

ExtElement weil(const PairingContext& ctx, const Pt<FpElement>& P, const Pt<ExtElement>& Q,
                MillerVariant variant) {
    return weil_unreduced(ctx, P, Q, variant).collapse();
}

ExtElement tate_reduced(const PairingContext& ctx, const Pt<FpElement>& P,
                        const Pt<ExtElement>& Q, MillerVariant variant) {
    return reduce(ctx, tate_unreduced(ctx, P, Q, variant));
}

ExtElement ate(const PairingContext& ctx, const Pt<FpElement>& P, const Pt<ExtElement>& Q,
               MillerVariant variant) {
    return reduce(ctx, ate_unreduced(ctx, P, Q, variant));
}

ExtElement twisted_ate(const PairingContext& ctx, const Pt<FpElement>& P, const Pt<ExtElement>& Q,
                       bool reduce_multiplier, MillerVariant variant) {
    return reduce(ctx, twisted_ate_unreduced(ctx, P, Q, reduce_multiplier, variant));
}

ExtElement optimal_ate(const PairingContext& ctx, const Pt<FpElement>& P, const Pt<ExtElement>& Q,
                       const OptimalVector& v) {
    MillerVariant variant =
        ctx.k % 2 == 0 ? MillerVariant::Naf : MillerVariant::BoxallNaf;
    return reduce(ctx, optimal_ate_unreduced(ctx, P, Q, v, variant));
}

ExtElement optimal_twisted(const PairingContext& ctx, const Pt<FpElement>& P,
                           const Pt<ExtElement>& Q, const OptimalVector& v) {
    MillerVariant variant =
        ctx.k % 2 == 0 ? MillerVariant::Naf : MillerVariant::BoxallNaf;
    return reduce(ctx, optimal_twisted_unreduced(ctx, P, Q, v, variant));
}

// ---------------------------------------------------------------------------
// Exact LLL.

namespace {

using QRow = std::vector<mpq_class>;

mpz_class round_nearest(const mpq_class& q) {
    // floor(q + 1/2)
    mpz_class num = 2 * q.get_num() + q.get_den();
    mpz_class den = 2 * q.get_den();
    mpz_class out;
    mpz_fdiv_q(out.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    return out;
}

struct GramSchmidt {
    std::vector<QRow> mu;
    std::vector<mpq_class> B;  // squared norms of the orthogonal vectors

    void compute(const std::vector<std::vector<mpz_class>>& b) {
        std::size_t n = b.size(), dim = b[0].size();
        std::vector<QRow> star(n, QRow(dim, mpq_class(0)));
        mu.assign(n, QRow(n, mpq_class(0)));
        B.assign(n, mpq_class(0));
        for (std::size_t i = 0; i < n; i++) {
            for (std::size_t c = 0; c < dim; c++) star[i][c] = mpq_class(b[i][c]);
            for (std::size_t j = 0; j < i; j++) {
                mpq_class dot = 0;
                for (std::size_t c = 0; c < dim; c++) dot += mpq_class(b[i][c]) * star[j][c];
                if (B[j] == 0) throw RankError("lll_reduce: dependent rows");
                mu[i][j] = dot / B[j];
                for (std::size_t c = 0; c < dim; c++) star[i][c] -= mu[i][j] * star[j][c];
            }
            for (std::size_t c = 0; c < dim; c++) B[i] += star[i][c] * star[i][c];
            if (B[i] == 0) throw RankError("lll_reduce: dependent rows");
        }
    }
};

}  // namespace

std::vector<std::vector<mpz_class>> lll_reduce(std::vector<std::vector<mpz_class>> basis,
                                               const mpq_class& delta) {
    if (basis.empty()) return basis;
    std::size_t n = basis.size();
    if (n > 24) throw UsageError("lll_reduce: dimension cap is 24");
    for (const auto& row : basis)
        if (row.size() != basis[0].size()) throw UsageError("lll_reduce: ragged matrix");

    GramSchmidt gs;
    gs.compute(basis);
    auto size_reduce_row = [&](std::size_t k) {
        for (std::size_t j = k; j-- > 0;) {
            mpq_class m = gs.mu[k][j];
            if (2 * abs(m.get_num()) * 1 <= m.get_den() * 1) continue;  // |mu| <= 1/2
            mpz_class r = round_nearest(m);
            for (std::size_t c = 0; c < basis[k].size(); c++) basis[k][c] -= r * basis[j][c];
            for (std::size_t jj = 0; jj <= j; jj++) gs.mu[k][jj] -= mpq_class(r) * gs.mu[j][jj];
            gs.mu[k][j] = m - mpq_class(r);
        }
    };

    std::size_t k = 1;
    while (k < n) {
        size_reduce_row(k);
        mpq_class lhs = gs.B[k];
        mpq_class rhs = (delta - gs.mu[k][k - 1] * gs.mu[k][k - 1]) * gs.B[k - 1];
        if (lhs >= rhs) {
            k++;
        } else {
            std::swap(basis[k], basis[k - 1]);
            gs.compute(basis);
            k = k > 1 ? k - 1 : 1;
        }
    }
    // Re-derive mu once more so the size-reduction property holds exactly.
    gs.compute(basis);
    for (std::size_t i = 1; i < n; i++) size_reduce_row(i);
    return basis;
}

// ---------------------------------------------------------------------------
// Optimal vector search.

namespace {

struct RankedVector {
    std::vector<mpz_class> lambda;
    mpz_class m;
    mpz_class cost;
    mpz_class inf_norm;
};

// Miller-loop doublings the entry costs; +-1 entries come free (f_1 = 1,
// f_-1 = 1/v_P), negatives pay for the extra vertical.
mpz_class entry_cost(const mpz_class& l) {
    if (l == 0 || l == 1) return 0;
    if (l == -1) return 1;
    mpz_class c = static_cast<long>(bitlen(l < 0 ? mpz_class(-l) : l) - 1);
    if (l < 0) c += 1;
    return c;
}

}  // namespace

OptimalVector find_optimal_vector(const PairingContext& ctx, VectorForm form) {
    unsigned dim;
    mpz_class base;
    if (form == VectorForm::Ate) {
        unsigned phi = 1;
        for (unsigned i = 2; i <= ctx.k; i++) {
            unsigned g = std::gcd(i, ctx.k);
            if (g == 1) phi++;
        }
        dim = phi;
        base = ctx.p;
    } else {
        dim = 2;
        base = pow_mpz(ctx.t - 1, ctx.e);
    }
    if (dim < 2) throw UsageError("find_optimal_vector: lattice dimension < 2");

    std::vector<std::vector<mpz_class>> rows(dim, std::vector<mpz_class>(dim, mpz_class(0)));
    rows[0][0] = ctx.r;
    for (unsigned i = 1; i < dim; i++) {
        mpz_class bi;
        mpz_powm_ui(bi.get_mpz_t(), base.get_mpz_t(), i, ctx.r.get_mpz_t());
        rows[i][0] = -bi;
        rows[i][i] = 1;
    }
    std::vector<std::vector<mpz_class>> red = lll_reduce(rows);

    // Candidates: reduced rows plus pairwise sums and differences.
    std::vector<std::vector<mpz_class>> cands;
    auto push = [&](std::vector<mpz_class> v) {
        bool zero = true;
        for (const auto& x : v) zero = zero && x == 0;
        if (zero) return;
        for (auto& x : v)
            if (x != 0) {
                if (x < 0)
                    for (auto& y : v) y = -y;
                break;
            }
        for (const auto& c : cands)
            if (c == v) return;
        cands.push_back(std::move(v));
    };
    for (const auto& rrow : red) push(rrow);
    for (std::size_t i = 0; i < red.size(); i++) {
        for (std::size_t j = i + 1; j < red.size(); j++) {
            std::vector<mpz_class> s(dim), dvec(dim);
            for (unsigned c = 0; c < dim; c++) {
                s[c] = red[i][c] + red[j][c];
                dvec[c] = red[i][c] - red[j][c];
            }
            push(std::move(s));
            push(std::move(dvec));
        }
    }
    if (dim == 2) {
        // small enough to enumerate a whole coefficient grid
        for (long a = -5; a <= 5; a++) {
            for (long b = -5; b <= 5; b++) {
                std::vector<mpz_class> v(2);
                for (unsigned c = 0; c < 2; c++) v[c] = a * red[0][c] + b * red[1][c];
                push(std::move(v));
            }
        }
    } else if (dim <= 4) {
        // {-2..2}^dim grid: surfaces single-long-entry combinations such as
        // the BN (6x+2, 1, -1, 1) that row sums alone miss
        std::vector<long> coeff(dim, -2);
        for (;;) {
            std::vector<mpz_class> v(dim, mpz_class(0));
            for (unsigned i = 0; i < dim; i++)
                for (unsigned c = 0; c < dim; c++) v[c] += coeff[i] * red[i][c];
            push(std::move(v));
            unsigned pos = 0;
            while (pos < dim && ++coeff[pos] > 2) coeff[pos++] = -2;
            if (pos == dim) break;
        }
    } else {
        // triples of reduced rows with all sign patterns
        for (std::size_t i = 0; i < red.size(); i++)
            for (std::size_t j = i + 1; j < red.size(); j++)
                for (std::size_t l = j + 1; l < red.size(); l++)
                    for (int sj : {1, -1})
                        for (int sl : {1, -1}) {
                            std::vector<mpz_class> v(dim);
                            for (unsigned c = 0; c < dim; c++)
                                v[c] = red[i][c] + sj * red[j][c] + sl * red[l][c];
                            push(std::move(v));
                        }
    }

    std::vector<RankedVector> ranked;
    for (const auto& v : cands) {
        mpz_class lam = 0, bi = 1;
        for (unsigned i = 0; i < dim; i++) {
            lam += v[i] * bi;
            bi *= base;
        }
        if (lam % ctx.r != 0) throw Error("find_optimal_vector: candidate outside lattice");
        mpz_class m = lam / ctx.r;
        if (m == 0 || m % ctx.r == 0) continue;
        RankedVector rv{v, m, 0, 0};
        for (const auto& l : v) {
            rv.cost += entry_cost(l);
            mpz_class a = abs(l);
            if (a > rv.inf_norm) rv.inf_norm = a;
        }
        ranked.push_back(std::move(rv));
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedVector& a, const RankedVector& b) {
        if (a.cost != b.cost) return a.cost < b.cost;
        if (a.inf_norm != b.inf_norm) return a.inf_norm < b.inf_norm;
        // prefer support at low indices (picks one representative among the
        // base^j shifts of the same relation)
        for (std::size_t i = 0; i < a.lambda.size(); i++) {
            mpz_class aa = abs(a.lambda[i]), ab = abs(b.lambda[i]);
            if (aa != ab) return aa > ab;
        }
        return a.lambda > b.lambda;
    });

    for (const auto& rv : ranked) {
        OptimalVector v{rv.lambda, base, rv.m};
        try {
            ExtElement val =
                form == VectorForm::Ate
                    ? optimal_ate(ctx, ctx.g1, ctx.g2, v)
                    : optimal_twisted(ctx, ctx.g1, ctx.g2, v);
            if (val != ExtElement::one(*ctx.Fpk)) return v;
        } catch (const Error&) {
            continue;  // degenerate candidate; try the next one
        }
    }
    throw SearchFailure("find_optimal_vector: all short candidates degenerate");
}

VerifyReport verify_pairing(const PairingFn& e, const PairingContext& ctx, unsigned trials,
                            std::uint64_t seed) {
    VerifyReport rep;
    rep.trials = trials;
    Rng rng(seed ^ 0x76657266ULL);
    const ExtElement one = ExtElement::one(*ctx.Fpk);

    ExtElement basev = e(ctx.g1, ctx.g2);
    rep.in_mu_r = ext_pow(basev, ctx.r) == one;
    rep.nondegenerate = basev != one;
    if (!rep.in_mu_r) rep.detail += "value^r != 1; ";
    if (!rep.nondegenerate) rep.detail += "e(P,Q) = 1; ";

    for (unsigned i = 0; i < trials; i++) {
        mpz_class a = rng.below(ctx.r - 1) + 1;
        mpz_class b = rng.below(ctx.r - 1) + 1;
        try {
            Pt<FpElement> Pa = scalar_mul(a, ctx.g1, ctx.E1);
            Pt<ExtElement> Qb = scalar_mul(b, ctx.g2, ctx.Ek);
            ExtElement lhs = e(Pa, Qb);
            ExtElement rhs = ext_pow(basev, a * b % ctx.r);
            if (lhs != rhs) {
                rep.bilinear = false;
                rep.detail += "bilinearity failed at trial " + std::to_string(i) + "; ";
                break;
            }
        } catch (const DegenerateEval&) {
            i--;  // re-randomize the scalar pair and retry
        }
    }
    return rep;
}

PairingFn pairing_by_name(const PairingContext& ctx, const std::string& name) {
    if (name == "weil")
        return [&ctx](const Pt<FpElement>& P, const Pt<ExtElement>& Q) { return weil(ctx, P, Q); };
    if (name == "tate")
        return [&ctx](const Pt<FpElement>& P, const Pt<ExtElement>& Q) {
            return tate_reduced(ctx, P, Q);
        };
    if (name == "ate")
        return [&ctx](const Pt<FpElement>& P, const Pt<ExtElement>& Q) { return ate(ctx, P, Q); };
    if (name == "twisted-ate") {
        if (ctx.d <= 1) throw UnsupportedTwist("twisted-ate unavailable: no twist");
        return [&ctx](const Pt<FpElement>& P, const Pt<ExtElement>& Q) {
            return twisted_ate(ctx, P, Q);
        };
    }
    if (name == "optimal-ate") {
        if (!ctx.has_ate_vector) throw UsageError("context has no optimal-ate vector");
        return [&ctx](const Pt<FpElement>& P, const Pt<ExtElement>& Q) {
            return optimal_ate(ctx, P, Q, ctx.ate_vec);
        };
    }
    if (name == "optimal-twisted") {
        if (!ctx.has_twisted_vector) throw UsageError("context has no optimal-twisted vector");
        return [&ctx](const Pt<FpElement>& P, const Pt<ExtElement>& Q) {
            return optimal_twisted(ctx, P, Q, ctx.twisted_vec);
        };
    }
    throw UsageError("unknown pairing name: " + name);
}

std::vector<std::string> pairing_names(const PairingContext& ctx) {
    std::vector<std::string> names{"weil", "tate", "ate"};
    if (ctx.d > 1) names.push_back("twisted-ate");
    if (ctx.has_ate_vector) names.push_back("optimal-ate");
    if (ctx.has_twisted_vector && ctx.d > 1) names.push_back("optimal-twisted");
    return names;
}

}  // namespace pairing
