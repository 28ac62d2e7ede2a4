#include "pairing/families.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include "pairing/pairings.hpp"

namespace pairing {

namespace {

RationalPoly rp(std::vector<long> coeffs, long den = 1) {
    std::vector<mpq_class> v;
    v.reserve(coeffs.size());
    for (long c : coeffs) v.emplace_back(c, den);
    return RationalPoly(std::move(v));
}

// 4q - t^2 = cm * y^2 for one of the usual CM discriminant coefficients.
void attach_cm(CurveFamily& f) {
    RationalPoly disc = f.q * mpq_class(4) - f.t * f.t;
    for (long cm : {3, 4, 1, 2, 7, 8, 11, 19, 43, 67, 163}) {
        try {
            f.y = poly_sqrt(disc * mpq_class(1, cm));
            f.cm_d = static_cast<unsigned>(cm);
            return;
        } catch (const Error&) {
        }
    }
    throw Error("family " + f.name + ": no CM decomposition found");
}

std::pair<mpz_class, mpz_class> strip_small_primes(const mpz_class& n,
                                                   const mpz_class& cof_bound) {
    mpz_class rest = n, cof = 1;
    for (unsigned q = 2; q < 100000 && rest > 1; q = (q == 2 ? 3 : q + 2)) {
        while (rest % q == 0 && cof * q <= cof_bound) {
            rest /= q;
            cof *= q;
        }
        mpz_class qq(q);
        if (qq * qq > rest) break;
    }
    return {rest, cof};
}

// The r-part of E(F_{p^k}) must be exactly (Z/r)^2, else the fixed G2
// representative can fall into rE(F_{p^k}) and every Tate-direction pairing
// collapses to 1.
bool r_part_is_full_torsion_only(const mpz_class& t, const mpz_class& p, unsigned k,
                                 const mpz_class& r) {
    mpz_class nk = curve_order_ext(t, p, k);
    unsigned v = 0;
    while (nk % r == 0) {
        nk /= r;
        v++;
    }
    return v == 2;
}

bool order_of_p_is_k(const mpz_class& p, const mpz_class& r, unsigned k) {
    mpz_class pk;
    mpz_powm_ui(pk.get_mpz_t(), p.get_mpz_t(), k, r.get_mpz_t());
    if (pk != 1) return false;
    for (unsigned ell : prime_factors(k)) {
        mpz_class pj;
        mpz_powm_ui(pj.get_mpz_t(), p.get_mpz_t(), k / ell, r.get_mpz_t());
        if (pj == 1) return false;
    }
    return true;
}

Pt<FpElement> sample_point_fp(const CurveT<FpElement>& c, const PrimeField& F, Rng& rng) {
    for (int tries = 0; tries < 4096; tries++) {
        FpElement x(F, rng.below(F.p()));
        auto y = fp_sqrt(c.rhs(x));
        if (y) return Pt<FpElement>::make(c, x, *y);
    }
    throw Error("sample_point_fp: no point found");
}

std::vector<CurveFamily> build_catalog() {
    std::vector<CurveFamily> out;

    {
        CurveFamily f;
        f.name = "BN";
        f.k = 12;
        f.d = 6;
        f.construction = "6.8";
        f.q = rp({1, 6, 24, 36, 36});
        f.r = rp({1, 6, 18, 36, 36});
        f.t = rp({1, 0, 6});
        f.cong = Congruence{1, {0}};
        f.table_degrees = {4, 4, 2};
        out.push_back(std::move(f));
    }
    {
        // Cyclotomic family with r = Phi_18(x)/3, q == x^16 mod r.
        CurveFamily f;
        f.name = "E9";
        f.k = 9;
        f.d = 3;
        f.construction = "6.6";
        f.q = rp({1, 2, 1, -1, -2, -1, 1, -1, 1}, 3);
        f.r = rp({1, 0, 0, -1, 0, 0, 1}, 3);
        f.t = rp({1, 1, 0, 0, -1});
        f.cong = Congruence{3, {2}};
        f.table_degrees = {8, 6, 4};
        out.push_back(std::move(f));
    }
    {
        // Same construction one level up: r = Phi_54(x)/3, q == x^46 mod r.
        CurveFamily f;
        f.name = "E27";
        f.k = 27;
        f.d = 3;
        f.construction = "6.6";
        f.q = rp({1, 2, 1, 0, 0, 0, 0, 0, 0, -1, -2, -1, 0, 0, 0, 0, 0, 0, 1, -1, 1}, 3);
        f.r = rp({1, 0, 0, 0, 0, 0, 0, 0, 0, -1, 0, 0, 0, 0, 0, 0, 0, 0, 1}, 3);
        f.t = rp({1, 1, 0, 0, 0, 0, 0, 0, 0, 0, -1});
        f.cong = Congruence{3, {2}};
        f.table_degrees = {20, 18, 10};
        out.push_back(std::move(f));
    }
    {
        CurveFamily f;
        f.name = "BLS24";
        f.k = 24;
        f.d = 6;
        f.construction = "6.6";
        f.q = rp({1, 1, 1, 0, -1, 2, -1, 0, 1, -2, 1}, 3);
        f.r = rp({1, 0, 0, 0, -1, 0, 0, 0, 1});
        f.t = rp({1, 1});
        f.cong = Congruence{3, {1}};
        f.table_degrees = {10, 8, 1};
        out.push_back(std::move(f));
    }
    {
        CurveFamily f;
        f.name = "KSS16";
        f.k = 16;
        f.d = 4;
        f.construction = "6.11";
        f.q = rp({3125, 2398, 625, 0, 240, 152, 48, 0, 5, 2, 1}, 980);
        f.r = rp({625, 0, 0, 0, 48, 0, 0, 0, 1});
        f.t = rp({35, 41, 0, 0, 0, 2}, 35);
        f.cong = Congruence{70, {25, 45}};
        f.allow_r_cofactor = true;
        f.r_cofactor_bound = mpz_class(100000000);
        f.table_degrees = {10, 8, 5};
        out.push_back(std::move(f));
    }
    {
        CurveFamily f;
        f.name = "KSS18";
        f.k = 18;
        f.d = 6;
        f.construction = "6.12";
        f.q = rp({2401, 1763, 343, 259, 188, 37, 7, 5, 1}, 21);
        f.r = rp({343, 0, 0, 37, 0, 0, 1});
        f.t = rp({7, 16, 0, 0, 1}, 7);
        f.cong = Congruence{42, {14}};
        f.allow_r_cofactor = true;
        f.r_cofactor_bound = mpz_class(100000000);
        f.table_degrees = {8, 6, 4};
        out.push_back(std::move(f));
    }

    for (auto& f : out) {
        attach_cm(f);
        FamilyReport rep = family_verify(f);
        if (!rep.all_ok())
            throw Error("family " + f.name + " failed registration: " + rep.detail);
    }
    return out;
}

}  // namespace

FamilyReport family_verify(const CurveFamily& f) {
    FamilyReport rep;
    RationalPoly order = f.q + RationalPoly::constant(1) - f.t;
    rep.r_divides_order = order.divisible_by(f.r);
    if (!rep.r_divides_order) rep.detail += "r(x) does not divide q(x)+1-t(x); ";

    RationalPoly phi_q = compose(cyclotomic_poly(f.k), f.q);
    rep.r_divides_phi = phi_q.divisible_by(f.r);
    if (!rep.r_divides_phi) rep.detail += "r(x) does not divide Phi_k(q(x)); ";

    RationalPoly disc = f.q * mpq_class(4) - f.t * f.t;
    rep.cm_equation = disc == f.y * f.y * mpq_class(static_cast<long>(f.cm_d));
    if (!rep.cm_equation) rep.detail += "CM equation 4q - t^2 = D y^2 fails; ";

    rep.degrees_match = f.q.degree() == f.table_degrees[0] && f.r.degree() == f.table_degrees[1] &&
                        f.t.degree() == f.table_degrees[2];
    if (!rep.degrees_match) rep.detail += "degree row mismatch; ";

    // Numeric spot check of k-minimality at up to three instantiable seeds.
    unsigned found = 0;
    for (mpz_class x = 1; x < 6000 && found < 3; x++) {
        for (int sign = 0; sign < 2; sign++) {
            mpz_class x0 = sign ? mpz_class(-x) : x;
            if (!f.cong.admits(x0)) continue;
            if (!f.q.integral_at(x0) || !f.r.integral_at(x0) || !f.t.integral_at(x0)) continue;
            mpz_class p = f.q.eval_integer(x0);
            mpz_class rr = f.r.eval_integer(x0);
            if (p < 5 || rr < 3) continue;
            auto [r0, cof] = f.allow_r_cofactor ? strip_small_primes(rr, f.r_cofactor_bound)
                                                : std::make_pair(rr, mpz_class(1));
            if (r0 < 3 || !is_probable_prime(r0, 16) || !is_probable_prime(p, 16)) continue;
            if ((p - 1) % r0 == 0) continue;
            found++;
            if (!order_of_p_is_k(p, r0, f.k)) {
                rep.detail += "k not minimal at x0 = " + x0.get_str() + "; ";
                rep.k_minimal_spotcheck = false;
                return rep;
            }
            if (found >= 3) break;
        }
    }
    rep.k_minimal_spotcheck = found > 0;
    if (found == 0) rep.detail += "no instantiable seed found for the spot check; ";
    return rep;
}

const std::vector<CurveFamily>& family_catalog() {
    static const std::vector<CurveFamily> catalog = build_catalog();
    return catalog;
}

const CurveFamily& family_by_name(const std::string& name) {
    for (const auto& f : family_catalog())
        if (f.name == name) return f;
    throw UsageError("unknown curve family: " + name);
}

std::vector<Candidate> search_x0(const CurveFamily& f, unsigned target_r_bits,
                                 const SearchConstraints& cons) {
    mpz_class cof_bound = cons.r_cofactor_bound != 0 ? cons.r_cofactor_bound
                                                     : f.r_cofactor_bound;
    if (!f.allow_r_cofactor && cons.r_cofactor_bound == 0) cof_bound = 1;

    // |x| window from the leading coefficient of r(x). Families that admit an
    // r-cofactor need headroom above the target: the stripped prime is up to
    // log2(cofactor bound) bits below the raw r(x0).
    int deg = f.r.degree();
    mpq_class lead = f.r.coeff(deg);
    unsigned extra_high = cof_bound > 1 ? bitlen(cof_bound) + 1 : 2;
    mpz_class lo_n = (mpz_class(1) << (target_r_bits > 3 ? target_r_bits - 3 : 1)) *
                     lead.get_den() / std::max<mpz_class>(lead.get_num(), 1);
    mpz_class hi_n = ((mpz_class(1) << (target_r_bits + extra_high)) * lead.get_den() +
                      lead.get_num() - 1) /
                     std::max<mpz_class>(lead.get_num(), 1);
    mpz_class x_lo, x_hi;
    mpz_root(x_lo.get_mpz_t(), lo_n.get_mpz_t(), deg);
    mpz_root(x_hi.get_mpz_t(), hi_n.get_mpz_t(), deg);
    if (x_lo < 1) x_lo = 1;
    x_hi += 1;

    struct Raw {
        mpz_class x;
        unsigned w;
    };
    std::vector<Raw> xs;
    std::size_t tested = 0;
    for (mpz_class x = x_lo; x <= x_hi && tested < cons.max_tested; x++, tested++) {
        for (int sign = 0; sign < 2; sign++) {
            mpz_class x0 = sign ? mpz_class(-x) : x;
            if (!f.cong.admits(x0)) continue;
            unsigned w = static_cast<unsigned>(naf_weight(x));
            if (w > cons.max_naf_weight) continue;
            xs.push_back({x0, w});
        }
    }
    std::sort(xs.begin(), xs.end(), [](const Raw& a, const Raw& b) {
        if (a.w != b.w) return a.w < b.w;
        mpz_class aa = abs(a.x), ab = abs(b.x);
        if (aa != ab) return aa < ab;
        return a.x > b.x;
    });

    std::vector<Candidate> out;
    for (const auto& raw : xs) {
        if (out.size() >= cons.max_results) break;
        const mpz_class& x0 = raw.x;
        if (!f.q.integral_at(x0) || !f.r.integral_at(x0) || !f.t.integral_at(x0) ||
            !f.y.integral_at(x0))
            continue;
        mpz_class p = f.q.eval_integer(x0);
        mpz_class rr = f.r.eval_integer(x0);
        mpz_class t = f.t.eval_integer(x0);
        if (p < 5 || rr < 3) continue;
        auto [r0, cof] = strip_small_primes(rr, cof_bound);
        if (cof > cof_bound || r0 < 3) continue;
        unsigned rb = bitlen(r0);
        if (rb + 1 < target_r_bits || rb > target_r_bits + 1) continue;
        if (!is_probable_prime(r0, 64) || !is_probable_prime(p, 64)) continue;
        if ((p + 1 - t) % r0 != 0) continue;
        if ((p - 1) % r0 == 0) continue;
        if (t * t > 4 * p) continue;
        if (!order_of_p_is_k(p, r0, f.k)) continue;
        if (!r_part_is_full_torsion_only(t, p, f.k, r0)) continue;
        Candidate c;
        c.x0 = x0;
        c.p = p;
        c.r = r0;
        c.t = t;
        c.r_cofactor = cof;
        c.naf_weight = raw.w;
        c.binomial = binomial_criterion_holds(p, f.k);
        if (cons.require_binomial && !c.binomial) continue;
        out.push_back(std::move(c));
    }
    return out;
}

std::unique_ptr<PairingContext> instantiate(const CurveFamily& f, const mpz_class& x0) {
    if (!f.cong.admits(x0)) throw InvalidContext("x0 violates the family congruence");
    if (!f.q.integral_at(x0) || !f.r.integral_at(x0) || !f.t.integral_at(x0))
        throw InvalidContext("family polynomials not integral at x0");

    auto ctx = std::make_unique<PairingContext>();
    ctx->family = f.name;
    ctx->x0 = x0;
    ctx->k = f.k;
    ctx->d = f.d;
    ctx->e = f.k / f.d;
    ctx->p = f.q.eval_integer(x0);
    ctx->t = f.t.eval_integer(x0);

    mpz_class rr = f.r.eval_integer(x0);
    auto [r0, cof] = f.allow_r_cofactor ? strip_small_primes(rr, f.r_cofactor_bound)
                                        : std::make_pair(rr, mpz_class(1));
    ctx->r = r0;
    ctx->r_cofactor = cof;

    if (!is_probable_prime(ctx->p, 64)) throw InvalidContext("q(x0) is not prime");
    if (!is_probable_prime(ctx->r, 64)) throw InvalidContext("r(x0) has no large prime part");
    mpz_class n1 = ctx->p + 1 - ctx->t;
    if (n1 % ctx->r != 0) throw InvalidContext("r does not divide the curve order");
    ctx->h1 = n1 / ctx->r;
    if (ctx->t * ctx->t > 4 * ctx->p) throw InvalidContext("trace violates the Hasse bound");
    if ((ctx->p - 1) % ctx->r == 0) throw InvalidContext("r divides q - 1");
    if (!order_of_p_is_k(ctx->p, ctx->r, ctx->k))
        throw InvalidContext("embedding degree is not minimal");
    if (!r_part_is_full_torsion_only(ctx->t, ctx->p, ctx->k, ctx->r))
        throw InvalidContext("r^3 divides #E(F_{p^k}); G2 class in E/rE would be trivial");

    ctx->Fp = std::make_shared<const PrimeField>(ctx->p);
    const PrimeField& F = *ctx->Fp;

    // Smallest curve coefficient giving the order q + 1 - t: three random
    // points must be killed by n1, then a cofactor-cleared point must have
    // exact order r.
    Rng crng(0xb0b5 + mpz_class(x0 % 65521).get_si());
    bool curve_found = false;
    for (long coeff = 1; coeff <= 4096 && !curve_found; coeff++) {
        FpElement a(F, f.d == 4 ? coeff : 0);
        FpElement b(F, f.d == 4 ? 0 : coeff);
        if ((4 * a.value() * a.value() * a.value() + 27 * b.value() * b.value()) % F.p() == 0)
            continue;
        CurveT<FpElement> cand{a, b};
        bool ok = true;
        for (int i = 0; i < 3 && ok; i++)
            ok = scalar_mul(n1, sample_point_fp(cand, F, crng), cand).infinity;
        if (!ok) continue;
        ctx->E1 = cand;
        try {
            Pt<FpElement> probe = sample_g1(*ctx, 0xace);
            (void)probe;
            curve_found = true;
        } catch (const Error&) {
        }
    }
    if (!curve_found) throw InvalidContext("no curve coefficient matched the target order");

    ctx->Fpk = find_defining_polynomial(ctx->Fp, ctx->k);
    ctx->Ek = embed_curve(ctx->E1, *ctx->Fpk);

    if (ctx->d > 1) {
        Rng trng(0x7719);
        ctx->twist = build_twist(ctx->E1, *ctx->Fpk, ctx->d, ctx->r, ctx->t, trng);
        ctx->has_twist = true;
    }

    ctx->g1 = sample_g1(*ctx, 1);
    ctx->g2 = sample_g2(*ctx, 2);

    ctx->ate_vec = find_optimal_vector(*ctx, VectorForm::Ate);
    ctx->has_ate_vector = true;
    if (ctx->d == 3 || ctx->d == 4 || ctx->d == 6) {
        ctx->twisted_vec = find_optimal_vector(*ctx, VectorForm::Twisted);
        ctx->has_twisted_vector = true;
    }
    return ctx;
}

std::vector<std::vector<mpq_class>> sbcpk_lambda_table(const CurveFamily& f) {
    // the symbolic decomposition only depends on the family
    static std::map<std::string, std::vector<std::vector<mpq_class>>> cache;
    static std::mutex mu;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(f.name);
        if (it != cache.end()) return it->second;
    }
    RationalPoly N = compose(cyclotomic_poly(f.k), f.q).divide_exact(f.r);
    std::vector<std::vector<mpq_class>> rows;
    unsigned degq = static_cast<unsigned>(f.q.degree());
    while (!N.is_zero()) {
        RationalPoly quo, rem;
        RationalPoly::divmod(N, f.q, quo, rem);
        std::vector<mpq_class> row(degq, mpq_class(0));
        for (unsigned j = 0; j < degq; j++) row[j] = rem.coeff(j);
        rows.push_back(std::move(row));
        N = quo;
    }
    if (rows.empty()) rows.push_back(std::vector<mpq_class>(degq, mpq_class(0)));
    std::lock_guard<std::mutex> lock(mu);
    cache[f.name] = rows;
    return rows;
}

}  // namespace pairing
