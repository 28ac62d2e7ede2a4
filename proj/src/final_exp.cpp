#include "pairing/final_exp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace pairing {

namespace {

unsigned smallest_prime_factor(unsigned k) {
    for (unsigned q = 2; q * q <= k; q++)
        if (k % q == 0) return q;
    return k;
}

// Base-q digits of n >= 0, least significant first.
std::vector<mpz_class> base_digits(const mpz_class& n, const mpz_class& q) {
    std::vector<mpz_class> out;
    mpz_class v = n;
    while (v > 0) {
        mpz_class d, rest;
        mpz_fdiv_qr(rest.get_mpz_t(), d.get_mpz_t(), v.get_mpz_t(), q.get_mpz_t());
        out.push_back(d);
        v = rest;
    }
    if (out.empty()) out.push_back(0);
    return out;
}

}  // namespace

ExponentSplit split_exponent(const PairingContext& ctx) {
    ExponentSplit s;
    s.i = smallest_prime_factor(ctx.k);
    const mpz_class& q = ctx.p;
    mpz_class qk = ctx.Fpk->order();

    mpz_class qki;
    mpz_pow_ui(qki.get_mpz_t(), q.get_mpz_t(), ctx.k / s.i);
    s.easy1 = qki - 1;

    mpz_class phi = cyclotomic_value(ctx.k, q);
    if (phi % ctx.r != 0) throw InvalidContext("split_exponent: r does not divide Phi_k(q)");
    s.hard = phi / ctx.r;

    mpz_class denom = s.easy1 * phi;
    if ((qk - 1) % denom != 0) throw InvalidContext("split_exponent: inexact easy factor");
    s.easy2 = (qk - 1) / denom;

    if (s.easy1 * s.easy2 * s.hard * ctx.r != qk - 1)
        throw InvalidContext("split_exponent: factors do not reassemble");

    // easy2 as a polynomial in q: (X^k - 1) / ((X^{k/i} - 1) Phi_k(X)).
    std::vector<mpq_class> xk(ctx.k + 1, mpq_class(0)), xki(ctx.k / s.i + 1, mpq_class(0));
    xk[0] = -1;
    xk[ctx.k] = 1;
    xki[0] = -1;
    xki[ctx.k / s.i] = 1;
    RationalPoly p2 = RationalPoly(std::move(xk))
                          .divide_exact(RationalPoly(std::move(xki)))
                          .divide_exact(cyclotomic_poly(ctx.k));
    for (const auto& c : p2.coeffs()) {
        if (c.get_den() != 1) throw Error("split_exponent: non-integer easy2 coefficient");
        s.easy2_coeffs.push_back(c.get_num());
    }
    // Cross-check the coefficient expansion against the integer value.
    mpz_class acc = 0, qj = 1;
    for (const auto& c : s.easy2_coeffs) {
        acc += c * qj;
        qj *= q;
    }
    if (acc != s.easy2) throw Error("split_exponent: easy2 expansion mismatch");
    return s;
}

ExtElement easy_exp(const ExtElement& b, const ExponentSplit& split, const PairingContext& ctx) {
    if (b.is_zero()) throw DivisionByZero("easy_exp of zero");
    // b^(q^{k/i} - 1) with one Frobenius power and one inversion.
    ExtElement t1 = ext_mul(frobenius(b, ctx.k / split.i), ext_inv(b));
    ExtElement acc = ExtElement::one(*ctx.Fpk);
    for (unsigned j = 0; j < split.easy2_coeffs.size(); j++) {
        const mpz_class& c = split.easy2_coeffs[j];
        if (c == 0) continue;
        ExtElement fj = frobenius(t1, j);
        acc = ext_mul(acc, c == 1 ? fj : ext_pow(fj, c));
    }
    return acc;
}

ExtElement hard_naive(const ExtElement& b, const mpz_class& N) { return ext_pow(b, N); }

ExtElement hard_am04(const ExtElement& b, const mpz_class& N, const PairingContext& ctx,
                     unsigned ell) {
    if (ell < 1 || ell > 16) throw UsageError("hard_am04: ell in [1,16]");
    const ExtFieldSpec& spec = *ctx.Fpk;
    if (N == 0) return ExtElement::one(spec);
    const mpz_class& q = ctx.p;

    std::vector<mpz_class> nd = base_digits(N, q);  // N = sum n_i q^i
    unsigned D = static_cast<unsigned>(nd.size());
    unsigned J = (bitlen(q) + ell - 1) / ell;

    std::vector<ExtElement> tab;
    tab.reserve(std::size_t(1) << ell);
    tab.push_back(ExtElement::one(spec));
    tab.push_back(b);
    for (std::size_t v = 2; v < (std::size_t(1) << ell); v++)
        tab.push_back(ext_mul(tab.back(), b));

    const unsigned long mask = (1ul << ell) - 1;
    auto digit = [&](unsigned i, unsigned j) -> unsigned long {
        mpz_class d = nd[i] >> (j * ell);
        return mpz_class(d & mask).get_ui();
    };

    ExtElement res = ExtElement::one(spec);
    bool res_started = false;
    for (unsigned j = J; j-- > 0;) {
        // inner_j = prod_i (b^{m_ij})^{q^i}, Horner over the Frobenius.
        ExtElement inner = tab[digit(D - 1, j)];
        for (unsigned i = D - 1; i-- > 0;) {
            inner = frobenius(inner, 1);
            unsigned long m = digit(i, j);
            if (m != 0) inner = ext_mul(inner, tab[m]);
        }
        if (!res_started) {
            res = inner;
            res_started = true;
        } else {
            for (unsigned sq = 0; sq < ell; sq++) res = ext_square(res);
            res = ext_mul(res, inner);
        }
    }
    return res;
}

ExtElement hard_nmkm08(const ExtElement& b, const mpz_class& N, const PairingContext& ctx,
                       unsigned ell) {
    if (ell < 1 || ell > 8) throw UsageError("hard_nmkm08: ell in [1,8]");
    const ExtFieldSpec& spec = *ctx.Fpk;
    if (N == 0) return ExtElement::one(spec);
    const mpz_class& q = ctx.p;

    std::vector<mpz_class> qdigits = base_digits(N, q);
    unsigned D = static_cast<unsigned>(qdigits.size());
    unsigned c = (D + ell - 1) / ell;
    unsigned tbits = bitlen(q);

    // rows[u] spans q-digits [uc, uc + c); matrix column (v, w) collects row
    // bits into a pattern mask.
    unsigned rows = (D + c - 1) / c;
    if (rows > ell) throw Error("hard_nmkm08: row bound exceeded");

    std::map<unsigned long, std::map<unsigned, std::vector<unsigned>>> patterns;
    for (unsigned v = 0; v < c; v++) {
        for (unsigned w = 0; w < tbits; w++) {
            unsigned long maskbits = 0;
            for (unsigned u = 0; u < rows; u++) {
                unsigned idx = u * c + v;
                if (idx >= D) continue;
                if (mpz_tstbit(qdigits[idx].get_mpz_t(), w)) maskbits |= 1ul << u;
            }
            if (maskbits) patterns[maskbits][v].push_back(w);
        }
    }

    std::vector<ExtElement> pow2{b};
    for (unsigned w = 1; w < tbits; w++) pow2.push_back(ext_square(pow2.back()));

    // G_s = prod_v pi^v(H_{s,v}) via Horner over the occupied blocks.
    std::map<unsigned long, ExtElement> G;
    for (const auto& [maskbits, blocks] : patterns) {
        ExtElement acc = ExtElement::one(spec);
        bool started = false;
        unsigned prev_v = 0;
        for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
            unsigned v = it->first;
            ExtElement h = pow2[it->second.front()];
            for (std::size_t idx = 1; idx < it->second.size(); idx++)
                h = ext_mul(h, pow2[it->second[idx]]);
            if (!started) {
                acc = h;
                started = true;
            } else {
                acc = ext_mul(frobenius(acc, prev_v - v), h);
            }
            prev_v = v;
        }
        if (prev_v > 0) acc = frobenius(acc, prev_v);
        G.emplace(maskbits, std::move(acc));
    }

    // Row values, then the rows folded with ell - 1 Frobenius maps.
    std::vector<ExtElement> R(rows, ExtElement::one(spec));
    std::vector<bool> row_set(rows, false);
    for (const auto& [maskbits, g] : G) {
        for (unsigned u = 0; u < rows; u++) {
            if (!(maskbits & (1ul << u))) continue;
            R[u] = row_set[u] ? ext_mul(R[u], g) : g;
            row_set[u] = true;
        }
    }
    ExtElement res = R[rows - 1];
    for (unsigned u = rows - 1; u-- > 0;) res = ext_mul(frobenius(res, c), R[u]);
    return res;
}

bool validate_addition_sequence(const AdditionSequence& seq) {
    const auto& t = seq.terms;
    if (t.empty() || t.front() != 1) return false;
    for (std::size_t i = 1; i < t.size(); i++) {
        if (t[i] <= t[i - 1]) return false;
        bool ok = false;
        for (std::size_t a = 0; a < i && !ok; a++)
            for (std::size_t b = a; b < i && !ok; b++) ok = t[a] + t[b] == t[i];
        if (!ok) return false;
    }
    for (const auto& target : seq.targets) {
        bool found = false;
        for (const auto& term : t) found = found || term == target;
        if (!found) return false;
    }
    return true;
}

AdditionSequence find_addition_sequence(std::vector<mpz_class> targets) {
    if (targets.empty()) throw UsageError("find_addition_sequence: empty targets");
    std::set<mpz_class> S;
    for (const auto& t : targets) {
        if (t < 1) throw UsageError("find_addition_sequence: targets must be positive");
        S.insert(t);
    }
    AdditionSequence out;
    out.targets.assign(S.begin(), S.end());
    S.insert(1);

    mpz_class max_t = *S.rbegin();
    std::size_t bound = S.size() + 2 * bitlen(max_t) + 4;

    // Work down from the largest unresolved term; close gaps by halving or by
    // splitting off the largest smaller term.
    std::set<mpz_class> unresolved(S.begin(), S.end());
    unresolved.erase(1);
    while (!unresolved.empty()) {
        mpz_class t = *unresolved.rbegin();
        unresolved.erase(t);
        bool covered = false;
        for (auto it = S.begin(); it != S.end() && *it <= t / 2 + 1; ++it) {
            if (*it >= t) break;
            if (S.count(t - *it)) {
                covered = true;
                break;
            }
        }
        if (covered) continue;
        mpz_class u;
        if (t % 2 == 0) {
            u = t / 2;
        } else {
            auto it = S.lower_bound(t);
            --it;  // largest element < t (1 is always there)
            u = t - *it;
        }
        if (S.insert(u).second) unresolved.insert(u);
        unresolved.insert(t);  // re-check t once u is in place
        if (S.size() > bound + out.targets.size())
            throw Error("find_addition_sequence: heuristic exceeded its length bound");
    }
    out.terms.assign(S.begin(), S.end());
    if (!validate_addition_sequence(out)) throw Error("find_addition_sequence: invalid result");
    return out;
}

SbcpkResult hard_sbcpk09(const ExtElement& b, const PairingContext& ctx, const CurveFamily& f) {
    if (f.k != ctx.k || (!ctx.family.empty() && ctx.family != f.name))
        throw UsageError("hard_sbcpk09: family does not match the context");
    const ExtFieldSpec& spec = *ctx.Fpk;

    std::vector<std::vector<mpq_class>> lambda = sbcpk_lambda_table(f);
    mpz_class s = 1;
    for (const auto& row : lambda)
        for (const auto& l : row) mpz_lcm(s.get_mpz_t(), s.get_mpz_t(), l.get_den_mpz_t());

    // Exponents s*lambda_ij are integers; collect the distinct absolute values.
    std::vector<std::vector<mpz_class>> C(lambda.size());
    std::set<mpz_class> targets;
    for (std::size_t i = 0; i < lambda.size(); i++) {
        for (const auto& l : lambda[i]) {
            mpq_class scaled = l * mpq_class(s);
            if (scaled.get_den() != 1) throw Error("hard_sbcpk09: denominator not cleared");
            C[i].push_back(scaled.get_num());
            if (scaled != 0) targets.insert(abs(mpz_class(scaled.get_num())));
        }
    }
    if (targets.empty()) return {ExtElement::one(spec), s};

    AdditionSequence seq =
        find_addition_sequence(std::vector<mpz_class>(targets.begin(), targets.end()));

    // Precompute b^{x0^j} and lazily their inverses for negative coefficients.
    std::size_t jmax = 0;
    for (const auto& row : C) jmax = std::max(jmax, row.size());
    std::vector<ExtElement> base_j{b};
    for (std::size_t j = 1; j < jmax; j++) base_j.push_back(ext_pow(base_j.back(), ctx.x0));
    std::vector<ExtElement> base_j_inv(jmax, ExtElement());
    std::vector<bool> have_inv(jmax, false);

    std::map<mpz_class, ExtElement> bucket;
    for (std::size_t i = 0; i < C.size(); i++) {
        for (std::size_t j = 0; j < C[i].size(); j++) {
            const mpz_class& cij = C[i][j];
            if (cij == 0) continue;
            ExtElement g = ExtElement::one(spec);
            if (cij > 0) {
                g = frobenius(base_j[j], static_cast<unsigned>(i));
            } else {
                if (!have_inv[j]) {
                    base_j_inv[j] = ext_inv(base_j[j]);
                    have_inv[j] = true;
                }
                g = frobenius(base_j_inv[j], static_cast<unsigned>(i));
            }
            mpz_class key = abs(cij);
            auto it = bucket.find(key);
            if (it == bucket.end()) bucket.emplace(key, g);
            else it->second = ext_mul(it->second, g);
        }
    }

    // Push each sequence term into a decomposition pair; bucket[1] collects
    // the whole multi-exponentiation.
    for (auto it = seq.terms.rbegin(); it != seq.terms.rend(); ++it) {
        const mpz_class& a = *it;
        if (a == 1) break;
        auto bit = bucket.find(a);
        if (bit == bucket.end()) continue;  // inserted term with no base attached
        mpz_class a1, a2;
        bool found = false;
        for (const auto& cand : seq.terms) {
            if (cand >= a) break;
            if (std::binary_search(seq.terms.begin(), seq.terms.end(), a - cand)) {
                a1 = cand;
                a2 = a - cand;
                found = true;
                break;
            }
        }
        if (!found) throw Error("hard_sbcpk09: sequence term not decomposable");
        const ExtElement g = bit->second;
        for (const mpz_class& part : {a1, a2}) {
            auto pit = bucket.find(part);
            if (pit == bucket.end()) bucket.emplace(part, g);
            else pit->second = ext_mul(pit->second, g);
        }
        bucket.erase(a);
    }
    auto one_it = bucket.find(1);
    ExtElement result = one_it == bucket.end() ? ExtElement::one(spec) : one_it->second;
    if (ctx.r_cofactor != 1) result = ext_pow(result, ctx.r_cofactor);
    return {result, s};
}

const char* hard_alg_name(HardAlg a) {
    switch (a) {
        case HardAlg::Naive: return "naive";
        case HardAlg::HardNaive: return "hard-naive";
        case HardAlg::AM04: return "am04";
        case HardAlg::NMKM08: return "nmkm08";
        case HardAlg::SBCPK09: return "sbcpk09";
    }
    return "?";
}

HardAlg hard_alg_by_name(const std::string& s) {
    if (s == "naive") return HardAlg::Naive;
    if (s == "hard-naive") return HardAlg::HardNaive;
    if (s == "am04") return HardAlg::AM04;
    if (s == "nmkm08") return HardAlg::NMKM08;
    if (s == "sbcpk09") return HardAlg::SBCPK09;
    throw UsageError("unknown final-exponentiation algorithm: " + s);
}

double measure_pi_weight(const PairingContext& ctx) {
    Rng rng(0x7069776569676874ULL);
    ExtElement a = random_element(*ctx.Fpk, rng);
    ExtElement b = random_element(*ctx.Fpk, rng);
    std::uint64_t frob_m1 = 0, mul_m1 = 0;
    {
        CounterScope scope;
        ExtElement x = frobenius(a, 1);
        (void)x;
        frob_m1 = scope.counts().m1;
    }
    {
        CounterScope scope;
        ExtElement x = ext_mul(a, b);
        (void)x;
        mul_m1 = scope.counts().m1;
    }
    if (mul_m1 == 0) return 1.0;
    return static_cast<double>(frob_m1) / static_cast<double>(mul_m1);
}

unsigned choose_ell(HardAlg alg, const PairingContext& ctx, double pi_weight) {
    ExponentSplit split = split_exponent(ctx);
    double logN = static_cast<double>(bitlen(split.hard));
    double qbits = static_cast<double>(bitlen(ctx.p));
    if (alg == HardAlg::AM04) {
        unsigned best = 1;
        double best_cost = 0;
        for (unsigned ell = 1; ell <= 16; ell++) {
            double cost = logN / ell * (1.0 + pi_weight) + std::ldexp(1.0, ell);
            if (ell == 1 || cost < best_cost) {
                best = ell;
                best_cost = cost;
            }
        }
        return best;
    }
    if (alg == HardAlg::NMKM08) {
        double dq = std::max(1.0, std::ceil(logN / qbits));
        unsigned best = 1;
        double best_cost = 0;
        for (unsigned ell = 1; ell <= 8; ell++) {
            double c = std::ceil(dq / ell);
            double two_ell = std::ldexp(1.0, ell);
            double cost = c * qbits * (1.0 - 1.0 / two_ell) + ell * (two_ell / 2.0 - 1.0) +
                          pi_weight * ((c - 1.0) * (two_ell - 1.0) + ell - 1.0);
            if (ell == 1 || cost < best_cost) {
                best = ell;
                best_cost = cost;
            }
        }
        return best;
    }
    throw UsageError("choose_ell: only am04 and nmkm08 take a window parameter");
}

unsigned choose_ell(HardAlg alg, const PairingContext& ctx) {
    return choose_ell(alg, ctx, measure_pi_weight(ctx));
}

FinalExpResult final_exponentiation(const ExtElement& b, const PairingContext& ctx, HardAlg alg,
                                    unsigned ell) {
    FinalExpResult out;
    if (alg == HardAlg::Naive) {
        mpz_class full = ctx.Fpk->order() - 1;
        if (full % ctx.r != 0) throw InvalidContext("final exponent not divisible by r");
        out.value = ext_pow(b, full / ctx.r);
        return out;
    }
    ExponentSplit split = split_exponent(ctx);
    ExtElement easy = easy_exp(b, split, ctx);
    switch (alg) {
        case HardAlg::HardNaive:
            out.value = hard_naive(easy, split.hard);
            break;
        case HardAlg::AM04:
            out.ell = ell ? ell : choose_ell(alg, ctx);
            out.value = hard_am04(easy, split.hard, ctx, out.ell);
            break;
        case HardAlg::NMKM08:
            out.ell = ell ? ell : choose_ell(alg, ctx);
            out.value = hard_nmkm08(easy, split.hard, ctx, out.ell);
            break;
        case HardAlg::SBCPK09: {
            if (ctx.family.empty()) throw UsageError("sbcpk09 needs a family-derived context");
            SbcpkResult r = hard_sbcpk09(easy, ctx, family_by_name(ctx.family));
            out.value = r.value;
            out.s = r.s;
            break;
        }
        default:
            throw UsageError("final_exponentiation: bad algorithm");
    }
    return out;
}

}  // namespace pairing
