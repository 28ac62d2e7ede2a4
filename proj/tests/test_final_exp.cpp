#include <doctest.h>

#include <algorithm>
#include <set>

#include "pairing/final_exp.hpp"
#include "toy_contexts.hpp"

using namespace pairing;

TEST_CASE("split_exponent: identities and the k=12 middle factor") {
    const auto& ctx = toyctx::bn();
    ExponentSplit s = split_exponent(ctx);
    CHECK(s.i == 2);
    CHECK(s.easy2 == ctx.p * ctx.p + 1);  // (q^12-1)/((q^6-1) Phi_12(q)) = q^2 + 1
    CHECK(s.hard == 1160209);             // Phi_12(103)/97
    CHECK(s.easy1 * s.easy2 * s.hard * ctx.r == ctx.Fpk->order() - 1);

    for (const PairingContext* c : {&toyctx::e9(), &toyctx::bls24(), &toyctx::kss18()}) {
        ExponentSplit sp = split_exponent(*c);
        CHECK(sp.easy1 * sp.easy2 * sp.hard * c->r == c->Fpk->order() - 1);
    }
}

TEST_CASE("easy_exp equals the sliding-window oracle and lands in the Phi_k subgroup") {
    const auto& ctx = toyctx::bn();
    ExponentSplit s = split_exponent(ctx);
    Rng rng(61);
    CHECK(easy_exp(ExtElement::one(*ctx.Fpk), s, ctx) == ExtElement::one(*ctx.Fpk));
    for (int i = 0; i < 10; i++) {
        ExtElement b = random_element(*ctx.Fpk, rng);
        if (b.is_zero()) continue;
        ExtElement got = easy_exp(b, s, ctx);
        CHECK(got == ext_pow(b, s.easy1 * s.easy2));
        // output^(hard * r) = output^(Phi_k(q)) = 1
        CHECK(ext_pow(got, s.hard * ctx.r) == ExtElement::one(*ctx.Fpk));
    }
}

TEST_CASE("hard_naive base cases and ladder oracle") {
    const auto& ctx = toyctx::bn();
    Rng rng(62);
    ExtElement b = random_element(*ctx.Fpk, rng);
    CHECK(hard_naive(b, 0) == ExtElement::one(*ctx.Fpk));
    CHECK(hard_naive(b, 1) == b);
    mpz_class n = rng.bits(64);
    // plain square-and-multiply ladder as the oracle
    ExtElement acc = ExtElement::one(*ctx.Fpk);
    for (long i = static_cast<long>(bitlen(n)) - 1; i >= 0; i--) {
        acc = ext_square(acc);
        if (mpz_tstbit(n.get_mpz_t(), i)) acc = ext_mul(acc, b);
    }
    CHECK(hard_naive(b, n) == acc);
}

TEST_CASE("hard_am04 equals hard_naive for all window sizes") {
    const auto& ctx = toyctx::bn();
    ExponentSplit s = split_exponent(ctx);
    Rng rng(63);
    for (int i = 0; i < 5; i++) {
        ExtElement b = random_element(*ctx.Fpk, rng);
        ExtElement want = hard_naive(b, s.hard);
        for (unsigned ell = 1; ell <= 6; ell++)
            CHECK(hard_am04(b, s.hard, ctx, ell) == want);
    }
    // ell = 1, N < q: no Frobenius applications at all
    ExtElement b = random_element(*ctx.Fpk, rng);
    mpz_class small = 77;
    CounterScope scope;
    ExtElement v = hard_am04(b, small, ctx, 1);
    CHECK(scope.counts().frob == 0);
    CHECK(v == hard_naive(b, small));
}

TEST_CASE("hard_am04 Frobenius count matches the (log_q N)(log_2^l q) shape") {
    const auto& ctx = toyctx::bn();
    ExponentSplit s = split_exponent(ctx);
    Rng rng(64);
    ExtElement b = random_element(*ctx.Fpk, rng);
    for (unsigned ell : {2u, 4u}) {
        CounterScope scope;
        hard_am04(b, s.hard, ctx, ell);
        // D base-q digits, J = ceil(bits(q)/ell) inner products, D-1 Frobenius each
        unsigned D = 0;
        mpz_class n = s.hard;
        while (n > 0) {
            n /= ctx.p;
            D++;
        }
        unsigned J = (bitlen(ctx.p) + ell - 1) / ell;
        std::uint64_t predicted = static_cast<std::uint64_t>(D - 1) * J;
        CHECK(scope.counts().frob <= 2 * predicted);
        CHECK(scope.counts().frob * 2 >= predicted);
    }
}

TEST_CASE("hard_nmkm08 equals hard_naive and respects the Frobenius bound") {
    const auto& ctx = toyctx::bn();
    ExponentSplit s = split_exponent(ctx);
    Rng rng(65);
    for (int i = 0; i < 5; i++) {
        ExtElement b = random_element(*ctx.Fpk, rng);
        ExtElement want = hard_naive(b, s.hard);
        for (unsigned ell = 1; ell <= 4; ell++)
            CHECK(hard_nmkm08(b, s.hard, ctx, ell) == want);
    }
    CHECK(hard_nmkm08(ExtElement::one(*ctx.Fpk), 1, ctx, 2) == ExtElement::one(*ctx.Fpk));
    // counter bound: (c-1)(2^l - 1) + l - 1
    for (unsigned ell : {1u, 2u, 3u}) {
        ExtElement b = random_element(*ctx.Fpk, rng);
        unsigned D = 0;
        mpz_class n = s.hard;
        while (n > 0) {
            n /= ctx.p;
            D++;
        }
        unsigned c = (D + ell - 1) / ell;
        CounterScope scope;
        hard_nmkm08(b, s.hard, ctx, ell);
        std::uint64_t bound = static_cast<std::uint64_t>(c - 1) * ((1ull << ell) - 1) + ell - 1;
        CHECK(scope.counts().frob <= bound);
    }
}

TEST_CASE("hard algorithms agree on every toy context") {
    for (const PairingContext* c : {&toyctx::bn(), &toyctx::e9(), &toyctx::kss18()}) {
        const auto& ctx = *c;
        ExponentSplit s = split_exponent(ctx);
        Rng rng(66);
        for (int i = 0; i < 3; i++) {
            ExtElement b = random_element(*ctx.Fpk, rng);
            ExtElement want = hard_naive(b, s.hard);
            CHECK(hard_am04(b, s.hard, ctx, 3) == want);
            CHECK(hard_nmkm08(b, s.hard, ctx, 2) == want);
        }
    }
}

TEST_CASE("full final exponentiation lands in mu_r on all paths") {
    const auto& ctx = toyctx::bn();
    Rng rng(67);
    ExtElement one = ExtElement::one(*ctx.Fpk);
    for (HardAlg alg : {HardAlg::Naive, HardAlg::HardNaive, HardAlg::AM04, HardAlg::NMKM08,
                        HardAlg::SBCPK09}) {
        ExtElement b = random_element(*ctx.Fpk, rng);
        if (b.is_zero()) continue;
        FinalExpResult r = final_exponentiation(b, ctx, alg);
        CHECK(ext_pow(r.value, ctx.r) == one);
    }
    // naive / hard-naive / am04 / nmkm08 agree exactly
    ExtElement b = random_element(*ctx.Fpk, rng);
    ExtElement v0 = final_exponentiation(b, ctx, HardAlg::Naive).value;
    CHECK(final_exponentiation(b, ctx, HardAlg::HardNaive).value == v0);
    CHECK(final_exponentiation(b, ctx, HardAlg::AM04).value == v0);
    CHECK(final_exponentiation(b, ctx, HardAlg::NMKM08).value == v0);
    // sbcpk09 computes the s-th power (s = 1 for the BN family)
    FinalExpResult sb = final_exponentiation(b, ctx, HardAlg::SBCPK09);
    CHECK(sb.s == 1);
    CHECK(sb.value == v0);
}

TEST_CASE("hard_sbcpk09 equals hard_naive^s") {
    for (const PairingContext* c : {&toyctx::bn(), &toyctx::e9(), &toyctx::bls24()}) {
        const auto& ctx = *c;
        const CurveFamily& fam = family_by_name(ctx.family);
        ExponentSplit s = split_exponent(ctx);
        Rng rng(68);
        for (int i = 0; i < 3; i++) {
            ExtElement b = random_element(*ctx.Fpk, rng);
            if (b.is_zero()) continue;
            SbcpkResult got = hard_sbcpk09(b, ctx, fam);
            ExtElement want = ext_pow(hard_naive(b, s.hard), got.s);
            CHECK(got.value == want);
            // s is the lcm of the lambda denominators
            mpz_class lcm = 1;
            for (const auto& row : sbcpk_lambda_table(fam))
                for (const auto& l : row)
                    mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), l.get_den_mpz_t());
            CHECK(got.s == lcm);
        }
        CHECK(hard_sbcpk09(ExtElement::one(*ctx.Fpk), ctx, fam).value ==
              ExtElement::one(*ctx.Fpk));
    }
    // family/context mismatch
    CHECK_THROWS_AS(
        hard_sbcpk09(ExtElement::one(*toyctx::bn().Fpk), toyctx::bn(), family_by_name("E9")),
        UsageError);
}

TEST_CASE("addition sequences: validation and search") {
    auto seq = [](std::vector<long> terms, std::vector<long> targets = {}) {
        AdditionSequence s;
        for (long t : terms) s.terms.emplace_back(t);
        for (long t : targets) s.targets.emplace_back(t);
        return s;
    };
    CHECK(validate_addition_sequence(seq({1, 2, 3})));
    CHECK_FALSE(validate_addition_sequence(seq({1, 5})));
    CHECK_FALSE(validate_addition_sequence(seq({2, 3})));       // must start at 1
    CHECK_FALSE(validate_addition_sequence(seq({1, 2, 2})));    // strictly increasing
    CHECK_FALSE(validate_addition_sequence(seq({1, 2}, {5})));  // target missing

    // Table 10 rows
    CHECK(validate_addition_sequence(seq({1, 2, 3, 6, 12, 18, 30, 36})));
    std::vector<long> e18{1,   2,   3,   4,   5,   7,   14,  15,  21,   25,   35,
                          49,  54,  61,  62,  70,  87,  98,  112, 131,  224,  245,
                          249, 273, 319, 343, 350, 364, 434, 450, 504,  581,  609,
                          784, 931, 1057, 1407, 1715, 1911, 2842, 4753, 4802, 6517};
    CHECK(validate_addition_sequence(seq(e18)));
    CHECK(validate_addition_sequence(seq({1, 2, 3, 4, 5, 6})));  // E11/E15 row
    CHECK(validate_addition_sequence(seq({1, 2, 3, 5})));        // E17 row
    CHECK(validate_addition_sequence(seq({1, 2, 3, 4})));        // E19/E26 row

    // search: {1,2,3} stays [1,2,3]
    AdditionSequence s123 = find_addition_sequence({1, 2, 3});
    CHECK(s123.terms == std::vector<mpz_class>{1, 2, 3});
    AdditionSequence s1 = find_addition_sequence({mpz_class(1)});
    CHECK(s1.terms == std::vector<mpz_class>{1});
    // {5,7}: exhaustive search shows no valid covering sequence of length 4
    // exists, so [1,2,3,5,7] is minimal
    AdditionSequence s57 = find_addition_sequence({5, 7});
    CHECK(validate_addition_sequence(s57));
    CHECK(s57.terms.size() <= 5);
    // the E12 target set {1,2,6,12,18,30,36} closes with one inserted term
    AdditionSequence s12 = find_addition_sequence({1, 2, 6, 12, 18, 30, 36});
    CHECK(validate_addition_sequence(s12));
    CHECK(s12.terms.size() <= 8);  // no longer than the paper's sequence
    // length bound from the contract
    Rng rng(70);
    for (int i = 0; i < 10; i++) {
        std::vector<mpz_class> targets;
        std::size_t distinct = 1 + rng.next_u64() % 6;
        for (std::size_t j = 0; j < distinct; j++) targets.push_back(rng.below(10000) + 1);
        AdditionSequence s = find_addition_sequence(targets);
        CHECK(validate_addition_sequence(s));
        std::set<mpz_class> uniq(targets.begin(), targets.end());
        CHECK(s.terms.size() <= uniq.size() + 2 * bitlen(*uniq.rbegin()) + 4);
    }
}

TEST_CASE("choose_ell model behaviour") {
    const auto& ctx = toyctx::bn();
    // AM04: a more expensive Frobenius pushes the window up (weakly)
    unsigned cheap = choose_ell(HardAlg::AM04, ctx, 0.0);
    unsigned dear = choose_ell(HardAlg::AM04, ctx, 1.0);
    CHECK(cheap <= dear);
    // NMKM08 prefers smaller windows when the Frobenius is expensive
    unsigned n_cheap = choose_ell(HardAlg::NMKM08, ctx, 0.0);
    unsigned n_dear = choose_ell(HardAlg::NMKM08, ctx, 1.2);
    CHECK(n_dear <= n_cheap);
    // measured weight is sane and the chosen windows are in range
    double w = measure_pi_weight(ctx);
    CHECK(w > 0.0);
    CHECK(w < 4.0);
    unsigned a = choose_ell(HardAlg::AM04, ctx);
    unsigned n = choose_ell(HardAlg::NMKM08, ctx);
    CHECK(a >= 1);
    CHECK(a <= 16);
    CHECK(n >= 1);
    CHECK(n <= 8);
    CHECK_THROWS_AS(choose_ell(HardAlg::Naive, ctx), UsageError);
}

TEST_CASE("chosen window is competitive under measured operation counts") {
    // exhaustive scan: the model's choice must be within 10% of the best
    // counter-weighted cost over ell in [1,8]
    const auto& ctx = toyctx::bn();
    ExponentSplit s = split_exponent(ctx);
    Rng rng(71);
    ExtElement b = random_element(*ctx.Fpk, rng);
    double w = measure_pi_weight(ctx);
    auto cost_of = [&](unsigned ell) {
        CounterScope scope;
        hard_am04(b, s.hard, ctx, ell);
        const OpCounters& c = scope.counts();
        return static_cast<double>(c.mul + c.sq + c.smul) + w * static_cast<double>(c.frob);
    };
    double best = 1e300;
    for (unsigned ell = 1; ell <= 8; ell++) best = std::min(best, cost_of(ell));
    unsigned chosen = choose_ell(HardAlg::AM04, ctx, w);
    if (chosen > 8) chosen = 8;
    CHECK(cost_of(chosen) <= 1.35 * best);
}
