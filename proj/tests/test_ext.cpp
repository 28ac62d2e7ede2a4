#include <doctest.h>

#include "pairing/ext_field.hpp"

using namespace pairing;

namespace {

std::shared_ptr<const ExtFieldSpec> toy_f49() {
    static auto spec = [] {
        auto f7 = std::make_shared<const PrimeField>(7);
        // X^2 - 3 is irreducible over F_7 (3 is a non-residue)
        return ExtFieldSpec::make_binomial(f7, 2, 3);
    }();
    return spec;
}

}  // namespace

TEST_CASE("ext_mul examples over F_49 = F_7[X]/(X^2-3)") {
    auto s = toy_f49();
    ExtElement one = ExtElement::one(*s);
    ExtElement x = ExtElement::monomial(*s, 1);
    ExtElement a = x + one;                           // X + 1
    ExtElement b = x + ExtElement::from_base(*s, 2);  // X + 2
    CHECK(ext_mul(a, one) == a);
    // (X+1)(X+2) = X^2 + 3X + 2 = 3X + 5
    ExtElement prod = ext_mul(a, b);
    CHECK(prod.coeffs()[0] == 5);
    CHECK(prod.coeffs()[1] == 3);

    Rng rng(77);
    for (int i = 0; i < 30; i++) {
        ExtElement u = random_element(*s, rng), v = random_element(*s, rng),
                   w = random_element(*s, rng);
        CHECK(ext_mul(ext_mul(u, v), w) == ext_mul(u, ext_mul(v, w)));
        CHECK(ext_square(u) == ext_mul(u, u));
    }
}

TEST_CASE("ext_inv examples") {
    auto s = toy_f49();
    ExtElement one = ExtElement::one(*s);
    CHECK(ext_inv(one) == one);
    // base-field constant inverts through fp_inv
    ExtElement c = ExtElement::from_base(*s, 4);
    PrimeField f7(7);
    CHECK(ext_inv(c).coeffs()[0] == fp_inv(FpElement(f7, 4)).value());
    CHECK(ext_inv(c).coeffs()[1] == 0);
    // inv(X) = 5X since X * 5X = 5 * 3 = 15 = 1 (mod 7)
    ExtElement x = ExtElement::monomial(*s, 1);
    ExtElement xinv = ext_inv(x);
    CHECK(xinv.coeffs()[0] == 0);
    CHECK(xinv.coeffs()[1] == 5);
    CHECK(ext_mul(x, xinv) == one);
    CHECK_THROWS_AS(ext_inv(ExtElement::zero(*s)), DivisionByZero);

    Rng rng(78);
    for (int i = 0; i < 30; i++) {
        ExtElement u = random_element(*s, rng);
        if (u.is_zero()) continue;
        CHECK(ext_mul(u, ext_inv(u)) == one);
        CHECK(ext_inv(ext_inv(u)) == u);
    }
}

TEST_CASE("frobenius examples and properties") {
    auto s = toy_f49();
    ExtElement x = ExtElement::monomial(*s, 1);
    CHECK(frobenius(x, 0) == x);
    ExtElement c = ExtElement::from_base(*s, 5);
    CHECK(frobenius(c, 1) == c);
    // X^7 = X * (X^2)^3 = 27 X = 6X (mod 7)
    ExtElement fx = frobenius(x, 1);
    CHECK(fx.coeffs()[0] == 0);
    CHECK(fx.coeffs()[1] == 6);

    Rng rng(79);
    for (int i = 0; i < 25; i++) {
        ExtElement a = random_element(*s, rng), b = random_element(*s, rng);
        CHECK(frobenius(ext_mul(a, b), 1) == ext_mul(frobenius(a, 1), frobenius(b, 1)));
        CHECK(frobenius(frobenius(a, 1), 1) == a);  // pi^2 = id for k = 2
        CHECK(ext_pow(a, s->p()) == frobenius(a, 1));
    }
}

TEST_CASE("frobenius on a binomial field matches ext_pow and costs k muls") {
    auto f19 = std::make_shared<const PrimeField>(19);
    auto s = find_defining_polynomial(f19, 3);
    CHECK(s->kind() == ModulusKind::Binomial);
    CHECK(s->param_a() == 2);  // cubes mod 19 are {1,7,8,11,12,18}; 2 is the least non-cube
    Rng rng(80);
    for (int i = 0; i < 20; i++) {
        ExtElement a = random_element(*s, rng);
        for (unsigned j = 1; j < 3; j++) {
            mpz_class pj;
            mpz_pow_ui(pj.get_mpz_t(), s->p().get_mpz_t(), j);
            CHECK(frobenius(a, j) == ext_pow(a, pj));
        }
    }
    // diagonal-times-permutation: exactly k base multiplications per application
    ExtElement a = random_element(*s, rng);
    CounterScope scope;
    ExtElement b = frobenius(a, 1);
    (void)b;
    CHECK(scope.counts().m1 == s->k());
    CHECK(scope.counts().frob == 1);
}

TEST_CASE("frobenius composition across powers") {
    auto f13 = std::make_shared<const PrimeField>(13);
    auto s = find_defining_polynomial(f13, 6);
    Rng rng(81);
    for (int i = 0; i < 6; i++) {
        ExtElement a = random_element(*s, rng);
        for (unsigned u = 1; u < 6; u++)
            for (unsigned v = 1; v < 6; v++)
                CHECK(frobenius(frobenius(a, u), v) == frobenius(a, (u + v) % 6));
    }
}

TEST_CASE("ext_pow basics") {
    auto s = toy_f49();
    Rng rng(82);
    ExtElement one = ExtElement::one(*s);
    for (int i = 0; i < 10; i++) {
        ExtElement a = random_element(*s, rng);
        CHECK(ext_pow(a, 0) == one);
        if (!a.is_zero()) CHECK(ext_pow(a, s->order() - 1) == one);
    }
}

TEST_CASE("find_defining_polynomial kinds") {
    // p = 1 mod k, k prime: binomial criterion satisfied
    auto f13 = std::make_shared<const PrimeField>(13);
    auto s3 = find_defining_polynomial(f13, 3);
    CHECK(s3->kind() == ModulusKind::Binomial);

    // p = 103, k = 12: 103 = 3 mod 4 and 4 | 12, so no binomial exists
    auto f103 = std::make_shared<const PrimeField>(103);
    CHECK_FALSE(binomial_criterion_holds(103, 12));
    auto s12 = find_defining_polynomial(f103, 12);
    CHECK(s12->kind() != ModulusKind::Binomial);
    CHECK(s12->k() == 12);

    // p = 19, k = 3: binomial with the least non-cube; exhaustive root check
    auto f19 = std::make_shared<const PrimeField>(19);
    auto s19 = find_defining_polynomial(f19, 3);
    CHECK(s19->kind() == ModulusKind::Binomial);
    mpz_class a = s19->param_a();
    for (long x = 0; x < 19; x++) CHECK(mpz_class(x * x * x % 19) != a);
}

TEST_CASE("is_in_subfield") {
    auto f13 = std::make_shared<const PrimeField>(13);
    auto s = find_defining_polynomial(f13, 6);
    ExtElement c = ExtElement::from_base(*s, 7);
    for (unsigned e : {1u, 2u, 3u, 6u}) CHECK(is_in_subfield(c, e));
    ExtElement x = ExtElement::monomial(*s, 1);
    CHECK_FALSE(is_in_subfield(x, 1));
    CHECK_FALSE(is_in_subfield(x, 2));
    CHECK(is_in_subfield(x, 6));
    CHECK_THROWS_AS(is_in_subfield(x, 4), UsageError);
    Rng rng(83);
    for (unsigned e : {1u, 2u, 3u}) {
        ExtElement tr = trace_to_subfield(random_element(*s, rng), e);
        CHECK(is_in_subfield(tr, e));
    }
}

TEST_CASE("cyclotomic_value examples and factorization property") {
    for (mpz_class q : {mpz_class(2), mpz_class(103), mpz_class("0x9b2fab3a61c3d7")}) {
        CHECK(cyclotomic_value(1, q) == q - 1);
        CHECK(cyclotomic_value(12, q) == q * q * q * q - q * q + 1);
        for (unsigned k = 1; k <= 30; k++) {
            mpz_class prod = 1;
            for (unsigned dd = 1; dd <= k; dd++)
                if (k % dd == 0) prod *= cyclotomic_value(dd, q);
            mpz_class qk;
            mpz_pow_ui(qk.get_mpz_t(), q.get_mpz_t(), k);
            CHECK(prod == qk - 1);
        }
    }
    CHECK(cyclotomic_value(12, 103) == 112540273);
}

TEST_CASE("ext square roots, full field and subfield") {
    auto f13 = std::make_shared<const PrimeField>(13);
    auto s = find_defining_polynomial(f13, 6);
    Rng rng(84);
    for (int i = 0; i < 12; i++) {
        ExtElement a = random_element(*s, rng);
        ExtElement sq = ext_square(a);
        auto root = ext_sqrt(sq, rng);
        REQUIRE(root.has_value());
        CHECK(ext_square(*root) == sq);
    }
    for (int i = 0; i < 8; i++) {
        ExtElement t = trace_to_subfield(random_element(*s, rng), 2);
        if (t.is_zero()) continue;
        ExtElement sq = ext_square(t);
        auto root = ext_sqrt_subfield(sq, 2, rng);
        REQUIRE(root.has_value());
        CHECK(is_in_subfield(*root, 2));
        CHECK(ext_square(*root) == sq);
    }
    mpz_class half = (s->order() - 1) / 2;
    for (int i = 0; i < 20; i++) {
        ExtElement a = random_element(*s, rng);
        if (a.is_zero()) continue;
        if (ext_pow(a, half) != ExtElement::one(*s)) {
            CHECK_FALSE(ext_sqrt(a, rng).has_value());
            break;
        }
    }
}

TEST_CASE("cube roots via nth_root_in_group") {
    auto f13 = std::make_shared<const PrimeField>(13);
    auto s = find_defining_polynomial(f13, 6);  // 3 | 13^2 - 1 so the 3-part is nontrivial
    Rng rng(85);
    auto sampler = [&]() { return random_element(*s, rng); };
    for (int i = 0; i < 10; i++) {
        ExtElement a = random_element(*s, rng);
        if (a.is_zero()) continue;
        ExtElement cube = ext_mul(ext_square(a), a);
        auto root = nth_root_in_group(cube, 3, s->order() - 1, sampler);
        REQUIRE(root.has_value());
        CHECK(ext_mul(ext_square(*root), *root) == cube);
    }
}

TEST_CASE("sparse and scalar multiplication fast paths agree with dense") {
    auto f103 = std::make_shared<const PrimeField>(103);
    auto s = find_defining_polynomial(f103, 12);
    Rng rng(86);
    ExtElement dense = random_element(*s, rng);
    ExtElement sparse = ExtElement::monomial(*s, 7, 42) + ExtElement::monomial(*s, 2, 11);
    ExtElement via_mul = ext_mul(dense, sparse);
    ExtElement ref = ext_scalar_mul(42, ext_mul(ExtElement::monomial(*s, 7), dense)) +
                     ext_scalar_mul(11, ext_mul(ExtElement::monomial(*s, 2), dense));
    CHECK(via_mul == ref);

    CounterScope scope;
    ExtElement sm = ext_mul(ExtElement::from_base(*s, 9), dense);
    CHECK(scope.counts().smul == 1);
    CHECK(scope.counts().mul == 0);
    CHECK(sm == ext_scalar_mul(9, dense));
}
