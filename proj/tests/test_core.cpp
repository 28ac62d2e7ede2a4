#include <doctest.h>

#include <set>

#include "pairing/fp.hpp"

using namespace pairing;

namespace {

// Exhaustive-search inverse oracle for tiny fields.
mpz_class brute_inverse(const mpz_class& a, const mpz_class& p) {
    for (mpz_class x = 1; x < p; x++)
        if (a * x % p == 1) return x;
    return 0;
}

bool trial_division_prime(const mpz_class& n) {
    if (n < 2) return false;
    for (mpz_class d = 2; d * d <= n; d++)
        if (n % d == 0) return false;
    return true;
}

}  // namespace

TEST_CASE("fp add/sub/mul examples") {
    PrimeField f7(7);
    CHECK((FpElement(f7, 3) + FpElement(f7, 5)).value() == 1);
    for (long x = 0; x < 7; x++) CHECK((FpElement(f7, 0) * FpElement(f7, x)).value() == 0);

    PrimeField f103(103);
    // 3000 mod 103 by plain long arithmetic
    CHECK((FpElement(f103, 50) * FpElement(f103, 60)).value() == 3000 % 103);

    PrimeField f5(5);
    FpElement a(f5, 2);
    CHECK_THROWS_AS((void)(a + FpElement(f7, 1)), UsageError);
}

TEST_CASE("fp_inv examples and error") {
    PrimeField f7(7);
    CHECK(fp_inv(FpElement(f7, 1)).value() == 1);
    CHECK(fp_inv(FpElement(f7, 3)).value() == brute_inverse(3, 7));
    CHECK(fp_inv(FpElement(f7, 3)).value() == 5);
    PrimeField f103(103);
    CHECK(fp_inv(FpElement(f103, 2)).value() == 52);
    CHECK_THROWS_AS(fp_inv(FpElement(f7, 0)), DivisionByZero);
}

TEST_CASE("fp_pow: window exponentiation vs repeated multiplication") {
    PrimeField f103(103);
    FpElement a(f103, 5);
    FpElement acc(f103, 1);
    for (int i = 0; i < 10; i++) acc = acc * a;
    CHECK(fp_pow(a, 10) == acc);
    CHECK(fp_pow(a, 0).value() == 1);
    PrimeField f7(7);
    CHECK(fp_pow(FpElement(f7, 3), 6).value() == 1);  // Fermat
    CHECK_THROWS_AS(fp_pow(FpElement(f7, 0), -1), DivisionByZero);
    FpElement b(f103, 29);
    CHECK((fp_pow(b, -3) * fp_pow(b, 3)).value() == 1);
    Rng rng(11);
    for (int i = 0; i < 20; i++) {
        FpElement x(f103, rng.below(103));
        if (x.is_zero()) continue;
        mpz_class e = rng.below(10000);
        CHECK(fp_pow(x, e, 1) == fp_pow(x, e, 5));
    }
}

TEST_CASE("field axioms on random triples") {
    PrimeField f(mpz_class("0xffffffffffffffc5"));  // 2^64 - 59
    Rng rng(42);
    for (int i = 0; i < 50; i++) {
        FpElement a(f, rng.below(f.p())), b(f, rng.below(f.p())), c(f, rng.below(f.p()));
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
        if (!a.is_zero()) {
            CHECK((a * fp_inv(a)).value() == 1);
            CHECK(fp_pow(a, f.p() - 1).value() == 1);
        }
    }
}

TEST_CASE("fp_sqrt examples") {
    PrimeField f7(7);
    CHECK(fp_sqrt(FpElement(f7, 0))->value() == 0);
    // exhaustive: QRs mod 7 are {1,2,4}
    std::set<long> qrs;
    for (long y = 1; y < 7; y++) qrs.insert(y * y % 7);
    CHECK(qrs == std::set<long>{1, 2, 4});
    CHECK(fp_sqrt(FpElement(f7, 2))->value() == 3);  // 3^2 = 9 = 2 and 3 < 4
    CHECK(!fp_sqrt(FpElement(f7, 3)).has_value());

    // p = 1 mod 4 exercises the full Tonelli-Shanks path
    PrimeField f65537(mpz_class(65537));
    Rng rng(3);
    for (int i = 0; i < 40; i++) {
        FpElement a(f65537, rng.below(f65537.p()));
        FpElement sq = a * a;
        auto root = fp_sqrt(sq);
        REQUIRE(root.has_value());
        CHECK((*root == a || *root == -a));
        mpz_class other = f65537.p() - root->value();
        if (root->value() != 0) CHECK(root->value() <= other);
    }
}

TEST_CASE("is_probable_prime vs trial division") {
    CHECK(is_probable_prime(97, 64));
    CHECK_FALSE(is_probable_prime(1, 64));
    CHECK_FALSE(is_probable_prime(0, 64));
    // 112540273 / 97 = 1160209; exhaustive trial division is the oracle
    mpz_class n(1160209);
    CHECK(is_probable_prime(n, 64) == trial_division_prime(n));
    CHECK_FALSE(trial_division_prime(n));  // 1160209 = 37 * 31357
    CHECK(n == 37 * mpz_class(31357));
    for (mpz_class m = 2; m < 600; m++)
        CHECK(is_probable_prime(m, 32) == trial_division_prime(m));
}

TEST_CASE("naf_encode examples and round trip") {
    CHECK(naf_encode(1).digits == std::vector<int>{1});
    CHECK(naf_encode(7).digits == std::vector<int>{1, 0, 0, -1});  // 8 - 1
    CHECK_THROWS_AS(naf_encode(0), UsageError);
    Rng rng(5);
    for (int i = 0; i < 10; i++) {
        mpz_class x = rng.bits(256);
        SignedDigitString s = naf_encode(x);
        CHECK(s.value() == x);
        CHECK(s.digits.size() <= bitlen(x) + 1);
        CHECK(s.digits.front() != 0);
    }
    CHECK(binary_encode(6).digits == std::vector<int>{1, 1, 0});
    CHECK(binary_encode(6).value() == 6);
}

TEST_CASE("naf non-adjacency exhaustive below 2^16") {
    for (long x = 1; x < (1 << 16); x++) {
        SignedDigitString s = naf_encode(x);
        for (std::size_t i = 1; i < s.digits.size(); i++) {
            if (s.digits[i] != 0 && s.digits[i - 1] != 0) {
                CAPTURE(x);
                FAIL("adjacent nonzero digits");
            }
        }
        if (x % 9999 == 0) CHECK(s.value() == x);
    }
}

TEST_CASE("naf nonzero density over random 256-bit integers") {
    Rng rng(1234);
    const int n = 10000;
    double total = 0, len = 0;
    for (int i = 0; i < n; i++) {
        mpz_class x = rng.bits(256);
        SignedDigitString s = naf_encode(x);
        total += static_cast<double>(s.weight());
        len += static_cast<double>(s.digits.size());
    }
    double density = total / len;
    CHECK(density >= 0.30);
    CHECK(density <= 0.37);
}

TEST_CASE("fp_sqrt of squares lands on a or p-a") {
    PrimeField f103(103);
    for (long a = 1; a < 103; a++) {
        FpElement x(f103, a);
        auto root = fp_sqrt(x * x);
        REQUIRE(root.has_value());
        CHECK((root->value() == a || root->value() == 103 - a));
    }
}

TEST_CASE("hex serialization round trip") {
    CHECK(hex_str(mpz_class(0)) == "0x0");
    CHECK(hex_str(mpz_class(-13)) == "-0xd");
    CHECK(parse_hex("0x61") == 97);
    CHECK(parse_hex("-0x61") == -97);
    Rng rng(9);
    for (int i = 0; i < 16; i++) {
        mpz_class v = rng.bits(100);
        CHECK(parse_hex(hex_str(v)) == v);
        CHECK(parse_hex(hex_str(-v)) == -v);
    }
    CHECK_THROWS_AS(parse_hex("xyz"), UsageError);
}
