#include "pairing/fp.hpp"

#include <algorithm>
#include <array>

namespace pairing {

namespace {

const std::vector<unsigned>& small_primes() {
    static const std::vector<unsigned> primes = [] {
        std::vector<unsigned> ps;
        std::array<bool, 1000> sieve{};
        for (unsigned i = 2; i < sieve.size(); i++) {
            if (sieve[i]) continue;
            ps.push_back(i);
            for (unsigned j = 2 * i; j < sieve.size(); j += i) sieve[j] = true;
        }
        return ps;
    }();
    return primes;
}

bool miller_rabin_round(const mpz_class& n, const mpz_class& base, const mpz_class& d,
                        unsigned long s) {
    mpz_class x;
    mpz_powm(x.get_mpz_t(), base.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    if (x == 1 || x == n - 1) return true;
    for (unsigned long i = 1; i < s; i++) {
        x = x * x % n;
        if (x == n - 1) return true;
    }
    return false;
}

}  // namespace

bool is_probable_prime(const mpz_class& n, int rounds, Rng& rng) {
    if (n < 2) return false;
    for (unsigned q : small_primes()) {
        if (n == q) return true;
        if (n % q == 0) return false;
    }
    mpz_class d = n - 1;
    unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
    d >>= s;
    for (int i = 0; i < rounds; i++) {
        mpz_class base = rng.below(n - 3) + 2;
        if (!miller_rabin_round(n, base, d, s)) return false;
    }
    return true;
}

bool is_probable_prime(const mpz_class& n, int rounds) {
    Rng rng(0x70726d65ULL ^ mpz_class(n % mpz_class("18446744073709551557")).get_ui());
    return is_probable_prime(n, rounds, rng);
}

PrimeField::PrimeField(mpz_class p) : p_(std::move(p)) {
    if (p_ < 5 || p_ % 2 == 0) throw UsageError("PrimeField: modulus must be an odd prime >= 5");
    if (!is_probable_prime(p_, 64)) throw UsageError("PrimeField: modulus fails primality test");
}

FpElement::FpElement(const PrimeField& f, mpz_class v) : field_(&f), v_(std::move(v)) {
    v_ %= f.p();
    if (v_ < 0) v_ += f.p();
}

const PrimeField& FpElement::field() const {
    if (!field_) throw UsageError("uninitialized FpElement");
    return *field_;
}

void FpElement::check_same(const FpElement& o) const {
    if (!field_ || !o.field_) throw UsageError("uninitialized FpElement");
    if (field_ != o.field_ && !(*field_ == *o.field_))
        throw UsageError("FpElement operands over different fields");
}

bool FpElement::operator==(const FpElement& o) const {
    check_same(o);
    return v_ == o.v_;
}

FpElement FpElement::operator+(const FpElement& o) const {
    check_same(o);
    mpz_class r = v_ + o.v_;
    if (r >= field_->p()) r -= field_->p();
    FpElement out;
    out.field_ = field_;
    out.v_ = std::move(r);
    return out;
}

FpElement FpElement::operator-(const FpElement& o) const {
    check_same(o);
    mpz_class r = v_ - o.v_;
    if (r < 0) r += field_->p();
    FpElement out;
    out.field_ = field_;
    out.v_ = std::move(r);
    return out;
}

FpElement FpElement::operator-() const {
    if (!field_) throw UsageError("uninitialized FpElement");
    FpElement out;
    out.field_ = field_;
    out.v_ = v_ == 0 ? mpz_class(0) : mpz_class(field_->p() - v_);
    return out;
}

FpElement FpElement::operator*(const FpElement& o) const {
    check_same(o);
    count_m1();
    FpElement out;
    out.field_ = field_;
    out.v_ = v_ * o.v_ % field_->p();
    return out;
}

FpElement fp_inv(const FpElement& a) {
    if (a.is_zero()) throw DivisionByZero("fp_inv of zero");
    count_i1();
    mpz_class g;
    if (!mpz_invert(g.get_mpz_t(), a.value().get_mpz_t(), a.field().p().get_mpz_t()))
        throw DivisionByZero("fp_inv: no inverse");
    return FpElement(a.field(), g);
}

FpElement fp_pow(const FpElement& a, const mpz_class& n, unsigned window) {
    const PrimeField& f = a.field();
    if (n == 0) return FpElement(f, 1);
    if (n < 0) return fp_pow(fp_inv(a), -n, window);
    if (window < 1) window = 1;
    window = std::min(window, std::max(1u, bitlen(n) / 8 + 1));

    // Precompute odd powers a^1, a^3, ..., a^(2^w - 1).
    std::vector<FpElement> odd{a};
    FpElement a2 = a * a;
    for (unsigned i = 1; i < (1u << (window - 1)); i++) odd.push_back(odd.back() * a2);

    FpElement acc(f, 1);
    long i = static_cast<long>(bitlen(n)) - 1;
    bool started = false;
    while (i >= 0) {
        if (mpz_tstbit(n.get_mpz_t(), i) == 0) {
            if (started) acc = acc * acc;
            i--;
            continue;
        }
        long j = std::max<long>(i - static_cast<long>(window) + 1, 0);
        while (mpz_tstbit(n.get_mpz_t(), j) == 0) j++;
        unsigned long w = 0;
        for (long b = i; b >= j; b--) w = (w << 1) | mpz_tstbit(n.get_mpz_t(), b);
        for (long b = i; b >= j; b--)
            if (started) acc = acc * acc;
        acc = started ? acc * odd[(w - 1) / 2] : odd[(w - 1) / 2];
        started = true;
        i = j - 1;
    }
    return acc;
}

bool fp_is_square(const FpElement& a) {
    if (a.is_zero()) return true;
    return fp_pow(a, (a.field().p() - 1) / 2).value() == 1;
}

std::optional<FpElement> fp_sqrt(const FpElement& a) {
    const PrimeField& f = a.field();
    const mpz_class& p = f.p();
    if (a.is_zero()) return FpElement(f, 0);
    if (!fp_is_square(a)) return std::nullopt;

    mpz_class s;
    if (p % 4 == 3) {
        FpElement r = fp_pow(a, (p + 1) / 4);
        s = r.value();
    } else {
        // Tonelli-Shanks: p - 1 = q * 2^e with q odd.
        mpz_class q = p - 1;
        unsigned long e = mpz_scan1(q.get_mpz_t(), 0);
        q >>= e;
        // Any non-residue works; scan deterministically.
        FpElement z(f, 2);
        while (fp_is_square(z)) z = z + FpElement(f, 1);
        FpElement c = fp_pow(z, q);
        FpElement x = fp_pow(a, (q + 1) / 2);
        FpElement t = fp_pow(a, q);
        unsigned long m = e;
        while (t.value() != 1) {
            FpElement t2 = t;
            unsigned long i = 0;
            while (t2.value() != 1) {
                t2 = t2 * t2;
                i++;
            }
            FpElement b = c;
            for (unsigned long j = 0; j + i + 1 < m; j++) b = b * b;
            x = x * b;
            c = b * b;
            t = t * c;
            m = i;
        }
        s = x.value();
    }
    mpz_class other = p - s;
    return FpElement(f, s <= other ? s : other);
}

mpz_class SignedDigitString::value() const {
    mpz_class v = 0;
    for (int d : digits) {
        v <<= 1;
        v += d;
    }
    return v;
}

std::size_t SignedDigitString::weight() const {
    std::size_t w = 0;
    for (int d : digits)
        if (d != 0) w++;
    return w;
}

SignedDigitString naf_encode(const mpz_class& x) {
    if (x < 1) throw UsageError("naf_encode needs x >= 1");
    mpz_class v = x;
    std::vector<int> rev;
    while (v > 0) {
        if (mpz_odd_p(v.get_mpz_t())) {
            int d = 2 - static_cast<int>(mpz_class(v % 4).get_ui());
            rev.push_back(d);
            v -= d;
        } else {
            rev.push_back(0);
        }
        v >>= 1;
    }
    SignedDigitString out;
    out.digits.assign(rev.rbegin(), rev.rend());
    return out;
}

SignedDigitString binary_encode(const mpz_class& x) {
    if (x < 1) throw UsageError("binary_encode needs x >= 1");
    SignedDigitString out;
    for (long i = static_cast<long>(bitlen(x)) - 1; i >= 0; i--)
        out.digits.push_back(mpz_tstbit(x.get_mpz_t(), i));
    return out;
}

std::size_t naf_weight(const mpz_class& x) {
    if (x == 0) return 0;
    return naf_encode(x < 0 ? mpz_class(-x) : x).weight();
}

}  // namespace pairing
