#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pairing {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Caller violated a precondition (mismatched fields, bad arguments, ...).
struct UsageError : Error {
    using Error::Error;
};

struct DivisionByZero : Error {
    using Error::Error;
};

// A line or vertical was evaluated at one of its zeros or poles.
struct DegenerateEval : Error {
    using Error::Error;
};

struct UnsupportedTwist : Error {
    using Error::Error;
};

struct InvalidContext : Error {
    using Error::Error;
};

struct RankError : Error {
    using Error::Error;
};

struct SearchFailure : Error {
    using Error::Error;
};

// Integers serialize as lowercase hex with 0x prefix; negative values as -0x...
std::string hex_str(const mpz_class& n);
mpz_class parse_hex(const std::string& s);

// Exact integer square root; throws Error if n is not a perfect square.
mpz_class exact_isqrt(const mpz_class& n);

unsigned bitlen(const mpz_class& n);

// Deterministic splitmix64-based generator. No global state anywhere.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, bound), bound > 0.
    mpz_class below(const mpz_class& bound);

    // Uniform nbits-bit value (top bit set when nbits > 0).
    mpz_class bits(unsigned nbits);

  private:
    std::uint64_t state_;
};

// Operation counters, accumulated per call via RAII scopes. A scope adds its
// counts into the enclosing scope when it closes, so outer calls see totals.
struct OpCounters {
    std::uint64_t m1 = 0;    // F_p multiplications
    std::uint64_t i1 = 0;    // F_p inversions
    std::uint64_t mul = 0;   // F_{p^k} full multiplications (M2)
    std::uint64_t sq = 0;    // F_{p^k} squarings
    std::uint64_t smul = 0;  // F_{p^k} by-scalar multiplications
    std::uint64_t inv = 0;   // F_{p^k} inversions (I2)
    std::uint64_t frob = 0;  // Frobenius (power) applications
    std::uint64_t steps = 0; // Miller loop iterations

    OpCounters& operator+=(const OpCounters& o) {
        m1 += o.m1;
        i1 += o.i1;
        mul += o.mul;
        sq += o.sq;
        smul += o.smul;
        inv += o.inv;
        frob += o.frob;
        steps += o.steps;
        return *this;
    }
};

namespace detail {
OpCounters*& active_counters();
}

class CounterScope {
  public:
    CounterScope() : prev_(detail::active_counters()) { detail::active_counters() = &counts_; }
    ~CounterScope() {
        detail::active_counters() = prev_;
        if (prev_) *prev_ += counts_;
    }
    CounterScope(const CounterScope&) = delete;
    CounterScope& operator=(const CounterScope&) = delete;

    const OpCounters& counts() const { return counts_; }

  private:
    OpCounters counts_;
    OpCounters* prev_;
};

inline void count_m1(std::uint64_t n = 1) {
    if (auto* c = detail::active_counters()) c->m1 += n;
}
inline void count_i1() {
    if (auto* c = detail::active_counters()) c->i1++;
}
inline void count_mul() {
    if (auto* c = detail::active_counters()) c->mul++;
}
inline void count_sq() {
    if (auto* c = detail::active_counters()) c->sq++;
}
inline void count_smul() {
    if (auto* c = detail::active_counters()) c->smul++;
}
inline void count_inv() {
    if (auto* c = detail::active_counters()) c->inv++;
}
inline void count_frob() {
    if (auto* c = detail::active_counters()) c->frob++;
}
inline void count_step() {
    if (auto* c = detail::active_counters()) c->steps++;
}

}  // namespace pairing
