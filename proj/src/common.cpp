#include "pairing/common.hpp"

namespace pairing {

std::string hex_str(const mpz_class& n) {
    if (n < 0) {
        mpz_class m = -n;
        return "-0x" + m.get_str(16);
    }
    return "0x" + n.get_str(16);
}

mpz_class parse_hex(const std::string& s) {
    bool neg = false;
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) {
        neg = s[i] == '-';
        i++;
    }
    if (s.size() >= i + 2 && s[i] == '0' && (s[i + 1] == 'x' || s[i + 1] == 'X')) i += 2;
    if (i >= s.size()) throw UsageError("empty hex integer: '" + s + "'");
    mpz_class v;
    if (mpz_set_str(v.get_mpz_t(), s.c_str() + i, 16) != 0)
        throw UsageError("bad hex integer: '" + s + "'");
    return neg ? mpz_class(-v) : v;
}

mpz_class exact_isqrt(const mpz_class& n) {
    if (n < 0) throw Error("exact_isqrt of negative value");
    mpz_class root, rem;
    mpz_sqrtrem(root.get_mpz_t(), rem.get_mpz_t(), n.get_mpz_t());
    if (rem != 0) throw Error("not a perfect square: " + hex_str(n));
    return root;
}

unsigned bitlen(const mpz_class& n) {
    if (n == 0) return 0;
    return static_cast<unsigned>(mpz_sizeinbase(n.get_mpz_t(), 2));
}

mpz_class Rng::below(const mpz_class& bound) {
    if (bound <= 0) throw UsageError("Rng::below needs positive bound");
    unsigned nb = bitlen(bound);
    for (;;) {
        mpz_class v = 0;
        for (unsigned got = 0; got < nb; got += 64) {
            v <<= 64;
            v += mpz_class(static_cast<unsigned long>(next_u64() >> 32)) << 32 |
                 mpz_class(static_cast<unsigned long>(next_u64() & 0xffffffffULL));
        }
        v >>= (((nb + 63) / 64) * 64 - nb);
        if (v < bound) return v;
    }
}

mpz_class Rng::bits(unsigned nbits) {
    if (nbits == 0) return 0;
    mpz_class v = below(mpz_class(1) << (nbits - 1));
    return v + (mpz_class(1) << (nbits - 1));
}

namespace detail {
OpCounters*& active_counters() {
    thread_local OpCounters* active = nullptr;
    return active;
}
}  // namespace detail

}  // namespace pairing
