#include "pairing/ext_field.hpp"

#include <algorithm>
#include <map>

namespace pairing {

namespace {

using Coeffs = std::vector<mpz_class>;

void trim_poly(Coeffs& v) {
    while (!v.empty() && v.back() == 0) v.pop_back();
}

mpz_class mod_p(const mpz_class& v, const mpz_class& p) {
    mpz_class r = v % p;
    if (r < 0) r += p;
    return r;
}

// Dense schoolbook product over Z, skipping zero coefficients.
Coeffs poly_mul_raw(const Coeffs& a, const Coeffs& b) {
    if (a.empty() || b.empty()) return {};
    Coeffs out(a.size() + b.size() - 1, mpz_class(0));
    std::uint64_t muls = 0;
    for (std::size_t i = 0; i < a.size(); i++) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); j++) {
            if (b[j] == 0) continue;
            out[i + j] += a[i] * b[j];
            muls++;
        }
    }
    count_m1(muls);
    return out;
}

std::size_t support(const Coeffs& a) {
    std::size_t s = 0;
    for (const auto& c : a)
        if (c != 0) s++;
    return s;
}

constexpr std::size_t kKaratsubaThreshold = 8;

Coeffs poly_mul(const Coeffs& a, const Coeffs& b);

Coeffs karatsuba(const Coeffs& a, const Coeffs& b) {
    std::size_t m = (std::max(a.size(), b.size()) + 1) / 2;
    Coeffs a0(a.begin(), a.begin() + std::min(m, a.size()));
    Coeffs a1(a.begin() + std::min(m, a.size()), a.end());
    Coeffs b0(b.begin(), b.begin() + std::min(m, b.size()));
    Coeffs b1(b.begin() + std::min(m, b.size()), b.end());
    trim_poly(a0);
    trim_poly(a1);
    trim_poly(b0);
    trim_poly(b1);

    Coeffs z0 = poly_mul(a0, b0);
    Coeffs z2 = poly_mul(a1, b1);
    Coeffs sa = a0, sb = b0;
    sa.resize(std::max(a0.size(), a1.size()), mpz_class(0));
    sb.resize(std::max(b0.size(), b1.size()), mpz_class(0));
    for (std::size_t i = 0; i < a1.size(); i++) sa[i] += a1[i];
    for (std::size_t i = 0; i < b1.size(); i++) sb[i] += b1[i];
    trim_poly(sa);
    trim_poly(sb);
    Coeffs z1 = poly_mul(sa, sb);
    for (std::size_t i = 0; i < z0.size(); i++) z1[i] -= z0[i];
    for (std::size_t i = 0; i < z2.size(); i++) z1[i] -= z2[i];
    trim_poly(z1);

    Coeffs out(a.size() + b.size() - 1, mpz_class(0));
    for (std::size_t i = 0; i < z0.size(); i++) out[i] += z0[i];
    for (std::size_t i = 0; i < z1.size(); i++) out[m + i] += z1[i];
    for (std::size_t i = 0; i < z2.size(); i++) out[2 * m + i] += z2[i];
    return out;
}

Coeffs poly_mul(const Coeffs& a, const Coeffs& b) {
    if (a.empty() || b.empty()) return {};
    std::size_t deg = std::min(a.size(), b.size()) - 1;
    bool dense = support(a) * 2 > a.size() && support(b) * 2 > b.size();
    if (deg + 1 >= kKaratsubaThreshold && dense) return karatsuba(a, b);
    return poly_mul_raw(a, b);
}

// Reduce modulo a monic polynomial, coefficients mod p afterwards.
void poly_reduce(Coeffs& c, const Coeffs& f, const mpz_class& p) {
    std::size_t k = f.size() - 1;
    for (std::size_t j = c.size(); j-- > k;) {
        if (c[j] == 0) continue;
        mpz_class t = std::move(c[j]);
        c[j] = 0;
        std::uint64_t muls = 0;
        for (std::size_t i = 0; i < k; i++) {
            if (f[i] == 0) continue;
            c[j - k + i] -= t * f[i];
            muls++;
        }
        count_m1(muls);
    }
    c.resize(k);
    for (auto& v : c) v = mod_p(v, p);
}

Coeffs poly_mulmod(const Coeffs& a, const Coeffs& b, const Coeffs& f, const mpz_class& p) {
    Coeffs c = poly_mul(a, b);
    poly_reduce(c, f, p);
    trim_poly(c);
    return c;
}

Coeffs poly_powmod(const Coeffs& base, const mpz_class& e, const Coeffs& f, const mpz_class& p) {
    Coeffs acc{mpz_class(1)};
    Coeffs b = base;
    for (long i = static_cast<long>(bitlen(e)) - 1; i >= 0; i--) {
        acc = poly_mulmod(acc, acc, f, p);
        if (mpz_tstbit(e.get_mpz_t(), i)) acc = poly_mulmod(acc, b, f, p);
    }
    return acc;
}

Coeffs poly_mod(Coeffs a, const Coeffs& m, const mpz_class& p) {
    trim_poly(a);
    while (a.size() >= m.size()) {
        mpz_class inv_lead;
        mpz_invert(inv_lead.get_mpz_t(), m.back().get_mpz_t(), p.get_mpz_t());
        mpz_class c = mod_p(a.back() * inv_lead, p);
        std::size_t shift = a.size() - m.size();
        for (std::size_t i = 0; i < m.size(); i++) a[shift + i] = mod_p(a[shift + i] - c * m[i], p);
        trim_poly(a);
    }
    return a;
}

Coeffs poly_gcd(Coeffs u, Coeffs v, const mpz_class& p) {
    trim_poly(u);
    trim_poly(v);
    while (!v.empty()) {
        Coeffs r = poly_mod(u, v, p);
        u = std::move(v);
        v = std::move(r);
    }
    return u;
}

bool poly_irreducible(const Coeffs& f, const mpz_class& p) {
    unsigned k = static_cast<unsigned>(f.size()) - 1;
    if (k == 0) return false;
    if (k == 1) return true;
    if (f[0] == 0) return false;  // divisible by X

    // X^p mod f, then the Frobenius matrix; columns are (X^p)^j mod f.
    Coeffs w = poly_powmod(Coeffs{mpz_class(0), mpz_class(1)}, p, f, p);
    std::vector<Coeffs> cols(k);
    cols[0] = Coeffs{mpz_class(1)};
    if (k > 1) cols[1] = w;
    for (unsigned j = 2; j < k; j++) cols[j] = poly_mulmod(cols[j - 1], w, f, p);

    auto apply = [&](const Coeffs& v) {
        Coeffs out(k, mpz_class(0));
        for (std::size_t j = 0; j < v.size(); j++) {
            if (v[j] == 0) continue;
            for (std::size_t i = 0; i < cols[j].size(); i++) out[i] += v[j] * cols[j][i];
        }
        for (auto& x : out) x = mod_p(x, p);
        trim_poly(out);
        return out;
    };

    std::vector<unsigned> ells = prime_factors(k);
    Coeffs x_poly{mpz_class(0), mpz_class(1)};
    Coeffs v = x_poly;  // X^{p^0}
    for (unsigned j = 1; j <= k; j++) {
        v = apply(v);  // X^{p^j}
        for (unsigned ell : ells) {
            if (j != k / ell) continue;
            Coeffs diff = v;
            diff.resize(std::max<std::size_t>(diff.size(), 2), mpz_class(0));
            diff[1] = mod_p(diff[1] - 1, p);
            trim_poly(diff);
            Coeffs g = poly_gcd(f, diff, p);
            if (g.size() != 1) return false;
        }
    }
    return v == x_poly;  // X^{p^k} == X
}

}  // namespace

const char* modulus_kind_name(ModulusKind k) {
    switch (k) {
        case ModulusKind::Binomial: return "binomial";
        case ModulusKind::Trinomial: return "trinomial";
        case ModulusKind::Generic: return "generic";
    }
    return "?";
}

std::vector<unsigned> prime_factors(unsigned n) {
    std::vector<unsigned> out;
    for (unsigned q = 2; q * q <= n; q++) {
        if (n % q == 0) {
            out.push_back(q);
            while (n % q == 0) n /= q;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

std::shared_ptr<const ExtFieldSpec> ExtFieldSpec::make(std::shared_ptr<const PrimeField> base,
                                                       unsigned k, ModulusKind kind,
                                                       std::vector<mpz_class> modulus) {
    if (!base || k < 2) throw UsageError("ExtFieldSpec: need base field and k >= 2");
    if (modulus.size() != k + 1 || modulus[k] != 1)
        throw UsageError("ExtFieldSpec: modulus must be monic of degree k");
    const mpz_class& p = base->p();
    for (auto& c : modulus) c = mod_p(c, p);
    modulus[k] = 1;
    if (!poly_irreducible(modulus, p)) throw UsageError("ExtFieldSpec: modulus is reducible");

    auto spec = std::shared_ptr<ExtFieldSpec>(new ExtFieldSpec());
    spec->base_ = std::move(base);
    spec->k_ = k;
    spec->kind_ = kind;
    spec->modulus_ = std::move(modulus);
    mpz_pow_ui(spec->pk_.get_mpz_t(), p.get_mpz_t(), k);

    if (kind == ModulusKind::Binomial) {
        // X^k - a; the binomial divisibility criterion must hold for the
        // permutation structure below.
        spec->a_ = mod_p(-spec->modulus_[0], p);
        if (!binomial_criterion_holds(p, k))
            throw UsageError("ExtFieldSpec: binomial criterion fails for this (p, k)");
        mpz_class pm1 = p - 1;
        for (unsigned i = 1; i < k; i++) {
            FrobTable t;
            t.diag_perm = true;
            t.diag.resize(k);
            t.perm.resize(k);
            mpz_class pi;
            mpz_pow_ui(pi.get_mpz_t(), p.get_mpz_t(), i);
            for (unsigned j = 0; j < k; j++) {
                mpz_class jp = j * pi;
                mpz_class rem = jp % k;
                t.perm[j] = static_cast<unsigned>(rem.get_ui());
                mpz_class exp = (jp - rem) / k % pm1;
                mpz_powm(t.diag[j].get_mpz_t(), spec->a_.get_mpz_t(), exp.get_mpz_t(),
                         p.get_mpz_t());
            }
            spec->frob_.push_back(std::move(t));
        }
    } else {
        if (kind == ModulusKind::Trinomial) spec->a_ = spec->modulus_[0];
        // pi as a dense matrix; higher powers by matrix product.
        Coeffs w = poly_powmod(Coeffs{mpz_class(0), mpz_class(1)}, p, spec->modulus_, p);
        std::vector<Coeffs> m1(k);
        m1[0] = Coeffs{mpz_class(1)};
        if (k > 1) m1[1] = w;
        for (unsigned j = 2; j < k; j++) m1[j] = poly_mulmod(m1[j - 1], w, spec->modulus_, p);
        for (auto& col : m1) col.resize(k, mpz_class(0));

        std::vector<Coeffs> prev = m1;
        for (unsigned i = 1; i < k; i++) {
            FrobTable t;
            t.dense = prev;
            spec->frob_.push_back(std::move(t));
            if (i + 1 >= k) break;
            // next = prev o m1  (columns of m1 pushed through prev)
            std::vector<Coeffs> next(k, Coeffs(k, mpz_class(0)));
            for (unsigned j = 0; j < k; j++) {
                for (unsigned l = 0; l < k; l++) {
                    if (m1[j][l] == 0) continue;
                    for (unsigned r = 0; r < k; r++) next[j][r] += m1[j][l] * prev[l][r];
                }
                for (unsigned r = 0; r < k; r++) next[j][r] = mod_p(next[j][r], p);
            }
            prev = std::move(next);
        }
    }
    return spec;
}

std::shared_ptr<const ExtFieldSpec> ExtFieldSpec::make_binomial(
    std::shared_ptr<const PrimeField> base, unsigned k, const mpz_class& a) {
    std::vector<mpz_class> f(k + 1, mpz_class(0));
    f[0] = -a;
    f[k] = 1;
    return make(std::move(base), k, ModulusKind::Binomial, std::move(f));
}

std::shared_ptr<const ExtFieldSpec> ExtFieldSpec::make_trinomial(
    std::shared_ptr<const PrimeField> base, unsigned k, const mpz_class& a) {
    std::vector<mpz_class> f(k + 1, mpz_class(0));
    f[0] = a;
    f[1] = 1;
    f[k] = 1;
    return make(std::move(base), k, ModulusKind::Trinomial, std::move(f));
}

ExtElement::ExtElement(const ExtFieldSpec& spec, std::vector<mpz_class> coeffs)
    : spec_(&spec), c_(std::move(coeffs)) {
    if (c_.size() > spec.k()) throw UsageError("ExtElement: too many coefficients");
    c_.resize(spec.k(), mpz_class(0));
    for (auto& v : c_) v = mod_p(v, spec.p());
}

ExtElement ExtElement::zero(const ExtFieldSpec& spec) { return ExtElement(spec, {}); }

ExtElement ExtElement::one(const ExtFieldSpec& spec) { return from_base(spec, 1); }

ExtElement ExtElement::from_base(const ExtFieldSpec& spec, const mpz_class& c) {
    return ExtElement(spec, {c});
}

ExtElement ExtElement::monomial(const ExtFieldSpec& spec, unsigned i, const mpz_class& c) {
    if (i >= spec.k()) throw UsageError("ExtElement::monomial: exponent out of range");
    std::vector<mpz_class> v(i + 1, mpz_class(0));
    v[i] = c;
    return ExtElement(spec, std::move(v));
}

const ExtFieldSpec& ExtElement::spec() const {
    if (!spec_) throw UsageError("uninitialized ExtElement");
    return *spec_;
}

bool ExtElement::is_zero() const {
    for (const auto& v : c_)
        if (v != 0) return false;
    return true;
}

bool ExtElement::is_base() const {
    for (std::size_t i = 1; i < c_.size(); i++)
        if (c_[i] != 0) return false;
    return true;
}

unsigned ExtElement::support_size() const {
    unsigned s = 0;
    for (const auto& v : c_)
        if (v != 0) s++;
    return s;
}

namespace {
void check_same_spec(const ExtElement& a, const ExtElement& b) {
    if (&a.spec() != &b.spec() && !(a.spec() == b.spec()))
        throw UsageError("ExtElement operands over different field specs");
}
}  // namespace

bool ExtElement::operator==(const ExtElement& o) const {
    check_same_spec(*this, o);
    return c_ == o.c_;
}

ExtElement ExtElement::operator+(const ExtElement& o) const {
    check_same_spec(*this, o);
    std::vector<mpz_class> v(c_.size());
    const mpz_class& p = spec().p();
    for (std::size_t i = 0; i < c_.size(); i++) {
        v[i] = c_[i] + o.c_[i];
        if (v[i] >= p) v[i] -= p;
    }
    ExtElement out;
    out.spec_ = spec_;
    out.c_ = std::move(v);
    return out;
}

ExtElement ExtElement::operator-(const ExtElement& o) const {
    check_same_spec(*this, o);
    std::vector<mpz_class> v(c_.size());
    const mpz_class& p = spec().p();
    for (std::size_t i = 0; i < c_.size(); i++) {
        v[i] = c_[i] - o.c_[i];
        if (v[i] < 0) v[i] += p;
    }
    ExtElement out;
    out.spec_ = spec_;
    out.c_ = std::move(v);
    return out;
}

ExtElement ExtElement::operator-() const {
    const mpz_class& p = spec().p();
    std::vector<mpz_class> v(c_.size());
    for (std::size_t i = 0; i < c_.size(); i++) v[i] = c_[i] == 0 ? mpz_class(0) : p - c_[i];
    ExtElement out;
    out.spec_ = spec_;
    out.c_ = std::move(v);
    return out;
}

namespace {

// Shared coefficient work for mul/square; counting of M2/sq is done by the
// callers.
Coeffs raw_ext_mul(const ExtElement& a, const ExtElement& b) {
    const ExtFieldSpec& s = a.spec();
    Coeffs ca = a.coeffs(), cb = b.coeffs();
    trim_poly(ca);
    trim_poly(cb);
    if (ca.empty() || cb.empty()) return Coeffs(s.k(), mpz_class(0));
    Coeffs prod = poly_mul(ca, cb);
    const mpz_class& p = s.p();
    unsigned k = s.k();
    if (prod.size() > k) {
        switch (s.kind()) {
            case ModulusKind::Binomial: {
                const mpz_class& av = s.param_a();
                std::uint64_t muls = 0;
                for (std::size_t j = prod.size(); j-- > k;) {
                    if (prod[j] == 0) continue;
                    prod[j - k] += prod[j] * av;
                    muls++;
                    prod[j] = 0;
                }
                count_m1(muls);
                prod.resize(k);
                for (auto& v : prod) v = mod_p(v, p);
                break;
            }
            case ModulusKind::Trinomial: {
                const mpz_class& av = s.param_a();
                std::uint64_t muls = 0;
                for (std::size_t j = prod.size(); j-- > k;) {
                    if (prod[j] == 0) continue;
                    prod[j - k + 1] -= prod[j];
                    prod[j - k] -= prod[j] * av;
                    muls++;
                    prod[j] = 0;
                }
                count_m1(muls);
                prod.resize(k);
                for (auto& v : prod) v = mod_p(v, p);
                break;
            }
            case ModulusKind::Generic:
                poly_reduce(prod, s.modulus(), p);
                break;
        }
    } else {
        prod.resize(k, mpz_class(0));
        for (auto& v : prod) v = mod_p(v, p);
    }
    return prod;
}

ExtElement wrap(const ExtFieldSpec& s, Coeffs c) {
    c.resize(s.k(), mpz_class(0));
    return ExtElement(s, std::move(c));
}

// u = q*v + r over F_p; v nonzero.
void poly_divmod_fp(const Coeffs& u, const Coeffs& v, const mpz_class& p, Coeffs& q, Coeffs& r) {
    r = u;
    trim_poly(r);
    Coeffs vv = v;
    trim_poly(vv);
    if (vv.empty()) throw DivisionByZero("poly_divmod_fp");
    q.clear();
    if (r.size() >= vv.size()) q.assign(r.size() - vv.size() + 1, mpz_class(0));
    mpz_class lead_inv;
    mpz_invert(lead_inv.get_mpz_t(), vv.back().get_mpz_t(), p.get_mpz_t());
    while (r.size() >= vv.size()) {
        mpz_class c = mod_p(r.back() * lead_inv, p);
        std::size_t shift = r.size() - vv.size();
        q[shift] = c;
        for (std::size_t i = 0; i < vv.size(); i++)
            r[shift + i] = mod_p(r[shift + i] - c * vv[i], p);
        trim_poly(r);
    }
}

}  // namespace

ExtElement ext_mul(const ExtElement& a, const ExtElement& b) {
    check_same_spec(a, b);
    if (a.is_base()) return ext_scalar_mul(a.coeffs()[0], b);
    if (b.is_base()) return ext_scalar_mul(b.coeffs()[0], a);
    count_mul();
    return wrap(a.spec(), raw_ext_mul(a, b));
}

ExtElement ext_square(const ExtElement& a) {
    if (a.is_base()) {
        mpz_class c = a.coeffs()[0];
        return ext_scalar_mul(c, a);
    }
    count_sq();
    return wrap(a.spec(), raw_ext_mul(a, a));
}

ExtElement ext_scalar_mul(const mpz_class& s, const ExtElement& a) {
    const ExtFieldSpec& sp = a.spec();
    const mpz_class& p = sp.p();
    mpz_class sv = mod_p(s, p);
    Coeffs out(sp.k());
    std::uint64_t muls = 0;
    for (unsigned i = 0; i < sp.k(); i++) {
        if (a.coeffs()[i] == 0 || sv == 0) {
            out[i] = 0;
            continue;
        }
        out[i] = a.coeffs()[i] * sv % p;
        muls++;
    }
    count_m1(muls);
    count_smul();
    return ExtElement(sp, std::move(out));
}

ExtElement ext_add_scalar(const ExtElement& a, const mpz_class& s) {
    Coeffs c = a.coeffs();
    c[0] = mod_p(c[0] + s, a.spec().p());
    return ExtElement(a.spec(), std::move(c));
}

ExtElement ext_inv(const ExtElement& a) {
    if (a.is_zero()) throw DivisionByZero("ext_inv of zero");
    const ExtFieldSpec& s = a.spec();
    const mpz_class& p = s.p();
    count_inv();
    if (a.is_base()) {
        mpz_class g;
        mpz_invert(g.get_mpz_t(), a.coeffs()[0].get_mpz_t(), p.get_mpz_t());
        return ExtElement::from_base(s, g);
    }
    // Extended Euclid in F_p[X]: t0*a == gcd (mod modulus) on exit.
    Coeffs r0 = s.modulus(), r1 = a.coeffs();
    trim_poly(r1);
    Coeffs t0{}, t1{mpz_class(1)};
    while (!r1.empty()) {
        Coeffs q, rem;
        poly_divmod_fp(r0, r1, p, q, rem);
        count_i1();
        Coeffs qt = poly_mul(q, t1);
        for (auto& v : qt) v = mod_p(v, p);
        Coeffs t2 = t0;
        t2.resize(std::max(t2.size(), qt.size()), mpz_class(0));
        for (std::size_t i = 0; i < qt.size(); i++) t2[i] = mod_p(t2[i] - qt[i], p);
        trim_poly(t2);
        r0 = std::move(r1);
        r1 = std::move(rem);
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    // r0 = gcd (a nonzero constant since the modulus is irreducible).
    if (r0.size() != 1) throw Error("ext_inv: gcd not constant; reducible modulus?");
    mpz_class ginv;
    mpz_invert(ginv.get_mpz_t(), r0[0].get_mpz_t(), p.get_mpz_t());
    count_i1();
    for (auto& c : t0) c = mod_p(c * ginv, p);
    return ExtElement(s, std::move(t0));
}

ExtElement frobenius(const ExtElement& a, unsigned i) {
    const ExtFieldSpec& s = a.spec();
    if (i >= s.k()) throw UsageError("frobenius: power index out of range");
    if (i == 0) return a;
    count_frob();
    const auto& t = s.frob_table(i);
    const mpz_class& p = s.p();
    Coeffs out(s.k(), mpz_class(0));
    if (t.diag_perm) {
        for (unsigned j = 0; j < s.k(); j++) out[t.perm[j]] = a.coeffs()[j] * t.diag[j] % p;
        count_m1(s.k());
    } else {
        std::uint64_t muls = 0;
        for (unsigned j = 0; j < s.k(); j++) {
            const mpz_class& c = a.coeffs()[j];
            if (c == 0) continue;
            for (unsigned r = 0; r < s.k(); r++) {
                if (t.dense[j][r] == 0) continue;
                out[r] += c * t.dense[j][r];
                muls++;
            }
        }
        count_m1(muls);
        for (auto& v : out) v = mod_p(v, p);
    }
    return ExtElement(s, std::move(out));
}

ExtElement ext_pow(const ExtElement& a, const mpz_class& n, unsigned window) {
    const ExtFieldSpec& s = a.spec();
    if (n == 0) return ExtElement::one(s);
    if (n < 0) return ext_pow(ext_inv(a), -n, window);
    if (window < 1) window = 1;
    // table cost only pays off for long exponents
    window = std::min(window, std::max(1u, bitlen(n) / 8 + 1));
    std::vector<ExtElement> odd{a};
    ExtElement a2 = ext_square(a);
    for (unsigned i = 1; i < (1u << (window - 1)); i++) odd.push_back(ext_mul(odd.back(), a2));

    ExtElement acc = ExtElement::one(s);
    bool started = false;
    long i = static_cast<long>(bitlen(n)) - 1;
    while (i >= 0) {
        if (mpz_tstbit(n.get_mpz_t(), i) == 0) {
            if (started) acc = ext_square(acc);
            i--;
            continue;
        }
        long j = std::max<long>(i - static_cast<long>(window) + 1, 0);
        while (mpz_tstbit(n.get_mpz_t(), j) == 0) j++;
        unsigned long w = 0;
        for (long b = i; b >= j; b--) w = (w << 1) | mpz_tstbit(n.get_mpz_t(), b);
        for (long b = i; b >= j; b--)
            if (started) acc = ext_square(acc);
        acc = started ? ext_mul(acc, odd[(w - 1) / 2]) : odd[(w - 1) / 2];
        started = true;
        i = j - 1;
    }
    return acc;
}

bool is_in_subfield(const ExtElement& a, unsigned e) {
    unsigned k = a.spec().k();
    if (e == 0 || k % e != 0) throw UsageError("is_in_subfield: e must divide k");
    if (e == k) return true;
    return frobenius(a, e) == a;
}

mpz_class cyclotomic_value(unsigned k, const mpz_class& q) {
    if (k < 1 || q < 2) throw UsageError("cyclotomic_value: need k >= 1, q >= 2");
    if (k == 1) return q - 1;
    mpz_class num;
    mpz_pow_ui(num.get_mpz_t(), q.get_mpz_t(), k);
    num -= 1;
    for (unsigned d = 1; d < k; d++) {
        if (k % d != 0) continue;
        mpz_class phi_d = cyclotomic_value(d, q);
        mpz_class rem;
        mpz_fdiv_qr(num.get_mpz_t(), rem.get_mpz_t(), num.get_mpz_t(), phi_d.get_mpz_t());
        if (rem != 0) throw Error("cyclotomic_value: inexact division");
    }
    return num;
}

bool binomial_criterion_holds(const mpz_class& p, unsigned k) {
    for (unsigned ell : prime_factors(k))
        if ((p - 1) % ell != 0) return false;
    if (k % 4 == 0 && p % 4 != 1) return false;
    return true;
}

std::shared_ptr<const ExtFieldSpec> find_defining_polynomial(
    std::shared_ptr<const PrimeField> base, unsigned k, unsigned trinomial_bound) {
    const mpz_class& p = base->p();
    if (k < 2) throw UsageError("find_defining_polynomial: k >= 2");

    if (binomial_criterion_holds(p, k)) {
        std::vector<unsigned> ells = prime_factors(k);
        for (mpz_class a = 2; a < p; a++) {
            bool ok = true;
            for (unsigned ell : ells) {
                mpz_class e = (p - 1) / ell;
                mpz_class r;
                mpz_powm(r.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
                if (r == 1) {
                    ok = false;
                    break;
                }
            }
            if (ok) return ExtFieldSpec::make_binomial(base, k, a);
        }
    }

    for (mpz_class a = 1; a <= trinomial_bound && a < p; a++) {
        Coeffs f(k + 1, mpz_class(0));
        f[0] = a;
        f[1] = 1;
        f[k] = 1;
        if (poly_irreducible(f, p)) return ExtFieldSpec::make_trinomial(base, k, a);
    }

    // Sparse generic fallback: X^k + c1*X^j + c0. Deterministic scan; some
    // irreducible of this shape exists for every (p, k) we care about, and a
    // dense random scan below covers the rest.
    for (unsigned j = 2; j < k; j++) {
        for (unsigned c1 = 1; c1 <= 40; c1++) {
            for (unsigned c0 = 1; c0 <= 40; c0++) {
                Coeffs f(k + 1, mpz_class(0));
                f[0] = c0;
                f[j] = c1;
                f[k] = 1;
                if (poly_irreducible(f, p))
                    return ExtFieldSpec::make(base, k, ModulusKind::Generic, std::move(f));
            }
        }
    }
    Rng rng(0x67656e65726963ULL + k);
    for (;;) {
        Coeffs f(k + 1, mpz_class(0));
        for (unsigned i = 0; i < k; i++) f[i] = rng.below(p);
        f[k] = 1;
        if (f[0] == 0) continue;
        if (poly_irreducible(f, p))
            return ExtFieldSpec::make(base, k, ModulusKind::Generic, std::move(f));
    }
}

ExtElement random_element(const ExtFieldSpec& spec, Rng& rng) {
    Coeffs c(spec.k());
    for (auto& v : c) v = rng.below(spec.p());
    return ExtElement(spec, std::move(c));
}

ExtElement trace_to_subfield(const ExtElement& a, unsigned e) {
    unsigned k = a.spec().k();
    if (e == 0 || k % e != 0) throw UsageError("trace_to_subfield: e must divide k");
    ExtElement acc = a;
    for (unsigned i = e; i < k; i += e) acc = acc + frobenius(a, i);
    return acc;
}

std::optional<ExtElement> nth_root_in_group(const ExtElement& a, unsigned ell, const mpz_class& m,
                                            const std::function<ExtElement()>& sampler) {
    const ExtFieldSpec& s = a.spec();
    if (a.is_zero()) return ExtElement::zero(s);
    mpz_class u = m;
    unsigned long sexp = 0;
    while (u % ell == 0) {
        u /= ell;
        sexp++;
    }
    if (sexp == 0) {
        mpz_class inv;
        mpz_class l(ell);
        mpz_invert(inv.get_mpz_t(), l.get_mpz_t(), m.get_mpz_t());
        return ext_pow(a, inv);
    }
    // a must be an ell-th power: a^(m/ell) == 1.
    if (ext_pow(a, m / ell) != ExtElement::one(s)) return std::nullopt;

    // Split a into its order-u and order-ell^s parts.
    mpz_class ls;
    mpz_pow_ui(ls.get_mpz_t(), mpz_class(ell).get_mpz_t(), sexp);
    mpz_class w, z, g;
    mpz_gcdext(g.get_mpz_t(), w.get_mpz_t(), z.get_mpz_t(), ls.get_mpz_t(), u.get_mpz_t());
    ExtElement a_u = ext_pow(a, mod_p(ls * w, m));
    ExtElement a_k = ext_pow(a, mod_p(u * z, m));

    mpz_class linv_u;
    {
        mpz_class l(ell);
        mpz_invert(linv_u.get_mpz_t(), l.get_mpz_t(), u.get_mpz_t());
    }
    ExtElement x_u = ext_pow(a_u, linv_u);

    // Generator of the ell-part.
    ExtElement gen = ExtElement::one(s);
    for (int tries = 0; tries < 256; tries++) {
        ExtElement rho = sampler();
        if (rho.is_zero()) continue;
        ExtElement cand = ext_pow(rho, m / ell);
        if (cand != ExtElement::one(s)) {
            gen = ext_pow(rho, u);
            break;
        }
    }
    if (gen == ExtElement::one(s)) throw Error("nth_root: could not find non-residue");

    // Pohlig-Hellman digits of a_k in base ell.
    ExtElement zeta = gen;
    for (unsigned long i = 1; i < sexp; i++) zeta = ext_pow(zeta, ell);  // order ell
    std::vector<ExtElement> zeta_pow{ExtElement::one(s)};
    for (unsigned i = 1; i < ell; i++) zeta_pow.push_back(ext_mul(zeta_pow.back(), zeta));

    mpz_class e = 0;
    ExtElement gamma = a_k;
    mpz_class ellpow = 1;
    for (unsigned long j = 0; j < sexp; j++) {
        mpz_class shift;
        mpz_pow_ui(shift.get_mpz_t(), mpz_class(ell).get_mpz_t(), sexp - 1 - j);
        ExtElement h = ext_pow(gamma, shift);
        long digit = -1;
        for (unsigned i = 0; i < ell; i++) {
            if (h == zeta_pow[i]) {
                digit = i;
                break;
            }
        }
        if (digit < 0) throw Error("nth_root: dlog failure");
        if (digit != 0) {
            e += digit * ellpow;
            gamma = ext_mul(gamma, ext_pow(ext_inv(gen), digit * ellpow));
        }
        ellpow *= ell;
    }
    if (e % ell != 0) return std::nullopt;
    ExtElement x_k = ext_pow(gen, e / ell);
    return ext_mul(x_u, x_k);
}

std::optional<ExtElement> ext_sqrt_subfield(const ExtElement& a, unsigned e, Rng& rng) {
    const ExtFieldSpec& s = a.spec();
    mpz_class pe;
    mpz_pow_ui(pe.get_mpz_t(), s.p().get_mpz_t(), e);
    auto sampler = [&]() {
        for (;;) {
            ExtElement t = trace_to_subfield(random_element(s, rng), e);
            if (!t.is_zero()) return t;
        }
    };
    return nth_root_in_group(a, 2, pe - 1, sampler);
}

std::optional<ExtElement> ext_sqrt(const ExtElement& a, Rng& rng) {
    const ExtFieldSpec& s = a.spec();
    auto sampler = [&]() { return random_element(s, rng); };
    return nth_root_in_group(a, 2, s.order() - 1, sampler);
}

}  // namespace pairing
