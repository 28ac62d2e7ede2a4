#include "pairing/poly.hpp"

#include <map>
#include <sstream>

namespace pairing {

RationalPoly::RationalPoly(std::vector<mpq_class> coeffs) : c_(std::move(coeffs)) {
    for (auto& q : c_) q.canonicalize();
    trim();
}

RationalPoly RationalPoly::constant(const mpq_class& c) {
    return RationalPoly(std::vector<mpq_class>{c});
}

RationalPoly RationalPoly::monomial(unsigned deg, const mpq_class& c) {
    std::vector<mpq_class> v(deg + 1, mpq_class(0));
    v[deg] = c;
    return RationalPoly(std::move(v));
}

void RationalPoly::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

RationalPoly RationalPoly::operator+(const RationalPoly& o) const {
    std::vector<mpq_class> v(std::max(c_.size(), o.c_.size()), mpq_class(0));
    for (std::size_t i = 0; i < c_.size(); i++) v[i] += c_[i];
    for (std::size_t i = 0; i < o.c_.size(); i++) v[i] += o.c_[i];
    return RationalPoly(std::move(v));
}

RationalPoly RationalPoly::operator-(const RationalPoly& o) const {
    std::vector<mpq_class> v(std::max(c_.size(), o.c_.size()), mpq_class(0));
    for (std::size_t i = 0; i < c_.size(); i++) v[i] += c_[i];
    for (std::size_t i = 0; i < o.c_.size(); i++) v[i] -= o.c_[i];
    return RationalPoly(std::move(v));
}

RationalPoly RationalPoly::operator*(const RationalPoly& o) const {
    if (is_zero() || o.is_zero()) return RationalPoly();
    std::vector<mpq_class> v(c_.size() + o.c_.size() - 1, mpq_class(0));
    for (std::size_t i = 0; i < c_.size(); i++)
        for (std::size_t j = 0; j < o.c_.size(); j++) v[i + j] += c_[i] * o.c_[j];
    return RationalPoly(std::move(v));
}

RationalPoly RationalPoly::operator*(const mpq_class& s) const {
    std::vector<mpq_class> v = c_;
    for (auto& q : v) q *= s;
    return RationalPoly(std::move(v));
}

void RationalPoly::divmod(const RationalPoly& f, const RationalPoly& g, RationalPoly& q,
                          RationalPoly& r) {
    if (g.is_zero()) throw DivisionByZero("polynomial division by zero");
    std::vector<mpq_class> rem = f.c_;
    int dg = g.degree();
    std::vector<mpq_class> quo;
    if (f.degree() >= dg) quo.assign(f.degree() - dg + 1, mpq_class(0));
    mpq_class lead_inv = 1 / g.c_.back();
    for (int i = f.degree(); i >= dg; i--) {
        if (rem[i] == 0) continue;
        mpq_class c = rem[i] * lead_inv;
        quo[i - dg] = c;
        for (int j = 0; j <= dg; j++) rem[i - dg + j] -= c * g.c_[j];
    }
    q = RationalPoly(std::move(quo));
    r = RationalPoly(std::move(rem));
}

RationalPoly RationalPoly::divide_exact(const RationalPoly& g) const {
    RationalPoly q, r;
    divmod(*this, g, q, r);
    if (!r.is_zero()) throw Error("polynomial division not exact");
    return q;
}

bool RationalPoly::divisible_by(const RationalPoly& g) const {
    RationalPoly q, r;
    divmod(*this, g, q, r);
    return r.is_zero();
}

mpq_class RationalPoly::eval(const mpq_class& x) const {
    mpq_class acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

mpz_class RationalPoly::eval_integer(const mpz_class& x) const {
    mpq_class v = eval(mpq_class(x));
    if (v.get_den() != 1) throw Error("polynomial value not integral at " + hex_str(x));
    return v.get_num();
}

bool RationalPoly::integral_at(const mpz_class& x) const {
    return eval(mpq_class(x)).get_den() == 1;
}

mpz_class RationalPoly::denominator_lcm() const {
    mpz_class l = 1;
    for (const auto& q : c_) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
    return l;
}

std::string RationalPoly::str(const std::string& var) const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = degree(); i >= 0; i--) {
        mpq_class c = c_[i];
        if (c == 0) continue;
        if (!first) os << (c > 0 ? " + " : " - ");
        else if (c < 0) os << "-";
        mpq_class a = abs(c);
        if (a != 1 || i == 0) os << a.get_str();
        if (i > 0) {
            if (a != 1) os << "*";
            os << var;
            if (i > 1) os << "^" << i;
        }
        first = false;
    }
    return os.str();
}

RationalPoly cyclotomic_poly(unsigned k) {
    static std::map<unsigned, RationalPoly> cache;
    if (k == 0) throw UsageError("cyclotomic_poly: k >= 1");
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
    // x^k - 1
    std::vector<mpq_class> v(k + 1, mpq_class(0));
    v[0] = -1;
    v[k] = 1;
    RationalPoly num{std::move(v)};
    for (unsigned d = 1; d < k; d++)
        if (k % d == 0) num = num.divide_exact(cyclotomic_poly(d));
    cache[k] = num;
    return num;
}

RationalPoly compose(const RationalPoly& f, const RationalPoly& g) {
    RationalPoly acc;
    for (auto it = f.coeffs().rbegin(); it != f.coeffs().rend(); ++it)
        acc = acc * g + RationalPoly::constant(*it);
    return acc;
}

RationalPoly poly_sqrt(const RationalPoly& f) {
    if (f.is_zero()) return RationalPoly();
    int d = f.degree();
    if (d % 2 != 0) throw Error("poly_sqrt: odd degree");
    int h = d / 2;
    mpq_class lead = f.coeff(d);
    if (mpz_perfect_square_p(lead.get_num_mpz_t()) == 0 ||
        mpz_perfect_square_p(lead.get_den_mpz_t()) == 0)
        throw Error("poly_sqrt: leading coefficient not a square");
    mpz_class ln, ld;
    mpz_sqrt(ln.get_mpz_t(), lead.get_num_mpz_t());
    mpz_sqrt(ld.get_mpz_t(), lead.get_den_mpz_t());
    std::vector<mpq_class> s(h + 1, mpq_class(0));
    s[h] = mpq_class(ln, ld);
    // Match coefficients from the top: f[h+i] determines s[i].
    for (int i = h - 1; i >= 0; i--) {
        mpq_class acc = f.coeff(h + i);
        for (int j = i + 1; j <= h && h + i - j >= 0; j++)
            if (h + i - j <= h) acc -= s[j] * s[h + i - j];
        s[i] = acc / (2 * s[h]);
    }
    RationalPoly root{std::move(s)};
    if (!(root * root == f)) throw Error("poly_sqrt: not a perfect square");
    return root;
}

}  // namespace pairing
