#include "ncdx/mpoly.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace ncdx {

namespace {
constexpr unsigned kMaxExp = 0xffffu;
}

Mono Mono::var(Var v, unsigned e) {
    if (e > kMaxExp) fail(Errc::Overflow, "monomial exponent too large");
    Mono m;
    m.packed = static_cast<uint64_t>(e) << shift(v);
    return m;
}

Mono Mono::with(Var v, unsigned e) const {
    if (e > kMaxExp) fail(Errc::Overflow, "monomial exponent too large");
    Mono m;
    m.packed = (packed & ~(uint64_t(0xffffu) << shift(v))) | (static_cast<uint64_t>(e) << shift(v));
    return m;
}

Mono Mono::operator*(const Mono &o) const {
    Mono m;
    for (int i = 0; i < kNumVars; ++i) {
        Var v = static_cast<Var>(i);
        unsigned e = exp(v) + o.exp(v);
        if (e > kMaxExp) fail(Errc::Overflow, "monomial exponent overflow in product");
        m.packed |= static_cast<uint64_t>(e) << shift(v);
    }
    return m;
}

Mono Mono::operator/(const Mono &o) const {
    Mono m;
    for (int i = 0; i < kNumVars; ++i) {
        Var v = static_cast<Var>(i);
        unsigned a = exp(v), b = o.exp(v);
        if (a < b) fail(Errc::InternalMismatch, "inexact monomial division");
        m.packed |= static_cast<uint64_t>(a - b) << shift(v);
    }
    return m;
}

bool Mono::divisible_by(const Mono &o) const {
    for (int i = 0; i < kNumVars; ++i) {
        Var v = static_cast<Var>(i);
        if (exp(v) < o.exp(v)) return false;
    }
    return true;
}

MPoly MPoly::monomial(const Rat &c, const Mono &m) {
    MPoly p;
    if (!c.is_zero()) p.terms_.push_back({m, c});
    return p;
}

MPoly MPoly::from_univariate(Var v, const std::vector<Rat> &coeffs) {
    MPoly p;
    for (size_t i = coeffs.size(); i-- > 0;)
        if (!coeffs[i].is_zero()) p.terms_.push_back({Mono::var(v, static_cast<unsigned>(i)), coeffs[i]});
    std::sort(p.terms_.begin(), p.terms_.end(),
              [](const Term &a, const Term &b) { return b.first < a.first; });
    return p;
}

Rat MPoly::constant_value() const {
    if (terms_.empty()) return Rat(0);
    if (!is_constant()) fail(Errc::InternalMismatch, "constant_value of non-constant polynomial");
    return terms_.front().second;
}

bool MPoly::uses(Var v) const {
    for (const auto &t : terms_)
        if (t.first.exp(v) > 0) return true;
    return false;
}

int MPoly::degree(Var v) const {
    int d = -1;
    for (const auto &t : terms_) d = std::max(d, static_cast<int>(t.first.exp(v)));
    return d; // -1 for the zero polynomial
}

int MPoly::max_degree() const {
    int d = 0;
    for (const auto &t : terms_)
        for (int i = 0; i < kNumVars; ++i) d = std::max(d, static_cast<int>(t.first.exp(static_cast<Var>(i))));
    return d;
}

const Mono &MPoly::leading_mono() const {
    if (terms_.empty()) fail(Errc::InternalMismatch, "leading monomial of zero");
    return terms_.front().first;
}

const Rat &MPoly::leading_coeff() const {
    if (terms_.empty()) fail(Errc::InternalMismatch, "leading coefficient of zero");
    return terms_.front().second;
}

void MPoly::normalize() {
    std::sort(terms_.begin(), terms_.end(),
              [](const Term &a, const Term &b) { return b.first < a.first; });
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (auto &t : terms_) {
        if (!out.empty() && out.back().first == t.first)
            out.back().second += t.second;
        else
            out.push_back(std::move(t));
        if (!out.empty() && out.back().second.is_zero()) out.pop_back();
    }
    // A cancellation in the middle can leave zeros behind the cursor.
    out.erase(std::remove_if(out.begin(), out.end(), [](const Term &t) { return t.second.is_zero(); }),
              out.end());
    terms_ = std::move(out);
}

MPoly MPoly::operator-() const {
    MPoly p = *this;
    for (auto &t : p.terms_) t.second = -t.second;
    return p;
}

MPoly MPoly::operator+(const MPoly &o) const {
    // Merge of two sorted term lists.
    MPoly p;
    p.terms_.reserve(terms_.size() + o.terms_.size());
    size_t i = 0, j = 0;
    while (i < terms_.size() || j < o.terms_.size()) {
        if (j == o.terms_.size() || (i < terms_.size() && o.terms_[j].first < terms_[i].first)) {
            p.terms_.push_back(terms_[i++]);
        } else if (i == terms_.size() || terms_[i].first < o.terms_[j].first) {
            p.terms_.push_back(o.terms_[j++]);
        } else {
            Rat c = terms_[i].second + o.terms_[j].second;
            if (!c.is_zero()) p.terms_.push_back({terms_[i].first, c});
            ++i, ++j;
        }
    }
    return p;
}

MPoly MPoly::operator-(const MPoly &o) const { return *this + (-o); }

MPoly MPoly::operator*(const MPoly &o) const {
    if (is_zero() || o.is_zero()) return MPoly();
    std::map<uint64_t, Rat> acc;
    for (const auto &a : terms_)
        for (const auto &b : o.terms_) {
            Mono m = a.first * b.first;
            auto it = acc.find(m.packed);
            if (it == acc.end())
                acc.emplace(m.packed, a.second * b.second);
            else
                it->second += a.second * b.second;
        }
    MPoly p;
    p.terms_.reserve(acc.size());
    for (auto it = acc.rbegin(); it != acc.rend(); ++it)
        if (!it->second.is_zero()) p.terms_.push_back({Mono{it->first}, it->second});
    return p;
}

MPoly MPoly::operator*(const Rat &c) const {
    if (c.is_zero()) return MPoly();
    MPoly p = *this;
    for (auto &t : p.terms_) t.second *= c;
    return p;
}

MPoly operator*(const Rat &c, const MPoly &p) { return p * c; }

MPoly MPoly::pow(unsigned e) const {
    MPoly r = MPoly::one();
    MPoly base = *this;
    while (e) {
        if (e & 1) r = r * base;
        base = (e >>= 1) ? base * base : base;
    }
    return r;
}

MPoly MPoly::derivative(Var v, const Rat &u_scale) const {
    if (v == Var::u) fail(Errc::UnknownVariable, "u is not a derivation variable");
    MPoly p;
    for (const auto &t : terms_) {
        unsigned e = t.first.exp(v);
        if (e > 0) p = p + monomial(t.second * Rat(static_cast<long>(e)), t.first.with(v, e - 1));
        if (v == Var::x) {
            unsigned eu = t.first.exp(Var::u);
            // (u^k)' = k * u_scale * u^k under d/dx, the exponent is unchanged.
            if (eu > 0 && !u_scale.is_zero())
                p = p + monomial(t.second * u_scale * Rat(static_cast<long>(eu)), t.first);
        }
    }
    return p;
}

namespace {
// Formal partial derivative: every variable (including u) is treated as an
// independent symbol. Used only by gcd/radical internals.
MPoly formal_partial(const MPoly &p, Var v) {
    MPoly r;
    for (const auto &t : p.terms()) {
        unsigned e = t.first.exp(v);
        if (e > 0)
            r = r + MPoly::monomial(t.second * Rat(static_cast<long>(e)), t.first.with(v, e - 1));
    }
    return r;
}
} // namespace

bool MPoly::divide_exact(const MPoly &o, MPoly &quot) const {
    if (o.is_zero()) return false;
    MPoly q, r = *this;
    while (!r.is_zero()) {
        if (!r.leading_mono().divisible_by(o.leading_mono())) return false;
        MPoly term = monomial(r.leading_coeff() / o.leading_coeff(), r.leading_mono() / o.leading_mono());
        q = q + term;
        r = r - term * o;
    }
    quot = std::move(q);
    return true;
}

MPoly MPoly::eval(Var v, const Rat &value) const {
    MPoly r;
    for (const auto &t : terms_) {
        unsigned e = t.first.exp(v);
        r = r + monomial(t.second * value.pow(e), t.first.with(v, 0));
    }
    return r;
}

Rat MPoly::content() const {
    if (terms_.empty()) return Rat(0);
    Int g(0), l(1);
    for (const auto &t : terms_) {
        g = int_gcd(g, t.second.num());
        l = int_lcm(l, t.second.den());
    }
    Rat c(g, l);
    if (leading_coeff().sign() < 0) c = -c;
    return c;
}

MPoly MPoly::primitive_part() const {
    if (terms_.empty()) return MPoly();
    return *this * content().inverse();
}

MPoly MPoly::coeff_of(Var v, int k) const {
    MPoly r;
    for (const auto &t : terms_)
        if (static_cast<int>(t.first.exp(v)) == k) r = r + monomial(t.second, t.first.with(v, 0));
    return r;
}

std::string MPoly::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto &t : terms_) {
        Rat c = t.second;
        if (first) {
            if (c.sign() < 0) { os << "-"; c = -c; }
        } else {
            os << (c.sign() < 0 ? " - " : " + ");
            if (c.sign() < 0) c = -c;
        }
        first = false;
        std::string vars;
        for (int i = 0; i < kNumVars; ++i) {
            Var v = static_cast<Var>(i);
            unsigned e = t.first.exp(v);
            if (e == 0) continue;
            if (!vars.empty()) vars += "*";
            vars += var_name(v);
            if (e > 1) vars += "^" + std::to_string(e);
        }
        if (vars.empty())
            os << c.str();
        else if (c.is_one())
            os << vars;
        else
            os << c.str() << "*" << vars;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// GCD: subresultant polynomial remainder sequences on a recursive view, main
// variable first in the fixed x < u < z < t order, contents extracted
// recursively. See Geddes, Czapor, Labahn, "Algorithms for Computer Algebra",
// Algorithm 7.3.
// ---------------------------------------------------------------------------

namespace {

MPoly unit_normalize(const MPoly &p) {
    if (p.is_zero()) return p;
    return p.primitive_part();
}

bool first_var(const MPoly &a, const MPoly &b, Var &v) {
    for (int i = 0; i < kNumVars; ++i) {
        Var cand = static_cast<Var>(i);
        if (a.uses(cand) || b.uses(cand)) { v = cand; return true; }
    }
    return false;
}

MPoly lc_in(const MPoly &p, Var v) { return p.coeff_of(v, p.degree(v)); }

MPoly exact_div(const MPoly &a, const MPoly &b) {
    MPoly q;
    if (!a.divide_exact(b, q)) fail(Errc::InternalMismatch, "inexact division inside gcd");
    return q;
}

// Content of p with respect to v: gcd of the coefficients of the powers of v.
MPoly content_in(const MPoly &p, Var v) {
    MPoly c;
    for (int k = 0; k <= p.degree(v); ++k) {
        MPoly ck = p.coeff_of(v, k);
        if (ck.is_zero()) continue;
        c = poly_gcd(c, ck);
        if (c.is_constant() && !c.is_zero()) return MPoly::one();
    }
    return c;
}

// Pseudo-remainder of a by b in v: lc_v(b)^(deg a - deg b + 1) * a mod b.
MPoly prem(const MPoly &a, const MPoly &b, Var v) {
    MPoly r = a;
    MPoly lcb = lc_in(b, v);
    int db = b.degree(v);
    long n = a.degree(v) - db + 1;
    while (!r.is_zero() && r.degree(v) >= db) {
        MPoly t = lc_in(r, v) * MPoly::variable(v, static_cast<unsigned>(r.degree(v) - db));
        r = lcb * r - t * b;
        --n;
    }
    for (; n > 0; --n) r = lcb * r;
    return r;
}

} // namespace

namespace {

// Subresultant PRS with recursive content extraction; always correct, used
// as the fallback when the evaluation heuristic fails.
MPoly prs_gcd(const MPoly &a, const MPoly &b) {
    Var v;
    if (!first_var(a, b, v)) return MPoly::one();

    MPoly ca = a.is_constant() ? unit_normalize(a) : content_in(a, v);
    MPoly cb = b.is_constant() ? unit_normalize(b) : content_in(b, v);
    MPoly cg = poly_gcd(ca, cb);

    MPoly pa = exact_div(a, ca);
    MPoly pb = exact_div(b, cb);
    if (pa.is_constant() || pb.is_constant()) return unit_normalize(cg);

    MPoly c = pa, d = pb;
    if (c.degree(v) < d.degree(v)) std::swap(c, d);

    MPoly g = MPoly::one(), h = MPoly::one();
    MPoly res;
    while (true) {
        int delta = c.degree(v) - d.degree(v);
        MPoly r = prem(c, d, v);
        if (r.is_zero()) { res = d; break; }
        if (r.degree(v) == 0) { res = MPoly::one(); break; }
        c = d;
        MPoly divisor = g * h.pow(static_cast<unsigned>(delta));
        d = exact_div(r, divisor);
        g = lc_in(c, v);
        if (delta > 0) h = exact_div(g.pow(static_cast<unsigned>(delta)), h.pow(static_cast<unsigned>(delta - 1)));
    }

    if (!res.is_constant()) res = exact_div(res, content_in(res, v));
    return unit_normalize(cg * res);
}

Int max_abs_coeff(const MPoly &p) {
    Int m(0);
    for (const auto &t : p.terms()) {
        Int a = abs(t.second.num());
        if (a > m) m = a;
    }
    return m;
}

// Balanced remainder digit extraction: p = digit + xi * rest with every
// digit coefficient in (-xi/2, xi/2].
MPoly balanced_digit(const MPoly &p, const Int &xi, MPoly &rest) {
    MPoly digit, r;
    Int half = xi / 2;
    for (const auto &t : p.terms()) {
        Int c = t.second.num();
        Int d;
        mpz_fdiv_r(d.get_mpz_t(), c.get_mpz_t(), xi.get_mpz_t());
        if (d > half) d -= xi;
        if (d != 0) digit = digit + MPoly::monomial(Rat(d), t.first);
        Int q = (c - d) / xi;
        if (q != 0) r = r + MPoly::monomial(Rat(q), t.first);
    }
    rest = r;
    return digit;
}

long total_degree_sum(const MPoly &p) {
    long s = 0;
    for (int i = 0; i < kNumVars; ++i) s += std::max(0, p.degree(static_cast<Var>(i)));
    return s;
}

// Evaluation-reconstruction gcd over Z[vars], integer content included
// (the content of an image encodes evaluated outer factors, so it must be
// carried through the recursion). The evaluation point dominates twice the
// coefficient bound of any possible cofactor divisor, which makes a
// division-verified reconstruction provably the gcd; reconstruction
// failures retry with a larger point, then the caller falls back to PRS.
bool heuristic_gcd(const MPoly &a_in, const MPoly &b_in, MPoly &out) {
    if (a_in.is_constant() || b_in.is_constant()) {
        Int g(0);
        for (const auto &t : a_in.terms()) g = int_gcd(g, t.second.num());
        for (const auto &t : b_in.terms()) g = int_gcd(g, t.second.num());
        out = MPoly(Rat(g));
        return true;
    }

    Rat ca = a_in.content(), cb = b_in.content();
    MPoly a = a_in * ca.inverse();
    MPoly b = b_in * cb.inverse();
    Int cg = int_gcd(ca.num(), cb.num());

    // Evaluate the variable of smallest degree: fewest digits to rebuild.
    Var v = Var::x;
    int best_deg = -1;
    for (int i = 0; i < kNumVars; ++i) {
        Var cand = static_cast<Var>(i);
        int deg = std::max(a.degree(cand), b.degree(cand));
        if ((a.uses(cand) || b.uses(cand)) && (best_deg < 0 || deg < best_deg)) {
            v = cand;
            best_deg = deg;
        }
    }

    long dsa = total_degree_sum(a), dsb = total_degree_sum(b);
    if (std::max(dsa, dsb) > 4000) return false;
    Int bound_a = max_abs_coeff(a) << static_cast<unsigned>(dsa + 1);
    Int bound_b = max_abs_coeff(b) << static_cast<unsigned>(dsb + 1);
    Int xi = 2 * (bound_a < bound_b ? bound_a : bound_b) + 29;
    int deg_cap = std::min(a.degree(v), b.degree(v));
    if (deg_cap < 0) deg_cap = 0;

    for (int attempt = 0; attempt < 5; ++attempt) {
        MPoly av = a.eval(v, Rat(xi));
        MPoly bv = b.eval(v, Rat(xi));
        MPoly gamma;
        if (!av.is_zero() && !bv.is_zero() && heuristic_gcd(av, bv, gamma) && !gamma.is_zero()) {
            MPoly g, rest = gamma;
            int i = 0;
            bool ok = true;
            while (!rest.is_zero()) {
                if (i > deg_cap) { ok = false; break; }
                MPoly digit = balanced_digit(rest, xi, rest);
                if (!digit.is_zero())
                    g = g + digit * MPoly::monomial(Rat(1), Mono::var(v, static_cast<unsigned>(i)));
                ++i;
            }
            if (ok && !g.is_zero()) {
                g = g.primitive_part();
                MPoly qa, qb;
                if (a.divide_exact(g, qa) && b.divide_exact(g, qb)) {
                    out = g * Rat(cg);
                    return true;
                }
            }
        }
        xi = xi * 65537 + 29;
    }
    return false;
}

// p = mono * p0 with p0 free of monomial content.
Mono monomial_content(const MPoly &p) {
    Mono m;
    bool first = true;
    for (const auto &t : p.terms()) {
        if (first) {
            m = t.first;
            first = false;
            continue;
        }
        Mono next;
        for (int i = 0; i < kNumVars; ++i) {
            Var v = static_cast<Var>(i);
            next = next.with(v, std::min(m.exp(v), t.first.exp(v)));
        }
        m = next;
    }
    return m;
}

MPoly strip_monomial(const MPoly &p, const Mono &m) {
    MPoly out;
    for (const auto &t : p.terms()) out = out + MPoly::monomial(t.second, t.first / m);
    return out;
}

} // namespace

MPoly poly_gcd(const MPoly &a, const MPoly &b) {
    if (a.is_zero()) return unit_normalize(b);
    if (b.is_zero()) return unit_normalize(a);
    if (a.is_constant() || b.is_constant()) return MPoly::one();

    // Common monomial factor first; the stripped parts are coprime to every
    // variable, so the gcd splits multiplicatively.
    Mono ma = monomial_content(a), mb = monomial_content(b);
    Mono common;
    for (int i = 0; i < kNumVars; ++i) {
        Var v = static_cast<Var>(i);
        common = common.with(v, std::min(ma.exp(v), mb.exp(v)));
    }
    MPoly a0 = strip_monomial(a, ma).primitive_part();
    MPoly b0 = strip_monomial(b, mb).primitive_part();
    MPoly base = MPoly::monomial(Rat(1), common);
    if (a0.is_constant() || b0.is_constant()) return base;

    MPoly g;
    if (!heuristic_gcd(a0, b0, g)) g = prs_gcd(a0, b0);
    return unit_normalize(base * g);
}

MPoly poly_lcm(const MPoly &a, const MPoly &b) {
    if (a.is_zero() || b.is_zero()) return MPoly();
    MPoly g = poly_gcd(a, b);
    return unit_normalize(exact_div(a, g) * b);
}

MPoly poly_radical(const MPoly &p) {
    if (p.is_zero()) return p;
    if (p.is_constant()) return MPoly::one();
    Var v;
    MPoly zero;
    first_var(p, zero, v);
    MPoly cont = content_in(p, v);
    MPoly pp = exact_div(p, cont);
    MPoly g = poly_gcd(pp, formal_partial(pp, v));
    MPoly sf = exact_div(pp, g);
    return unit_normalize(poly_radical(cont) * sf);
}

} // namespace ncdx
