#include "ncdx/oreop.hpp"

#include <sstream>

namespace ncdx {

OreOp::OreOp(int n, Var var, std::vector<Mat> coeffs) : n_(n), var_(var), coeffs_(std::move(coeffs)) {
    for (const auto &c : coeffs_)
        if (c.rows() != n_ || c.cols() != n_) fail(Errc::ContextMismatch, "operator coefficient of wrong shape");
    trim();
}

OreOp OreOp::mult(const Mat &a, Var var) {
    if (!a.is_square()) fail(Errc::NotSquare, "multiplication operator needs a square matrix");
    return OreOp(a.rows(), var, {a});
}

OreOp OreOp::d(int n, Var var, int k) {
    std::vector<Mat> c(static_cast<size_t>(k) + 1, Mat::zero(n, n));
    c.back() = Mat::identity(n);
    return OreOp(n, var, std::move(c));
}

bool OreOp::is_constant_coefficient() const {
    for (const auto &c : coeffs_)
        if (!c.is_constant()) return false;
    return true;
}

bool OreOp::has_polynomial_coefficients() const {
    for (const auto &c : coeffs_)
        for (int r = 0; r < n_; ++r)
            for (int col = 0; col < n_; ++col)
                if (!c.at(r, col).is_zero() && !c.at(r, col).polynomial_in(var_)) return false;
    return true;
}

const Mat &OreOp::coeff(int k) const {
    if (k < 0 || k > order()) fail(Errc::InternalMismatch, "operator coefficient index out of range");
    return coeffs_[static_cast<size_t>(k)];
}

void OreOp::trim() {
    while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
}

OreOp OreOp::operator-() const {
    OreOp r = *this;
    for (auto &c : r.coeffs_) c = -c;
    return r;
}

OreOp OreOp::operator+(const OreOp &o) const {
    if (n_ != o.n_ || var_ != o.var_) fail(Errc::ContextMismatch, "operator context mismatch in +");
    std::vector<Mat> c(std::max(coeffs_.size(), o.coeffs_.size()), Mat::zero(n_, n_));
    for (size_t i = 0; i < coeffs_.size(); ++i) c[i] = c[i] + coeffs_[i];
    for (size_t i = 0; i < o.coeffs_.size(); ++i) c[i] = c[i] + o.coeffs_[i];
    return OreOp(n_, var_, std::move(c));
}

OreOp OreOp::operator-(const OreOp &o) const { return *this + (-o); }

OreOp OreOp::scale_left(const Mat &a) const {
    OreOp r = *this;
    for (auto &c : r.coeffs_) c = a * c;
    r.trim();
    return r;
}

OreOp OreOp::scale_right(const Mat &a) const {
    OreOp r = *this;
    for (auto &c : r.coeffs_) c = c * a;
    r.trim();
    return r;
}

std::string OreOp::str() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    const char *dv = var_ == Var::x ? "Dx" : (var_ == Var::z ? "Dz" : "D");
    bool first = true;
    for (int k = order(); k >= 0; --k) {
        if (coeffs_[static_cast<size_t>(k)].is_zero()) continue;
        if (!first) os << " + ";
        first = false;
        os << "[";
        const Mat &c = coeffs_[static_cast<size_t>(k)];
        for (int r = 0; r < n_; ++r) {
            if (r) os << "; ";
            for (int col = 0; col < n_; ++col) {
                if (col) os << ", ";
                os << c.at(r, col).str();
            }
        }
        os << "]";
        if (k == 1) os << "*" << dv;
        if (k > 1) os << "*" << dv << "^" << k;
    }
    return os.str();
}

OreOp op_compose(const OreOp &a, const OreOp &b) {
    if (a.n() != b.n() || a.var() != b.var()) fail(Errc::ContextMismatch, "operator context mismatch in compose");
    if (a.is_zero() || b.is_zero()) return OreOp::zero(a.n(), a.var());
    int n = a.n();
    Var v = a.var();
    std::vector<Mat> out(static_cast<size_t>(a.order() + b.order()) + 1, Mat::zero(n, n));

    for (int l = 0; l <= b.order(); ++l) {
        // Successive derivatives of B_l, reused across all k.
        Mat bl = b.coeff(l);
        std::vector<Mat> dbl{bl};
        for (int j = 1; j <= a.order(); ++j) dbl.push_back(dbl.back().derivative(v));
        for (int k = 0; k <= a.order(); ++k) {
            const Mat &ak = a.coeff(k);
            if (ak.is_zero()) continue;
            Rat binom(1);
            for (int j = 0; j <= k; ++j) {
                if (!dbl[static_cast<size_t>(j)].is_zero()) {
                    Mat term = ak * dbl[static_cast<size_t>(j)];
                    if (!binom.is_one()) term = term * RatFunc(binom);
                    out[static_cast<size_t>(k - j + l)] = out[static_cast<size_t>(k - j + l)] + term;
                }
                binom *= Rat(k - j);
                binom /= Rat(j + 1);
            }
        }
    }
    return OreOp(n, v, std::move(out));
}

OreOp op_pow(const OreOp &a, int e) {
    OreOp r = OreOp::identity(a.n(), a.var());
    for (int i = 0; i < e; ++i) r = op_compose(r, a);
    return r;
}

Mat op_apply_left(const OreOp &p, const Mat &f) {
    if (p.is_zero()) return Mat::zero(p.n(), f.cols());
    if (f.rows() != p.n()) fail(Errc::ContextMismatch, "operator/function shape mismatch");
    Mat df = f;
    Mat out = p.coeff(0) * f;
    for (int k = 1; k <= p.order(); ++k) {
        df = df.derivative(p.var());
        if (!p.coeff(k).is_zero()) out = out + p.coeff(k) * df;
    }
    return out;
}

DivisionResult op_right_divide(const OreOp &l, const OreOp &p) {
    if (l.n() != p.n() || l.var() != p.var()) fail(Errc::ContextMismatch, "operator context mismatch in division");
    if (p.is_zero()) fail(Errc::SingularLeadingCoefficient, "division by the zero operator");
    const Mat &lead = p.coeff(p.order());
    Mat lead_inv;
    try {
        lead_inv = inverse(lead);
    } catch (const Error &e) {
        if (e.code() == Errc::SingularMatrix)
            fail(Errc::SingularLeadingCoefficient, "divisor has a singular leading coefficient");
        throw;
    }

    OreOp q = OreOp::zero(l.n(), l.var());
    OreOp r = l;
    while (!r.is_zero() && r.order() >= p.order()) {
        int k = r.order() - p.order();
        Mat c = r.coeff(r.order()) * lead_inv;
        OreOp term(l.n(), l.var(), [&] {
            std::vector<Mat> cs(static_cast<size_t>(k) + 1, Mat::zero(l.n(), l.n()));
            cs.back() = c;
            return cs;
        }());
        q = q + term;
        r = r - op_compose(term, p);
    }
    return {q, r};
}

std::vector<OreMonomial> op_normal_order(const OreOp &p) {
    if (!p.has_polynomial_coefficients())
        fail(Errc::NonPolynomialCoefficients, "normal ordering needs polynomial coefficients");
    std::vector<OreMonomial> monos;
    for (int k = 0; k <= p.order(); ++k) {
        const Mat &a = p.coeff(k);
        if (a.is_zero()) continue;
        int dmax = 0;
        for (int r = 0; r < p.n(); ++r)
            for (int c = 0; c < p.n(); ++c) dmax = std::max(dmax, a.at(r, c).num().degree(p.var()));
        for (int i = 0; i <= dmax; ++i) {
            Mat ci = Mat::zero(p.n(), p.n());
            bool nonzero = false;
            for (int r = 0; r < p.n(); ++r)
                for (int c = 0; c < p.n(); ++c) {
                    MPoly coeff = a.at(r, c).num().coeff_of(p.var(), i);
                    if (!coeff.is_zero()) {
                        ci.at(r, c) = RatFunc(coeff.constant_value());
                        nonzero = true;
                    }
                }
            if (nonzero) monos.push_back({i, k, ci});
        }
    }
    return monos;
}

OreOp op_from_monomials(int n, Var var, const std::vector<OreMonomial> &monos) {
    OreOp out = OreOp::zero(n, var);
    for (const auto &m : monos) {
        Mat c = m.coeff * RatFunc(MPoly::variable(var, static_cast<unsigned>(m.var_pow)));
        std::vector<Mat> cs(static_cast<size_t>(m.d_pow) + 1, Mat::zero(n, n));
        cs.back() = c;
        out = out + OreOp(n, var, std::move(cs));
    }
    return out;
}

namespace {

// lcm of the denominators of every coefficient entry of p.
MPoly denominator_lcm(const OreOp &p) {
    MPoly e = MPoly::one();
    for (int k = 0; k <= p.order(); ++k)
        for (int r = 0; r < p.n(); ++r)
            for (int c = 0; c < p.n(); ++c) {
                const RatFunc &x = p.coeff(k).at(r, c);
                if (!x.is_zero() && !x.is_polynomial()) e = poly_lcm(e, x.den());
            }
    return e;
}

bool polynomial_op(const OreOp &p) {
    for (int k = 0; k <= p.order(); ++k)
        for (int r = 0; r < p.n(); ++r)
            for (int c = 0; c < p.n(); ++c)
                if (!p.coeff(k).at(r, c).is_polynomial()) return false;
    return true;
}

} // namespace

ClearedPair clear_denominators(const OreOp &p, const OreOp &q) {
    if (p.n() != q.n() || p.var() != q.var()) fail(Errc::ContextMismatch, "operator context mismatch");
    int n = p.n();
    Var v = p.var();

    MPoly e0 = poly_lcm(denominator_lcm(p), denominator_lcm(q));
    if (e0 == MPoly::one()) {
        return {p, q, MPoly::one()};
    }
    MPoly rad = poly_radical(e0);
    unsigned s = static_cast<unsigned>(std::max(p.order(), q.order()) + 1);

    // Ladder of candidates e0, e0*rad, e0*rad^2, ..., capped by the provably
    // sufficient e0^s (each derivative of e0^s of order <= s-1 retains a full
    // factor e0). Polynomiality of d*P and Q∘d is checked outright, so the
    // returned d is the smallest rung that actually clears.
    MPoly d = e0;
    MPoly cap = e0.pow(s);
    for (;;) {
        Mat dm = Mat::identity(n) * RatFunc(d);
        OreOp p_prime = p.scale_left(dm);
        OreOp q_prime = op_compose(q, OreOp::mult(dm, v));
        if (polynomial_op(p_prime) && polynomial_op(q_prime)) return {p_prime, q_prime, d};
        if (d == cap) fail(Errc::InternalMismatch, "denominator clearing did not terminate");
        MPoly next = d * rad;
        MPoly quot;
        d = cap.divide_exact(next, quot) ? next : cap;
    }
}

OreOp op_poly_of(const std::vector<Mat> &coeffs, const OreOp &t) {
    OreOp out = OreOp::zero(t.n(), t.var());
    OreOp power = OreOp::identity(t.n(), t.var());
    for (size_t j = 0; j < coeffs.size(); ++j) {
        if (j > 0) power = op_compose(power, t);
        if (!coeffs[j].is_zero()) out = out + power.scale_right(coeffs[j]);
    }
    return out;
}

} // namespace ncdx
