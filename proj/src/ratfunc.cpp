#include "ncdx/ratfunc.hpp"

namespace ncdx {

RatFunc::RatFunc(const MPoly &num, const MPoly &den, const Rat &u_scale)
    : num_(num), den_(den), u_scale_(u_scale) {
    if (den_.is_zero()) fail(Errc::ZeroDenominator, "rational function with zero denominator");
    reduce();
}

void RatFunc::reduce() {
    if (num_.is_zero()) {
        den_ = MPoly::one();
        return;
    }
    if (!den_.is_constant()) {
        MPoly g = poly_gcd(num_, den_);
        if (!(g == MPoly::one())) {
            MPoly qn, qd;
            if (!num_.divide_exact(g, qn) || !den_.divide_exact(g, qd))
                fail(Errc::InternalMismatch, "gcd does not divide its arguments");
            num_ = std::move(qn);
            den_ = std::move(qd);
        }
    }
    // Unit normalization: den primitive with positive leading coefficient.
    Rat c = den_.content();
    if (!c.is_one()) {
        Rat inv = c.inverse();
        den_ = den_ * inv;
        num_ = num_ * inv;
    }
}

Rat RatFunc::constant_value() const {
    if (!is_constant()) fail(Errc::InternalMismatch, "constant_value of non-constant rational function");
    if (num_.is_zero()) return Rat(0);
    return num_.constant_value() / den_.constant_value();
}

bool RatFunc::polynomial_in(Var v) const {
    if (!is_polynomial()) return false;
    for (int i = 0; i < kNumVars; ++i) {
        Var w = static_cast<Var>(i);
        if (w != v && num_.uses(w)) return false;
    }
    return true;
}

RatFunc RatFunc::with_u_scale(const Rat &s) const {
    RatFunc r = *this;
    r.u_scale_ = s;
    return r;
}

Rat RatFunc::merge_scale(const RatFunc &a, const RatFunc &b) {
    bool au = a.uses(Var::u), bu = b.uses(Var::u);
    if (au && bu && a.u_scale_ != b.u_scale_)
        fail(Errc::ContextMismatch, "mixing u-values with different derivation scales");
    return au ? a.u_scale_ : (bu ? b.u_scale_ : a.u_scale_);
}

RatFunc RatFunc::operator-() const {
    RatFunc r = *this;
    r.num_ = -r.num_;
    return r;
}

RatFunc RatFunc::operator+(const RatFunc &o) const {
    if (is_zero()) return o;
    if (o.is_zero()) return *this;
    Rat s = merge_scale(*this, o);
    if (den_ == o.den_) return RatFunc(num_ + o.num_, den_, s);
    return RatFunc(num_ * o.den_ + o.num_ * den_, den_ * o.den_, s);
}

RatFunc RatFunc::operator-(const RatFunc &o) const { return *this + (-o); }

RatFunc RatFunc::operator*(const RatFunc &o) const {
    if (is_zero() || o.is_zero()) return RatFunc();
    return RatFunc(num_ * o.num_, den_ * o.den_, merge_scale(*this, o));
}

RatFunc RatFunc::operator/(const RatFunc &o) const {
    if (o.is_zero()) fail(Errc::ZeroDenominator, "division by the zero rational function");
    if (is_zero()) return RatFunc();
    return RatFunc(num_ * o.den_, den_ * o.num_, merge_scale(*this, o));
}

RatFunc RatFunc::inverse() const {
    if (is_zero()) fail(Errc::ZeroDenominator, "inverse of the zero rational function");
    RatFunc r(den_, num_, u_scale_);
    return r;
}

RatFunc RatFunc::pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    RatFunc r(Rat(1));
    r.u_scale_ = u_scale_;
    RatFunc base = *this;
    unsigned long k = static_cast<unsigned long>(e);
    while (k) {
        if (k & 1) r = r * base;
        k >>= 1;
        if (k) base = base * base;
    }
    return r;
}

RatFunc RatFunc::derivative(Var v) const {
    MPoly dn = num_.derivative(v, u_scale_);
    MPoly dd = den_.derivative(v, u_scale_);
    if (dd.is_zero()) return RatFunc(dn, den_, u_scale_);
    // Deflated quotient rule: with e | gcd(den, den'),
    // (n/d)' = (n' (d/e) - n (d'/e)) / (d (d/e)), which is already reduced
    // for coprime n, d up to sporadic factors the constructor removes.
    MPoly e = poly_gcd(den_, dd);
    if (e == MPoly::one()) return RatFunc(dn * den_ - num_ * dd, den_ * den_, u_scale_);
    MPoly f, dpart, q;
    if (!den_.divide_exact(e, f) || !dd.divide_exact(e, dpart))
        fail(Errc::InternalMismatch, "gcd does not divide inside derivative");
    return RatFunc(dn * f - num_ * dpart, den_ * f, u_scale_);
}

RatFunc RatFunc::eval(Var v, const Rat &value) const {
    MPoly d = den_.eval(v, value);
    if (d.is_zero()) fail(Errc::ZeroDenominator, "evaluation hits a pole");
    return RatFunc(num_.eval(v, value), d, u_scale_);
}

std::string RatFunc::str() const {
    if (den_ == MPoly::one()) return num_.str();
    return "(" + num_.str() + ")/(" + den_.str() + ")";
}

} // namespace ncdx
