#pragma once

#include <string>

#include "ncdx/mpoly.hpp"

namespace ncdx {

/// Normalized multivariate rational function: num/den coprime, den primitive
/// with positive leading coefficient under the fixed monomial order, so
/// equality is componentwise.
///
/// The only context a value carries is the u-derivation scale: u stands for
/// e^{x/m} and d/dx(u) = u_scale * u with u_scale = 1/m. Values that do not
/// involve u merge with any context; mixing two u-dependent values with
/// different scales is a ContextMismatch.
class RatFunc {
public:
    RatFunc() : num_(), den_(MPoly::one()), u_scale_(1) {}
    RatFunc(const Rat &c) : num_(MPoly(c)), den_(MPoly::one()), u_scale_(1) {}
    RatFunc(long c) : RatFunc(Rat(c)) {}
    explicit RatFunc(const MPoly &p) : num_(p), den_(MPoly::one()), u_scale_(1) {}

    /// ratfunc_normalize: reduces num/den to canonical form. ZeroDenominator
    /// if den = 0.
    RatFunc(const MPoly &num, const MPoly &den, const Rat &u_scale = Rat(1));

    static RatFunc variable(Var v) { return RatFunc(MPoly::variable(v)); }

    const MPoly &num() const { return num_; }
    const MPoly &den() const { return den_; }
    const Rat &u_scale() const { return u_scale_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const { return num_ == MPoly::one() && den_ == MPoly::one(); }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    bool is_polynomial() const { return den_ == MPoly::one(); }
    Rat constant_value() const;

    bool uses(Var v) const { return num_.uses(v) || den_.uses(v); }
    /// True when the value is a polynomial in v alone (no other variables,
    /// trivial denominator).
    bool polynomial_in(Var v) const;

    RatFunc with_u_scale(const Rat &s) const;

    RatFunc operator-() const;
    RatFunc operator+(const RatFunc &o) const;
    RatFunc operator-(const RatFunc &o) const;
    RatFunc operator*(const RatFunc &o) const;
    RatFunc operator/(const RatFunc &o) const;
    RatFunc inverse() const;
    RatFunc pow(long e) const;

    friend bool operator==(const RatFunc &a, const RatFunc &b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const RatFunc &a, const RatFunc &b) { return !(a == b); }

    /// Quotient-rule derivative with respect to v (a derivation variable:
    /// x, z or t; UnknownVariable otherwise).
    RatFunc derivative(Var v) const;

    RatFunc eval(Var v, const Rat &value) const;

    /// "num" when den = 1, "(num)/(den)" otherwise; parseable canonical form.
    std::string str() const;

private:
    void reduce();
    static Rat merge_scale(const RatFunc &a, const RatFunc &b);

    MPoly num_, den_;
    Rat u_scale_;
};

} // namespace ncdx
