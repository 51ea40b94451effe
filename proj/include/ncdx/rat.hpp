#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

#include "ncdx/errors.hpp"

namespace ncdx {

using Int = mpz_class;

/// Arbitrary-precision rational, always in canonical form:
/// gcd(|num|, den) = 1 and den >= 1, so equality is componentwise.
class Rat {
public:
    Rat() : v_(0) {}
    Rat(long n) : v_(n) {}
    Rat(const Int &n) : v_(n) {}
    Rat(const Int &num, const Int &den) {
        if (den == 0) fail(Errc::ZeroDenominator, "rational with zero denominator");
        v_ = mpq_class(num, den);
        v_.canonicalize();
    }

    /// Parses "p" or "p/q" (optional leading sign, arbitrary precision).
    static Rat parse(const std::string &s);

    const mpq_class &raw() const { return v_; }
    Int num() const { return v_.get_num(); }
    Int den() const { return v_.get_den(); }

    bool is_zero() const { return sgn(v_) == 0; }
    bool is_one() const { return v_ == 1; }
    bool is_integer() const { return v_.get_den() == 1; }
    int sign() const { return sgn(v_); }

    Rat operator-() const { return Rat(mpq_class(-v_)); }
    Rat &operator+=(const Rat &o) { v_ += o.v_; return *this; }
    Rat &operator-=(const Rat &o) { v_ -= o.v_; return *this; }
    Rat &operator*=(const Rat &o) { v_ *= o.v_; return *this; }
    Rat &operator/=(const Rat &o) {
        if (o.is_zero()) fail(Errc::ZeroDenominator, "division of rationals by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Rat operator+(Rat a, const Rat &b) { return a += b; }
    friend Rat operator-(Rat a, const Rat &b) { return a -= b; }
    friend Rat operator*(Rat a, const Rat &b) { return a *= b; }
    friend Rat operator/(Rat a, const Rat &b) { return a /= b; }

    friend bool operator==(const Rat &a, const Rat &b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rat &a, const Rat &b) { return a.v_ != b.v_; }
    friend bool operator<(const Rat &a, const Rat &b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rat &a, const Rat &b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rat &a, const Rat &b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rat &a, const Rat &b) { return a.v_ >= b.v_; }

    Rat inverse() const {
        if (is_zero()) fail(Errc::ZeroDenominator, "inverse of zero");
        return Rat(mpq_class(1 / v_));
    }

    Rat abs() const { return sign() < 0 ? -*this : *this; }

    Rat pow(long e) const;

    /// "p" for integers, "p/q" otherwise; "-p/q" keeps the sign in the numerator.
    std::string str() const;

private:
    explicit Rat(const mpq_class &v) : v_(v) {}
    mpq_class v_;
};

Int int_gcd(const Int &a, const Int &b);
Int int_lcm(const Int &a, const Int &b);

} // namespace ncdx
