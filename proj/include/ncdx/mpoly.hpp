#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ncdx/rat.hpp"

namespace ncdx {

/// The four symbols the engine ever needs: the differential variable x, the
/// exponential generator u (u stands for e^{x/m}, so u' = u/m), the spectral
/// variable z, and the matrix-polynomial variable t.
enum class Var : int { x = 0, u = 1, z = 2, t = 3 };

constexpr int kNumVars = 4;

inline const char *var_name(Var v) {
    static const char *names[kNumVars] = {"x", "u", "z", "t"};
    return names[static_cast<int>(v)];
}

/// Exponent vector packed into one word, 16 bits per variable, x in the most
/// significant slot. Comparing packed words is exactly the lexicographic
/// monomial order with variable precedence x, u, z, t.
struct Mono {
    uint64_t packed = 0;

    static Mono one() { return {}; }
    static Mono var(Var v, unsigned e = 1);

    unsigned exp(Var v) const { return (packed >> shift(v)) & 0xffffu; }
    Mono with(Var v, unsigned e) const;
    bool is_one() const { return packed == 0; }

    Mono operator*(const Mono &o) const;
    /// Exact division; the caller must know o divides *this.
    Mono operator/(const Mono &o) const;
    bool divisible_by(const Mono &o) const;

    friend bool operator==(const Mono &a, const Mono &b) { return a.packed == b.packed; }
    friend bool operator<(const Mono &a, const Mono &b) { return a.packed < b.packed; }

private:
    static int shift(Var v) { return 16 * (kNumVars - 1 - static_cast<int>(v)); }
};

/// Sparse multivariate polynomial over Rat. Terms are kept sorted by
/// descending monomial order with no zero coefficients, so equality is
/// term-set equality and the leading term is terms().front().
class MPoly {
public:
    using Term = std::pair<Mono, Rat>;

    MPoly() = default;
    explicit MPoly(const Rat &c) { if (!c.is_zero()) terms_.push_back({Mono::one(), c}); }
    static MPoly zero() { return MPoly(); }
    static MPoly one() { return MPoly(Rat(1)); }
    static MPoly variable(Var v, unsigned e = 1) { return monomial(Rat(1), Mono::var(v, e)); }
    static MPoly monomial(const Rat &c, const Mono &m);

    /// Builds Σ coeffs[i]·v^i from a dense univariate coefficient list.
    static MPoly from_univariate(Var v, const std::vector<Rat> &coeffs);

    const std::vector<Term> &terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || terms_.front().first.is_one(); }
    Rat constant_value() const;

    bool uses(Var v) const;
    int degree(Var v) const;
    /// Total degree bound used for size sanity checks.
    int max_degree() const;

    const Mono &leading_mono() const;
    const Rat &leading_coeff() const;

    MPoly operator-() const;
    MPoly operator+(const MPoly &o) const;
    MPoly operator-(const MPoly &o) const;
    MPoly operator*(const MPoly &o) const;
    MPoly operator*(const Rat &c) const;
    MPoly pow(unsigned e) const;

    friend bool operator==(const MPoly &a, const MPoly &b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const MPoly &a, const MPoly &b) { return !(a == b); }

    /// Derivative with respect to v. The derivation table is fixed except for
    /// u, whose image under d/dx is u_scale·u (u_scale = 1/m encodes e^{x/m}).
    MPoly derivative(Var v, const Rat &u_scale) const;

    /// Exact division; returns false when o does not divide *this.
    bool divide_exact(const MPoly &o, MPoly &quot) const;

    /// Substitutes value for v; remaining variables stay symbolic.
    MPoly eval(Var v, const Rat &value) const;

    /// Rational content c such that (*this)/c has coprime integer
    /// coefficients and positive leading coefficient. content(0) = 0.
    Rat content() const;
    MPoly primitive_part() const;

    /// Coefficient of v^k as a polynomial in the other variables.
    MPoly coeff_of(Var v, int k) const;

    std::string str() const;

private:
    void normalize();
    std::vector<Term> terms_;
};

MPoly operator*(const Rat &c, const MPoly &p);

/// GCD normalized to positive leading coefficient and content 1
/// (subresultant PRS with recursive content extraction); gcd(0,0) = 0.
MPoly poly_gcd(const MPoly &a, const MPoly &b);
MPoly poly_lcm(const MPoly &a, const MPoly &b);

/// Squarefree radical p / gcd(p, dp) over all variables, same normalization.
MPoly poly_radical(const MPoly &p);

} // namespace ncdx
