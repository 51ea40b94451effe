#pragma once

#include <vector>

#include "ncdx/matrix.hpp"

namespace ncdx {

/// Matrix differential operator Σ A_k(·) D^k in coefficient form (matrix
/// coefficients to the left of powers of D), over the rational-function
/// field in its variable. Trailing zero coefficients are trimmed, so
/// order() is the index of the last stored coefficient.
class OreOp {
public:
    OreOp() : n_(0), var_(Var::x) {}
    OreOp(int n, Var var) : n_(n), var_(var) {}
    OreOp(int n, Var var, std::vector<Mat> coeffs);

    static OreOp zero(int n, Var var) { return OreOp(n, var); }
    static OreOp identity(int n, Var var) { return mult(Mat::identity(n), var); }
    /// Multiplication operator by a matrix function (order 0).
    static OreOp mult(const Mat &a, Var var);
    /// D^k with identity coefficient.
    static OreOp d(int n, Var var, int k = 1);

    int n() const { return n_; }
    Var var() const { return var_; }
    int order() const { return static_cast<int>(coeffs_.size()) - 1; } // -1 for zero
    bool is_zero() const { return coeffs_.empty(); }
    bool is_monic() const { return !coeffs_.empty() && coeffs_.back().is_identity(); }
    bool is_constant_coefficient() const;
    bool has_polynomial_coefficients() const;

    const Mat &coeff(int k) const;
    const std::vector<Mat> &coeffs() const { return coeffs_; }

    OreOp operator-() const;
    OreOp operator+(const OreOp &o) const;
    OreOp operator-(const OreOp &o) const;
    /// Left/right multiplication by a matrix function (not composition).
    OreOp scale_left(const Mat &a) const;
    OreOp scale_right(const Mat &a) const;

    friend bool operator==(const OreOp &a, const OreOp &b) {
        return a.n_ == b.n_ && a.var_ == b.var_ && a.coeffs_ == b.coeffs_;
    }
    friend bool operator!=(const OreOp &a, const OreOp &b) { return !(a == b); }

    std::string str() const;

private:
    void trim();
    int n_;
    Var var_;
    std::vector<Mat> coeffs_;
};

/// Operator composition: (A∘B)(f) = A(B(f)), normal-ordered by the Leibniz
/// rule D·a = a·D + a'.
OreOp op_compose(const OreOp &a, const OreOp &b);

OreOp op_pow(const OreOp &a, int e);

/// Applies P to a column (or matrix) of functions: Σ A_k f^(k).
Mat op_apply_left(const OreOp &p, const Mat &f);

/// Right Euclidean division: L = Q∘P + R with order(R) < order(P).
/// SingularLeadingCoefficient when P's leading coefficient is not invertible.
struct DivisionResult {
    OreOp quotient;
    OreOp remainder;
};
DivisionResult op_right_divide(const OreOp &l, const OreOp &p);

/// Monomial x^i D^k C with a constant matrix part C rightmost.
struct OreMonomial {
    int var_pow;
    int d_pow;
    Mat coeff; // constant n x n
};

/// Rewrites a polynomial-coefficient operator as Σ v^i D^k C_{ik}.
/// NonPolynomialCoefficients when a coefficient entry is not a polynomial in
/// the operator's variable.
std::vector<OreMonomial> op_normal_order(const OreOp &p);

/// Reassembles Σ v^i D^k C; inverse of op_normal_order.
OreOp op_from_monomials(int n, Var var, const std::vector<OreMonomial> &monos);

/// Clears denominators of a factorization pair: P' = d·P, Q' = Q∘d,
/// g = d²·I_n, with d the smallest member of the ladder e0·rad(e0)^j
/// (e0 = lcm of all coefficient denominators, j = 0, 1, ...) for which both
/// d·P and Q∘d are verified polynomial; e0^s with s = max(order P, order Q)+1
/// caps the ladder and always clears. Guarantees polynomial P', Q' and
/// Q'∘g^{-1}∘P' = Q∘P exactly.
struct ClearedPair {
    OreOp p_prime;
    OreOp q_prime;
    MPoly d;  // scalar polynomial, g = d^2 I_n
};
ClearedPair clear_denominators(const OreOp &p, const OreOp &q);

/// Σ a_j T^j for a scalar-shape operator argument T and constant matrix
/// coefficients a_j (used to form q(M) for matrix polynomials q).
OreOp op_poly_of(const std::vector<Mat> &coeffs, const OreOp &t);

} // namespace ncdx
