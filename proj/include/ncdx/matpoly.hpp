#pragma once

#include <vector>

#include "ncdx/matrix.hpp"

namespace ncdx {

/// Monic matrix polynomial q(t) = Σ a_j t^j, a_d = I_n, with constant
/// rational matrix coefficients.
class MatPolynomial {
public:
    MatPolynomial(int n, std::vector<Mat> coeffs);

    int n() const { return n_; }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const Mat &coeff(int j) const { return coeffs_[static_cast<size_t>(j)]; }
    const std::vector<Mat> &coeffs() const { return coeffs_; }

    /// q as a matrix over Q(t).
    Mat as_t_matrix() const;
    /// Constant matrix q(lambda).
    Mat eval(const Rat &lambda) const;
    /// Formal derivative in t.
    MatPolynomial derivative() const;

    friend bool operator==(const MatPolynomial &a, const MatPolynomial &b) {
        return a.n_ == b.n_ && a.coeffs_ == b.coeffs_;
    }

private:
    int n_;
    std::vector<Mat> coeffs_;
};

/// chi(t) = det q(t), a monic polynomial of degree n*d in t.
MPoly char_det(const MatPolynomial &q);

/// Companion linearization: identity superdiagonal blocks, last block row
/// -a_0 ... -a_{d-1}; characteristic polynomial equals char_det(q).
Mat companion(const MatPolynomial &q);

struct RootMultiplicity {
    Rat lambda;
    int multiplicity;
};

/// All roots of a monic univariate polynomial in t, required to be rational:
/// rational-root candidates plus exact deflation. IrrationalSpectrum when a
/// nonconstant factor remains.
std::vector<RootMultiplicity> rational_roots(const MPoly &chi);

/// Canonical Jordan chains of q at lambda: v_{0,l} ... v_{k_l,l} with
/// Σ_{r<=j} q^(r)(lambda) v_{j-r,l} / r! = 0, leading vectors a basis of
/// ker q(lambda), and Σ (k_l + 1) = multiplicity of lambda in chi.
struct JordanChainSet {
    Rat lambda;
    std::vector<std::vector<std::vector<Rat>>> chains; // chains[l][j] is v_{j,l} in Q^n
    int multiplicity = 0;
};

/// Chains are extracted from generalized eigenspaces of the companion matrix
/// (reduced-row-echelon bases in fixed coordinate order, longest chains
/// first) and projected to the first n coordinates. NotAnEigenvalue when
/// chi(lambda) != 0.
JordanChainSet jordan_chains(const MatPolynomial &q, const Rat &lambda);

/// Exact residuals of the chain conditions Σ q^(r)(lambda) v_{j-r}/r! for one
/// chain; all-zero exactly when the chain is valid. Used as the independent
/// verification oracle for jordan_chains.
std::vector<std::vector<Rat>> jordan_chain_residuals(const MatPolynomial &q, const Rat &lambda,
                                                     const std::vector<std::vector<Rat>> &chain);

} // namespace ncdx
