#pragma once

#include <functional>
#include <vector>

#include "ncdx/ratfunc.hpp"

namespace ncdx {

/// Dense matrix over the rational-function field, row-major.
class Mat {
public:
    Mat() : rows_(0), cols_(0) {}
    Mat(int rows, int cols) : rows_(rows), cols_(cols), e_(static_cast<size_t>(rows) * cols) {}
    Mat(int rows, int cols, std::vector<RatFunc> entries);

    static Mat identity(int n);
    static Mat zero(int rows, int cols) { return Mat(rows, cols); }
    /// n x n matrix of constants from a row-major rational list.
    static Mat from_rats(int rows, int cols, const std::vector<Rat> &entries);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }
    bool is_zero() const;
    bool is_identity() const;
    /// Every entry constant (a matrix over the rationals).
    bool is_constant() const;

    const RatFunc &at(int r, int c) const { return e_[static_cast<size_t>(r) * cols_ + c]; }
    RatFunc &at(int r, int c) { return e_[static_cast<size_t>(r) * cols_ + c]; }

    Mat operator-() const;
    Mat operator+(const Mat &o) const;
    Mat operator-(const Mat &o) const;
    Mat operator*(const Mat &o) const;
    Mat operator*(const RatFunc &s) const;

    friend bool operator==(const Mat &a, const Mat &b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.e_ == b.e_;
    }
    friend bool operator!=(const Mat &a, const Mat &b) { return !(a == b); }

    Mat transpose() const;
    Mat map(const std::function<RatFunc(const RatFunc &)> &f) const;
    Mat derivative(Var v) const;
    Mat eval(Var v, const Rat &value) const;

    /// Horizontal/vertical slicing helpers.
    Mat block(int r0, int c0, int rows, int cols) const;
    static Mat hstack(const std::vector<Mat> &parts);
    static Mat vstack(const std::vector<Mat> &parts);

private:
    int rows_, cols_;
    std::vector<RatFunc> e_;
};

Mat operator*(const RatFunc &s, const Mat &m);

/// Exact determinant by Gaussian elimination over the field; pivots are the
/// first nonzero entry in column order so results are deterministic.
RatFunc det(const Mat &a);

/// Inverse; SingularMatrix when det = 0.
Mat inverse(const Mat &a);

/// Solves A * W = B for A (W square, invertible; B has W.rows() columns).
Mat solve_left(const Mat &w, const Mat &b);

/// Rank over the field; also used for independence bookkeeping.
int rank(const Mat &a);

/// Canonical nullspace basis via reduced row echelon form; free variables are
/// parameterized in coordinate order, each basis vector has a 1 in its free
/// coordinate.
std::vector<std::vector<RatFunc>> nullspace(const Mat &a);

/// Square block matrix with n x n blocks over the (noncommutative) ring of
/// matrix-valued functions.
struct BlockMat {
    int block_rows = 0;
    int block_cols = 0;
    int n = 0;
    std::vector<Mat> blocks; // row-major, each n x n

    const Mat &block(int i, int j) const { return blocks[static_cast<size_t>(i) * block_cols + j]; }
    Mat &block(int i, int j) { return blocks[static_cast<size_t>(i) * block_cols + j]; }

    static BlockMat make(int block_rows, int block_cols, int n);
    Mat flatten() const;
};

/// Quasideterminant |X|_{ij} = x_ij - r_i(X)^(j) (X^{ij})^{-1} c_j(X)^(i),
/// with the minor X^{ij} inverted after flattening to scalar entries.
/// Indices are 0-based. SingularSubmatrix when X^{ij} is not invertible.
Mat quasideterminant(const BlockMat &x, int i, int j);

} // namespace ncdx
