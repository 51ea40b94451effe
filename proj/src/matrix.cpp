#include "ncdx/matrix.hpp"

namespace ncdx {

Mat::Mat(int rows, int cols, std::vector<RatFunc> entries) : rows_(rows), cols_(cols), e_(std::move(entries)) {
    if (e_.size() != static_cast<size_t>(rows) * cols)
        fail(Errc::InternalMismatch, "matrix entry count does not match its shape");
}

Mat Mat::identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = RatFunc(Rat(1));
    return m;
}

Mat Mat::from_rats(int rows, int cols, const std::vector<Rat> &entries) {
    Mat m(rows, cols);
    if (entries.size() != static_cast<size_t>(rows) * cols)
        fail(Errc::SchemaError, "matrix entry count does not match its shape");
    for (size_t i = 0; i < entries.size(); ++i) m.e_[i] = RatFunc(entries[i]);
    return m;
}

bool Mat::is_zero() const {
    for (const auto &x : e_)
        if (!x.is_zero()) return false;
    return true;
}

bool Mat::is_identity() const {
    if (!is_square()) return false;
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) {
            if (r == c ? !at(r, c).is_one() : !at(r, c).is_zero()) return false;
        }
    return true;
}

bool Mat::is_constant() const {
    for (const auto &x : e_)
        if (!x.is_constant()) return false;
    return true;
}

Mat Mat::operator-() const {
    Mat m = *this;
    for (auto &x : m.e_) x = -x;
    return m;
}

Mat Mat::operator+(const Mat &o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) fail(Errc::ContextMismatch, "matrix shape mismatch in +");
    Mat m = *this;
    for (size_t i = 0; i < e_.size(); ++i) m.e_[i] = m.e_[i] + o.e_[i];
    return m;
}

Mat Mat::operator-(const Mat &o) const { return *this + (-o); }

Mat Mat::operator*(const Mat &o) const {
    if (cols_ != o.rows_) fail(Errc::ContextMismatch, "matrix shape mismatch in *");
    Mat m(rows_, o.cols_);
    for (int r = 0; r < rows_; ++r)
        for (int k = 0; k < cols_; ++k) {
            if (at(r, k).is_zero()) continue;
            for (int c = 0; c < o.cols_; ++c) {
                if (o.at(k, c).is_zero()) continue;
                m.at(r, c) = m.at(r, c) + at(r, k) * o.at(k, c);
            }
        }
    return m;
}

Mat Mat::operator*(const RatFunc &s) const {
    Mat m = *this;
    for (auto &x : m.e_) x = x * s;
    return m;
}

Mat operator*(const RatFunc &s, const Mat &m) { return m * s; }

Mat Mat::transpose() const {
    Mat m(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) m.at(c, r) = at(r, c);
    return m;
}

Mat Mat::map(const std::function<RatFunc(const RatFunc &)> &f) const {
    Mat m = *this;
    for (auto &x : m.e_) x = f(x);
    return m;
}

Mat Mat::derivative(Var v) const {
    return map([v](const RatFunc &x) { return x.derivative(v); });
}

Mat Mat::eval(Var v, const Rat &value) const {
    return map([&](const RatFunc &x) { return x.eval(v, value); });
}

Mat Mat::block(int r0, int c0, int rows, int cols) const {
    Mat m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m.at(r, c) = at(r0 + r, c0 + c);
    return m;
}

Mat Mat::hstack(const std::vector<Mat> &parts) {
    int rows = parts.empty() ? 0 : parts.front().rows();
    int cols = 0;
    for (const auto &p : parts) cols += p.cols();
    Mat m(rows, cols);
    int c0 = 0;
    for (const auto &p : parts) {
        for (int r = 0; r < p.rows(); ++r)
            for (int c = 0; c < p.cols(); ++c) m.at(r, c0 + c) = p.at(r, c);
        c0 += p.cols();
    }
    return m;
}

Mat Mat::vstack(const std::vector<Mat> &parts) {
    int cols = parts.empty() ? 0 : parts.front().cols();
    int rows = 0;
    for (const auto &p : parts) rows += p.rows();
    Mat m(rows, cols);
    int r0 = 0;
    for (const auto &p : parts) {
        for (int r = 0; r < p.rows(); ++r)
            for (int c = 0; c < p.cols(); ++c) m.at(r0 + r, c) = p.at(r, c);
        r0 += p.rows();
    }
    return m;
}

RatFunc det(const Mat &a) {
    if (!a.is_square()) fail(Errc::NotSquare, "determinant of a non-square matrix");
    int n = a.rows();
    Mat m = a;
    RatFunc d(Rat(1));
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int r = col; r < n; ++r)
            if (!m.at(r, col).is_zero()) { pivot = r; break; }
        if (pivot < 0) return RatFunc();
        if (pivot != col) {
            for (int c = col; c < n; ++c) std::swap(m.at(pivot, c), m.at(col, c));
            d = -d;
        }
        d = d * m.at(col, col);
        RatFunc inv = m.at(col, col).inverse();
        for (int r = col + 1; r < n; ++r) {
            if (m.at(r, col).is_zero()) continue;
            RatFunc f = m.at(r, col) * inv;
            for (int c = col; c < n; ++c) m.at(r, c) = m.at(r, c) - f * m.at(col, c);
        }
    }
    return d;
}

namespace {

// Gauss-Jordan on [A | RHS]; returns false when A is singular.
bool eliminate(Mat &a, Mat &rhs) {
    int n = a.rows();
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int r = col; r < n; ++r)
            if (!a.at(r, col).is_zero()) { pivot = r; break; }
        if (pivot < 0) return false;
        if (pivot != col) {
            for (int c = 0; c < n; ++c) std::swap(a.at(pivot, c), a.at(col, c));
            for (int c = 0; c < rhs.cols(); ++c) std::swap(rhs.at(pivot, c), rhs.at(col, c));
        }
        RatFunc inv = a.at(col, col).inverse();
        for (int c = 0; c < n; ++c) a.at(col, c) = a.at(col, c) * inv;
        for (int c = 0; c < rhs.cols(); ++c) rhs.at(col, c) = rhs.at(col, c) * inv;
        for (int r = 0; r < n; ++r) {
            if (r == col || a.at(r, col).is_zero()) continue;
            RatFunc f = a.at(r, col);
            for (int c = 0; c < n; ++c) a.at(r, c) = a.at(r, c) - f * a.at(col, c);
            for (int c = 0; c < rhs.cols(); ++c) rhs.at(r, c) = rhs.at(r, c) - f * rhs.at(col, c);
        }
    }
    return true;
}

} // namespace

Mat inverse(const Mat &a) {
    if (!a.is_square()) fail(Errc::NotSquare, "inverse of a non-square matrix");
    Mat m = a, rhs = Mat::identity(a.rows());
    if (!eliminate(m, rhs)) fail(Errc::SingularMatrix, "matrix is singular");
    return rhs;
}

Mat solve_left(const Mat &w, const Mat &b) {
    if (!w.is_square()) fail(Errc::NotSquare, "solve_left needs a square system matrix");
    if (b.cols() != w.rows()) fail(Errc::ContextMismatch, "solve_left shape mismatch");
    // A W = B  <=>  W^t A^t = B^t.
    Mat wt = w.transpose(), bt = b.transpose();
    if (!eliminate(wt, bt)) fail(Errc::SingularMatrix, "solve_left: system matrix is singular");
    return bt.transpose();
}

int rank(const Mat &a) {
    Mat m = a;
    int r = 0;
    for (int col = 0; col < m.cols() && r < m.rows(); ++col) {
        int pivot = -1;
        for (int row = r; row < m.rows(); ++row)
            if (!m.at(row, col).is_zero()) { pivot = row; break; }
        if (pivot < 0) continue;
        if (pivot != r)
            for (int c = 0; c < m.cols(); ++c) std::swap(m.at(pivot, c), m.at(r, c));
        RatFunc inv = m.at(r, col).inverse();
        for (int row = r + 1; row < m.rows(); ++row) {
            if (m.at(row, col).is_zero()) continue;
            RatFunc f = m.at(row, col) * inv;
            for (int c = col; c < m.cols(); ++c) m.at(row, c) = m.at(row, c) - f * m.at(r, c);
        }
        ++r;
    }
    return r;
}

std::vector<std::vector<RatFunc>> nullspace(const Mat &a) {
    Mat m = a;
    int rows = m.rows(), cols = m.cols();
    std::vector<int> pivot_col;
    int r = 0;
    for (int col = 0; col < cols && r < rows; ++col) {
        int pivot = -1;
        for (int row = r; row < rows; ++row)
            if (!m.at(row, col).is_zero()) { pivot = row; break; }
        if (pivot < 0) continue;
        if (pivot != r)
            for (int c = 0; c < cols; ++c) std::swap(m.at(pivot, c), m.at(r, c));
        RatFunc inv = m.at(r, col).inverse();
        for (int c = col; c < cols; ++c) m.at(r, c) = m.at(r, c) * inv;
        for (int row = 0; row < rows; ++row) {
            if (row == r || m.at(row, col).is_zero()) continue;
            RatFunc f = m.at(row, col);
            for (int c = col; c < cols; ++c) m.at(row, c) = m.at(row, c) - f * m.at(r, c);
        }
        pivot_col.push_back(col);
        ++r;
    }
    std::vector<bool> is_pivot(cols, false);
    for (int c : pivot_col) is_pivot[c] = true;

    std::vector<std::vector<RatFunc>> basis;
    for (int free = 0; free < cols; ++free) {
        if (is_pivot[free]) continue;
        std::vector<RatFunc> v(cols);
        v[free] = RatFunc(Rat(1));
        for (size_t pr = 0; pr < pivot_col.size(); ++pr) v[pivot_col[pr]] = -m.at(static_cast<int>(pr), free);
        basis.push_back(std::move(v));
    }
    return basis;
}

BlockMat BlockMat::make(int block_rows, int block_cols, int n) {
    BlockMat b;
    b.block_rows = block_rows;
    b.block_cols = block_cols;
    b.n = n;
    b.blocks.assign(static_cast<size_t>(block_rows) * block_cols, Mat::zero(n, n));
    return b;
}

Mat BlockMat::flatten() const {
    Mat m(block_rows * n, block_cols * n);
    for (int i = 0; i < block_rows; ++i)
        for (int j = 0; j < block_cols; ++j) {
            const Mat &blk = block(i, j);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) m.at(i * n + r, j * n + c) = blk.at(r, c);
        }
    return m;
}

Mat quasideterminant(const BlockMat &x, int i, int j) {
    if (x.block_rows != x.block_cols) fail(Errc::NotSquare, "quasideterminant of a non-square block matrix");
    int k = x.block_rows, n = x.n;
    if (i < 0 || j < 0 || i >= k || j >= k) fail(Errc::SchemaError, "quasideterminant index out of range");
    if (k == 1) return x.block(0, 0);

    // Flattened minor X^{ij} and the bordering row/column.
    Mat minor((k - 1) * n, (k - 1) * n);
    Mat row(n, (k - 1) * n), col((k - 1) * n, n);
    int mr = 0;
    for (int bi = 0; bi < k; ++bi) {
        if (bi == i) continue;
        int mc = 0;
        for (int bj = 0; bj < k; ++bj) {
            if (bj == j) continue;
            const Mat &blk = x.block(bi, bj);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) minor.at(mr * n + r, mc * n + c) = blk.at(r, c);
            ++mc;
        }
        const Mat &cb = x.block(bi, j);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) col.at(mr * n + r, c) = cb.at(r, c);
        ++mr;
    }
    int mc = 0;
    for (int bj = 0; bj < k; ++bj) {
        if (bj == j) continue;
        const Mat &rb = x.block(i, bj);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) row.at(r, mc * n + c) = rb.at(r, c);
        ++mc;
    }

    Mat inv;
    try {
        inv = inverse(minor);
    } catch (const Error &e) {
        if (e.code() == Errc::SingularMatrix)
            fail(Errc::SingularSubmatrix, "quasideterminant minor X^{ij} is singular");
        throw;
    }
    return x.block(i, j) - row * inv * col;
}

} // namespace ncdx
