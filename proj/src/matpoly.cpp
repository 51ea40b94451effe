#include "ncdx/matpoly.hpp"

#include <algorithm>

namespace ncdx {

MatPolynomial::MatPolynomial(int n, std::vector<Mat> coeffs) : n_(n), coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) fail(Errc::SchemaError, "matrix polynomial needs at least one coefficient");
    for (const auto &c : coeffs_) {
        if (c.rows() != n_ || c.cols() != n_) fail(Errc::SchemaError, "matrix polynomial coefficient of wrong shape");
        if (!c.is_constant()) fail(Errc::SchemaError, "matrix polynomial coefficients must be constant");
    }
    if (!coeffs_.back().is_identity()) fail(Errc::SchemaError, "matrix polynomial must be monic");
}

Mat MatPolynomial::as_t_matrix() const {
    Mat m = Mat::zero(n_, n_);
    for (size_t j = 0; j < coeffs_.size(); ++j) {
        RatFunc tj(MPoly::variable(Var::t, static_cast<unsigned>(j)));
        m = m + coeffs_[j] * tj;
    }
    return m;
}

Mat MatPolynomial::eval(const Rat &lambda) const {
    Mat m = Mat::zero(n_, n_);
    Rat p(1);
    for (size_t j = 0; j < coeffs_.size(); ++j) {
        m = m + coeffs_[j] * RatFunc(p);
        p *= lambda;
    }
    return m;
}

MatPolynomial MatPolynomial::derivative() const {
    if (degree() == 0) {
        // Derivative of a constant is zero; keep the shape but note the
        // result is no longer monic, so bypass the monic check.
        MatPolynomial r = *this;
        r.coeffs_ = {Mat::zero(n_, n_)};
        return r;
    }
    MatPolynomial r = *this;
    std::vector<Mat> c;
    for (int j = 1; j <= degree(); ++j) c.push_back(coeffs_[static_cast<size_t>(j)] * RatFunc(Rat(j)));
    r.coeffs_ = std::move(c);
    return r;
}

MPoly char_det(const MatPolynomial &q) {
    RatFunc d = det(q.as_t_matrix());
    if (!d.is_polynomial()) fail(Errc::InternalMismatch, "det of a polynomial matrix must be polynomial");
    return d.num();
}

Mat companion(const MatPolynomial &q) {
    int n = q.n(), d = q.degree();
    if (d == 0) fail(Errc::SchemaError, "companion matrix needs degree >= 1");
    Mat c = Mat::zero(n * d, n * d);
    for (int b = 0; b + 1 < d; ++b)
        for (int i = 0; i < n; ++i) c.at(b * n + i, (b + 1) * n + i) = RatFunc(Rat(1));
    for (int b = 0; b < d; ++b) {
        const Mat &a = q.coeff(b);
        for (int r = 0; r < n; ++r)
            for (int col = 0; col < n; ++col) c.at((d - 1) * n + r, b * n + col) = -a.at(r, col);
    }
    return c;
}

namespace {

// Divisors of |v| by trial division; inputs stay desk-sized.
std::vector<Int> divisors(const Int &v) {
    Int a = abs(v);
    std::vector<Int> ds;
    if (a == 0) return ds;
    for (Int i = 1; i * i <= a; ++i) {
        if (a % i == 0) {
            ds.push_back(i);
            Int other = a / i;
            if (other != i) ds.push_back(other);
        }
    }
    return ds;
}

// Largest k and quotient with p = (t - lambda)^k * quotient exactly.
int deflate(MPoly &p, const Rat &lambda) {
    MPoly factor = MPoly::variable(Var::t) - MPoly(lambda);
    int k = 0;
    MPoly quot;
    while (!p.is_constant() && p.divide_exact(factor, quot)) {
        p = quot;
        ++k;
    }
    return k;
}

} // namespace

std::vector<RootMultiplicity> rational_roots(const MPoly &chi) {
    for (int i = 0; i < kNumVars; ++i) {
        Var v = static_cast<Var>(i);
        if (v != Var::t && chi.uses(v)) fail(Errc::SchemaError, "characteristic polynomial must live in t");
    }
    MPoly p = chi;
    std::vector<RootMultiplicity> roots;

    int k0 = 0;
    {
        // Root at 0 first: strip the power of t.
        MPoly quot;
        while (!p.is_constant() && p.divide_exact(MPoly::variable(Var::t), quot)) {
            p = quot;
            ++k0;
        }
    }
    if (k0 > 0) roots.push_back({Rat(0), k0});
    if (p.is_constant()) return roots;

    // Scale to integer coefficients; candidates p/q with p | constant term
    // and q | leading coefficient.
    Int den_lcm(1);
    for (const auto &t : p.terms()) den_lcm = int_lcm(den_lcm, t.second.den());
    Int lead = (p.leading_coeff() * Rat(den_lcm)).num();
    Int constant = (p.coeff_of(Var::t, 0).constant_value() * Rat(den_lcm)).num();

    std::vector<Rat> candidates;
    for (const Int &num : divisors(constant))
        for (const Int &den : divisors(lead)) {
            candidates.push_back(Rat(num, den));
            candidates.push_back(Rat(-num, den));
        }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    for (const Rat &lambda : candidates) {
        if (p.is_constant()) break;
        if (!p.eval(Var::t, lambda).is_zero()) continue;
        int m = deflate(p, lambda);
        if (m > 0) roots.push_back({lambda, m});
    }

    if (!p.is_constant())
        fail(Errc::IrrationalSpectrum, "characteristic polynomial has non-rational roots: remaining factor " + p.str());

    std::sort(roots.begin(), roots.end(), [](const RootMultiplicity &a, const RootMultiplicity &b) {
        return a.lambda < b.lambda;
    });
    return roots;
}

namespace {

Mat mat_from_columns(int dim, const std::vector<std::vector<RatFunc>> &cols) {
    Mat m(dim, static_cast<int>(cols.size()));
    for (size_t c = 0; c < cols.size(); ++c)
        for (int r = 0; r < dim; ++r) m.at(r, static_cast<int>(c)) = cols[c][static_cast<size_t>(r)];
    return m;
}

// Incremental independence bookkeeping via row reduction against a growing
// basis kept in echelon form.
class SpanTracker {
public:
    explicit SpanTracker(int dim) : dim_(dim) {}

    // Returns true (and absorbs v) when v is independent of the current span.
    bool try_extend(std::vector<RatFunc> v) {
        for (const auto &row : rows_) {
            const RatFunc &x = v[static_cast<size_t>(row.pivot)];
            if (!x.is_zero()) {
                RatFunc f = x;
                for (int c = 0; c < dim_; ++c) v[static_cast<size_t>(c)] = v[static_cast<size_t>(c)] - f * row.data[static_cast<size_t>(c)];
            }
        }
        int pivot = -1;
        for (int c = 0; c < dim_; ++c)
            if (!v[static_cast<size_t>(c)].is_zero()) { pivot = c; break; }
        if (pivot < 0) return false;
        RatFunc inv = v[static_cast<size_t>(pivot)].inverse();
        for (int c = 0; c < dim_; ++c) v[static_cast<size_t>(c)] = v[static_cast<size_t>(c)] * inv;
        rows_.push_back({pivot, std::move(v)});
        return true;
    }

private:
    struct Row {
        int pivot;
        std::vector<RatFunc> data;
    };
    int dim_;
    std::vector<Row> rows_;
};

std::vector<Rat> first_block(const std::vector<RatFunc> &v, int n) {
    std::vector<Rat> out;
    out.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(v[static_cast<size_t>(i)].constant_value());
    return out;
}

std::vector<RatFunc> apply_mat(const Mat &m, const std::vector<RatFunc> &v) {
    std::vector<RatFunc> out(static_cast<size_t>(m.rows()));
    for (int r = 0; r < m.rows(); ++r) {
        RatFunc acc;
        for (int c = 0; c < m.cols(); ++c)
            if (!m.at(r, c).is_zero() && !v[static_cast<size_t>(c)].is_zero())
                acc = acc + m.at(r, c) * v[static_cast<size_t>(c)];
        out[static_cast<size_t>(r)] = acc;
    }
    return out;
}

} // namespace

JordanChainSet jordan_chains(const MatPolynomial &q, const Rat &lambda) {
    MPoly chi = char_det(q);
    if (!chi.eval(Var::t, lambda).is_zero())
        fail(Errc::NotAnEigenvalue, "lambda = " + lambda.str() + " is not a root of det q(t)");

    MPoly deflated = chi;
    int m = deflate(deflated, lambda);

    int nd = q.n() * q.degree();
    Mat a = companion(q) - Mat::identity(nd) * RatFunc(lambda);

    // Kernels of successive powers.
    std::vector<std::vector<std::vector<RatFunc>>> kernels; // kernels[j-1] = basis of ker A^j
    Mat power = Mat::identity(nd);
    int total = 0;
    while (total < m) {
        power = power * a;
        kernels.push_back(nullspace(power));
        int dim = static_cast<int>(kernels.back().size());
        if (dim == total)
            fail(Errc::InternalMismatch, "generalized eigenspace stopped growing before reaching the multiplicity");
        total = dim;
    }
    int jmax = static_cast<int>(kernels.size());

    // Top-down selection: at level j, heads independent of ker A^{j-1} and of
    // the lowered continuations of longer chains start new chains of length j.
    std::vector<std::vector<std::vector<RatFunc>>> chains_c; // companion-space chains, head (eigenvector) first
    std::vector<std::vector<RatFunc>> carriers;               // level-j members of longer chains
    for (int j = jmax; j >= 1; --j) {
        SpanTracker level(nd);
        if (j >= 2)
            for (const auto &w : kernels[static_cast<size_t>(j - 2)]) level.try_extend(w);
        std::vector<std::vector<RatFunc>> lowered;
        for (const auto &w : carriers) {
            auto lw = apply_mat(a, w);
            level.try_extend(lw);
            lowered.push_back(std::move(lw));
        }
        for (const auto &w : kernels[static_cast<size_t>(j - 1)]) {
            if (!level.try_extend(w)) continue;
            // New chain of length j: w, A w, ..., A^{j-1} w, reported head-first.
            std::vector<std::vector<RatFunc>> chain{w};
            for (int r = 1; r < j; ++r) chain.push_back(apply_mat(a, chain.back()));
            std::reverse(chain.begin(), chain.end());
            chains_c.push_back(std::move(chain));
            lowered.push_back(w);
        }
        carriers = std::move(lowered);
    }

    std::sort(chains_c.begin(), chains_c.end(),
              [](const auto &x, const auto &y) { return x.size() > y.size(); });

    JordanChainSet out;
    out.lambda = lambda;
    out.multiplicity = m;
    for (const auto &chain : chains_c) {
        std::vector<std::vector<Rat>> projected;
        for (const auto &w : chain) projected.push_back(first_block(w, q.n()));
        out.chains.push_back(std::move(projected));
    }

    int length_sum = 0;
    for (const auto &c : out.chains) length_sum += static_cast<int>(c.size());
    if (length_sum != m) fail(Errc::InternalMismatch, "total Jordan chain length does not match the multiplicity");
    return out;
}

std::vector<std::vector<Rat>> jordan_chain_residuals(const MatPolynomial &q, const Rat &lambda,
                                                     const std::vector<std::vector<Rat>> &chain) {
    // Divided derivatives q^(r)(lambda)/r! computed by repeated formal
    // differentiation; independent of the companion-matrix route.
    std::vector<Mat> divided;
    MatPolynomial deriv = q;
    Rat factorial(1);
    for (size_t r = 0; r < chain.size(); ++r) {
        if (r > 0) {
            deriv = deriv.derivative();
            factorial *= Rat(static_cast<long>(r));
        }
        divided.push_back(deriv.eval(lambda) * RatFunc(factorial.inverse()));
    }

    std::vector<std::vector<Rat>> residuals;
    for (size_t j = 0; j < chain.size(); ++j) {
        std::vector<Rat> res(static_cast<size_t>(q.n()), Rat(0));
        for (size_t r = 0; r <= j; ++r) {
            const Mat &qr = divided[r];
            const std::vector<Rat> &v = chain[j - r];
            for (int row = 0; row < q.n(); ++row) {
                Rat acc(0);
                for (int col = 0; col < q.n(); ++col) acc += qr.at(row, col).constant_value() * v[static_cast<size_t>(col)];
                res[static_cast<size_t>(row)] += acc;
            }
        }
        residuals.push_back(std::move(res));
    }
    return residuals;
}

} // namespace ncdx
