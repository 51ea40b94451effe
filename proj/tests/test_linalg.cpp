#include <doctest.h>

#include <random>

#include "ncdx/matrix.hpp"
#include "ncdx/parse.hpp"
#include "ncdx/rank1.hpp"

using namespace ncdx;

namespace {

RatFunc RF(const std::string &s) { return parse_ratfunc(s); }

Mat M(int rows, int cols, const std::vector<std::string> &entries) {
    std::vector<RatFunc> e;
    for (const auto &s : entries) e.push_back(RF(s));
    return Mat(rows, cols, std::move(e));
}

// Laplace expansion along the first row; independent of the elimination path.
RatFunc det_cofactor(const Mat &m) {
    int n = m.rows();
    if (n == 1) return m.at(0, 0);
    RatFunc acc;
    for (int c = 0; c < n; ++c) {
        if (m.at(0, c).is_zero()) continue;
        Mat minor(n - 1, n - 1);
        for (int r = 1; r < n; ++r) {
            int cc = 0;
            for (int col = 0; col < n; ++col) {
                if (col == c) continue;
                minor.at(r - 1, cc++) = m.at(r, col);
            }
        }
        RatFunc term = m.at(0, c) * det_cofactor(minor);
        acc = c % 2 == 0 ? acc + term : acc - term;
    }
    return acc;
}

Mat random_mat(std::mt19937 &rng, int n, int max_deg = 2) {
    std::uniform_int_distribution<int> coeff(-3, 3);
    std::uniform_int_distribution<int> deg(0, max_deg);
    Mat m(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            MPoly p;
            for (int t = 0; t < 2; ++t)
                p = p + MPoly::monomial(Rat(coeff(rng)), Mono::var(Var::x, static_cast<unsigned>(deg(rng))));
            m.at(r, c) = RatFunc(p);
        }
    return m;
}

} // namespace

TEST_CASE("determinant examples") {
    CHECK(det(Mat::identity(3)).is_one());
    // matrix of the F_1 shape: upper triangular with x on the diagonal
    Mat f = M(2, 2, {"x", "3", "0", "x"});
    CHECK(det(f) == RF("x^2"));
    CHECK_THROWS_AS(det(Mat(2, 3)), Error);

    std::mt19937 rng(99);
    for (int i = 0; i < 5; ++i) {
        Mat a = random_mat(rng, 4);
        CHECK(det(a) == det_cofactor(a));
    }
}

TEST_CASE("determinant is multiplicative") {
    std::mt19937 rng(1001);
    for (int i = 0; i < 8; ++i) {
        Mat a = random_mat(rng, 3), b = random_mat(rng, 3);
        CHECK(det(a * b) == det(a) * det(b));
    }
}

TEST_CASE("solve_left examples") {
    Mat b = M(2, 2, {"x^2", "1", "0", "z"});
    CHECK(solve_left(Mat::identity(2), b) == b);

    // F' F^{-1} for the triangular quasipolynomial block
    Mat w = M(2, 2, {"x", "3", "0", "x"});
    Mat a = solve_left(w, w.derivative(Var::x));
    CHECK(a == M(2, 2, {"1/x", "-3/x^2", "0", "1/x"}));

    std::mt19937 rng(555);
    int done = 0;
    while (done < 8) {
        Mat w2 = random_mat(rng, 3);
        if (det(w2).is_zero()) continue;
        Mat a2 = random_mat(rng, 3);
        Mat solved = solve_left(w2, a2 * w2);
        CHECK(solved == a2);
        CHECK((solved * w2 - a2 * w2).is_zero());
        ++done;
    }
    CHECK_THROWS_AS(solve_left(M(2, 2, {"x", "x", "x", "x"}), Mat::identity(2)), Error);
}

TEST_CASE("quasideterminant definition in the scalar-block case") {
    BlockMat x = BlockMat::make(2, 2, 1);
    x.block(0, 0) = M(1, 1, {"5"});
    x.block(0, 1) = M(1, 1, {"x"});
    x.block(1, 0) = M(1, 1, {"z"});
    x.block(1, 1) = M(1, 1, {"x*z + 1"});
    Mat qd = quasideterminant(x, 0, 0);
    CHECK(qd.at(0, 0) == RF("5 - x*z/(x*z+1)"));

    // singular minor
    x.block(1, 1) = M(1, 1, {"0"});
    CHECK_THROWS_AS(quasideterminant(x, 0, 0), Error);
}

TEST_CASE("quasideterminant matches the determinant ratio on commutative instances") {
    std::mt19937 rng(31337);
    int done = 0;
    while (done < 12) {
        int k = 3;
        BlockMat x = BlockMat::make(k, k, 1);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) x.block(i, j) = random_mat(rng, 1, 1);
        std::uniform_int_distribution<int> idx(0, k - 1);
        int i = idx(rng), j = idx(rng);

        Mat flat = x.flatten();
        Mat minor(k - 1, k - 1);
        int rr = 0;
        for (int r = 0; r < k; ++r) {
            if (r == i) continue;
            int cc = 0;
            for (int c = 0; c < k; ++c) {
                if (c == j) continue;
                minor.at(rr, cc++) = flat.at(r, c);
            }
            ++rr;
        }
        RatFunc dm = det(minor);
        if (dm.is_zero()) continue;
        Mat qd = quasideterminant(x, i, j);
        RatFunc expected = det(flat) / dm;
        if ((i + j) % 2 == 1) expected = -expected;
        CHECK(qd.at(0, 0) == expected);
        ++done;
    }
}

TEST_CASE("quasideterminant of the bordered Wronskian applies the kernel operator") {
    // F_1 spans the kernel of P = D - F_1' F_1^{-1}; for generic F the
    // (2,2)-quasideterminant of W(F_1, F) equals P applied to F.
    Mat f1 = M(2, 2, {"x", "1", "0", "x"});
    Mat f = M(2, 2, {"x^2", "1", "x", "x^3"});

    BlockMat w = BlockMat::make(2, 2, 2);
    w.block(0, 0) = f1;
    w.block(0, 1) = f;
    w.block(1, 0) = f1.derivative(Var::x);
    w.block(1, 1) = f.derivative(Var::x);

    Mat qd = quasideterminant(w, 1, 1);
    Mat pf = f.derivative(Var::x) - f1.derivative(Var::x) * inverse(f1) * f;
    CHECK(qd == pf);
}

TEST_CASE("nullspace is canonical and exact") {
    Mat a = M(2, 3, {"1", "2", "3", "2", "4", "6"});
    auto basis = nullspace(a);
    REQUIRE(basis.size() == 2);
    for (const auto &v : basis) {
        for (int r = 0; r < a.rows(); ++r) {
            RatFunc acc;
            for (int c = 0; c < a.cols(); ++c) acc = acc + a.at(r, c) * v[static_cast<size_t>(c)];
            CHECK(acc.is_zero());
        }
    }
    // free coordinates carry an explicit 1
    CHECK(basis[0][1].is_one());
    CHECK(basis[1][2].is_one());
}
