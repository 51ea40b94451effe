#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ncdx/airy.hpp"
#include "ncdx/jobs.hpp"
#include "ncdx/parse.hpp"
#include "ncdx/rank1.hpp"

// Acceptance suite: one test case per criterion, all equalities exact.
// REQUIRE is used throughout, so a case reaching its PASS line has verified
// every stated equality with residual identically zero.

using namespace ncdx;
using nlohmann::json;

namespace {

RatFunc RF(const std::string &s) { return parse_ratfunc(s); }

Mat M(int rows, int cols, const std::vector<std::string> &entries) {
    std::vector<RatFunc> e;
    for (const auto &s : entries) e.push_back(RF(s));
    return Mat(rows, cols, std::move(e));
}

Mat CM(int n, const std::vector<std::string> &entries) { return M(n, n, entries); }

QuasiKernelEntry entry(const std::string &alpha, const std::vector<std::string> &p) {
    QuasiKernelEntry e;
    e.alpha = Rat::parse(alpha);
    for (const auto &s : p) e.p.push_back(parse_poly(s));
    return e;
}

void pass_line(int k, const std::string &what) {
    std::printf("PASS criterion %d: %s\n", k, what.c_str());
    std::fflush(stdout);
}

bool report_has(const VerificationReport &rep, const std::string &name) {
    for (const auto &c : rep.checks)
        if (c.name == name && c.pass) return true;
    return false;
}

AiryContext classical() {
    AiryContext ctx;
    ctx.N = 2;
    ctx.alpha0 = Rat(-1);
    ctx.alphas = {Rat(0)};
    return ctx;
}

MatPolynomial qa1() {
    return MatPolynomial(2, {Mat::zero(2, 2), CM(2, {"0", "-2", "0", "0"}), Mat::identity(2)});
}

AiryOrbitSpec orbit(const std::string &lambda, const std::vector<std::vector<std::string>> &ps) {
    AiryOrbitSpec o;
    o.lambda = Rat::parse(lambda);
    for (const auto &col : ps) {
        Mat c(static_cast<int>(col.size()), 1);
        for (size_t i = 0; i < col.size(); ++i) c.at(static_cast<int>(i), 0) = RF(col[i]);
        o.ps.push_back(std::move(c));
    }
    return o;
}

} // namespace

TEST_CASE("criterion 1: 2x2 triangular golden transformation") {
    QuasiKernelSpec spec;
    spec.n = 2;
    spec.entries = {entry("0", {"x", "0"}), entry("0", {"1", "x"})};
    Rank1Bundle b = darboux_rank1(spec);

    REQUIRE(b.P == OreOp(2, Var::x, {CM(2, {"-1/x", "1/x^2", "0", "-1/x"}), Mat::identity(2)}));
    REQUIRE(b.Q == OreOp(2, Var::x, {CM(2, {"1/x", "-1/x^2", "0", "1/x"}), Mat::identity(2)}));
    REQUIRE(b.phi == CM(2, {"z - 1/x", "1/x^2", "0", "z - 1/x"}));
    REQUIRE(b.PQ == OreOp(2, Var::x, {CM(2, {"-2/x^2", "4/x^3", "0", "-2/x^2"}), Mat::zero(2, 2),
                                      Mat::identity(2)}));
    // b(P') = Dz^2 z + Dz + [[0,1],[0,0]]
    OreOp bpp_expected = op_compose(OreOp::d(2, Var::z, 2), OreOp::mult(CM(2, {"z", "0", "0", "z"}), Var::z)) +
                         OreOp::d(2, Var::z) + OreOp::mult(CM(2, {"0", "1", "0", "0"}), Var::z);
    REQUIRE(b.bP == bpp_expected);
    // g = d^2 = x^4, matching the reference decomposition exactly
    REQUIRE(b.d == parse_poly("x^2"));
    REQUIRE(report_has(b.report, "spectral-x"));
    REQUIRE(report_has(b.report, "spectral-z"));
    REQUIRE(b.report.all_pass());
    pass_line(1, "P, Q, Phi, PQ, b(P'), g = x^4 and both exact identities");
}

TEST_CASE("criterion 2: 3x3 Jordan-block golden transformation") {
    QuasiKernelSpec spec;
    spec.n = 3;
    spec.entries = {entry("0", {"x", "0", "0"}), entry("0", {"1", "x", "0"}), entry("0", {"0", "1", "x"})};
    Rank1Bundle b = darboux_rank1(spec);

    REQUIRE(b.P == OreOp(3, Var::x,
                         {CM(3, {"-1/x", "1/x^2", "-1/x^3", "0", "-1/x", "1/x^2", "0", "0", "-1/x"}),
                          Mat::identity(3)}));
    REQUIRE(b.Q == OreOp(3, Var::x,
                         {CM(3, {"1/x", "-1/x^2", "1/x^3", "0", "1/x", "-1/x^2", "0", "0", "1/x"}),
                          Mat::identity(3)}));
    // PQ = D^2 - 2x^-2 I + 4x^-3 J - 6x^-4 J^2
    REQUIRE(b.PQ == OreOp(3, Var::x,
                          {CM(3, {"-2/x^2", "4/x^3", "-6/x^4", "0", "-2/x^2", "4/x^3", "0", "0", "-2/x^2"}),
                           Mat::zero(3, 3), Mat::identity(3)}));

    // the engine's own clearing satisfies Q'∘g^{-1}∘P' = Q∘P exactly
    RatFunc ginv(MPoly::one(), b.d * b.d);
    OreOp ginv_op = OreOp::mult(Mat::identity(3) * ginv, Var::x);
    REQUIRE(op_compose(b.Qp, op_compose(ginv_op, b.Pp)) == op_compose(b.Q, b.P));
    REQUIRE(b.report.all_pass());
    pass_line(2, "P, Q, PQ and both identities with the engine's own clearing");
}

TEST_CASE("criterion 3: 3x3 transformation with supplied L = D^2 I + D J + J^2") {
    OreOp j_op = OreOp::mult(CM(3, {"0", "1", "0", "0", "0", "1", "0", "0", "0"}), Var::x);
    OreOp l = OreOp::d(3, Var::x, 2) + op_compose(OreOp::d(3, Var::x), j_op) + op_compose(j_op, j_op);
    QuasiKernelSpec spec;
    spec.n = 3;
    spec.entries = {entry("0", {"x", "0", "0"}), entry("0", {"-1/2*x^2", "x", "0"}),
                    entry("0", {"-1/2*x^2", "0", "1"})};
    Rank1Bundle b = darboux_rank1(spec, l);

    // The reference display P(1,2) = -3/2, Q(1,2) = -1/2 is internally
    // inconsistent: that pair does not factor L and its P does not kill the
    // second kernel column. Witness the defect exactly, then require the
    // corrected operators forced by the kernel.
    OreOp p_printed(3, Var::x,
                    {CM(3, {"-1/x", "3/2", "x/2", "0", "-1/x", "0", "0", "0", "0"}), Mat::identity(3)});
    OreOp q_printed(3, Var::x,
                    {CM(3, {"1/x", "-1/2", "-x/2", "0", "1/x", "1", "0", "0", "0"}), Mat::identity(3)});
    REQUIRE(l - op_compose(q_printed, p_printed) ==
            OreOp(3, Var::x, {CM(3, {"0", "-2/x", "0", "0", "0", "0", "0", "0", "0"})}));
    REQUIRE(b.P == OreOp(3, Var::x,
                         {CM(3, {"-1/x", "1/2", "x/2", "0", "-1/x", "0", "0", "0", "0"}), Mat::identity(3)}));
    REQUIRE(b.Q == OreOp(3, Var::x,
                         {CM(3, {"1/x", "1/2", "-x/2", "0", "1/x", "1", "0", "0", "0"}), Mat::identity(3)}));
    REQUIRE((l - op_compose(b.Q, b.P)).is_zero());

    // the reference decomposition uses d = x, g = x^2; verify both displayed
    // identities with that tighter pair as well as the engine's own report
    Mat x_id = Mat::identity(3) * RF("x");
    OreOp pp = b.P.scale_left(x_id);
    OreOp qp = op_compose(b.Q, OreOp::mult(x_id, Var::x));
    OreOp ginv_op = OreOp::mult(Mat::identity(3) * RF("1/x^2"), Var::x);
    REQUIRE(op_compose(qp, op_compose(ginv_op, pp)) == op_compose(b.Q, b.P));

    OreOp bpp = b_map_rank1(pp), bqp = b_map_rank1(qp);
    Mat phi_prime = b.phi * RF("x"); // P'(e^{xz} I)

    // first spectral identity: (P' Q' g^-1) Phi' = Phi' b(L)
    Mat lhs1 = wave_apply_left(pp, wave_apply_left(qp, phi_prime * RF("1/x^2")));
    REQUIRE(lhs1 == phi_prime * b.bL);

    // dual identity: x^2 Phi = Phi (b(L)^-1 b(Q') b(P'))
    Mat rhs2 = wave_apply_right(wave_apply_right(b.phi * inverse(b.bL), bqp), bpp);
    REQUIRE(b.phi * RF("x^2") == rhs2);

    REQUIRE(b.report.all_pass());
    pass_line(3, "kernel-consistent P, Q (printed pair's defect witnessed), x^2 Phi = Phi Lambda~ "
                 "and the first spectral identity");
}

TEST_CASE("criterion 4: Airy golden transformation") {
    AiryContext ctx = classical();
    MatPolynomial q = qa1();

    // Jordan chains at lambda = 0: total length 4, leading vectors span C^2,
    // divided-derivative residuals all zero.
    JordanChainSet chains = jordan_chains(q, Rat(0));
    int total = 0;
    Mat heads(2, static_cast<int>(chains.chains.size()));
    for (size_t l = 0; l < chains.chains.size(); ++l) {
        total += static_cast<int>(chains.chains[l].size());
        for (int i = 0; i < 2; ++i) heads.at(i, static_cast<int>(l)) = RatFunc(chains.chains[l][0][static_cast<size_t>(i)]);
        for (const auto &res : jordan_chain_residuals(q, Rat(0), chains.chains[l]))
            for (const Rat &c : res) REQUIRE(c.is_zero());
    }
    REQUIRE(total == 4);
    REQUIRE(!det(heads).is_zero());

    std::vector<AiryOrbitSpec> specs = {orbit("0", {{"1", "1"}, {"1", "0"}}),
                                        orbit("0", {{"x", "0"}, {"0", "1"}})};
    AiryBundle b = darboux_airy(q, specs, ctx);

    // P with the printed 1/(x-1) coefficients
    REQUIRE(b.P == OreOp(2, Var::x,
                         {CM(2, {"-(x-1)", "-2", "0", "-x^2/(x-1)"}),
                          CM(2, {"0", "-1", "1/(x-1)", "-1/(x-1)"}), Mat::identity(2)}));
    // Q as printed, remainder zero
    Mat f = CM(2, {"0", "-1", "1/(x-1)", "-1/(x-1)"});
    Mat h = CM(2, {"-x^2/(x-1)", "1/(x-1)", "0", "-(x-1)"});
    REQUIRE(b.Q == OreOp::d(2, Var::x, 2) - op_compose(OreOp::d(2, Var::x), OreOp::mult(f, Var::x)) +
                       OreOp::mult(h, Var::x));
    REQUIRE((b.L - op_compose(b.Q, b.P)).is_zero());

    // both identities with the q(z) weight (I_2 z - J)^2 and g from the
    // engine's clearing
    REQUIRE(b.qw == CM(2, {"z^2", "-2*z", "0", "z^2"}));
    REQUIRE(report_has(b.report, "spectral-x"));
    REQUIRE(report_has(b.report, "spectral-z"));
    REQUIRE(b.report.all_pass());
    pass_line(4, "Jordan chains (length 4, spanning heads, zero residuals), printed P and Q, "
                 "both identities with weight (Iz - J)^2");
}

TEST_CASE("criterion 5: full kernels round-trip to q(M_Ai) and h(D) I") {
    AiryContext ctx = classical();

    MatPolynomial qt(2, {Mat::zero(2, 2), Mat::identity(2)});
    REQUIRE(operator_from_kernel_airy(airy_kernel_basis(qt, ctx), ctx, qt) == q_of_m_ai(qt, ctx));

    MatPolynomial q2 = qa1();
    REQUIRE(operator_from_kernel_airy(airy_kernel_basis(q2, ctx), ctx, q2) == q_of_m_ai(q2, ctx));

    std::mt19937 rng(50501);
    std::uniform_int_distribution<int> val(-2, 2);
    int done = 0;
    while (done < 3) {
        Mat t1 = CM(2, {std::to_string(val(rng)), std::to_string(val(rng)), "0", std::to_string(val(rng))});
        Mat t2 = CM(2, {std::to_string(val(rng)), std::to_string(val(rng)), "0", std::to_string(val(rng))});
        MatPolynomial q(2, {t1 * t2, -(t1 + t2), Mat::identity(2)});
        try {
            REQUIRE(operator_from_kernel_airy(airy_kernel_basis(q, ctx), ctx, q) == q_of_m_ai(q, ctx));
            ++done;
        } catch (const Error &e) {
            if (e.code() != Errc::DegenerateKernel) throw;
        }
    }

    // rank-1 analogue: the full quasipolynomial kernel of h(D) I returns it
    QuasiKernelSpec full;
    full.n = 2;
    for (int comp = 0; comp < 2; ++comp) {
        auto unit = [&](const std::string &alpha, const std::string &p) {
            return comp == 0 ? entry(alpha, {p, "0"}) : entry(alpha, {"0", p});
        };
        full.entries.push_back(unit("0", "1"));
        full.entries.push_back(unit("0", "x"));
        full.entries.push_back(unit("-1", "1"));
    }
    OreOp p = operator_from_kernel_rank1(full);
    OreOp h = minimal_constant_annihilator(full);
    REQUIRE(p == h); // h(T) = T^2 (T + 1)
    pass_line(5, "operator_from_kernel returns q(M_Ai) resp. h(D) I on full kernels");
}

TEST_CASE("criterion 6: randomized property suite (>= 200 cases)") {
    int cases = 0;
    std::mt19937 rng(987654321);
    std::uniform_int_distribution<int> coeff(-2, 2);
    std::vector<Rat> alpha_pool{Rat(0), Rat(1), Rat(-1), Rat(1, 2), Rat(-1, 2)};
    std::uniform_int_distribution<size_t> pick(0, alpha_pool.size() - 1);
    std::uniform_int_distribution<int> deg(0, 2);

    auto random_poly_op = [&](int n, int ord) {
        std::vector<Mat> cs;
        for (int k = 0; k <= ord; ++k) {
            Mat m(n, n);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c)
                    m.at(r, c) = RatFunc(MPoly::monomial(Rat(coeff(rng)), Mono::var(Var::x, static_cast<unsigned>(deg(rng)))));
            cs.push_back(std::move(m));
        }
        return OreOp(n, Var::x, std::move(cs));
    };
    auto random_kernel = [&](int n, int k, int maxdeg) {
        QuasiKernelSpec spec;
        spec.n = n;
        for (int i = 0; i < n * k; ++i) {
            QuasiKernelEntry e;
            e.alpha = alpha_pool[pick(rng)];
            for (int c = 0; c < n; ++c) {
                MPoly p;
                for (int t = 0; t <= maxdeg; ++t)
                    p = p + MPoly::monomial(Rat(coeff(rng)), Mono::var(Var::x, static_cast<unsigned>(t)));
                e.p.push_back(p);
            }
            spec.entries.push_back(std::move(e));
        }
        return spec;
    };

    // b-maps are homomorphisms (rank-1 and Airy flavors)
    AiryContext actx;
    actx.N = 2;
    actx.alpha0 = Rat(-2);
    actx.alphas = {Rat(1)};
    for (int i = 0; i < 40; ++i) {
        int n = 1 + (i % 2);
        OreOp a = random_poly_op(n, 2), b = random_poly_op(n, 1);
        REQUIRE(b_map_rank1(op_compose(a, b)) == op_compose(b_map_rank1(a), b_map_rank1(b)));
        if (n == 1)
            REQUIRE(b_map_airy(op_compose(a, b), actx) ==
                    op_compose(b_map_airy(a, actx), b_map_airy(b, actx)));
        ++cases;
    }

    // signed right action is composition-compatible
    for (int i = 0; i < 30; ++i) {
        Mat psi(2, 2);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                psi.at(r, c) = RF("x") * RatFunc(Rat(coeff(rng))) + RF("z^2") * RatFunc(Rat(coeff(rng))) +
                               RatFunc(Rat(coeff(rng)));
        std::vector<Mat> c1, c2;
        for (int k = 0; k <= 1; ++k) {
            Mat m1(2, 2), m2(2, 2);
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c) {
                    m1.at(r, c) = RF("z") * RatFunc(Rat(coeff(rng))) + RatFunc(Rat(coeff(rng)));
                    m2.at(r, c) = RF("z^2") * RatFunc(Rat(coeff(rng))) + RatFunc(Rat(coeff(rng)));
                }
            c1.push_back(m1);
            c2.push_back(m2);
        }
        OreOp s1(2, Var::z, c1), s2(2, Var::z, c2);
        REQUIRE(wave_apply_right(psi, op_compose(s1, s2)) ==
                wave_apply_right(wave_apply_right(psi, s1), s2));
        ++cases;
    }

    // intertwining relation P (e^{xz} I) = (e^{xz} I) b(P)
    for (int i = 0; i < 15; ++i) {
        OreOp a = random_poly_op(2, 2);
        REQUIRE(wave_apply_left(a, Mat::identity(2)) ==
                wave_apply_right(Mat::identity(2), b_map_rank1(a)));
        ++cases;
    }

    // quasideterminant vs determinant ratio on commutative instances
    {
        int done = 0;
        while (done < 30) {
            BlockMat x = BlockMat::make(3, 3, 1);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    MPoly p = MPoly::monomial(Rat(coeff(rng)), Mono::var(Var::x, static_cast<unsigned>(deg(rng)))) +
                              MPoly(Rat(coeff(rng)));
                    x.block(i, j) = Mat(1, 1, {RatFunc(p)});
                }
            std::uniform_int_distribution<int> idx(0, 2);
            int i = idx(rng), j = idx(rng);
            Mat flat = x.flatten();
            Mat minor(2, 2);
            int rr = 0;
            for (int r = 0; r < 3; ++r) {
                if (r == i) continue;
                int cc = 0;
                for (int c = 0; c < 3; ++c) {
                    if (c == j) continue;
                    minor.at(rr, cc++) = flat.at(r, c);
                }
                ++rr;
            }
            RatFunc dm = det(minor);
            if (dm.is_zero()) continue;
            RatFunc expected = det(flat) / dm;
            if ((i + j) % 2 == 1) expected = -expected;
            REQUIRE(quasideterminant(x, i, j).at(0, 0) == expected);
            ++done;
            ++cases;
        }
    }

    // exponent-splitting: P kills each exponent component of kernel combinations
    {
        int done = 0;
        while (done < 20) {
            QuasiKernelSpec spec = random_kernel(1, 2, 1);
            try {
                OreOp p = operator_from_kernel_rank1(spec);
                KernelColumns kc = kernel_columns(spec);
                Mat combo = kc.columns[0] * RatFunc(Rat(coeff(rng))) + kc.columns[1] * RatFunc(Rat(coeff(rng)));
                REQUIRE(op_apply_left(p, combo).is_zero());
                for (const Mat &col : kc.columns) REQUIRE(op_apply_left(p, col).is_zero());
                ++done;
                ++cases;
            } catch (const Error &e) {
                if (e.code() != Errc::DegenerateKernel) throw;
            }
        }
    }

    // chain-length sum rule for every jordan_chains output
    {
        int done = 0;
        while (done < 30) {
            Mat t1 = CM(2, {std::to_string(coeff(rng)), std::to_string(coeff(rng)), "0", std::to_string(coeff(rng))});
            Mat t2 = CM(2, {std::to_string(coeff(rng)), std::to_string(coeff(rng)), "0", std::to_string(coeff(rng))});
            MatPolynomial q(2, {t1 * t2, -(t1 + t2), Mat::identity(2)});
            for (const auto &root : rational_roots(char_det(q))) {
                JordanChainSet chains = jordan_chains(q, root.lambda);
                int len = 0;
                for (const auto &chain : chains.chains) {
                    len += static_cast<int>(chain.size());
                    for (const auto &res : jordan_chain_residuals(q, root.lambda, chain))
                        for (const Rat &c : res) REQUIRE(c.is_zero());
                }
                REQUIRE(len == root.multiplicity);
                ++done;
                ++cases;
            }
        }
    }

    // kernel annihilation, exact factorization and both dual identities on
    // full rank-1 pipelines over the stated data pool
    {
        int done = 0;
        while (done < 12) {
            std::uniform_int_distribution<int> kd(1, 2), nd(1, 2);
            QuasiKernelSpec spec = random_kernel(nd(rng), kd(rng), 2);
            try {
                Rank1Bundle b = darboux_rank1(spec);
                REQUIRE(b.P.is_monic());
                REQUIRE(b.P.order() * spec.n == static_cast<int>(spec.entries.size()));
                for (const Mat &col : kernel_columns(spec).columns)
                    REQUIRE(op_apply_left(b.P, col).is_zero());
                REQUIRE((b.L - op_compose(b.Q, b.P)).is_zero());
                REQUIRE(b.report.all_pass());
                ++done;
                ++cases;
            } catch (const Error &e) {
                if (e.code() != Errc::DegenerateKernel) throw;
            }
        }
    }

    // Airy pipelines on rational sub-kernels
    {
        AiryContext ctx = classical();
        std::uniform_int_distribution<int> val(-2, 2);
        int done = 0;
        while (done < 10) {
            Rat l1(val(rng)), l2(val(rng));
            if (l1 == l2) continue;
            MatPolynomial q(1, {M(1, 1, {(l1 * l2).str()}), M(1, 1, {(-(l1 + l2)).str()}), Mat::identity(1)});
            for (const auto &spec : airy_kernel_basis(q, ctx)) {
                if (spec.lambda != l1) continue;
                AiryBundle b = darboux_airy(q, {spec}, ctx);
                REQUIRE((b.L - op_compose(b.Q, b.P)).is_zero());
                REQUIRE(b.report.all_pass());
                ++done;
                ++cases;
            }
        }
    }

    REQUIRE(cases >= 200);
    std::printf("  (%d randomized cases)\n", cases);
    pass_line(6, "property suite: annihilation, factorization, dual identities, homomorphisms, "
                 "action compatibility, quasideterminant ratio, splitting, chain sums");
}

TEST_CASE("criterion 7: designated errors, never a wrong bundle") {
    // degenerate kernel
    QuasiKernelSpec dup;
    dup.n = 2;
    dup.entries = {entry("0", {"x", "0"}), entry("0", {"x", "0"})};
    try {
        darboux_rank1(dup);
        REQUIRE(false);
    } catch (const Error &e) {
        REQUIRE(e.code() == Errc::DegenerateKernel);
    }

    // irrational spectrum
    MatPolynomial qbad(1, {M(1, 1, {"-2"}), M(1, 1, {"0"}), Mat::identity(1)});
    try {
        airy_kernel_basis(qbad, classical());
        REQUIRE(false);
    } catch (const Error &e) {
        REQUIRE(e.code() == Errc::IrrationalSpectrum);
    }

    // kernel not inside vker L
    QuasiKernelSpec expo;
    expo.n = 1;
    expo.entries = {entry("1", {"1"})};
    try {
        darboux_rank1(expo, OreOp::d(1, Var::x, 2));
        REQUIRE(false);
    } catch (const Error &e) {
        REQUIRE(e.code() == Errc::NonzeroRemainder);
    }

    // and the CLI surfaces each as exit code 3
    auto exit_of = [](const std::string &file, const std::string &mode) {
        std::ifstream in(std::string(NCDX_FIXTURE_DIR) + "/" + file);
        REQUIRE(in.good());
        std::stringstream buf;
        buf << in.rdbuf();
        json j = json::parse(buf.str());
        j["mode"] = mode;
        return run_job(j.dump()).exit_code;
    };
    REQUIRE(exit_of("degenerate_kernel.json", "rank1") == 3);
    REQUIRE(exit_of("jordan_irrational.json", "jordan") == 3);
    REQUIRE(exit_of("rank1_not_in_vkerL.json", "rank1") == 3);

    pass_line(7, "DegenerateKernel, IrrationalSpectrum, NonzeroRemainder with exit code 3");
}
