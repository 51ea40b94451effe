#include "ncdx/jobs.hpp"

#include <json.hpp>

#include "ncdx/latex.hpp"
#include "ncdx/parse.hpp"

namespace ncdx {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// parsing helpers
// ---------------------------------------------------------------------------

[[noreturn]] void bad(const std::string &msg) { fail(Errc::SchemaError, msg); }

const json &field(const json &j, const std::string &key) {
    if (!j.is_object() || !j.contains(key)) bad("missing field '" + key + "'");
    return j.at(key);
}

int int_field(const json &j, const std::string &key) {
    const json &v = field(j, key);
    if (!v.is_number_integer()) bad("field '" + key + "' must be an integer");
    return v.get<int>();
}

std::string str_of(const json &v, const std::string &what) {
    if (!v.is_string()) bad(what + " must be a string");
    return v.get<std::string>();
}

Rat rat_of(const json &v, const std::string &what) { return Rat::parse(str_of(v, what)); }

// Polynomial in x as a list of {coeff, exponents: [e]}.
MPoly poly_of(const json &v, const std::string &what) {
    if (!v.is_array()) bad(what + " must be a list of {coeff, exponents} terms");
    MPoly p;
    for (const auto &term : v) {
        Rat c = rat_of(field(term, "coeff"), what + ".coeff");
        const json &ex = field(term, "exponents");
        if (!ex.is_array() || ex.size() != 1 || !ex[0].is_number_integer() || ex[0].get<int>() < 0)
            bad(what + ".exponents must be [e] with e a nonnegative integer");
        p = p + MPoly::monomial(c, Mono::var(Var::x, ex[0].get<unsigned>()));
    }
    return p;
}

Mat mat_of(const json &v, const std::string &what) {
    if (!v.is_array() || v.empty()) bad(what + " must be a nonempty array of rows");
    int rows = static_cast<int>(v.size());
    if (!v[0].is_array() || v[0].empty()) bad(what + " rows must be nonempty arrays");
    int cols = static_cast<int>(v[0].size());
    Mat m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        if (!v[r].is_array() || static_cast<int>(v[r].size()) != cols) bad(what + " rows have uneven lengths");
        for (int c = 0; c < cols; ++c)
            m.at(r, c) = parse_ratfunc(str_of(v[r][c], what + " entry"));
    }
    return m;
}

Mat const_mat_of(const json &v, int n, const std::string &what) {
    Mat m = mat_of(v, what);
    if (m.rows() != n || m.cols() != n) bad(what + " must be " + std::to_string(n) + "x" + std::to_string(n));
    if (!m.is_constant()) bad(what + " must have constant (rational) entries");
    return m;
}

OreOp op_of(const json &v, int n, const std::string &what) {
    Var var = Var::x;
    if (v.contains("var")) {
        std::string vs = str_of(v.at("var"), what + ".var");
        if (vs == "x") var = Var::x;
        else if (vs == "z") var = Var::z;
        else bad(what + ".var must be 'x' or 'z'");
    }
    const json &coeffs = field(v, "coeffs");
    if (!coeffs.is_array()) bad(what + ".coeffs must be an array of matrices");
    std::vector<Mat> cs;
    for (size_t k = 0; k < coeffs.size(); ++k) {
        Mat m = mat_of(coeffs[k], what + ".coeffs[" + std::to_string(k) + "]");
        if (m.rows() != n || m.cols() != n) bad(what + " coefficient of wrong shape");
        cs.push_back(std::move(m));
    }
    return OreOp(n, var, std::move(cs));
}

MatPolynomial matpoly_of(const json &v, int n, const std::string &what) {
    if (!v.is_array() || v.empty()) bad(what + " must be a nonempty array of coefficient matrices");
    std::vector<Mat> cs;
    for (size_t k = 0; k < v.size(); ++k) cs.push_back(const_mat_of(v[k], n, what + "[" + std::to_string(k) + "]"));
    try {
        return MatPolynomial(n, std::move(cs));
    } catch (const Error &e) {
        bad(std::string("invalid matrix polynomial: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// serialization helpers
// ---------------------------------------------------------------------------

json mat_to_json(const Mat &m) {
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m.at(r, c).str());
        rows.push_back(std::move(row));
    }
    return rows;
}

json op_to_json(const OreOp &p) {
    json coeffs = json::array();
    for (int k = 0; k <= p.order(); ++k) coeffs.push_back(mat_to_json(p.coeff(k)));
    return json{{"var", var_name(p.var())}, {"coeffs", std::move(coeffs)}};
}

json report_to_json(const VerificationReport &r) {
    json checks = json::array();
    for (const auto &c : r.checks)
        checks.push_back(json{{"name", c.name}, {"identity", c.identity}, {"residual", c.residual}, {"pass", c.pass}});
    return json{{"summary", r.all_pass()}, {"checks", std::move(checks)}};
}

json rank1_bundle_to_json(const Rank1Bundle &b) {
    return json{
        {"kind", "rank1"},
        {"n", b.n},
        {"P", op_to_json(b.P)},
        {"Q", op_to_json(b.Q)},
        {"L", op_to_json(b.L)},
        {"PQ", op_to_json(b.PQ)},
        {"Pp", op_to_json(b.Pp)},
        {"Qp", op_to_json(b.Qp)},
        {"d", b.d.str()},
        {"bP", op_to_json(b.bP)},
        {"bQ", op_to_json(b.bQ)},
        {"bL", mat_to_json(b.bL)},
        {"dual", op_to_json(b.dual)},
        {"phi", mat_to_json(b.phi)},
    };
}

json airy_bundle_to_json(const AiryBundle &b) {
    json alphas = json::array();
    for (const Rat &a : b.ctx.alphas) alphas.push_back(a.str());
    json qc = json::array();
    for (const Mat &m : b.q_coeffs) qc.push_back(mat_to_json(m));
    json phi = json::array();
    for (const Mat &m : b.phi.blocks) phi.push_back(mat_to_json(m));
    return json{
        {"kind", "airy"},
        {"n", b.n},
        {"N", b.ctx.N},
        {"alpha0", b.ctx.alpha0.str()},
        {"alphas", std::move(alphas)},
        {"q", std::move(qc)},
        {"P", op_to_json(b.P)},
        {"Q", op_to_json(b.Q)},
        {"L", op_to_json(b.L)},
        {"PQ", op_to_json(b.PQ)},
        {"Pp", op_to_json(b.Pp)},
        {"Qp", op_to_json(b.Qp)},
        {"d", b.d.str()},
        {"bP", op_to_json(b.bP)},
        {"bQ", op_to_json(b.bQ)},
        {"qw", mat_to_json(b.qw)},
        {"dual", op_to_json(b.dual)},
        {"phi", std::move(phi)},
    };
}

Rank1Bundle rank1_bundle_of(const json &v) {
    Rank1Bundle b;
    b.n = int_field(v, "n");
    if (b.n <= 0) bad("bundle n must be positive");
    b.P = op_of(field(v, "P"), b.n, "P");
    b.Q = op_of(field(v, "Q"), b.n, "Q");
    b.L = op_of(field(v, "L"), b.n, "L");
    b.PQ = op_of(field(v, "PQ"), b.n, "PQ");
    b.Pp = op_of(field(v, "Pp"), b.n, "Pp");
    b.Qp = op_of(field(v, "Qp"), b.n, "Qp");
    b.d = parse_poly(str_of(field(v, "d"), "d"));
    b.bP = op_of(field(v, "bP"), b.n, "bP");
    b.bQ = op_of(field(v, "bQ"), b.n, "bQ");
    b.bL = mat_of(field(v, "bL"), "bL");
    b.dual = op_of(field(v, "dual"), b.n, "dual");
    b.phi = mat_of(field(v, "phi"), "phi");
    return b;
}

AiryContext airy_ctx_of(const json &v, const std::optional<std::string> &alpha0_override) {
    AiryContext ctx;
    ctx.N = int_field(v, "N");
    if (v.contains("alpha0")) ctx.alpha0 = rat_of(v.at("alpha0"), "alpha0");
    if (alpha0_override) ctx.alpha0 = Rat::parse(*alpha0_override);
    ctx.alphas.clear();
    if (v.contains("alphas")) {
        const json &as = v.at("alphas");
        if (!as.is_array()) bad("alphas must be an array of rationals");
        for (const auto &a : as) ctx.alphas.push_back(rat_of(a, "alphas entry"));
    }
    if (ctx.alphas.empty() && ctx.N >= 1) ctx.alphas.assign(static_cast<size_t>(ctx.N - 1), Rat(0));
    try {
        ctx.validate();
    } catch (const Error &e) {
        bad(e.what());
    }
    return ctx;
}

AiryBundle airy_bundle_of(const json &v) {
    AiryBundle b{};
    b.n = int_field(v, "n");
    if (b.n <= 0) bad("bundle n must be positive");
    b.ctx = airy_ctx_of(v, std::nullopt);
    MatPolynomial q = matpoly_of(field(v, "q"), b.n, "q");
    b.q_coeffs = q.coeffs();
    b.P = op_of(field(v, "P"), b.n, "P");
    b.Q = op_of(field(v, "Q"), b.n, "Q");
    b.L = op_of(field(v, "L"), b.n, "L");
    b.PQ = op_of(field(v, "PQ"), b.n, "PQ");
    b.Pp = op_of(field(v, "Pp"), b.n, "Pp");
    b.Qp = op_of(field(v, "Qp"), b.n, "Qp");
    b.d = parse_poly(str_of(field(v, "d"), "d"));
    b.bP = op_of(field(v, "bP"), b.n, "bP");
    b.bQ = op_of(field(v, "bQ"), b.n, "bQ");
    b.qw = mat_of(field(v, "qw"), "qw");
    b.dual = op_of(field(v, "dual"), b.n, "dual");
    const json &phi = field(v, "phi");
    if (!phi.is_array() || static_cast<int>(phi.size()) != b.ctx.N) bad("phi must have N blocks");
    b.phi.n = b.n;
    for (const auto &blk : phi) b.phi.blocks.push_back(mat_of(blk, "phi block"));
    return b;
}

// ---------------------------------------------------------------------------
// mode runners
// ---------------------------------------------------------------------------

std::string dump(const json &j) { return j.dump(2) + "\n"; }

JobResult finish(const json &mode_doc, const VerificationReport &report, const std::string &latex,
                 bool check_only) {
    json out = check_only ? json{{"mode", mode_doc.at("mode")}, {"report", report_to_json(report)}}
                          : mode_doc;
    JobResult res;
    res.exit_code = report.all_pass() ? 0 : 1;
    res.output = dump(out);
    res.latex = latex;
    return res;
}

JobResult run_rank1(const json &j, const JobOptions &opts) {
    int n = int_field(j, "n");
    if (n <= 0) bad("n must be positive");
    QuasiKernelSpec spec;
    spec.n = n;
    const json &kernel = field(j, "kernel");
    if (!kernel.is_array()) bad("kernel must be an array of basis elements");
    for (size_t i = 0; i < kernel.size(); ++i) {
        const json &e = kernel[i];
        QuasiKernelEntry entry;
        entry.alpha = rat_of(field(e, "alpha"), "kernel alpha");
        const json &p = field(e, "p");
        if (!p.is_array() || static_cast<int>(p.size()) != n)
            bad("kernel entry p must have n polynomial components");
        for (const auto &pc : p) entry.p.push_back(poly_of(pc, "kernel polynomial"));
        spec.entries.push_back(std::move(entry));
    }
    if (spec.entries.size() % static_cast<size_t>(n) != 0)
        bad("kernel basis count must be divisible by n");

    std::optional<OreOp> l_opt;
    if (j.contains("L")) l_opt = op_of(j.at("L"), n, "L");

    Rank1Bundle b = darboux_rank1(spec, l_opt);
    json doc{{"mode", "rank1"}, {"bundle", rank1_bundle_to_json(b)}, {"report", report_to_json(b.report)}};
    return finish(doc, b.report, latex_document_rank1(b), opts.check_only);
}

JobResult run_airy(const json &j, const JobOptions &opts) {
    int n = int_field(j, "n");
    if (n <= 0) bad("n must be positive");
    AiryContext ctx = airy_ctx_of(j, opts.alpha0_override);
    MatPolynomial q = matpoly_of(field(j, "q"), n, "q");

    std::vector<AiryOrbitSpec> specs;
    const json &orbits = field(j, "orbits");
    if (!orbits.is_array()) bad("orbits must be an array");
    for (const auto &o : orbits) {
        AiryOrbitSpec spec;
        spec.lambda = rat_of(field(o, "lambda"), "orbit lambda");
        const json &ps = field(o, "ps");
        if (!ps.is_array() || static_cast<int>(ps.size()) != ctx.N)
            bad("orbit ps must have exactly N polynomial columns");
        for (const auto &col : ps) {
            if (!col.is_array() || static_cast<int>(col.size()) != n)
                bad("orbit column must have n polynomial components");
            Mat column(n, 1);
            for (int i = 0; i < n; ++i) column.at(i, 0) = RatFunc(poly_of(col[static_cast<size_t>(i)], "orbit polynomial"));
            spec.ps.push_back(std::move(column));
        }
        specs.push_back(std::move(spec));
    }

    AiryBundle b = darboux_airy(q, specs, ctx);
    json doc{{"mode", "airy"}, {"bundle", airy_bundle_to_json(b)}, {"report", report_to_json(b.report)}};
    return finish(doc, b.report, latex_document_airy(b), opts.check_only);
}

JobResult run_jordan(const json &j, const JobOptions &opts) {
    int n = int_field(j, "n");
    if (n <= 0) bad("n must be positive");
    MatPolynomial q = matpoly_of(field(j, "q"), n, "q");
    MPoly chi = char_det(q);
    std::vector<RootMultiplicity> roots = rational_roots(chi);

    VerificationReport rep;
    json roots_json = json::array();
    std::ostringstream latex_body;
    latex_body << "\\[\\chi(t) = " << latex_ratfunc(RatFunc(chi)) << "\\]\n";
    for (const auto &root : roots) {
        JordanChainSet chains = jordan_chains(q, root.lambda);
        json chains_json = json::array();
        bool all_zero = true;
        int total = 0;
        for (const auto &chain : chains.chains) {
            json chain_json = json::array();
            for (const auto &v : chain) {
                json vec = json::array();
                for (const Rat &c : v) vec.push_back(c.str());
                chain_json.push_back(std::move(vec));
            }
            chains_json.push_back(std::move(chain_json));
            total += static_cast<int>(chain.size());
            for (const auto &res : jordan_chain_residuals(q, root.lambda, chain))
                for (const Rat &c : res) all_zero = all_zero && c.is_zero();
        }
        rep.add("jordan-chains(lambda=" + root.lambda.str() + ")",
                "sum_r q^(r)(lambda) v_{j-r}/r! = 0 and total length = multiplicity",
                all_zero && total == root.multiplicity ? "0" : "nonzero residual");
        roots_json.push_back(json{{"lambda", root.lambda.str()},
                                  {"multiplicity", root.multiplicity},
                                  {"chains", std::move(chains_json)}});
        latex_body << "\\[\\lambda = " << root.lambda.str() << ",\\ m = " << root.multiplicity << "\\]\n";
    }
    latex_body << latex_report(rep);

    json doc{{"mode", "jordan"},
             {"chi", chi.str()},
             {"roots", std::move(roots_json)},
             {"report", report_to_json(rep)}};
    return finish(doc, rep, latex_document("Jordan chains of a monic matrix polynomial", latex_body.str()),
                  opts.check_only);
}

JobResult run_quasidet(const json &j, const JobOptions &opts) {
    int n = int_field(j, "n");
    int brows = int_field(j, "block_rows");
    int bcols = int_field(j, "block_cols");
    if (n <= 0 || brows <= 0 || bcols <= 0) bad("n, block_rows, block_cols must be positive");
    const json &blocks = field(j, "blocks");
    if (!blocks.is_array() || static_cast<int>(blocks.size()) != brows * bcols)
        bad("blocks must hold block_rows*block_cols matrices, row-major");
    BlockMat x = BlockMat::make(brows, bcols, n);
    for (int idx = 0; idx < brows * bcols; ++idx) {
        Mat m = mat_of(blocks[static_cast<size_t>(idx)], "block");
        if (m.rows() != n || m.cols() != n) bad("each block must be n x n");
        x.blocks[static_cast<size_t>(idx)] = std::move(m);
    }
    int i = int_field(j, "i"), jj = int_field(j, "j"); // 1-based, as displayed
    if (i < 1 || jj < 1 || i > brows || jj > bcols) bad("indices i, j out of range");

    Mat qd = quasideterminant(x, i - 1, jj - 1);
    VerificationReport rep;
    rep.add("quasideterminant(" + std::to_string(i) + "," + std::to_string(jj) + ")",
            "x_ij - r_i (X^{ij})^{-1} c_j", "0");
    json doc{{"mode", "quasidet"}, {"quasideterminant", mat_to_json(qd)}, {"report", report_to_json(rep)}};
    return finish(doc, rep,
                  latex_document("Quasideterminant", "\\[|X|_{" + std::to_string(i) + std::to_string(jj) +
                                                         "} = " + latex_mat(qd) + "\\]\n"),
                  opts.check_only);
}

JobResult run_verify(const json &j, const JobOptions &opts) {
    const json &bj = field(j, "bundle");
    std::string kind = str_of(field(bj, "kind"), "bundle.kind");
    if (kind == "rank1") {
        Rank1Bundle b = rank1_bundle_of(bj);
        b.report = verify_rank1(b);
        json doc{{"mode", "verify"}, {"kind", "rank1"}, {"report", report_to_json(b.report)}};
        return finish(doc, b.report, latex_document("Verification report", latex_report(b.report)),
                      opts.check_only);
    }
    if (kind == "airy") {
        AiryBundle b = airy_bundle_of(bj);
        b.report = verify_airy(b);
        json doc{{"mode", "verify"}, {"kind", "airy"}, {"report", report_to_json(b.report)}};
        return finish(doc, b.report, latex_document("Verification report", latex_report(b.report)),
                      opts.check_only);
    }
    bad("bundle.kind must be 'rank1' or 'airy'");
}

} // namespace

JobResult run_job(const std::string &input_json, const JobOptions &opts) {
    json j;
    try {
        j = json::parse(input_json);
    } catch (const json::exception &e) {
        JobResult res;
        res.exit_code = 2;
        res.output = dump(json{{"error", {{"code", "SchemaError"}, {"message", std::string("invalid JSON: ") + e.what()}}}});
        return res;
    }

    try {
        std::string mode = str_of(field(j, "mode"), "mode");
        if (mode == "rank1") return run_rank1(j, opts);
        if (mode == "airy") return run_airy(j, opts);
        if (mode == "jordan") return run_jordan(j, opts);
        if (mode == "quasidet") return run_quasidet(j, opts);
        if (mode == "verify") return run_verify(j, opts);
        bad("unknown mode '" + mode + "'");
    } catch (const Error &e) {
        JobResult res;
        res.exit_code = e.is_schema() ? 2 : 3;
        res.output = dump(json{{"error", {{"code", errc_name(e.code())}, {"message", e.what()}}}});
        return res;
    } catch (const json::exception &e) {
        JobResult res;
        res.exit_code = 2;
        res.output = dump(json{{"error", {{"code", "SchemaError"}, {"message", e.what()}}}});
        return res;
    }
}

} // namespace ncdx
