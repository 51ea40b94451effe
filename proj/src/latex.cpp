#include "ncdx/latex.hpp"

#include <sstream>

namespace ncdx {

namespace {

std::string latex_poly(const MPoly &p) {
    if (p.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto &t : p.terms()) {
        Rat c = t.second;
        if (first) {
            if (c.sign() < 0) { os << "-"; c = -c; }
        } else {
            os << (c.sign() < 0 ? " - " : " + ");
            if (c.sign() < 0) c = -c;
        }
        first = false;
        std::string vars;
        for (int i = 0; i < kNumVars; ++i) {
            Var v = static_cast<Var>(i);
            unsigned e = t.first.exp(v);
            if (e == 0) continue;
            vars += var_name(v);
            if (e > 1) vars += "^{" + std::to_string(e) + "}";
        }
        std::string coeff = c.is_integer() ? c.num().get_str()
                                           : "\\tfrac{" + c.num().get_str() + "}{" + c.den().get_str() + "}";
        if (vars.empty())
            os << coeff;
        else if (c.is_one())
            os << vars;
        else
            os << coeff << " " << vars;
    }
    return os.str();
}

} // namespace

std::string latex_ratfunc(const RatFunc &f) {
    if (f.is_polynomial()) return latex_poly(f.num());
    return "\\frac{" + latex_poly(f.num()) + "}{" + latex_poly(f.den()) + "}";
}

std::string latex_mat(const Mat &m) {
    std::ostringstream os;
    os << "\\begin{pmatrix}";
    for (int r = 0; r < m.rows(); ++r) {
        if (r) os << " \\\\ ";
        for (int c = 0; c < m.cols(); ++c) {
            if (c) os << " & ";
            os << latex_ratfunc(m.at(r, c));
        }
    }
    os << "\\end{pmatrix}";
    return os.str();
}

std::string latex_op(const OreOp &p) {
    if (p.is_zero()) return "0";
    std::string dsym = std::string("\\partial_") + var_name(p.var());
    std::ostringstream os;
    bool first = true;
    for (int k = p.order(); k >= 0; --k) {
        const Mat &c = p.coeff(k);
        if (c.is_zero()) continue;
        if (!first) os << " + ";
        first = false;
        if (c.is_identity() && k > 0) {
            // identity coefficient: just the derivative power with an I_n tag
            os << dsym;
            if (k > 1) os << "^{" << k << "}";
            os << " I_{" << p.n() << "}";
            continue;
        }
        os << latex_mat(c);
        if (k >= 1) {
            os << " " << dsym;
            if (k > 1) os << "^{" << k << "}";
        }
    }
    return os.str();
}

std::string latex_report(const VerificationReport &r) {
    std::ostringstream os;
    os << "\\begin{tabular}{lll}\n";
    os << "check & identity & status \\\\\n\\hline\n";
    for (const auto &c : r.checks)
        os << c.name << " & \\verb|" << c.identity << "| & " << (c.pass ? "pass" : "fail") << " \\\\\n";
    os << "\\end{tabular}\n";
    return os.str();
}

std::string latex_document(const std::string &title, const std::string &body) {
    std::ostringstream os;
    os << "\\documentclass{article}\n\\usepackage{amsmath}\n\\usepackage{amssymb}\n"
       << "\\setcounter{MaxMatrixCols}{30}\n"
       << "\\begin{document}\n\\section*{" << title << "}\n"
       << body << "\\end{document}\n";
    return os.str();
}

namespace {

void display(std::ostringstream &os, const std::string &label, const std::string &math) {
    os << "\\[" << label << " = " << math << "\\]\n";
}

} // namespace

std::string latex_document_rank1(const Rank1Bundle &b) {
    std::ostringstream os;
    display(os, "P(x, \\partial_x)", latex_op(b.P));
    display(os, "Q(x, \\partial_x)", latex_op(b.Q));
    display(os, "L(x, \\partial_x)", latex_op(b.L));
    display(os, "(PQ)(x, \\partial_x)", latex_op(b.PQ));
    display(os, "P'(x, \\partial_x)", latex_op(b.Pp));
    display(os, "Q'(x, \\partial_x)", latex_op(b.Qp));
    display(os, "g(x)", latex_ratfunc(RatFunc(b.d * b.d)) + "\\, I_{" + std::to_string(b.n) + "}");
    display(os, "b(P')(z, \\partial_z)", latex_op(b.bP));
    display(os, "b(Q')(z, \\partial_z)", latex_op(b.bQ));
    display(os, "b(L)(z)", latex_mat(b.bL));
    display(os, "\\Lambda(z, \\partial_z)", latex_op(b.dual));
    os << "\\[\\Phi(x,z) = e^{xz}" << latex_mat(b.phi) << "\\]\n";
    os << latex_report(b.report);
    return latex_document("Rank-one bispectral Darboux transformation", os.str());
}

std::string latex_document_airy(const AiryBundle &b) {
    std::ostringstream os;
    display(os, "P(x, \\partial_x)", latex_op(b.P));
    display(os, "Q(x, \\partial_x)", latex_op(b.Q));
    display(os, "q(M)(x, \\partial_x)", latex_op(b.L));
    display(os, "(PQ)(x, \\partial_x)", latex_op(b.PQ));
    display(os, "P'(x, \\partial_x)", latex_op(b.Pp));
    display(os, "Q'(x, \\partial_x)", latex_op(b.Qp));
    display(os, "g(x)", latex_ratfunc(RatFunc(b.d * b.d)) + "\\, I_{" + std::to_string(b.n) + "}");
    display(os, "b(P')(z, \\partial_z)", latex_op(b.bP));
    display(os, "b(Q')(z, \\partial_z)", latex_op(b.bQ));
    display(os, "q(w(z))", latex_mat(b.qw));
    display(os, "\\Lambda(z, \\partial_z)", latex_op(b.dual));
    for (size_t j = 0; j < b.phi.blocks.size(); ++j)
        os << "\\[\\Phi_{" << j << "}(x,z) = " << latex_mat(b.phi.blocks[j])
           << "\\quad\\text{(coefficient of } \\psi^{(" << j << ")}(x+z)\\text{)}\\]\n";
    os << latex_report(b.report);
    return latex_document("Airy bispectral Darboux transformation", os.str());
}

} // namespace ncdx
