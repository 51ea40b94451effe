#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "ncdx/jobs.hpp"

namespace {

int run(const std::string &mode, const std::string &input_path, const std::string &output_path,
        const std::string &latex_path, const std::string &alpha0, bool check_only) {
    std::ifstream in(input_path);
    if (!in) {
        std::cerr << "error: cannot open input file '" << input_path << "'\n";
        return 2;
    }
    std::stringstream buf;
    buf << in.rdbuf();

    // The subcommand pins the mode; a conflicting mode field in the document
    // is an input error.
    std::string text = buf.str();
    try {
        auto doc = nlohmann::json::parse(text);
        if (doc.is_object()) {
            if (doc.contains("mode") && doc.at("mode") != mode) {
                std::cerr << "error: input document has mode '" << doc.at("mode").get<std::string>()
                          << "' but the subcommand is '" << mode << "'\n";
                return 2;
            }
            doc["mode"] = mode;
            text = doc.dump();
        }
    } catch (const nlohmann::json::exception &) {
        // leave it to run_job to report the parse failure
    }

    ncdx::JobOptions opts;
    opts.check_only = check_only;
    if (!alpha0.empty()) opts.alpha0_override = alpha0;

    ncdx::JobResult res = ncdx::run_job(text, opts);

    if (!output_path.empty()) {
        std::ofstream out(output_path);
        if (!out) {
            std::cerr << "error: cannot open output file '" << output_path << "'\n";
            return 2;
        }
        out << res.output;
    } else {
        std::cout << res.output;
    }

    if (!latex_path.empty() && !res.latex.empty()) {
        std::ofstream lx(latex_path);
        if (!lx) {
            std::cerr << "error: cannot open latex file '" << latex_path << "'\n";
            return 2;
        }
        lx << res.latex;
    }
    return res.exit_code;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"ncdx - exact noncommutative bispectral Darboux transformations"};
    app.require_subcommand(1);

    std::string input, output, latex, alpha0;
    bool check_only = false;

    const std::vector<std::string> modes = {"rank1", "airy", "jordan", "quasidet", "verify"};
    const std::vector<std::string> descriptions = {
        "build and verify a rank-one transformation from a quasipolynomial kernel",
        "build and verify an Airy transformation from q(t) and kernel orbits",
        "Jordan chains of a monic matrix polynomial at its rational eigenvalues",
        "quasideterminant of a block matrix",
        "re-run the exact verification of a previously emitted bundle",
    };

    for (size_t i = 0; i < modes.size(); ++i) {
        CLI::App *sub = app.add_subcommand(modes[i], descriptions[i]);
        sub->add_option("--input", input, "job document (JSON)")->required();
        sub->add_option("--output", output, "write the result document here instead of stdout");
        sub->add_option("--latex", latex, "write a LaTeX rendering of the result");
        if (modes[i] == "airy") sub->add_option("--alpha0", alpha0, "override the Airy alpha0 parameter");
        sub->add_flag("--check-only", check_only, "emit only the verification report");
    }

    CLI11_PARSE(app, argc, argv);
    std::string mode = app.get_subcommands().front()->get_name();
    return run(mode, input, output, latex, alpha0, check_only);
}
