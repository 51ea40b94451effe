#pragma once

#include <optional>
#include <string>

#include "ncdx/airy.hpp"
#include "ncdx/rank1.hpp"

namespace ncdx {

/// Exit-code contract shared by run_job and the CLI:
/// 0 all checks pass, 1 a verification check failed, 2 malformed input,
/// 3 violated mathematical precondition.
struct JobResult {
    int exit_code = 0;
    std::string output; // JSON result or diagnostic document
    std::string latex;  // LaTeX sidecar (empty when not applicable)
};

struct JobOptions {
    bool check_only = false;
    std::optional<std::string> alpha0_override; // airy mode only
};

/// Parses a job document {"mode": rank1|airy|jordan|quasidet|verify, ...},
/// runs the pipeline and renders the result document. Deterministic:
/// identical input bytes produce identical output bytes.
JobResult run_job(const std::string &input_json, const JobOptions &opts = {});

} // namespace ncdx
