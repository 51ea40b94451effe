#pragma once

#include <string>
#include <vector>

namespace ncdx {

/// One machine-checked identity: pass holds exactly when the residual is
/// identically zero.
struct VerificationCheck {
    std::string name;
    std::string identity; // the identity that was evaluated, rendered
    std::string residual; // exact residual, "0" on success
    bool pass = false;
};

struct VerificationReport {
    std::vector<VerificationCheck> checks;

    void add(const std::string &name, const std::string &identity, const std::string &residual) {
        checks.push_back({name, identity, residual, residual == "0"});
    }

    bool all_pass() const {
        for (const auto &c : checks)
            if (!c.pass) return false;
        return true;
    }
};

} // namespace ncdx
