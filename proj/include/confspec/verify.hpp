#pragma once

#include <string>
#include <vector>

namespace confspec {

struct CriterionResult {
    std::string name;
    bool pass;
    std::string detail;
};

struct VerifyOptions {
    double cluster_tol = 1e-8;
};

// The full acceptance battery: analytic-oracle and property checks for every
// shipped instance. Each criterion carries its tolerance in code.
std::vector<CriterionResult> run_acceptance_battery(const VerifyOptions& options = {});

}  // namespace confspec
