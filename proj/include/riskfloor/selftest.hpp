#pragma once

#include <string>
#include <vector>

namespace riskfloor {

struct SelftestCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct SelftestOptions {
    // Fault injection for the failure path: added to every special-function
    // value before it is compared with its reference.
    double specfun_perturbation = 0.0;
};

/// Brute-force oracle suite: k-means enumeration, truncated k-means grid,
/// root-solver forward residuals, special-function reference values,
/// small-instance linear ERM grid. Deterministic; no timing in the output.
std::vector<SelftestCheck> run_selftest(const SelftestOptions& opt = {});

}  // namespace riskfloor
