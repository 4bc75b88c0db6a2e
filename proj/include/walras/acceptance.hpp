#pragma once

#include "walras/config.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace walras {

struct AcceptanceConfig {
    std::filesystem::path corpus_dir;
    std::uint64_t seed = 20261019;
    int trials = 500;
    std::vector<double> magnitudes{1e-3, 1e-4};
    Tolerances tol;
    // aggregate Walras law, index sums, serial/parallel agreement, ...
    bool supplementary = true;
};

struct CheckResult {
    std::string id;     // "A1".."A8" for acceptance criteria, "S*" for supplementary checks
    std::string title;
    bool pass = false;
    double seconds = 0.0;
    double time_limit = 0.0;  // seconds; 0 means unlimited
    std::string detail;
};

/// Runs the acceptance criteria (and supplementary property checks) on the
/// corpus in config.corpus_dir. `on_result` is called as each check ends.
std::vector<CheckResult> run_acceptance(const AcceptanceConfig& config,
                                        const std::function<void(const CheckResult&)>& on_result = {});

std::string format_check_line(const CheckResult& r);

}  // namespace walras
