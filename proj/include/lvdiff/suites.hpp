#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "lvdiff/config.hpp"

namespace lvdiff {

struct CheckResult {
    std::string name;
    bool pass = false;
    /// The property being checked, stated in words; shown on failure.
    std::string clause;
    nlohmann::json detail;
};

struct SuiteReport {
    std::string suite;
    std::string statement;
    bool pass = true;
    std::vector<CheckResult> checks;

    nlohmann::json to_json() const;
    /// One line per check: "PASS name" or "FAIL name: clause".
    std::string summary() const;
};

const std::vector<std::string>& suite_names();

/// Runs one verification suite. Counts come from params "samples" and "runs"
/// when present; rates "h", "r1", "r2" replace the built-in test functions.
/// Throws ConfigError for an unknown name.
SuiteReport run_suite(const std::string& name, const ExperimentConfig& cfg);

}  // namespace lvdiff
