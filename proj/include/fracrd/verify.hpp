#pragma once

#include "fracrd/diagnostics.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fracrd {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    /// One line of measured values.
    std::string detail;
    double seconds = 0.0;
    double budget = 0.0;
    std::vector<CheckRow> rows;
};

/// Criteria 1..12 of the acceptance suite.
const std::vector<std::string>& criterion_names();
CriterionResult run_criterion(int id, std::uint64_t seed = 7);

/// "all", "quick" (the criteria under a few seconds) or a comma list of ids.
std::vector<int> suite_ids(const std::string& suite);

}  // namespace fracrd
