#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ambistop {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    double seconds = 0.0;
    double time_limit = 0.0;
    std::string summary;
};

constexpr int kCriterionCount = 10;

// Runs the selected criteria (all when empty). Detail lines are indented;
// each criterion ends with one "PASS" or "FAIL" line.
std::vector<CriterionResult> run_acceptance(std::ostream& os, const std::vector<int>& only = {});

}  // namespace ambistop
