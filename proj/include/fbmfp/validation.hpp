#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fbmfp::validation {

enum class Suite { laplace, inversion, oracle, mc, all };

Suite parse_suite(const std::string& name);
std::string to_string(Suite s);

/// One measured quantity. `bound` is NaN for informational values.
struct Metric {
    std::string name;
    double value = 0.0;
    std::string relation;  ///< "<=", ">=", "<" or "info"
    double bound = 0.0;
    bool passed = true;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    double seconds = 0.0;
    double budget_seconds = 0.0;
    std::vector<Metric> metrics;
    std::vector<std::string> notes;
};

struct ValidationOptions {
    bool fast = false;  ///< fewer Monte Carlo paths and inversion points
    std::uint64_t seed = 20240601;
    unsigned threads = 0;
};

constexpr int kCriterionCount = 10;

std::vector<int> suite_criteria(Suite s);
std::string criterion_title(int id);

CriterionResult run_criterion(int id, const ValidationOptions& opts);
std::vector<CriterionResult> run_suite(Suite s, const ValidationOptions& opts);

}  // namespace fbmfp::validation
