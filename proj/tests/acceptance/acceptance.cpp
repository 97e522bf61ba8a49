// Runs the acceptance criteria and prints one PASS/FAIL line per criterion,
// followed by the measured values. Exit status is the number of failures.
//
// usage: acceptance [--fast] [criterion ids...]

#include "fbmfp/validation.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

using namespace fbmfp::validation;

namespace {

void print_details(const CriterionResult& r) {
    for (const auto& m : r.metrics) {
        if (m.relation == "info")
            std::printf("    %-60s %.6g\n", m.name.c_str(), m.value);
        else
            std::printf("    %-60s %.6g %s %.3g  %s\n", m.name.c_str(), m.value, m.relation.c_str(), m.bound,
                        m.passed ? "ok" : "FAILED");
    }
    for (const auto& n : r.notes) std::printf("    note: %s\n", n.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    std::setvbuf(stdout, nullptr, _IONBF, 0);
    ValidationOptions opts;
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--fast") opts.fast = true;
        else ids.push_back(std::atoi(argv[i]));
    }
    if (ids.empty()) ids = suite_criteria(Suite::all);

    std::vector<CriterionResult> results;
    for (int id : ids) {
        results.push_back(run_criterion(id, opts));
        const auto& r = results.back();
        std::printf("%s criterion %d: %s (%.1f s)\n", r.passed ? "PASS" : "FAIL", r.id, r.title.c_str(), r.seconds);
        print_details(r);
    }
    int failed = 0;
    std::printf("\nsummary\n");
    for (const auto& r : results) {
        std::printf("%s criterion %d: %s\n", r.passed ? "PASS" : "FAIL", r.id, r.title.c_str());
        failed += r.passed ? 0 : 1;
    }
    std::printf("%zu criteria, %d failed\n", results.size(), failed);
    return failed;
}
