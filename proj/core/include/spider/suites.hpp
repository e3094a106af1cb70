#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spider/stats.hpp"

// Named verification suites run by the `verify` subcommand and the acceptance
// harness. Each suite returns one report per check; negative-control rows are
// expected to fail. All sample sizes and tolerances are pinned here.

namespace spider {

struct SuiteOptions {
    std::uint64_t seed = 42;
    unsigned threads = 4;
};

std::vector<TestReport> suite_joint_law(const SuiteOptions& opt);
std::vector<TestReport> suite_formulas(const SuiteOptions& opt);
std::vector<TestReport> suite_envelope(const SuiteOptions& opt);
std::vector<TestReport> suite_martingale(const SuiteOptions& opt);
std::vector<TestReport> suite_convergence(const SuiteOptions& opt);
std::vector<TestReport> suite_limit_laws(const SuiteOptions& opt);
std::vector<TestReport> suite_harmonicity(const SuiteOptions& opt);
std::vector<TestReport> suite_calibration(const SuiteOptions& opt);

std::vector<std::string> suite_names();
std::vector<TestReport> run_suite(const std::string& name, const SuiteOptions& opt);

// True when every regular row passes and every negative control fails.
bool suite_green(const std::vector<TestReport>& reports);

}  // namespace spider
