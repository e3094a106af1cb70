#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

// Statistical acceptance harness: Kolmogorov-Smirnov (one-sample, two-sample,
// weighted), chi-square on ray counts, and a permutation independence test.
// Every report carries the seed that produced it so a run can be replayed
// bit-exactly.

namespace spider {

struct TestReport {
    std::string name;
    double statistic = 0.0;  // compared against threshold: pass <=> statistic <= threshold
    double threshold = 0.0;
    double p_value = 0.0;
    bool pass = false;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    bool negative_control = false;
};

// Survival function of the Kolmogorov distribution and its inverse.
double kolmogorov_sf(double lambda);
double kolmogorov_critical(double level, double effective_n);

using Cdf = std::function<double(double)>;

TestReport ks_one_sample(std::vector<double> samples, const Cdf& cdf, double level,
                         const std::string& name, std::uint64_t seed);

TestReport ks_two_sample(std::vector<double> a, std::vector<double> b, double level,
                         const std::string& name, std::uint64_t seed);

// Weighted one-sample KS; the p-value uses the effective sample size
// (sum w)^2 / sum w^2 of the weights.
TestReport ks_one_sample_weighted(std::vector<double> samples, std::vector<double> weights,
                                  const Cdf& cdf, double level, const std::string& name,
                                  std::uint64_t seed);

TestReport chi_square_rays(const std::vector<std::int64_t>& counts,
                           const std::vector<double>& expected_law, double level,
                           const std::string& name, std::uint64_t seed);

// Two-sample chi-square on categorical counts (contingency-table test).
TestReport chi_square_two_sample(const std::vector<std::int64_t>& a,
                                 const std::vector<std::int64_t>& b, double level,
                                 const std::string& name, std::uint64_t seed);

// Permutation test on the absolute Spearman rank correlation; p-value from
// n_permutations shuffles with per-permutation substreams of the seed.
TestReport independence_check(const std::vector<double>& a, const std::vector<double>& b,
                              double level, const std::string& name, std::uint64_t seed,
                              std::size_t n_permutations = 999);

inline TestReport as_negative_control(TestReport r) {
    r.negative_control = true;
    return r;
}

}  // namespace spider
