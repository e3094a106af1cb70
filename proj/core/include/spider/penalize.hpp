#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spider/closed_forms.hpp"
#include "spider/spider_path.hpp"
#include "spider/stats.hpp"

// Monte Carlo engine for the penalized path measures: finite-horizon
// penalization by exp(alpha_{N_t} X_t + gamma L_t) (self-normalized ratio
// estimator), the limit measure via the limit-density weighting, and the
// convergence experiment connecting the two.

namespace spider {

struct WeightedSample {
    SpiderPath path;
    double weight = 1.0;
    bool flagged = false;
};

// Bounded functional of the path restricted to [0, horizon]. The engine
// truncates the path before calling eval, so the evaluator cannot peek
// beyond its horizon.
struct PathFunctional {
    std::string name;
    double horizon = 1.0;
    std::function<double(const SpiderPath&)> eval;
};

struct Estimate {
    double value = 0.0;
    double se = 0.0;
    double ess = 0.0;
    bool reliable = true;  // false when the effective sample size fell below 30
};

struct McOptions {
    std::size_t n_paths = 10000;
    std::size_t steps_per_unit = 64;  // grid resolution; horizons must land on the grid
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

// Self-normalized estimate of the penalized expectation at horizon t:
// sum w_i F_i / sum w_i with w_i = exp(alpha_{N_t} X_t + gamma L_t).
Estimate penalized_expectation(const PathFunctional& functional, double t,
                               const RaySpace& rays, const PenaltyParams& params,
                               const McOptions& opt);

// Unnormalized estimate under the limit measure: mean of M_s F over plain
// spider paths. E[M_s] = 1 is itself a test, so no self-normalization here.
Estimate limit_expectation(const PathFunctional& functional, const RaySpace& rays,
                           const PenaltyParams& params, const McOptions& opt);

struct ConvergenceRow {
    double t = 0.0;
    Estimate penalized;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    Estimate limit;
};

ConvergenceReport convergence_report(const PathFunctional& functional,
                                     const std::vector<double>& t_grid, const RaySpace& rays,
                                     const PenaltyParams& params, const McOptions& opt);

std::vector<double> default_t_grid(double s);

// Battery of bounded functionals of the path up to s used by the martingale
// check and the convergence suite.
std::vector<PathFunctional> functional_battery(double s, const RaySpace& rays);

// Estimates E[M_{s+h} G] - E[M_s G] for each battery member G and reports the
// z-score. With corrupt_time_factor the time normalizer of the density is
// dropped, which must break the check (harness sensitivity control).
std::vector<TestReport> martingale_check(const RaySpace& rays, const PenaltyParams& params,
                                         double s, double h, const McOptions& opt,
                                         bool corrupt_time_factor = false);

}  // namespace spider
