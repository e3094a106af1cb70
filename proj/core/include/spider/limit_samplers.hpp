#pragma once

#include <cstddef>
#include <vector>

#include "spider/closed_forms.hpp"
#include "spider/penalize.hpp"
#include "spider/ray_space.hpp"
#include "spider/rng.hpp"
#include "spider/spider_path.hpp"

// Direct (or weighted) samplers for the four limit-process descriptions, plus
// the Bessel(3) and escape-ray building blocks.

namespace spider {

struct LimitLawSpec {
    Regime regime;
    RaySpace rays;
    PenaltyParams params;
    double horizon = 10.0;
    std::size_t steps = 640;

    static LimitLawSpec make(const RaySpace& rays, const PenaltyParams& params,
                             double horizon, std::size_t steps);
};

// Recurrent regime (gamma dominates all drifts, gamma > 0): the radial part is
// the absolute bang-bang process S - Y for a driving motion Y with drift
// gamma; excursions are labeled i.i.d. with law mu.
SpiderPath sample_bangbang(const LimitLawSpec& spec, RngStream& rng);

// Transient drift regime: |Brownian motion with drift alpha_max| with the
// final excursion labeled from mu restricted to the argmax set, carrying the
// importance weight ((abar - gamma)/abar) e^{gamma L_horizon}. flagged marks
// paths whose horizon cannot certify that the last zero has passed.
WeightedSample sample_maxdrift_weighted(const LimitLawSpec& spec, RngStream& rng);

struct EscapeSample {
    SpiderPath path;
    double budget = 0.0;      // the Exp(|gamma|) local-time budget drawn
    double tau = 0.0;         // time at which the local time reached the budget
    std::size_t tau_index = 0;  // first path index at or after tau
    int escape_ray = 0;
    bool flagged = false;  // budget not reached before the internal time cap
};

// gamma < 0 regimes: spider until its local time exhausts an independent
// Exp(|gamma|) budget, then a Bessel(3) escape on an independently drawn ray.
// If the budget is not reached within the requested horizon the waiting phase
// extends adaptively (coarser steps; exact transitions at any step size) up to
// an internal cap; the returned path always carries a horizon-long escape
// window after tau when the budget was reached.
EscapeSample sample_negative_gamma(const LimitLawSpec& spec, RngStream& rng);

// Law of the escape ray: concentrated on the zero-drift rays when any exist,
// otherwise the explicit all-negative-drift law.
std::vector<double> escape_ray_law(const RaySpace& rays, const PenaltyParams& params);
int sample_escape_ray(const RaySpace& rays, const PenaltyParams& params, RngStream& rng);

// Norm of a 3-dimensional Brownian motion from r over one step (exact).
double bessel3_step(double r, double dt, RngStream& rng);

// Bessel(3) radial series from the origin on a uniform grid; exact marginals.
std::vector<double> sample_bessel3(double horizon, std::size_t steps, RngStream& rng);

}  // namespace spider
