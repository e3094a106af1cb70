#pragma once

#include <cstddef>
#include <vector>

#include "spider/ray_space.hpp"
#include "spider/rng.hpp"
#include "spider/spider_path.hpp"

// Exact-at-grid simulation of the spider process. The radial part together
// with its origin local time is sampled with the correct joint law at every
// grid time; excursion boundaries inside a step are detected by exact
// bridge-extremum sampling, so no zero crossing is ever missed.

namespace spider {

// Maximum of a Brownian bridge from a to b over a step of length dt,
// sampled by inverse CDF from the uniform u.
inline double bridge_maximum(double a, double b, double dt, double u) {
    const double d = a - b;
    return 0.5 * (a + b + std::sqrt(d * d - 2.0 * dt * std::log(u)));
}

struct ReflectedStep {
    double value = 0.0;   // signed driving value at the end of the step
    double dl = 0.0;      // local-time increment accrued at the origin
    bool touched = false; // did the bridge visit zero inside the step
};

// One exact transition of (signed driving motion, origin local time) over dt.
// The conditional local-time law given the endpoints is sampled by inverse
// CDF; the zero-hit indicator is a by-product (dl > 0).
ReflectedStep signed_step_with_local_time(double a, double dt, double drift, RngStream& rng);

// Radial part of the spider from x0 >= 0 over [0, horizon] on a uniform grid.
// From the origin this is the running-maximum construction (X = S - Y,
// L = S with per-step exact bridge maxima); from x0 > 0 the signed driving
// motion is evolved with the exact per-step local-time kernel, which covers
// both the pre-hitting segment and everything after the first zero.
RadialPath simulate_radial_with_local_time(double x0, double horizon, std::size_t steps,
                                           RngStream& rng);

// Assigns one ray per grid-resolved excursion, i.i.d. with law mu. Grid
// points at radius zero take the label of the following excursion. start_ray
// labels the initial excursion when the path starts away from the origin.
std::vector<int> label_excursions(const RadialPath& radial, const RaySpace& rays,
                                  RngStream& rng, int start_ray = -1);

SpiderPath simulate_spider(const RaySpace& rays, SpiderPoint start, double horizon,
                           std::size_t steps, RngStream& rng);

namespace detail {
// Running-maximum radial construction from the origin for a driving Brownian
// motion with the given drift (drift 0: spider radial; drift g > 0: the
// process whose radial law is the absolute bang-bang process).
RadialPath levy_radial(double horizon, std::size_t steps, double drift, RngStream& rng);
}  // namespace detail

}  // namespace spider
