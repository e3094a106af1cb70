#include "spider/spider_sim.hpp"

#include <cmath>
#include <stdexcept>

namespace spider {

namespace {

double sq(double v) { return v * v; }

void check_radial_args(double x0, double horizon, std::size_t steps) {
    if (!std::isfinite(x0) || x0 < 0.0)
        throw std::invalid_argument("x0: must be finite and nonnegative");
    if (!std::isfinite(horizon) || horizon < 0.0)
        throw std::invalid_argument("horizon: must be finite and nonnegative");
    if (horizon > 0.0 && steps == 0) throw std::invalid_argument("steps: must be positive");
}

}  // namespace

ReflectedStep signed_step_with_local_time(double a, double dt, double drift, RngStream& rng) {
    ReflectedStep out;
    out.value = a + drift * dt + std::sqrt(dt) * rng.gauss();
    const double b = out.value;
    const double far = std::fabs(a) + std::fabs(b);
    // P(local time > l | endpoints) = exp(-((|a|+|b|+l)^2 - (a-b)^2) / (2 dt));
    // the atom at zero has mass 1 - exp(-gap / (2 dt)) with gap as below.
    const double gap = sq(far) - sq(a - b);
    const double v = rng.uniform();
    if (v < std::exp(-gap / (2.0 * dt))) {
        out.touched = true;
        out.dl = std::sqrt(sq(a - b) - 2.0 * dt * std::log(v)) - far;
        if (out.dl < 0.0) out.dl = 0.0;
    }
    return out;
}

namespace detail {

RadialPath levy_radial(double horizon, std::size_t steps, double drift, RngStream& rng) {
    RadialPath path;
    const std::size_t n = horizon > 0.0 ? steps : 0;
    path.t.resize(n + 1);
    path.x.resize(n + 1);
    path.local_time.resize(n + 1);
    path.touched.resize(n + 1);
    path.t[0] = 0.0;
    path.x[0] = 0.0;
    path.local_time[0] = 0.0;
    path.touched[0] = 1;
    if (n == 0) return path;
    const double dt = horizon / static_cast<double>(n);
    double y = 0.0;
    double smax = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const double yn = y + drift * dt + std::sqrt(dt) * rng.gauss();
        const double m = bridge_maximum(y, yn, dt, rng.uniform());
        path.touched[i] = m >= smax ? 1 : 0;
        if (m > smax) smax = m;
        path.t[i] = dt * static_cast<double>(i);
        path.x[i] = smax - yn;
        path.local_time[i] = smax;
        y = yn;
    }
    path.t[n] = horizon;
    return path;
}

}  // namespace detail

RadialPath simulate_radial_with_local_time(double x0, double horizon, std::size_t steps,
                                           RngStream& rng) {
    check_radial_args(x0, horizon, steps);
    if (x0 == 0.0) return detail::levy_radial(horizon, steps, 0.0, rng);

    RadialPath path;
    const std::size_t n = horizon > 0.0 ? steps : 0;
    path.t.resize(n + 1);
    path.x.resize(n + 1);
    path.local_time.resize(n + 1);
    path.touched.resize(n + 1);
    path.t[0] = 0.0;
    path.x[0] = x0;
    path.local_time[0] = 0.0;
    path.touched[0] = 0;
    if (n == 0) return path;
    const double dt = horizon / static_cast<double>(n);
    double b = x0;
    double l = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const ReflectedStep step = signed_step_with_local_time(b, dt, 0.0, rng);
        b = step.value;
        l += step.dl;
        path.t[i] = dt * static_cast<double>(i);
        path.x[i] = std::fabs(b);
        path.local_time[i] = l;
        path.touched[i] = step.touched ? 1 : 0;
    }
    path.t[n] = horizon;
    return path;
}

std::vector<int> label_excursions(const RadialPath& radial, const RaySpace& rays,
                                  RngStream& rng, int start_ray) {
    const std::size_t n = radial.size();
    if (n == 0) return {};
    if (radial.x[0] > 0.0 && (start_ray < 0 || start_ray >= rays.size()))
        throw std::invalid_argument("start_ray: required for paths started away from the origin");

    std::vector<int> labels(n);
    int current = radial.x[0] > 0.0 ? start_ray : -1;
    for (std::size_t i = 1; i < n; ++i) {
        if (radial.touched[i]) current = rays.sample(rng);
        labels[i] = current;
    }
    if (n == 1) {
        labels[0] = radial.x[0] > 0.0 ? start_ray : rays.sample(rng);
        return labels;
    }
    // A start at the origin, and any interior zero, take the following
    // excursion's label.
    labels[0] = radial.x[0] > 0.0 ? start_ray : labels[1];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (radial.x[i] == 0.0) labels[i] = labels[i + 1];
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] < 0) labels[i] = labels[i > 0 ? i - 1 : 0];
    }
    return labels;
}

SpiderPath simulate_spider(const RaySpace& rays, SpiderPoint start, double horizon,
                           std::size_t steps, RngStream& rng) {
    if (start.radius > 0.0 && (start.ray < 0 || start.ray >= rays.size()))
        throw std::invalid_argument("start.ray: unknown ray");
    RadialPath radial = simulate_radial_with_local_time(start.radius, horizon, steps, rng);
    std::vector<int> labels =
        label_excursions(radial, rays, rng, start.radius > 0.0 ? start.ray : -1);
    SpiderPath path;
    path.t = std::move(radial.t);
    path.x = std::move(radial.x);
    path.local_time = std::move(radial.local_time);
    path.touched = std::move(radial.touched);
    path.ray = std::move(labels);
    return path;
}

}  // namespace spider
