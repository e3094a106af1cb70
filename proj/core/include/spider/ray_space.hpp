#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "spider/rng.hpp"

namespace spider {

// Finite set of rays glued at the origin, with the selection law mu.
// Every weight must be strictly positive and the weights must sum to one.
struct RaySpace {
    std::vector<std::string> names;
    std::vector<double> mu;

    RaySpace() = default;
    RaySpace(std::vector<std::string> ray_names, std::vector<double> weights)
        : names(std::move(ray_names)), mu(std::move(weights)) {
        validate();
    }

    // Unnamed rays "r0", "r1", ...
    explicit RaySpace(std::vector<double> weights) : mu(std::move(weights)) {
        names.reserve(mu.size());
        for (std::size_t i = 0; i < mu.size(); ++i) names.push_back("r" + std::to_string(i));
        validate();
    }

    int size() const { return static_cast<int>(mu.size()); }

    void validate() const {
        if (mu.empty()) throw std::invalid_argument("rays: at least one ray required");
        if (names.size() != mu.size())
            throw std::invalid_argument("rays: names and mu must have equal length");
        double total = 0.0;
        for (double w : mu) {
            if (!(w > 0.0) || !std::isfinite(w))
                throw std::invalid_argument("mu: all weights must be strictly positive");
            total += w;
        }
        if (std::fabs(total - 1.0) > 1e-12)
            throw std::invalid_argument("mu: weights must sum to 1");
    }

    int sample(RngStream& rng) const { return rng.discrete(mu); }
};

// A point of the glued half-line space: nonnegative radius plus a ray label.
// All rays are identified at radius zero.
struct SpiderPoint {
    double radius = 0.0;
    int ray = 0;
};

// Tree metric: |x-y| on the same ray, x+y across rays.
inline double spider_distance(const SpiderPoint& a, const SpiderPoint& b) {
    if (a.radius < 0.0 || b.radius < 0.0)
        throw std::invalid_argument("spider_distance: negative radius");
    if (a.radius == 0.0 && b.radius == 0.0) return 0.0;
    if (a.ray == b.ray || a.radius == 0.0 || b.radius == 0.0)
        return std::fabs(a.radius - b.radius);
    return a.radius + b.radius;
}

}  // namespace spider
