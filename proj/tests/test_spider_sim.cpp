#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "spider/numerics.hpp"
#include "spider/parallel.hpp"
#include "spider/spider_sim.hpp"
#include "spider/stats.hpp"
#include "test_helpers.hpp"

using namespace spider;

namespace {

constexpr std::uint64_t kSeed = 20240817;

std::vector<RadialPath> draw_radials(double x0, double t, std::size_t steps, std::size_t n,
                                     std::uint64_t salt) {
    std::vector<RadialPath> out(n);
    parallel_for(n, 4, [&](std::size_t i) {
        RngStream rng = RngStream::substream(kSeed + salt, streams::kSimulate, i);
        out[i] = simulate_radial_with_local_time(x0, t, steps, rng);
    });
    return out;
}

}  // namespace

TEST_CASE("degenerate and invalid radial inputs") {
    RngStream rng(1);
    const RadialPath p = simulate_radial_with_local_time(0.0, 0.0, 16, rng);
    REQUIRE(p.size() == 1);
    CHECK(p.x[0] == 0.0);
    CHECK(p.local_time[0] == 0.0);
    CHECK_THROWS_AS(simulate_radial_with_local_time(-1.0, 1.0, 16, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(simulate_radial_with_local_time(0.0, 1.0, 0, rng),
                    std::invalid_argument);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(simulate_radial_with_local_time(inf, 1.0, 16, rng),
                    std::invalid_argument);
}

TEST_CASE("radial marginal is half-normal from the origin") {
    const std::size_t n = 10000;
    const auto paths = draw_radials(0.0, 1.0, 64, n, 0);
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = paths[i].x.back();
    const TestReport r = ks_one_sample(
        xs, [](double v) { return v <= 0.0 ? 0.0 : std::erf(v / std::sqrt(2.0)); }, 0.01,
        "half_normal", kSeed);
    CHECK(r.pass);
}

TEST_CASE("mean local time at unit horizon") {
    // identity: E L_1 = E S_1 = E|Y_1| = sqrt(2/pi); cross-checked against a
    // brute-force draw of |gauss|
    const std::size_t n = 100000;
    std::vector<double> ls(n);
    parallel_for(n, 4, [&](std::size_t i) {
        RngStream rng = RngStream::substream(kSeed + 1, streams::kSimulate, i);
        ls[i] = simulate_radial_with_local_time(0.0, 1.0, 32, rng).local_time.back();
    });
    const auto est = testutil::mean_se(ls);
    const double expected = std::sqrt(2.0 / num::kPi);  // 0.7978845608028654
    CHECK(std::fabs(est.mean - expected) < 3.0 * est.se);

    RngStream orng(777);
    std::vector<double> brute(n);
    for (double& v : brute) v = std::fabs(orng.gauss());
    const auto oracle = testutil::mean_se(brute);
    CHECK(std::fabs(est.mean - oracle.mean) <
          3.0 * std::sqrt(est.se * est.se + oracle.se * oracle.se));
}

TEST_CASE("running-maximum identity at grid times") {
    // simulator output against an independently coded (Y, S) pair
    const std::size_t n = 10000;
    const double t = 1.0;
    const std::size_t steps = 32;
    std::vector<double> sim_x(n), sim_l(n), ref_x(n), ref_l(n);
    parallel_for(n, 4, [&](std::size_t i) {
        RngStream rng = RngStream::substream(kSeed + 2, streams::kSimulate, i);
        const RadialPath p = simulate_radial_with_local_time(0.0, t, steps, rng);
        sim_x[i] = p.x.back();
        sim_l[i] = p.local_time.back();
        RngStream ref = RngStream::substream(kSeed + 3, streams::kOracle, i);
        const double dt = t / static_cast<double>(steps);
        double y = 0.0, smax = 0.0;
        for (std::size_t j = 0; j < steps; ++j) {
            const double yn = y + std::sqrt(dt) * ref.gauss();
            // max of the bridge over the step by inverse CDF
            const double u = ref.uniform();
            const double m =
                0.5 * (y + yn + std::sqrt((y - yn) * (y - yn) - 2.0 * dt * std::log(u)));
            smax = std::max(smax, m);
            y = yn;
        }
        ref_x[i] = smax - y;
        ref_l[i] = smax;
    });
    CHECK(ks_two_sample(sim_x, ref_x, 0.01, "identity_x", kSeed).pass);
    CHECK(ks_two_sample(sim_l, ref_l, 0.01, "identity_l", kSeed).pass);
}

TEST_CASE("local time accrues only on zero visits") {
    const auto paths = draw_radials(0.5, 1.0, 128, 200, 4);
    for (const RadialPath& p : paths) {
        for (std::size_t i = 1; i < p.size(); ++i) {
            CHECK(p.x[i] >= 0.0);
            const double dl = p.local_time[i] - p.local_time[i - 1];
            CHECK(dl >= 0.0);
            if (!p.touched[i]) CHECK(dl == 0.0);
        }
    }
}

TEST_CASE("theta is uniform and independent of the sum") {
    const std::size_t n = 10000;
    const auto paths = draw_radials(0.0, 1.0, 64, n, 5);
    std::vector<double> theta(n), z(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = paths[i].x.back(), l = paths[i].local_time.back();
        theta[i] = x / (l + x);
        z[i] = l + x;
    }
    CHECK(ks_one_sample(
              theta, [](double v) { return std::clamp(v, 0.0, 1.0); }, 0.01, "theta",
              kSeed)
              .pass);
    CHECK(independence_check(theta, z, 0.01, "theta_indep", kSeed).pass);
}

TEST_CASE("label excursions") {
    const RaySpace rays({0.5, 0.5});

    SUBCASE("single excursion keeps one label") {
        RadialPath p;
        p.t = {0.0, 0.5, 1.0};
        p.x = {0.5, 0.7, 0.9};
        p.local_time = {0.0, 0.0, 0.0};
        p.touched = {0, 0, 0};
        RngStream rng(3);
        const auto labels = label_excursions(p, rays, rng, 1);
        CHECK(labels == std::vector<int>{1, 1, 1});
        CHECK_THROWS_AS(label_excursions(p, rays, rng, -1), std::invalid_argument);
    }

    SUBCASE("fresh draw after a zero visit, origin takes the following label") {
        RadialPath p;
        p.t = {0.0, 0.5, 1.0, 1.5};
        p.x = {0.0, 0.7, 0.4, 0.2};
        p.local_time = {0.0, 0.2, 0.2, 0.5};
        p.touched = {1, 1, 0, 1};
        RngStream rng(4);
        const auto labels = label_excursions(p, rays, rng, -1);
        CHECK(labels[0] == labels[1]);
        CHECK(labels[1] == labels[2]);
        // labels[3] drawn independently; just check it is a valid ray
        CHECK(labels[3] >= 0);
        CHECK(labels[3] < 2);
    }

    SUBCASE("excursion ray frequency matches mu") {
        const RaySpace skew({0.25, 0.75});
        std::size_t count1 = 0, total = 0;
        for (std::size_t i = 0; i < 4000; ++i) {
            RngStream rng = RngStream::substream(kSeed + 6, streams::kSimulate, i);
            RadialPath p = simulate_radial_with_local_time(0.0, 1.0, 64, rng);
            const auto labels = label_excursions(p, skew, rng, -1);
            for (std::size_t j = 1; j < p.size(); ++j) {
                if (p.touched[j]) {  // one fresh excursion label per touched step
                    ++total;
                    count1 += labels[j] == 1 ? 1 : 0;
                }
            }
        }
        const double freq = static_cast<double>(count1) / static_cast<double>(total);
        const double se = std::sqrt(0.25 * 0.75 / static_cast<double>(total));
        CHECK(std::fabs(freq - 0.75) < 4.0 * se);
    }
}

TEST_CASE("label constancy between zero visits") {
    const RaySpace rays({0.3, 0.7});
    for (std::size_t i = 0; i < 200; ++i) {
        RngStream rng = RngStream::substream(kSeed + 7, streams::kSimulate, i);
        const SpiderPath p = simulate_spider(rays, SpiderPoint{}, 1.0, 128, rng);
        for (std::size_t j = 2; j < p.size(); ++j) {
            if (!p.touched[j]) CHECK(p.ray[j] == p.ray[j - 1]);
        }
    }
}

TEST_CASE("no-hit probability from an interior start") {
    // P(no zero by t, still on the start ray) = 2 Phi(x/sqrt(t)) - 1
    const RaySpace rays({0.4, 0.6});
    const double x0 = 0.8, t = 1.0;
    const std::size_t n = 100000;
    std::vector<double> survive(n);
    parallel_for(n, 4, [&](std::size_t i) {
        RngStream rng = RngStream::substream(kSeed + 8, streams::kSimulate, i);
        const SpiderPath p = simulate_spider(rays, SpiderPoint{x0, 1}, t, 32, rng);
        bool touched = false;
        for (std::size_t j = 1; j < p.size(); ++j) touched |= p.touched[j] != 0;
        survive[i] = (!touched && p.ray.back() == 1) ? 1.0 : 0.0;
    });
    const auto est = testutil::mean_se(survive);
    const double expected = 2.0 * num::norm_cdf(x0 / std::sqrt(t)) - 1.0;
    CHECK(std::fabs(est.mean - expected) < 3.0 * est.se);
}

TEST_CASE("ray law at a fixed time from the origin") {
    const RaySpace rays({0.3, 0.7});
    std::vector<std::int64_t> counts(2, 0);
    const std::size_t n = 10000;
    std::vector<int> rays_end(n);
    parallel_for(n, 4, [&](std::size_t i) {
        RngStream rng = RngStream::substream(kSeed + 9, streams::kSimulate, i);
        rays_end[i] = simulate_spider(rays, SpiderPoint{}, 1.0, 64, rng).ray.back();
    });
    for (std::size_t i = 0; i < n; ++i) ++counts[rays_end[i]];
    CHECK(chi_square_rays(counts, rays.mu, 0.01, "ray_law", kSeed).pass);
}

TEST_CASE("short horizon stays near the origin") {
    for (double h : {1e-4, 1e-6}) {
        RngStream rng(kSeed + 10);
        const RaySpace rays({1.0});
        const SpiderPath p = simulate_spider(rays, SpiderPoint{}, h, 8, rng);
        for (double x : p.x) CHECK(x < 50.0 * std::sqrt(h));
    }
}
