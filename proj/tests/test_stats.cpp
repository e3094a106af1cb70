#include <doctest.h>

#include <cmath>

#include "spider/rng.hpp"
#include "spider/stats.hpp"

using namespace spider;

namespace {

std::vector<double> uniforms(std::size_t n, std::uint64_t seed) {
    RngStream rng(seed);
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform();
    return v;
}

}  // namespace

TEST_CASE("one-sample ks null calibration") {
    int rejects = 0;
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
        const auto u = uniforms(10000, derive_seed(5, streams::kCalibration, rep));
        const TestReport r = ks_one_sample(
            u, [](double v) { return std::clamp(v, 0.0, 1.0); }, 0.01, "u", rep);
        if (!r.pass) ++rejects;
    }
    CHECK(rejects <= 5);
}

TEST_CASE("one-sample ks rejects the wrong law hard") {
    RngStream rng(7);
    std::vector<double> v(10000);
    for (double& x : v) x = rng.exponential(2.0);
    const TestReport r = ks_one_sample(
        v, [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); }, 0.01, "exp2_vs_exp1",
        7);
    CHECK(!r.pass);
    CHECK(r.p_value < 1e-6);
}

TEST_CASE("ks input validation") {
    CHECK_THROWS_AS(ks_one_sample({1.0, 2.0}, [](double) { return 0.5; }, 0.01, "few", 0),
                    std::invalid_argument);
    std::vector<double> with_nan(200, 0.5);
    with_nan[3] = std::nan("");
    CHECK_THROWS_AS(
        ks_one_sample(with_nan, [](double) { return 0.5; }, 0.01, "nan", 0),
        std::invalid_argument);
}

TEST_CASE("two-sample ks") {
    const auto u = uniforms(20000, 11);
    std::vector<double> a(u.begin(), u.begin() + 10000);
    std::vector<double> b(u.begin() + 10000, u.end());
    CHECK(ks_two_sample(a, b, 0.01, "halves", 11).pass);

    RngStream rng(13);
    std::vector<double> c(10000);
    for (double& x : c) x = rng.exponential(1.0);
    CHECK(!ks_two_sample(a, c, 0.01, "different", 13).pass);
}

TEST_CASE("weighted ks recovers a tilted law") {
    // weights e^{-x} turn Exp(1) draws into Exp(2) samples
    RngStream rng(17);
    const std::size_t n = 20000;
    std::vector<double> x(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = rng.exponential(1.0);
        w[i] = std::exp(-x[i]);
    }
    const auto exp2_cdf = [](double v) { return v <= 0.0 ? 0.0 : -std::expm1(-2.0 * v); };
    CHECK(ks_one_sample_weighted(x, w, exp2_cdf, 0.01, "tilted", 17).pass);
    const auto exp1_cdf = [](double v) { return v <= 0.0 ? 0.0 : -std::expm1(-v); };
    CHECK(!ks_one_sample_weighted(x, w, exp1_cdf, 0.01, "untilted", 17).pass);
}

TEST_CASE("chi-square on category counts") {
    // exactly proportional counts give statistic zero
    const TestReport exact =
        chi_square_rays({30, 70}, {0.3, 0.7}, 0.01, "exact", 0);
    CHECK(exact.statistic == doctest::Approx(0.0));
    CHECK(exact.pass);

    RngStream rng(19);
    const std::vector<double> law = {0.25, 0.75};
    std::vector<std::int64_t> counts(2, 0);
    for (int i = 0; i < 10000; ++i) ++counts[rng.discrete(law)];
    CHECK(chi_square_rays(counts, law, 0.01, "sampled", 19).pass);
    CHECK(!chi_square_rays(counts, {0.5, 0.5}, 0.01, "wrong", 19).pass);
}

TEST_CASE("independence check") {
    RngStream rng(23);
    const std::size_t n = 2000;
    std::vector<double> a(n), b(n), c(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = rng.gauss();
        b[i] = rng.gauss();
        c[i] = a[i] + 0.3 * rng.gauss();  // strongly dependent on a
    }
    CHECK(independence_check(a, b, 0.01, "independent", 23).pass);
    CHECK(!independence_check(a, c, 0.01, "dependent", 23).pass);
}

TEST_CASE("reports replay bit-exactly for a fixed seed") {
    const auto u = uniforms(5000, 29);
    const auto v = uniforms(5000, 31);
    const TestReport a = independence_check(u, v, 0.01, "replay", 29);
    const TestReport b = independence_check(u, v, 0.01, "replay", 29);
    CHECK(a.statistic == b.statistic);
    CHECK(a.p_value == b.p_value);
    CHECK(a.threshold == b.threshold);
    CHECK(a.seed == b.seed);
}
