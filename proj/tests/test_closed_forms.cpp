#include <doctest.h>

#include <cmath>

#include "spider/closed_forms.hpp"
#include "spider/numerics.hpp"
#include "spider/parallel.hpp"
#include "spider/rng.hpp"
#include "spider/spider_sim.hpp"
#include "test_helpers.hpp"

using namespace spider;

namespace {

constexpr std::uint64_t kSeed = 31415926;

double phi_cdf(double v) { return num::norm_cdf(v); }

}  // namespace

TEST_CASE("pre-hit moment closed form") {
    // beta = 0: 2 Phi(x/sqrt(t)) - 1
    CHECK(pre_hit_moment(0.0, 1.0, 1.0).value ==
          doctest::Approx(2.0 * phi_cdf(1.0) - 1.0).epsilon(1e-12));
    CHECK(pre_hit_moment(0.0, 1.0, 1.0).value == doctest::Approx(0.6826894921370859));
    // from the origin the hitting time is zero
    CHECK(pre_hit_moment(2.0, 0.0, 1.0).value == 0.0);
    CHECK(pre_hit_moment(-3.0, 0.0, 5.0).value == 0.0);
    // reflection identity evaluated on both sides independently
    const double lhs = pre_hit_moment(1.0, 1.0, 2.0).value;
    const double rhs =
        pre_hit_moment(-1.0, 1.0, 2.0).value + 2.0 * std::sinh(1.0) * std::exp(1.0);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
    CHECK(pre_hit_moment(0.0, 1.0, 1.0).kind == FormulaKind::exact);
}

TEST_CASE("pre-hit moment equals direct integration") {
    RngStream rng(kSeed);
    for (int i = 0; i < 40; ++i) {
        const double beta = -2.0 + 4.0 * rng.uniform();
        const double x = 0.2 + 3.0 * rng.uniform();
        const double t = 0.3 + 20.0 * rng.uniform();
        const auto integrand = [&](double y) {
            return std::exp(-(x - y) * (x - y) / (2.0 * t) + beta * y) -
                   std::exp(-(x + y) * (x + y) / (2.0 * t) + beta * y);
        };
        const double ymax = x + std::max(beta, 0.0) * t + 10.0 * std::sqrt(t) + 5.0;
        const double direct =
            testutil::simpson(integrand, 0.0, ymax, 1e-12) / std::sqrt(2.0 * num::kPi * t);
        CHECK(pre_hit_moment(beta, x, t).value == doctest::Approx(direct).epsilon(1e-8));
    }
}

TEST_CASE("pre-hit envelope values") {
    CHECK(pre_hit_envelope(0.0, 2.0, 4.0).value ==
          doctest::Approx(std::sqrt(2.0 / (num::kPi * 4.0)) * 2.0).epsilon(1e-12));
    CHECK(pre_hit_envelope(-1.0, 0.0, 1.0).value == 0.0);
    const double expected = std::sqrt(2.0 / (num::kPi * 8.0)) +
                            2.0 * std::sinh(1.0) * std::exp(1.0);
    CHECK(pre_hit_envelope(1.0, 1.0, 2.0).value == doctest::Approx(expected).epsilon(1e-12));
    CHECK(pre_hit_envelope(1.0, 1.0, 2.0).value == doctest::Approx(6.6711509).epsilon(1e-6));
}

TEST_CASE("pre-hit envelope dominates and matches asymptotically") {
    RngStream rng(kSeed + 1);
    for (int i = 0; i < 60; ++i) {
        const double beta = -3.0 + 6.0 * rng.uniform();
        const double x = 5.0 * rng.uniform();
        const double t = 0.5 + 199.5 * rng.uniform();
        CHECK(log_pre_hit_envelope(beta, x, t) >=
              log_pre_hit_moment(beta, x, t) - 1e-9);
    }
    for (double beta : {-1.5, -0.5}) {
        const double ratio = std::exp(log_pre_hit_moment(beta, 1.0, 1e4) -
                                      log_pre_hit_envelope(beta, 1.0, 1e4));
        CHECK(ratio > 0.95);
        CHECK(ratio <= 1.0 + 1e-9);
    }
    for (double beta : {0.8, 1.6}) {
        const double ratio = std::exp(log_pre_hit_moment(beta, 1.0, 50.0) -
                                      log_pre_hit_envelope(beta, 1.0, 50.0));
        CHECK(ratio > 0.95);
        CHECK(ratio <= 1.0 + 1e-9);
    }
}

TEST_CASE("density of local time plus radius") {
    // factor z kills the density at zero
    CHECK(local_time_plus_radius_density(0.0, 1.0, 1.0) == 0.0);
    // total mass from the origin is one
    const double mass0 = testutil::simpson(
        [](double z) { return local_time_plus_radius_density(z, 0.0, 1.0); }, 0.0, 12.0,
        1e-12);
    CHECK(mass0 == doctest::Approx(1.0).epsilon(1e-8));
    // from x > 0 the mass is the zero-hitting probability 2(1 - Phi(x/sqrt t))
    const double x = 0.7, t = 2.0;
    const double mass = testutil::simpson(
        [&](double z) { return local_time_plus_radius_density(z, x, t); }, 0.0, 20.0,
        1e-12);
    CHECK(mass == doctest::Approx(2.0 * (1.0 - phi_cdf(x / std::sqrt(t)))).epsilon(1e-8));
}

TEST_CASE("joint density of radius and local time") {
    // symmetric in (x, y)
    CHECK(radius_local_time_density(0.4, 0.9, 1.1, 2.0) ==
          doctest::Approx(radius_local_time_density(1.1, 0.9, 0.4, 2.0)).epsilon(1e-14));
    // integrating over the diagonal y + l = z recovers the sum density
    const double x = 0.5, t = 1.5, z = 1.2;
    const double along = testutil::simpson(
        [&](double y) { return radius_local_time_density(y, z - y, x, t); }, 0.0,
        z - 1e-12, 1e-11);
    CHECK(along == doctest::Approx(local_time_plus_radius_density(z, x, t)).epsilon(1e-7));
    // marginalizing l and adding the no-hit part recovers the folded Gaussian
    const double y = 0.8;
    const double l_part = testutil::simpson(
        [&](double l) { return radius_local_time_density(y, l, x, t); }, 1e-12, 15.0,
        1e-11);
    const double no_hit = (num::norm_pdf((y - x) / std::sqrt(t)) -
                           num::norm_pdf((y + x) / std::sqrt(t))) /
                          std::sqrt(t);
    const double folded = (num::norm_pdf((y - x) / std::sqrt(t)) +
                           num::norm_pdf((y + x) / std::sqrt(t))) /
                          std::sqrt(t);
    CHECK(l_part + no_hit == doctest::Approx(folded).epsilon(1e-6));
}

TEST_CASE("post-hit moment special values") {
    CHECK(post_hit_moment(0.0, 0.0, 0.0, 1.0).value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(post_hit_moment(0.0, 0.0, 1.0, 1.0).value ==
          doctest::Approx(2.0 * (1.0 - phi_cdf(1.0))).epsilon(1e-8));
    CHECK(post_hit_moment(0.0, 0.0, 1.0, 1.0).value ==
          doctest::Approx(0.31731050786291415).epsilon(1e-8));
    CHECK(post_hit_moment(1.0, 1.0, 0.5, 2.0).kind == FormulaKind::quadrature);
    // degenerate equal exponents agree with nearby distinct ones
    CHECK(post_hit_moment(-1.0, -1.0, 0.5, 2.0).value ==
          doctest::Approx(post_hit_moment(-1.0, -1.0 + 1e-7, 0.5, 2.0).value)
              .epsilon(1e-6));
}

TEST_CASE("post-hit envelope table") {
    CHECK(post_hit_envelope(0.0, 0.0, 3.0, 7.0).value == doctest::Approx(1.0));
    const double both_neg = std::sqrt(2.0 / num::kPi) * 3.0;
    CHECK(post_hit_envelope(-1.0, -1.0, 1.0, 1.0).value ==
          doctest::Approx(both_neg).epsilon(1e-12));
    CHECK(post_hit_envelope(-1.0, -1.0, 1.0, 1.0).value ==
          doctest::Approx(2.3936536).epsilon(1e-6));
    CHECK(post_hit_envelope(0.0, -2.0, 1.0, 4.0).value ==
          doctest::Approx(0.5 * std::sqrt(2.0 / (num::kPi * 4.0))).epsilon(1e-12));
    CHECK(post_hit_envelope(-2.0, 0.0, 1.0, 4.0).value ==
          doctest::Approx(post_hit_envelope(0.0, -2.0, 1.0, 4.0).value).epsilon(1e-12));
    // positive dominant branch
    const double b = 0.5, g = 0.2, x = 1.0, t = 2.0;
    const double row5 = std::sqrt(2.0 / (num::kPi * t)) / (b - g) +
                        2.0 * b / (b - g) * std::exp(-b * x + 0.5 * t * b * b);
    CHECK(post_hit_envelope(b, g, x, t).value == doctest::Approx(row5).epsilon(1e-12));
    // equal positive branch
    const double row7 = g * std::sqrt(2.0 * t / num::kPi) +
                        2.0 * (t * g * g + 1.0) * std::exp(-g * x + 0.5 * t * g * g);
    CHECK(post_hit_envelope(g, g, x, t).value == doctest::Approx(row7).epsilon(1e-12));
}

TEST_CASE("post-hit envelope dominates the moment everywhere") {
    RngStream rng(kSeed + 2);
    for (int i = 0; i < 80; ++i) {
        const double beta = -3.0 + 6.0 * rng.uniform();
        const double gamma = -3.0 + 6.0 * rng.uniform();
        const double x = 5.0 * rng.uniform();
        const double t = 0.5 + 199.5 * rng.uniform();
        CHECK(log_post_hit_envelope(beta, gamma, x, t) >=
              log_post_hit_moment(beta, gamma, x, t) - 1e-7);
    }
    // pinned branch representatives
    struct P {
        double b, g;
    };
    for (const P p : {P{-1.0, -2.0}, P{0.0, -1.0}, P{-1.0, 0.0}, P{0.0, 0.0}}) {
        const double gap = std::exp(log_post_hit_moment(p.b, p.g, 1.0, 1e4) -
                                    log_post_hit_envelope(p.b, p.g, 1.0, 1e4));
        CHECK(gap > 0.95);
        CHECK(gap <= 1.0 + 1e-9);
    }
    for (const P p : {P{0.6, 0.2}, P{0.2, 0.6}, P{0.5, 0.5}}) {
        const double gap = std::exp(log_post_hit_moment(p.b, p.g, 1.0, 50.0) -
                                    log_post_hit_envelope(p.b, p.g, 1.0, 50.0));
        CHECK(gap > 0.95);
        CHECK(gap <= 1.0 + 1e-9);
    }
}

TEST_CASE("post-hit moment against simulation") {
    // E_x[e^{-|Y_t| - 2 L_t} ; hit] by brute force over radial paths
    const double beta = -1.0, gamma = -2.0, x = 0.5, t = 4.0;
    const std::size_t n = 100000;
    std::vector<double> vals(n);
    parallel_for(n, 4, [&](std::size_t i) {
        RngStream rng = RngStream::substream(kSeed + 3, streams::kOracle, i);
        const RadialPath p = simulate_radial_with_local_time(x, t, 16, rng);
        bool touched = false;
        for (std::size_t j = 1; j < p.size(); ++j) touched |= p.touched[j] != 0;
        vals[i] =
            touched ? std::exp(beta * p.x.back() + gamma * p.local_time.back()) : 0.0;
    });
    const auto est = testutil::mean_se(vals);
    CHECK(std::fabs(est.mean - post_hit_moment(beta, gamma, x, t).value) < 3.0 * est.se);
}

TEST_CASE("regime classification") {
    const RaySpace rays({0.5, 0.5});
    CHECK(classify_regime(rays, {{-1.0, -2.0}, 0.0}).tag == RegimeTag::NullSpider);
    CHECK(classify_regime(rays, {{1.0, 1.0}, 0.0}).tag == RegimeTag::MaxDrift);
    CHECK(classify_regime(rays, {{1.0, 1.0}, 0.0}).argmax_set ==
          std::vector<int>{0, 1});
    const RaySpace one({1.0});
    CHECK(classify_regime(one, {{0.5}, 0.5}).tag == RegimeTag::BangBang);
    CHECK(classify_regime(rays, {{0.0, -1.0}, -0.5}).tag == RegimeTag::FlatRays);
    CHECK(classify_regime(rays, {{-1.0, -1.0}, -1.0}).tag == RegimeTag::AllNegative);
    CHECK(classify_regime(rays, {{0.2, -1.0}, -0.5}).tag == RegimeTag::MaxDrift);

    SUBCASE("exactly one regime on randomized draws including boundaries") {
        RngStream rng(kSeed + 4);
        const double choices[5] = {-1.3, -0.4, 0.0, 0.4, 1.3};
        for (int i = 0; i < 100000; ++i) {
            PenaltyParams p;
            p.alpha = {choices[rng.raw() % 5], choices[rng.raw() % 5]};
            p.gamma = choices[rng.raw() % 5];
            const Regime r = classify_regime(rays, p);  // throws if no row matches
            const double abar = std::max(p.alpha[0], p.alpha[1]);
            int matches = 0;
            matches += (p.gamma > 0.0 && abar <= p.gamma) ? 1 : 0;
            matches += (abar > p.gamma && abar > 0.0) ? 1 : 0;
            matches += (p.gamma == 0.0 && abar <= 0.0) ? 1 : 0;
            matches += (p.gamma < 0.0 && abar == 0.0) ? 1 : 0;
            matches += (p.gamma < 0.0 && abar < 0.0) ? 1 : 0;
            CHECK(matches == 1);
            (void)r;
        }
    }

    SUBCASE("theta sums to |gamma|") {
        const RaySpace skew({0.3, 0.7});
        for (const PenaltyParams& p :
             {PenaltyParams{{-0.6, -1.2}, -0.9}, PenaltyParams{{0.0, -0.8}, -0.7}}) {
            const Regime r = classify_regime(skew, p);
            double total = 0.0;
            for (int m = 0; m < skew.size(); ++m) total += skew.mu[m] * r.theta[m];
            CHECK(total == doctest::Approx(std::fabs(p.gamma)).epsilon(1e-10));
        }
    }
}

TEST_CASE("limit density rows") {
    const RaySpace rays({0.5, 0.5});

    SUBCASE("null regime is identically one") {
        const PenaltyParams p{{-1.0, -2.0}, 0.0};
        CHECK(limit_density(rays, p, 3.0, 1.7, 1, 2.2) == doctest::Approx(1.0));
    }
    SUBCASE("normalized at the initial state in every regime") {
        for (const PenaltyParams& p :
             {PenaltyParams{{0.5, 1.0}, 1.0}, PenaltyParams{{1.0, -0.5}, 0.3},
              PenaltyParams{{-0.5, -1.0}, 0.0}, PenaltyParams{{0.0, -0.8}, -0.7},
              PenaltyParams{{-0.6, -1.2}, -0.9}}) {
            CHECK(limit_density(rays, p, 0.0, 0.0, 0, 0.0) == doctest::Approx(1.0));
        }
    }
    SUBCASE("all-negative worked example") {
        const PenaltyParams p{{-1.0, -1.0}, -1.0};
        const Regime r = classify_regime(rays, p);
        CHECK(r.theta[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(limit_density(rays, p, 0.7, 1.3, 0, 0.4) ==
              doctest::Approx(std::exp(-0.4) * (1.0 + 1.3)).epsilon(1e-12));
    }
    SUBCASE("recurrent-regime row") {
        const PenaltyParams p{{0.5, 1.0}, 1.0};
        CHECK(limit_density(rays, p, 2.0, 0.7, 0, 1.1) ==
              doctest::Approx(std::exp(1.0 * (1.1 - 0.7) - 0.5 * 2.0)).epsilon(1e-12));
    }
}

TEST_CASE("asymptotic envelope table") {
    const RaySpace rays({0.3, 0.7});
    // zero-drift rays with gamma = 0 keep only their mass
    CHECK(weight_envelope_asymptotic(rays, {{0.0, -1.0}, 0.0}, 0.8, 1, 123.0).value ==
          doctest::Approx(0.3).epsilon(1e-12));
    // all drifts negative with gamma = 0
    const double u = 50.0;
    const PenaltyParams all_neg{{-0.5, -2.0}, 0.0};
    const double expect =
        std::sqrt(2.0 / (num::kPi * u)) * (0.3 / 0.5 + 0.7 / 2.0);
    CHECK(weight_envelope_asymptotic(rays, all_neg, 1.0, 0, u).value ==
          doctest::Approx(expect).epsilon(1e-12));

    SUBCASE("envelope ratio approaches one along the table") {
        const std::vector<PenaltyParams> cases = {
            {{0.4, 0.4}, 0.4},    // equal to gamma on every ray
            {{0.1, 0.2}, 0.4},    // gamma strictly dominant
            {{0.5, -0.2}, 0.1},   // drift dominant
            {{0.0, -1.0}, 0.0},   // zero-drift rays at gamma = 0
            {{-0.5, -1.0}, 0.0},  // all negative at gamma = 0
            {{0.0, -1.0}, -0.5},  // zero-drift rays, negative gamma
            {{-0.5, -1.0}, -0.5}, // everything negative
        };
        for (const PenaltyParams& p : cases) {
            double prev_gap = 1e9;
            for (double uu : {100.0, 1000.0, 10000.0}) {
                const double lr = log_weight_envelope(rays, p, 0.7, 0, uu) -
                                  log_weight_envelope_asymptotic(rays, p, 0.7, 0, uu);
                const double gap = std::fabs(std::expm1(lr));
                CHECK(gap < prev_gap + 1e-12);
                prev_gap = gap;
            }
            CHECK(prev_gap < 0.05);
        }
    }
}

TEST_CASE("combined envelope") {
    const RaySpace one({1.0});
    const PenaltyParams p0{{0.0}, 0.0};
    // single ray, no penalty: 1 + sqrt(2/(pi t)) x
    CHECK(weight_envelope(one, p0, 2.0, 0, 3.0).value ==
          doctest::Approx(1.0 + std::sqrt(2.0 / (num::kPi * 3.0)) * 2.0).epsilon(1e-12));
    // at the origin only the ray average remains
    const RaySpace rays({0.3, 0.7});
    const PenaltyParams p{{-0.5, 0.2}, 0.1};
    const double expected = 0.3 * post_hit_envelope(-0.5, 0.1, 0.0, 5.0).value +
                            0.7 * post_hit_envelope(0.2, 0.1, 0.0, 5.0).value;
    CHECK(weight_envelope(rays, p, 0.0, 1, 5.0).value ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK_THROWS_AS(weight_envelope(rays, p, 0.0, 5, 5.0), std::invalid_argument);
}

TEST_CASE("return probability") {
    CHECK(return_probability(1.0, 0.0) == doctest::Approx(1.0));
    CHECK(return_probability(1.0, 1.0) ==
          doctest::Approx(std::exp(-1.0) / std::cosh(1.0)).epsilon(1e-12));
    CHECK(return_probability(1.0, 1.0) == doctest::Approx(0.2384058).epsilon(1e-6));
    // complement equals tanh
    CHECK(1.0 - return_probability(2.0, 0.7) ==
          doctest::Approx(std::tanh(2.0 * 0.7)).epsilon(1e-12));

    // brute force: drifted reflected motion from y, probability of a zero hit
    const double abar = 1.0, y = 1.0;
    const std::size_t n = 20000;
    std::vector<double> hit(n);
    parallel_for(n, 4, [&](std::size_t i) {
        RngStream rng = RngStream::substream(kSeed + 5, streams::kOracle, i);
        double b = y;
        bool within = false;
        const double horizon = 50.0 / (abar * abar);
        const double dt = 1.0 / 32.0;
        for (double tt = 0.0; tt < horizon && !within; tt += dt) {
            const ReflectedStep st = signed_step_with_local_time(b, dt, abar, rng);
            b = st.value;
            within = st.touched;
        }
        hit[i] = within ? 1.0 : 0.0;
    });
    const auto est = testutil::mean_se(hit);
    CHECK(std::fabs(est.mean - return_probability(abar, y)) < 3.5 * est.se);
}

TEST_CASE("space-time harmonicity of the limit density") {
    const RaySpace rays({0.3, 0.7});
    const double h = 1e-3;
    for (const PenaltyParams& p :
         {PenaltyParams{{0.5, 1.0}, 1.0}, PenaltyParams{{1.0, -0.5}, 0.3},
          PenaltyParams{{0.0, -0.8}, -0.7}, PenaltyParams{{-0.6, -1.2}, -0.9}}) {
        const Regime r = classify_regime(rays, p);
        const auto m = [&](double s, double x, int k, double l) {
            return limit_density(r, rays, p, s, x, k, l);
        };
        for (double x : {0.1, 1.0, 2.5}) {
            const double ds = (m(1.0 + h, x, 1, 0.5) - m(1.0 - h, x, 1, 0.5)) / (2.0 * h);
            const double dxx =
                (m(1.0, x + h, 1, 0.5) - 2.0 * m(1.0, x, 1, 0.5) + m(1.0, x - h, 1, 0.5)) /
                (h * h);
            CHECK(std::fabs(ds + 0.5 * dxx) <= 1e-4 * m(1.0, x, 1, 0.5));
        }
        const double dl = (m(1.0, 0.0, 0, 0.5 + h) - m(1.0, 0.0, 0, 0.5 - h)) / (2.0 * h);
        double flux = 0.0;
        for (int k = 0; k < rays.size(); ++k) {
            flux += rays.mu[k] *
                    (-3.0 * m(1.0, 0.0, k, 0.5) + 4.0 * m(1.0, h, k, 0.5) -
                     m(1.0, 2.0 * h, k, 0.5)) /
                    (2.0 * h);
        }
        CHECK(std::fabs(dl + flux) <= 1e-4 * m(1.0, 0.0, 0, 0.5));
    }
}
