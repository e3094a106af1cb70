#include "spider/closed_forms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spider/numerics.hpp"
#include "spider/quadrature.hpp"

namespace spider {

using num::kNegInf;
using num::kPi;
using num::log_add_exp;
using num::log_norm_cdf;
using num::log_sub_exp;

namespace {

double sq(double v) { return v * v; }

void check_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": must be finite");
}

void check_xt(double x, double t) {
    check_finite(x, "x");
    if (x < 0.0) throw std::invalid_argument("x: must be nonnegative");
    if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("t: must be positive");
}

double log_sqrt_2_over_pi(double t, double power) {
    // log sqrt(2 / (pi t^power))
    return 0.5 * (std::log(2.0) - std::log(kPi) - power * std::log(t));
}

}  // namespace

void PenaltyParams::validate(const RaySpace& rays) const {
    if (alpha.size() != static_cast<std::size_t>(rays.size()))
        throw std::invalid_argument("alpha: one coefficient per ray required");
    for (double a : alpha) check_finite(a, "alpha");
    check_finite(gamma, "gamma");
}

double PenaltyParams::alpha_max() const {
    if (alpha.empty()) throw std::invalid_argument("alpha: empty");
    return *std::max_element(alpha.begin(), alpha.end());
}

std::string regime_name(RegimeTag tag) {
    switch (tag) {
        case RegimeTag::BangBang: return "BangBang";
        case RegimeTag::MaxDrift: return "MaxDrift";
        case RegimeTag::NullSpider: return "NullSpider";
        case RegimeTag::FlatRays: return "FlatRays";
        case RegimeTag::AllNegative: return "AllNegative";
    }
    return "?";
}

std::string formula_kind_name(FormulaKind kind) {
    switch (kind) {
        case FormulaKind::exact: return "exact";
        case FormulaKind::majorant: return "majorant";
        case FormulaKind::asymptotic_equivalent: return "asymptotic_equivalent";
        case FormulaKind::quadrature: return "quadrature";
    }
    return "?";
}

Regime classify_regime(const RaySpace& rays, const PenaltyParams& params) {
    params.validate(rays);
    const double abar = params.alpha_max();
    const double g = params.gamma;
    Regime out;
    if (g > 0.0 && abar <= g) {
        out.tag = RegimeTag::BangBang;
        return out;
    }
    if (abar > g && abar > 0.0) {
        out.tag = RegimeTag::MaxDrift;
        for (int m = 0; m < rays.size(); ++m)
            if (params.alpha[m] == abar) out.argmax_set.push_back(m);
        return out;
    }
    // From here alpha_m <= 0 for every ray.
    if (g == 0.0) {
        out.tag = RegimeTag::NullSpider;
        return out;
    }
    if (abar == 0.0) {
        out.tag = RegimeTag::FlatRays;
        double mass = 0.0;
        for (int m = 0; m < rays.size(); ++m) {
            if (params.alpha[m] == 0.0) {
                out.argmax_set.push_back(m);
                mass += rays.mu[m];
            }
        }
        out.theta.assign(rays.mu.size(), 0.0);
        for (int m : out.argmax_set) out.theta[m] = -g / mass;
        return out;
    }
    out.tag = RegimeTag::AllNegative;
    double denom = 0.0;
    double cross = 0.0;
    for (int m = 0; m < rays.size(); ++m) {
        const double am = params.alpha[m];
        denom += rays.mu[m] * (std::fabs(am) + std::fabs(g)) / (sq(am) * sq(g));
        cross += rays.mu[m] / (am * g);
    }
    out.theta.resize(rays.mu.size());
    for (int m = 0; m < rays.size(); ++m)
        out.theta[m] = (1.0 / sq(params.alpha[m]) + cross) / denom;
    return out;
}

// ---------------------------------------------------------------------------
// pre-hit moment and envelope

double log_pre_hit_moment(double beta, double x, double t) {
    check_finite(beta, "beta");
    check_xt(x, t);
    if (x == 0.0) return kNegInf;
    const double rt = std::sqrt(t);
    if (beta <= 0.0) {
        const double common = 0.5 * t * sq(beta);
        const double a1 = common + beta * x + log_norm_cdf((x + beta * t) / rt);
        const double a2 = common - beta * x + log_norm_cdf((beta * t - x) / rt);
        return log_sub_exp(a1, a2);
    }
    // Positive exponent branch via the reflection identity to avoid
    // subtracting near-equal terms.
    const double reflected = log_pre_hit_moment(-beta, x, t);
    const double grow = std::log(2.0 * std::sinh(beta * x)) + 0.5 * t * sq(beta);
    return log_add_exp(reflected, grow);
}

FormulaValue pre_hit_moment(double beta, double x, double t) {
    return {std::exp(log_pre_hit_moment(beta, x, t)), FormulaKind::exact};
}

double log_pre_hit_envelope(double beta, double x, double t) {
    check_finite(beta, "beta");
    check_xt(x, t);
    if (x == 0.0) return kNegInf;
    double base;
    if (beta == 0.0) {
        base = log_sqrt_2_over_pi(t, 1.0) + std::log(x);
    } else {
        base = log_sqrt_2_over_pi(t, 3.0) + std::log(x) - 2.0 * std::log(std::fabs(beta));
    }
    if (beta > 0.0)
        base = log_add_exp(base, std::log(2.0 * std::sinh(beta * x)) + 0.5 * t * sq(beta));
    return base;
}

FormulaValue pre_hit_envelope(double beta, double x, double t) {
    return {std::exp(log_pre_hit_envelope(beta, x, t)), FormulaKind::majorant};
}

// ---------------------------------------------------------------------------
// joint laws

double local_time_plus_radius_density(double z, double x, double t) {
    check_xt(x, t);
    if (z < 0.0) throw std::invalid_argument("z: must be nonnegative");
    return std::sqrt(2.0 / (kPi * t * t * t)) * z * (x + z) * std::exp(-sq(x + z) / (2.0 * t));
}

double radius_local_time_density(double y, double l, double x, double t) {
    check_xt(x, t);
    if (y < 0.0) throw std::invalid_argument("y: must be nonnegative");
    if (!(l > 0.0)) throw std::invalid_argument("l: must be positive");
    const double s = l + x + y;
    return std::sqrt(2.0 / (kPi * t * t * t)) * s * std::exp(-sq(s) / (2.0 * t));
}

// ---------------------------------------------------------------------------
// post-hit moment (adaptive quadrature of the mixed-exponent integrand)

double log_post_hit_moment(double beta, double gamma, double x, double t) {
    check_finite(beta, "beta");
    check_finite(gamma, "gamma");
    check_xt(x, t);
    const double hi = std::max(beta, gamma);
    const double lo = std::min(beta, gamma);
    const bool degenerate = std::fabs(hi - lo) <= 1e-9;

    // log of the exponent-average m(z) = (e^{hi z} - e^{lo z}) / ((hi-lo) z)
    const auto log_mean_exp = [&](double z) -> double {
        if (degenerate) return beta * z;
        const double u = (hi - lo) * z;
        if (u > 33.0) return lo * z + u - std::log(u);
        if (u < 1e-12) return lo * z;
        return lo * z + std::log(std::expm1(u) / u);
    };

    // Scale by the peak of the exponential part so the scaled integrand stays
    // within double range for any (beta, gamma, t).
    const double slope = std::max(hi, 0.0);
    const double zpeak = std::max(0.0, slope * t - x);
    const double s0 = slope * zpeak - sq(x + zpeak) / (2.0 * t);

    const auto integrand = [&](double z) -> double {
        if (z <= 0.0) return 0.0;
        const double lg = std::log(z) + std::log(x + z) - sq(x + z) / (2.0 * t) +
                          log_mean_exp(z) - s0;
        return std::exp(lg);
    };

    // Truncate where the Gaussian factor has fallen ~16 orders below the peak.
    const double zmax = zpeak + std::sqrt(2.0 * t * (40.0 + std::log1p(zpeak + t))) + x + 1.0;
    quad::Result r = quad::integrate(integrand, 0.0, zmax, 1e-13, 1e-9);
    if (!r.converged) throw std::runtime_error("post_hit_moment: quadrature did not converge");
    if (r.value <= 0.0) return kNegInf;
    return log_sqrt_2_over_pi(t, 3.0) + s0 + std::log(r.value);
}

FormulaValue post_hit_moment(double beta, double gamma, double x, double t) {
    return {std::exp(log_post_hit_moment(beta, gamma, x, t)), FormulaKind::quadrature};
}

// ---------------------------------------------------------------------------
// post-hit envelope (seven branches)

double log_post_hit_envelope(double b, double g, double x, double t) {
    check_finite(b, "beta");
    check_finite(g, "gamma");
    check_xt(x, t);
    if (b < 0.0 && g < 0.0) {
        const double inner = x / (b * g) + (std::fabs(b) + std::fabs(g)) / (sq(b) * sq(g));
        return log_sqrt_2_over_pi(t, 3.0) + std::log(inner);
    }
    if (b == 0.0 && g < 0.0) return log_sqrt_2_over_pi(t, 1.0) - std::log(std::fabs(g));
    if (g == 0.0 && b < 0.0) return log_sqrt_2_over_pi(t, 1.0) - std::log(std::fabs(b));
    if (b == 0.0 && g == 0.0) return 0.0;
    if (b > 0.0 && b > g) {
        const double d = b - g;
        return log_add_exp(log_sqrt_2_over_pi(t, 1.0) - std::log(d),
                           std::log(2.0 * b / d) - b * x + 0.5 * t * sq(b));
    }
    if (g > 0.0 && g > b) {
        const double d = g - b;
        return log_add_exp(log_sqrt_2_over_pi(t, 1.0) - std::log(d),
                           std::log(2.0 * g / d) - g * x + 0.5 * t * sq(g));
    }
    // b == g > 0
    return log_add_exp(std::log(g) + 0.5 * (std::log(2.0 * t) - std::log(kPi)),
                       std::log(2.0 * (t * sq(g) + 1.0)) - g * x + 0.5 * t * sq(g));
}

FormulaValue post_hit_envelope(double beta, double gamma, double x, double t) {
    return {std::exp(log_post_hit_envelope(beta, gamma, x, t)), FormulaKind::majorant};
}

// ---------------------------------------------------------------------------
// combined envelope and its asymptotic table

double log_weight_envelope(const RaySpace& rays, const PenaltyParams& params, double x,
                           int k, double t) {
    params.validate(rays);
    if (k < 0 || k >= rays.size()) throw std::invalid_argument("k: unknown ray");
    double acc = kNegInf;
    for (int m = 0; m < rays.size(); ++m) {
        acc = log_add_exp(acc, std::log(rays.mu[m]) +
                                   log_post_hit_envelope(params.alpha[m], params.gamma, x, t));
    }
    if (x > 0.0) acc = log_add_exp(acc, log_pre_hit_envelope(params.alpha[k], x, t));
    return acc;
}

FormulaValue weight_envelope(const RaySpace& rays, const PenaltyParams& params, double x,
                             int k, double t) {
    return {std::exp(log_weight_envelope(rays, params, x, k, t)), FormulaKind::majorant};
}

double log_weight_envelope_asymptotic(const RaySpace& rays, const PenaltyParams& params,
                                      double x, int k, double u) {
    params.validate(rays);
    if (k < 0 || k >= rays.size()) throw std::invalid_argument("k: unknown ray");
    if (!(u > 0.0)) throw std::invalid_argument("u: must be positive");
    check_finite(x, "x");
    if (x < 0.0) throw std::invalid_argument("x: must be nonnegative");

    const Regime regime = classify_regime(rays, params);
    const double g = params.gamma;
    const double abar = params.alpha_max();

    switch (regime.tag) {
        case RegimeTag::BangBang: {
            std::vector<int> eq;
            for (int m = 0; m < rays.size(); ++m)
                if (params.alpha[m] == g) eq.push_back(m);
            if (!eq.empty()) {
                double mass = 0.0;
                for (int m : eq) mass += rays.mu[m];
                return std::log(2.0 * mass * u * sq(g)) - g * x + 0.5 * u * sq(g);
            }
            double coef = 0.0;
            for (int m = 0; m < rays.size(); ++m)
                coef += 2.0 * g * rays.mu[m] / (g - params.alpha[m]);
            return std::log(coef) - g * x + 0.5 * u * sq(g);
        }
        case RegimeTag::MaxDrift: {
            double mass = 0.0;
            for (int m : regime.argmax_set) mass += rays.mu[m];
            const bool in_j = std::find(regime.argmax_set.begin(), regime.argmax_set.end(),
                                        k) != regime.argmax_set.end();
            double inner = std::log(2.0 * abar / (abar - g) * mass) - abar * x;
            if (in_j && x > 0.0)
                inner = log_add_exp(inner, std::log(2.0 * std::sinh(abar * x)));
            return 0.5 * u * sq(abar) + inner;
        }
        case RegimeTag::NullSpider: {
            double mass = 0.0;
            for (int m = 0; m < rays.size(); ++m)
                if (params.alpha[m] == 0.0) mass += rays.mu[m];
            if (mass > 0.0) return std::log(mass);
            double coef = 0.0;
            for (int m = 0; m < rays.size(); ++m)
                coef += rays.mu[m] / std::fabs(params.alpha[m]);
            return log_sqrt_2_over_pi(u, 1.0) + std::log(coef);
        }
        case RegimeTag::FlatRays: {
            double mass = 0.0;
            for (int m : regime.argmax_set) mass += rays.mu[m];
            const bool in_j = std::find(regime.argmax_set.begin(), regime.argmax_set.end(),
                                        k) != regime.argmax_set.end();
            return log_sqrt_2_over_pi(u, 1.0) +
                   std::log(mass / std::fabs(g) + (in_j ? x : 0.0));
        }
        case RegimeTag::AllNegative: {
            double level = 0.0;
            double cross = 0.0;
            for (int m = 0; m < rays.size(); ++m) {
                const double am = params.alpha[m];
                level += rays.mu[m] * (std::fabs(am) + std::fabs(g)) / (sq(am) * sq(g));
                cross += rays.mu[m] / (am * g);
            }
            return log_sqrt_2_over_pi(u, 3.0) +
                   std::log(level + x * (1.0 / sq(params.alpha[k]) + cross));
        }
    }
    throw std::logic_error("weight_envelope_asymptotic: unreachable");
}

FormulaValue weight_envelope_asymptotic(const RaySpace& rays, const PenaltyParams& params,
                                        double x, int k, double u) {
    return {std::exp(log_weight_envelope_asymptotic(rays, params, x, k, u)),
            FormulaKind::asymptotic_equivalent};
}

// ---------------------------------------------------------------------------
// limit density

double limit_density(const Regime& regime, const RaySpace& rays, const PenaltyParams& params,
                     double s, double x, int k, double l) {
    if (k < 0 || k >= rays.size()) throw std::invalid_argument("k: unknown ray");
    if (s < 0.0 || x < 0.0 || l < 0.0)
        throw std::invalid_argument("limit_density: s, x, l must be nonnegative");
    const double g = params.gamma;
    switch (regime.tag) {
        case RegimeTag::BangBang:
            return std::exp(g * (l - x) - 0.5 * s * sq(g));
        case RegimeTag::MaxDrift: {
            const double abar = params.alpha_max();
            double mass = 0.0;
            for (int m : regime.argmax_set) mass += rays.mu[m];
            const bool in_j = std::find(regime.argmax_set.begin(), regime.argmax_set.end(),
                                        k) != regime.argmax_set.end();
            double inner = std::exp(-abar * x);
            if (in_j) inner += (abar - g) / (abar * mass) * std::sinh(abar * x);
            return std::exp(g * l - 0.5 * s * sq(abar)) * inner;
        }
        case RegimeTag::NullSpider:
            return 1.0;
        case RegimeTag::FlatRays:
        case RegimeTag::AllNegative:
            return std::exp(g * l) * (1.0 + regime.theta[k] * x);
    }
    throw std::logic_error("limit_density: unreachable");
}

double limit_density(const RaySpace& rays, const PenaltyParams& params, double s, double x,
                     int k, double l) {
    return limit_density(classify_regime(rays, params), rays, params, s, x, k, l);
}

double return_probability(double abar, double y) {
    if (!(abar > 0.0)) throw std::invalid_argument("abar: must be positive");
    if (y < 0.0) throw std::invalid_argument("y: must be nonnegative");
    return 2.0 / (1.0 + std::exp(2.0 * abar * y));
}

}  // namespace spider
