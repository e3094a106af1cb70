#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

// Small numeric kit shared by the analytic kernel and the test harness:
// scaled complementary error function, stable normal CDF in log space,
// log-domain sums, and the regularized incomplete gamma function.

namespace spider::num {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// exp(z^2) erfc(z) for z >= 0, no overflow.
inline double erfcx(double z) {
    if (z < 26.0) return std::exp(z * z) * std::erfc(z);
    // asymptotic series, relative error below 1e-15 for z >= 26
    const double iz2 = 1.0 / (z * z);
    const double s = 1.0 + iz2 * (-0.5 + iz2 * (0.75 + iz2 * (-1.875 + iz2 * 6.5625)));
    return s / (z * std::sqrt(kPi));
}

inline double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// log Phi(x), usable deep in the left tail where Phi underflows.
inline double log_norm_cdf(double x) {
    if (x > -1.0) return std::log(norm_cdf(x));
    return -0.5 * x * x + std::log(0.5 * erfcx(-x / std::sqrt(2.0)));
}

// log(e^a + e^b)
inline double log_add_exp(double a, double b) {
    const double hi = a > b ? a : b;
    const double lo = a > b ? b : a;
    if (hi == kNegInf) return kNegInf;
    return hi + std::log1p(std::exp(lo - hi));
}

// log(e^a - e^b); requires a >= b, returns -inf when equal.
inline double log_sub_exp(double a, double b) {
    if (b == kNegInf) return a;
    if (a <= b) return kNegInf;
    return a + std::log1p(-std::exp(b - a));
}

namespace detail {

inline double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace detail

// Regularized upper incomplete gamma Q(a, x).
inline double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_q: invalid arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_contfrac(a, x);
}

// Survival function of a chi-square with df degrees of freedom.
inline double chi2_sf(double x, double df) { return gamma_q(0.5 * df, 0.5 * x); }

}  // namespace spider::num
