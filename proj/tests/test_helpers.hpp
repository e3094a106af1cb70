#pragma once

#include <cmath>
#include <functional>
#include <vector>

// Oracles for the unit tests, kept independent of the library's own
// quadrature and simulation code paths.

namespace testutil {

// Plain adaptive Simpson; deliberately a different integrator from the
// Gauss-Kronrod engine used inside the library. The tolerance is applied
// relative to the magnitude of the first whole-interval estimate.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      double rel_tol = 1e-10, int depth = 24) {
    const double c = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fc = f(c);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
    const double tol = std::max(1e-300, rel_tol * std::fabs(whole));
    std::function<double(double, double, double, double, double, double, double, int)>
        rec = [&](double lo, double hi, double flo, double fhi, double fmid, double acc,
                  double budget, int d) -> double {
        const double mid = 0.5 * (lo + hi);
        const double lmid = 0.5 * (lo + mid), rmid = 0.5 * (mid + hi);
        const double fl = f(lmid), fr = f(rmid);
        const double left = (mid - lo) / 6.0 * (flo + 4.0 * fl + fmid);
        const double right = (hi - mid) / 6.0 * (fmid + 4.0 * fr + fhi);
        if (d <= 0 || std::fabs(left + right - acc) < 15.0 * budget)
            return left + right + (left + right - acc) / 15.0;
        return rec(lo, mid, flo, fmid, fl, left, 0.5 * budget, d - 1) +
               rec(mid, hi, fmid, fhi, fr, right, 0.5 * budget, d - 1);
    };
    return rec(a, b, fa, fb, fc, whole, tol, depth);
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& v) {
    MeanSe out;
    const double n = static_cast<double>(v.size());
    for (double x : v) out.mean += x;
    out.mean /= n;
    double var = 0.0;
    for (double x : v) var += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(var / (n - 1.0) / n);
    return out;
}

}  // namespace testutil
