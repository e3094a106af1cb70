#pragma once

#include <cmath>
#include <functional>

// Adaptive Gauss-Kronrod (G7, K15) integration on a finite interval.
// Subdivides until the local error estimate meets the tolerance budget
// allotted to the subinterval.

namespace spider::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
};

namespace detail {

// K15 nodes on [0,1] side of the symmetric rule; node[7] = 0.
inline constexpr double kNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0,
};
inline constexpr double kWeightsK[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
};
// Gauss-7 weights attached to nodes 1, 3, 5, 7.
inline constexpr double kWeightsG[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469,
};

inline Result gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kNodes[i]);
        fv[14 - i] = f(c + h * kNodes[i]);
    }
    fv[7] = f(c);
    double k = 0.0, g = 0.0;
    for (int i = 0; i < 7; ++i) k += kWeightsK[i] * (fv[i] + fv[14 - i]);
    k += kWeightsK[7] * fv[7];
    for (int i = 0; i < 3; ++i) g += kWeightsG[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    g += kWeightsG[3] * fv[7];
    Result r;
    r.value = k * h;
    r.error = std::fabs((k - g) * h);
    return r;
}

inline void adapt(const std::function<double(double)>& f, double a, double b, double tol,
                  int depth, Result& total) {
    const Result seg = gk15(f, a, b);
    if (seg.error <= tol || depth <= 0) {
        total.value += seg.value;
        total.error += seg.error;
        if (depth <= 0 && seg.error > tol) total.converged = false;
        return;
    }
    const double c = 0.5 * (a + b);
    adapt(f, a, c, 0.5 * tol, depth - 1, total);
    adapt(f, c, b, 0.5 * tol, depth - 1, total);
}

}  // namespace detail

inline Result integrate(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-12, double rel_tol = 1e-9, int max_depth = 48) {
    if (a == b) return {};
    const Result first = detail::gk15(f, a, b);
    const double tol = std::max(abs_tol, rel_tol * std::fabs(first.value));
    Result total;
    detail::adapt(f, a, b, tol, max_depth, total);
    return total;
}

}  // namespace spider::quad
