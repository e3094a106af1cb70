#pragma once

#include <string>
#include <vector>

#include "spider/ray_space.hpp"

// Analytic kernel for the exponentially penalized spider. Names follow the
// roles the quantities play:
//
//   pre_hit_moment   E_x[ e^{beta Y_t} ; no zero before t ]          (exact)
//   pre_hit_envelope closed-form majorant of the above, equivalent as t grows
//   post_hit_moment  E_x[ e^{beta |Y_t| + gamma L_t} ; zero before t ] (quadrature)
//   post_hit_envelope seven-branch majorant/equivalent of the above
//   weight_envelope  majorant of the full penalization normalizer from (x,k)
//   limit_density    density of the limit measure on paths up to time s
//
// All quantities are also available in log space so envelope/moment ratios can
// be formed far beyond double range.

namespace spider {

struct PenaltyParams {
    std::vector<double> alpha;  // one drift coefficient per ray
    double gamma = 0.0;

    void validate(const RaySpace& rays) const;
    double alpha_max() const;
};

enum class RegimeTag { BangBang, MaxDrift, NullSpider, FlatRays, AllNegative };

std::string regime_name(RegimeTag tag);

// Five-way classification of (alpha, gamma). argmax_set carries the rays that
// realize the defining maximum (drift argmax for MaxDrift, zero-drift rays for
// FlatRays); theta carries the per-ray slope of the limit density where one
// exists (FlatRays, AllNegative), normalized so sum_k mu_k theta_k = |gamma|.
struct Regime {
    RegimeTag tag = RegimeTag::NullSpider;
    std::vector<int> argmax_set;
    std::vector<double> theta;
};

Regime classify_regime(const RaySpace& rays, const PenaltyParams& params);

enum class FormulaKind { exact, majorant, asymptotic_equivalent, quadrature };

std::string formula_kind_name(FormulaKind kind);

// Carries the evaluation mode next to the number so tests never compare a
// majorant against an exact value for equality.
struct FormulaValue {
    double value = 0.0;
    FormulaKind kind = FormulaKind::exact;
};

FormulaValue pre_hit_moment(double beta, double x, double t);
double log_pre_hit_moment(double beta, double x, double t);

FormulaValue pre_hit_envelope(double beta, double x, double t);
double log_pre_hit_envelope(double beta, double x, double t);

// Density of L_t + |Y_t| at z on {L_t > 0}, for the motion started at x.
double local_time_plus_radius_density(double z, double x, double t);

// Joint density of (|Y_t|, L_t) at (y, l), l > 0, for the motion started at x.
double radius_local_time_density(double y, double l, double x, double t);

FormulaValue post_hit_moment(double beta, double gamma, double x, double t);
double log_post_hit_moment(double beta, double gamma, double x, double t);

FormulaValue post_hit_envelope(double beta, double gamma, double x, double t);
double log_post_hit_envelope(double beta, double gamma, double x, double t);

FormulaValue weight_envelope(const RaySpace& rays, const PenaltyParams& params, double x,
                             int k, double t);
double log_weight_envelope(const RaySpace& rays, const PenaltyParams& params, double x,
                           int k, double t);

FormulaValue weight_envelope_asymptotic(const RaySpace& rays, const PenaltyParams& params,
                                        double x, int k, double u);
double log_weight_envelope_asymptotic(const RaySpace& rays, const PenaltyParams& params,
                                      double x, int k, double u);

// Limit-measure density evaluated at time s on state (x, k, l). Equals 1 at
// (s, x, l) = (0, 0, 0) in every regime.
double limit_density(const RaySpace& rays, const PenaltyParams& params, double s, double x,
                     int k, double l);
double limit_density(const Regime& regime, const RaySpace& rays, const PenaltyParams& params,
                     double s, double x, int k, double l);

// Probability that the absolute value of a Brownian motion with drift abar,
// currently at height y, ever returns to the origin.
double return_probability(double abar, double y);

}  // namespace spider
