#include "spider/limit_samplers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spider/spider_sim.hpp"

namespace spider {

namespace {

void require_regime(const LimitLawSpec& spec, std::initializer_list<RegimeTag> allowed,
                    const char* who) {
    for (RegimeTag tag : allowed)
        if (spec.regime.tag == tag) return;
    throw std::invalid_argument(std::string(who) + ": wrong regime " +
                                regime_name(spec.regime.tag));
}

constexpr double kFlagReturnProb = 1e-3;

}  // namespace

LimitLawSpec LimitLawSpec::make(const RaySpace& rays, const PenaltyParams& params,
                                double horizon, std::size_t steps) {
    if (!(horizon > 0.0) || steps == 0)
        throw std::invalid_argument("horizon/steps: must be positive");
    LimitLawSpec spec;
    spec.regime = classify_regime(rays, params);
    spec.rays = rays;
    spec.params = params;
    spec.horizon = horizon;
    spec.steps = steps;
    return spec;
}

SpiderPath sample_bangbang(const LimitLawSpec& spec, RngStream& rng) {
    require_regime(spec, {RegimeTag::BangBang}, "sample_bangbang");
    RadialPath radial = detail::levy_radial(spec.horizon, spec.steps, spec.params.gamma, rng);
    std::vector<int> labels = label_excursions(radial, spec.rays, rng);
    SpiderPath path;
    path.t = std::move(radial.t);
    path.x = std::move(radial.x);
    path.local_time = std::move(radial.local_time);
    path.touched = std::move(radial.touched);
    path.ray = std::move(labels);
    return path;
}

WeightedSample sample_maxdrift_weighted(const LimitLawSpec& spec, RngStream& rng) {
    require_regime(spec, {RegimeTag::MaxDrift}, "sample_maxdrift_weighted");
    const double abar = spec.params.alpha_max();
    const double gamma = spec.params.gamma;
    const std::size_t n = spec.steps;
    const double dt = spec.horizon / static_cast<double>(n);

    RadialPath radial;
    radial.t.resize(n + 1);
    radial.x.resize(n + 1);
    radial.local_time.resize(n + 1);
    radial.touched.resize(n + 1);
    radial.t[0] = 0.0;
    radial.x[0] = 0.0;
    radial.local_time[0] = 0.0;
    radial.touched[0] = 1;
    double b = 0.0, l = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const ReflectedStep step = signed_step_with_local_time(b, dt, abar, rng);
        b = step.value;
        l += step.dl;
        radial.t[i] = dt * static_cast<double>(i);
        radial.x[i] = std::fabs(b);
        radial.local_time[i] = l;
        radial.touched[i] = step.touched ? 1 : 0;
    }

    std::vector<int> labels = label_excursions(radial, spec.rays, rng);
    // The excursion straddling the horizon is the unbounded one: relabel it
    // from mu restricted to the drift argmax set.
    std::size_t last_zero = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (radial.touched[i]) last_zero = i;
    std::vector<double> restricted(spec.rays.mu.size(), 0.0);
    double mass = 0.0;
    for (int m : spec.regime.argmax_set) mass += spec.rays.mu[m];
    for (int m : spec.regime.argmax_set) restricted[m] = spec.rays.mu[m] / mass;
    const int final_ray = rng.discrete(restricted);
    for (std::size_t i = last_zero; i <= n; ++i) labels[i] = final_ray;

    WeightedSample out;
    out.path.t = std::move(radial.t);
    out.path.x = std::move(radial.x);
    out.path.local_time = std::move(radial.local_time);
    out.path.touched = std::move(radial.touched);
    out.path.ray = std::move(labels);
    out.weight = (abar - gamma) / abar * std::exp(gamma * l);
    out.flagged = return_probability(abar, out.path.x.back()) > kFlagReturnProb;
    return out;
}

std::vector<double> escape_ray_law(const RaySpace& rays, const PenaltyParams& params) {
    params.validate(rays);
    std::vector<double> law(rays.mu.size(), 0.0);
    double zero_mass = 0.0;
    for (int m = 0; m < rays.size(); ++m) {
        if (params.alpha[m] > 0.0)
            throw std::invalid_argument("alpha: escape law requires nonpositive drifts");
        if (params.alpha[m] == 0.0) zero_mass += rays.mu[m];
    }
    if (!(params.gamma < 0.0)) throw std::invalid_argument("gamma: must be negative");
    if (zero_mass > 0.0) {
        for (int m = 0; m < rays.size(); ++m)
            if (params.alpha[m] == 0.0) law[m] = rays.mu[m] / zero_mass;
        return law;
    }
    const double ag = std::fabs(params.gamma);
    double harmonic = 0.0;
    double denom = 0.0;
    for (int m = 0; m < rays.size(); ++m) {
        const double am = std::fabs(params.alpha[m]);
        harmonic += rays.mu[m] / am;
        denom += rays.mu[m] * (am + ag) / (am * am);
    }
    for (int m = 0; m < rays.size(); ++m) {
        const double am = std::fabs(params.alpha[m]);
        law[m] = rays.mu[m] * (ag / (am * am) + harmonic) / denom;
    }
    return law;
}

int sample_escape_ray(const RaySpace& rays, const PenaltyParams& params, RngStream& rng) {
    const std::vector<double> law = escape_ray_law(rays, params);
    return rng.discrete(law);
}

double bessel3_step(double r, double dt, RngStream& rng) {
    const double sd = std::sqrt(dt);
    const double g1 = r + sd * rng.gauss();
    const double g2 = sd * rng.gauss();
    const double g3 = sd * rng.gauss();
    return std::sqrt(g1 * g1 + g2 * g2 + g3 * g3);
}

std::vector<double> sample_bessel3(double horizon, std::size_t steps, RngStream& rng) {
    if (!(horizon > 0.0) || steps == 0)
        throw std::invalid_argument("horizon/steps: must be positive");
    const double dt = horizon / static_cast<double>(steps);
    std::vector<double> x(steps + 1, 0.0);
    for (std::size_t i = 1; i <= steps; ++i) x[i] = bessel3_step(x[i - 1], dt, rng);
    return x;
}

namespace {

// Driving-motion state for the budget-crossing walk: the spider radial from
// the origin is S - Y with S the running maximum of Y, and its local time is
// S. The local-time budget e is exhausted when Y first reaches level e.
struct LevyState {
    double t = 0.0;
    double y = 0.0;
    double smax = 0.0;
};

struct CrossResult {
    bool crossed = false;
    double tau = 0.0;
    bool touched = false;
};

double level_hit_prob(double a, double b, double dt, double level) {
    if (a >= level || b >= level) return 1.0;
    return std::exp(-2.0 * (level - a) * (level - b) / dt);
}

// Localizes the first passage of the driving motion through the budget level
// inside a step known to have crossed it. The midpoint of the bracket is
// sampled from the bridge law and accepted against the exact crossing
// probability of the two halves, so the refinement stays law-exact; the half
// containing the first passage is then chosen with its exact conditional
// probability. tau resolution kTauTol.
constexpr double kTauTol = 1e-4;

double localize_crossing(double a, double b, double t0, double len, double budget,
                         RngStream& rng) {
    while (len > kTauTol) {
        const double half = 0.5 * len;
        double ym = 0.0, q1 = 0.0, q2 = 0.0;
        bool accepted = false;
        for (int tries = 0; tries < 4096 && !accepted; ++tries) {
            ym = 0.5 * (a + b) + 0.5 * std::sqrt(len) * rng.gauss();
            q1 = level_hit_prob(a, ym, half, budget);
            q2 = level_hit_prob(ym, b, half, budget);
            accepted = rng.uniform() < q1 + q2 - q1 * q2;
        }
        if (!accepted) break;  // grazing crossing; keep the current bracket
        if (rng.uniform() < q1 / (q1 + q2 - q1 * q2)) {
            b = ym;
        } else {
            a = ym;
            t0 += half;
        }
        len = half;
    }
    return t0 + 0.5 * len;
}

// One exact step of size dt, watching for the budget crossing.
CrossResult advance(LevyState& st, double dt, double budget, RngStream& rng) {
    CrossResult out;
    const double yn = st.y + std::sqrt(dt) * rng.gauss();
    const double m = bridge_maximum(st.y, yn, dt, rng.uniform());
    out.touched = m >= st.smax;
    if (m >= budget) {
        out.crossed = true;
        out.tau = localize_crossing(st.y, yn, st.t, dt, budget, rng);
    }
    st.t += dt;
    st.y = yn;
    st.smax = std::max(st.smax, m);
    return out;
}

}  // namespace

EscapeSample sample_negative_gamma(const LimitLawSpec& spec, RngStream& rng) {
    require_regime(spec, {RegimeTag::FlatRays, RegimeTag::AllNegative},
                   "sample_negative_gamma");
    EscapeSample out;
    out.budget = rng.exponential(std::fabs(spec.params.gamma));
    out.escape_ray = sample_escape_ray(spec.rays, spec.params, rng);

    const std::size_t n = spec.steps;
    const double dt = spec.horizon / static_cast<double>(n);
    const double time_cap = spec.horizon + 1e6;

    RadialPath radial;
    radial.t.push_back(0.0);
    radial.x.push_back(0.0);
    radial.local_time.push_back(0.0);
    radial.touched.push_back(1);

    LevyState st;
    bool crossed = false;
    // Fine phase over [0, horizon].
    for (std::size_t i = 1; i <= n && !crossed; ++i) {
        const CrossResult r = advance(st, radial.t.back() + dt - st.t, out.budget, rng);
        radial.t.push_back(radial.t.back() + dt);
        radial.touched.push_back(r.touched ? 1 : 0);
        if (r.crossed) {
            crossed = true;
            out.tau = r.tau;
            break;
        }
        radial.x.push_back(st.smax - st.y);
        radial.local_time.push_back(st.smax);
    }
    // Waiting phase: coarser exact steps until the budget is reached.
    if (!crossed) {
        double coarse = dt;
        while (st.t < time_cap) {
            coarse = std::min(coarse * 1.05, 200.0);
            const CrossResult r = advance(st, coarse, out.budget, rng);
            radial.t.push_back(st.t);
            radial.touched.push_back(r.touched ? 1 : 0);
            if (r.crossed) {
                crossed = true;
                out.tau = r.tau;
                // keep the escape window on the fine grid even when the
                // crossing was found inside a coarse waiting step
                radial.t.back() = r.tau + dt;
                break;
            }
            radial.x.push_back(st.smax - st.y);
            radial.local_time.push_back(st.smax);
        }
    }

    if (!crossed) {
        out.flagged = true;
        out.tau_index = radial.size();
        std::vector<int> labels = label_excursions(radial, spec.rays, rng);
        out.path.t = std::move(radial.t);
        out.path.x = std::move(radial.x);
        out.path.local_time = std::move(radial.local_time);
        out.path.touched = std::move(radial.touched);
        out.path.ray = std::move(labels);
        return out;
    }

    // The crossing landed inside the last recorded segment: the state at tau
    // sits at the origin with local time equal to the budget; everything after
    // tau is the Bessel(3) escape on the drawn ray.
    const std::size_t pre_points = radial.x.size();  // points strictly before tau
    double r_cur = 0.0;
    double t_cur = out.tau;
    {
        // first escape point at the already-reserved grid time
        const double t_next = radial.t[pre_points];
        r_cur = bessel3_step(0.0, t_next - out.tau, rng);
        radial.x.push_back(r_cur);
        radial.local_time.push_back(out.budget);
        t_cur = t_next;
    }
    const std::size_t escape_steps = n;
    for (std::size_t j = 1; j <= escape_steps; ++j) {
        r_cur = bessel3_step(r_cur, dt, rng);
        t_cur += dt;
        radial.t.push_back(t_cur);
        radial.x.push_back(r_cur);
        radial.local_time.push_back(out.budget);
        radial.touched.push_back(0);
    }

    out.tau_index = pre_points;
    std::vector<int> labels = label_excursions(radial, spec.rays, rng);
    for (std::size_t i = out.tau_index; i < radial.size(); ++i) labels[i] = out.escape_ray;
    out.path.t = std::move(radial.t);
    out.path.x = std::move(radial.x);
    out.path.local_time = std::move(radial.local_time);
    out.path.touched = std::move(radial.touched);
    out.path.ray = std::move(labels);
    return out;
}

}  // namespace spider
