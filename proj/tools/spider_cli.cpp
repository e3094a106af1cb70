// Command-line front end: simulate | formulas | penalize | limit-sample | verify.
// Flags override values from an optional key=value config file. Every CSV
// starts with a comment recording version, resolved-config hash, and seed,
// and reruns with the same seed are byte-identical for any worker count.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spider/closed_forms.hpp"
#include "spider/config.hpp"
#include "spider/csv.hpp"
#include "spider/limit_samplers.hpp"
#include "spider/penalize.hpp"
#include "spider/rng.hpp"
#include "spider/spider_sim.hpp"
#include "spider/suites.hpp"
#include "spider/version.hpp"

namespace {

using namespace spider;

struct FlagSet {
    std::string config_file;
    std::string rays, mu, alpha, t_grid;
    double gamma = 0.0, t = 0.0, s = 0.0, x0 = -1.0;
    std::uint64_t steps = 0, n_paths = 0, seed = 0;
    int start_ray = -1;
    unsigned threads = 0;
    std::string out, suite;
    bool gamma_set = false;
};

void add_common_flags(CLI::App* cmd, FlagSet& f) {
    cmd->add_option("--config", f.config_file, "key=value config file");
    cmd->add_option("--rays", f.rays, "comma-separated ray names");
    cmd->add_option("--mu", f.mu, "comma-separated ray weights (sum to 1)");
    cmd->add_option("--alpha", f.alpha, "comma-separated per-ray drift coefficients");
    cmd->add_option("--gamma", f.gamma, "local-time coefficient")
        ->each([&](const std::string&) { f.gamma_set = true; });
    cmd->add_option("--t", f.t, "time horizon");
    cmd->add_option("--t-grid", f.t_grid, "comma-separated penalization horizons");
    cmd->add_option("--s", f.s, "functional horizon");
    cmd->add_option("--x0", f.x0, "start radius");
    cmd->add_option("--start-ray", f.start_ray, "start ray index");
    cmd->add_option("--steps", f.steps, "grid steps per unit time");
    cmd->add_option("--n-paths", f.n_paths, "number of Monte Carlo paths");
    cmd->add_option("--seed", f.seed, "master seed");
    cmd->add_option("--threads", f.threads, "worker threads (results do not depend on this)");
    cmd->add_option("--out", f.out, "output CSV path");
}

ExperimentConfig resolve(const FlagSet& f) {
    ExperimentConfig cfg;
    if (!f.config_file.empty()) load_config_file(f.config_file, cfg);
    if (!f.rays.empty()) cfg.rays = parse_name_list(f.rays);
    if (!f.mu.empty()) cfg.mu = parse_double_list(f.mu, "mu");
    if (!f.alpha.empty()) cfg.alpha = parse_double_list(f.alpha, "alpha");
    if (f.gamma_set) cfg.gamma = f.gamma;
    if (f.t > 0.0) cfg.t = f.t;
    if (!f.t_grid.empty()) cfg.t_grid = parse_double_list(f.t_grid, "t_grid");
    if (f.s > 0.0) cfg.s = f.s;
    if (f.x0 >= 0.0) cfg.x0 = f.x0;
    if (f.start_ray >= 0) cfg.start_ray = f.start_ray;
    if (f.steps > 0) cfg.steps = f.steps;
    if (f.n_paths > 0) cfg.n_paths = f.n_paths;
    if (f.seed > 0) cfg.seed = f.seed;
    if (f.threads > 0) cfg.threads = f.threads;
    if (!f.out.empty()) cfg.out = f.out;
    if (!f.suite.empty()) cfg.suite = f.suite;
    cfg.validate();
    return cfg;
}

std::string resolved_regime(const ExperimentConfig& cfg) {
    return regime_name(classify_regime(cfg.ray_space(), cfg.penalty_params()).tag);
}

int run_simulate(const FlagSet& f) {
    const ExperimentConfig cfg = resolve(f);
    const RaySpace rays = cfg.ray_space();
    const auto n_steps =
        static_cast<std::size_t>(std::llround(cfg.t * static_cast<double>(cfg.steps)));
    CsvWriter csv(cfg.out, cfg.hash(), cfg.seed, kVersion);
    csv.header({"path_id", "t", "X", "N", "L", "touched_zero"});
    for (std::uint64_t p = 0; p < cfg.n_paths; ++p) {
        RngStream rng = RngStream::substream(cfg.seed, streams::kSimulate, p);
        const SpiderPath path = simulate_spider(rays, SpiderPoint{cfg.x0, cfg.start_ray},
                                                cfg.t, n_steps, rng);
        for (std::size_t i = 0; i < path.size(); ++i) {
            csv.cell(p).cell(path.t[i]).cell(path.x[i]).cell(rays.names[path.ray[i]])
                .cell(path.local_time[i]).cell(path.touched[i] != 0);
            csv.end_row();
        }
    }
    std::cout << "simulate: regime=" << resolved_regime(cfg) << " paths=" << cfg.n_paths
              << " out=" << cfg.out << "\n";
    return 0;
}

int run_formulas(const FlagSet& f, const std::string& name, const std::string& beta_list,
                 const std::string& x_list, const std::string& t_list, int k, double l) {
    const ExperimentConfig cfg = resolve(f);
    const RaySpace rays = cfg.ray_space();
    const PenaltyParams params = cfg.penalty_params();
    const std::vector<double> betas =
        beta_list.empty() ? std::vector<double>{0.0} : parse_double_list(beta_list, "beta");
    const std::vector<double> xs =
        x_list.empty() ? std::vector<double>{0.0} : parse_double_list(x_list, "x");
    const std::vector<double> ts =
        t_list.empty() ? std::vector<double>{cfg.t} : parse_double_list(t_list, "t");

    CsvWriter csv(cfg.out, cfg.hash(), cfg.seed, kVersion);
    csv.header({"formula", "beta", "gamma", "x", "k", "t", "value", "kind"});
    for (double beta : betas) {
        for (double x : xs) {
            for (double t : ts) {
                FormulaValue v{};
                if (name == "J") v = pre_hit_moment(beta, x, t);
                else if (name == "L") v = pre_hit_envelope(beta, x, t);
                else if (name == "I") v = post_hit_moment(beta, cfg.gamma, x, t);
                else if (name == "K") v = post_hit_envelope(beta, cfg.gamma, x, t);
                else if (name == "Q") v = weight_envelope(rays, params, x, k, t);
                else if (name == "Qasym") v = weight_envelope_asymptotic(rays, params, x, k, t);
                else if (name == "M")
                    v = {limit_density(rays, params, t, x, k, l), FormulaKind::exact};
                else if (name == "density_lx")
                    v = {local_time_plus_radius_density(beta, x, t), FormulaKind::exact};
                else if (name == "return_prob")
                    v = {return_probability(beta, x), FormulaKind::exact};
                else
                    throw ConfigError("name", "name: unknown formula '" + name + "'");
                csv.cell(name).cell(beta).cell(cfg.gamma).cell(x).cell(rays.names[k]).cell(t)
                    .cell(v.value).cell(formula_kind_name(v.kind));
                csv.end_row();
            }
        }
    }
    std::cout << "formulas: regime=" << resolved_regime(cfg) << " name=" << name
              << " rows=" << betas.size() * xs.size() * ts.size() << " out=" << cfg.out
              << "\n";
    return 0;
}

int run_penalize(const FlagSet& f, const std::string& functional_name) {
    const ExperimentConfig cfg = resolve(f);
    const RaySpace rays = cfg.ray_space();
    const PenaltyParams params = cfg.penalty_params();

    PathFunctional fn;
    const std::vector<PathFunctional> battery = functional_battery(cfg.s, rays);
    bool found = false;
    for (const PathFunctional& b : battery) {
        if (b.name == functional_name) {
            fn = b;
            found = true;
        }
    }
    if (!found)
        throw ConfigError("functional",
                          "functional: unknown name '" + functional_name + "'");

    McOptions mc;
    mc.n_paths = cfg.n_paths;
    mc.steps_per_unit = cfg.steps;
    mc.seed = cfg.seed;
    mc.threads = cfg.threads;
    const std::vector<double> grid =
        cfg.t_grid.empty() ? default_t_grid(cfg.s) : cfg.t_grid;
    const ConvergenceReport report = convergence_report(fn, grid, rays, params, mc);

    CsvWriter csv(cfg.out, cfg.hash(), cfg.seed, kVersion);
    csv.header({"t", "estimate", "se", "ess", "limit_estimate", "limit_se"});
    for (const ConvergenceRow& row : report.rows) {
        csv.cell(row.t).cell(row.penalized.value).cell(row.penalized.se)
            .cell(row.penalized.ess).cell(report.limit.value).cell(report.limit.se);
        csv.end_row();
    }
    std::cout << "penalize: regime=" << resolved_regime(cfg) << " functional=" << fn.name
              << " out=" << cfg.out << "\n";
    return 0;
}

int run_limit_sample(const FlagSet& f) {
    const ExperimentConfig cfg = resolve(f);
    const RaySpace rays = cfg.ray_space();
    const PenaltyParams params = cfg.penalty_params();
    const auto n_steps =
        static_cast<std::size_t>(std::llround(cfg.t * static_cast<double>(cfg.steps)));
    const LimitLawSpec spec = LimitLawSpec::make(rays, params, cfg.t, n_steps);

    CsvWriter csv(cfg.out, cfg.hash(), cfg.seed, kVersion);
    csv.header({"path_id", "t", "X", "N", "L", "touched_zero", "weight"});
    const auto emit = [&](std::uint64_t p, const SpiderPath& path, double weight) {
        for (std::size_t i = 0; i < path.size(); ++i) {
            csv.cell(p).cell(path.t[i]).cell(path.x[i]).cell(rays.names[path.ray[i]])
                .cell(path.local_time[i]).cell(path.touched[i] != 0).cell(weight);
            csv.end_row();
        }
    };
    for (std::uint64_t p = 0; p < cfg.n_paths; ++p) {
        RngStream rng = RngStream::substream(cfg.seed, streams::kSampler, p);
        switch (spec.regime.tag) {
            case RegimeTag::BangBang:
                emit(p, sample_bangbang(spec, rng), 1.0);
                break;
            case RegimeTag::MaxDrift: {
                const WeightedSample ws = sample_maxdrift_weighted(spec, rng);
                emit(p, ws.path, ws.weight);
                break;
            }
            case RegimeTag::NullSpider:
                emit(p, simulate_spider(rays, SpiderPoint{}, cfg.t, n_steps, rng), 1.0);
                break;
            case RegimeTag::FlatRays:
            case RegimeTag::AllNegative: {
                const EscapeSample es = sample_negative_gamma(spec, rng);
                emit(p, es.path, 1.0);
                break;
            }
        }
    }
    std::cout << "limit-sample: regime=" << resolved_regime(cfg) << " paths=" << cfg.n_paths
              << " out=" << cfg.out << "\n";
    return 0;
}

int run_verify(const FlagSet& f) {
    const ExperimentConfig cfg = resolve(f);
    if (cfg.suite.empty())
        throw ConfigError("suite", "suite: required (one of the named suites)");
    SuiteOptions so;
    so.seed = cfg.seed;
    so.threads = cfg.threads;
    const std::vector<TestReport> reports = run_suite(cfg.suite, so);

    CsvWriter csv(cfg.out, cfg.hash(), cfg.seed, kVersion);
    csv.header({"suite", "name", "statistic", "threshold", "p_value", "pass", "n", "seed",
                "negative_control"});
    for (const TestReport& r : reports) {
        csv.cell(cfg.suite).cell(r.name).cell(r.statistic).cell(r.threshold).cell(r.p_value)
            .cell(r.pass).cell(static_cast<std::uint64_t>(r.n)).cell(r.seed)
            .cell(r.negative_control);
        csv.end_row();
    }
    const bool green = suite_green(reports);
    std::cout << "verify: regime=" << resolved_regime(cfg) << " suite=" << cfg.suite
              << " checks=" << reports.size() << " result=" << (green ? "pass" : "FAIL")
              << " out=" << cfg.out << "\n";
    return green ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulation and verification toolkit for exponentially penalized spiders"};
    app.require_subcommand(1);

    FlagSet f_sim, f_form, f_pen, f_lim, f_ver;
    std::string formula_name = "K", beta_list, x_list, t_list;
    int formula_k = 0;
    double formula_l = 0.0;
    std::string functional_name = "one";

    CLI::App* sim = app.add_subcommand("simulate", "sample spider paths, emit CSV");
    add_common_flags(sim, f_sim);
    CLI::App* form = app.add_subcommand("formulas", "evaluate a named formula on a grid");
    add_common_flags(form, f_form);
    form->add_option("--name", formula_name,
                     "formula: J L I K Q Qasym M density_lx return_prob");
    form->add_option("--beta", beta_list, "comma-separated beta values");
    form->add_option("--x", x_list, "comma-separated x values");
    form->add_option("--t-values", t_list, "comma-separated t values");
    form->add_option("--k", formula_k, "ray index");
    form->add_option("--l", formula_l, "local-time argument (M only)");
    CLI::App* pen = app.add_subcommand("penalize", "finite-horizon vs limit expectations");
    add_common_flags(pen, f_pen);
    pen->add_option("--functional", functional_name,
                    "one | x_above_half | on_first_ray | exp_neg_local_time");
    CLI::App* lim = app.add_subcommand("limit-sample", "sample the limit process");
    add_common_flags(lim, f_lim);
    CLI::App* ver = app.add_subcommand("verify", "run a named verification suite");
    add_common_flags(ver, f_ver);
    ver->add_option("--suite", f_ver.suite, "suite name");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (sim->parsed()) return run_simulate(f_sim);
        if (form->parsed())
            return run_formulas(f_form, formula_name, beta_list, x_list, t_list, formula_k,
                                formula_l);
        if (pen->parsed()) return run_penalize(f_pen, functional_name);
        if (lim->parsed()) return run_limit_sample(f_lim);
        if (ver->parsed()) return run_verify(f_ver);
    } catch (const ConfigError& e) {
        std::cerr << "config error: field '" << e.field << "': " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
