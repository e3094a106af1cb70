#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spider/closed_forms.hpp"
#include "spider/ray_space.hpp"

// Experiment configuration shared by the CLI subcommands. Values come from a
// plain key=value file ('#' starts a comment) overridden by command-line
// flags; validation failures name the offending field.

namespace spider {

struct ConfigError : std::runtime_error {
    std::string field;
    ConfigError(std::string f, const std::string& message)
        : std::runtime_error(message), field(std::move(f)) {}
};

struct ExperimentConfig {
    std::vector<std::string> rays = {"a", "b"};
    std::vector<double> mu = {0.5, 0.5};
    std::vector<double> alpha = {0.0, 0.0};
    double gamma = 0.0;
    double t = 10.0;
    std::vector<double> t_grid;  // empty: derived from s as {s+1, 2s+1, ...}
    double s = 1.0;
    double x0 = 0.0;
    int start_ray = 0;
    std::uint64_t steps = 64;  // grid steps per unit time
    std::uint64_t n_paths = 1000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string out = "out.csv";
    std::string suite;

    void validate() const;
    RaySpace ray_space() const { return RaySpace(rays, mu); }
    PenaltyParams penalty_params() const { return PenaltyParams{alpha, gamma}; }

    // Canonical serialization of the resolved configuration, plus its 64-bit
    // FNV-1a hash rendered as hex; both feed the CSV header comment.
    std::string canonical() const;
    std::string hash() const;
};

// Merges key=value pairs from the file into cfg; unknown keys are an error.
void load_config_file(const std::string& path, ExperimentConfig& cfg);

std::vector<double> parse_double_list(const std::string& text, const std::string& field);
std::vector<std::string> parse_name_list(const std::string& text);

}  // namespace spider
