#include "spider/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "spider/csv.hpp"

namespace spider {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& text, const std::string& field) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (...) {
        throw ConfigError(field, field + ": not a number: '" + text + "'");
    }
}

std::uint64_t parse_u64(const std::string& text, const std::string& field) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (...) {
        throw ConfigError(field, field + ": not a nonnegative integer: '" + text + "'");
    }
}

}  // namespace

std::vector<double> parse_double_list(const std::string& text, const std::string& field) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(item, field));
    }
    if (out.empty()) throw ConfigError(field, field + ": empty list");
    return out;
}

std::vector<std::string> parse_name_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void ExperimentConfig::validate() const {
    if (rays.empty()) throw ConfigError("rays", "rays: at least one ray required");
    if (mu.size() != rays.size())
        throw ConfigError("mu", "mu: expected one weight per ray");
    double total = 0.0;
    for (double w : mu) {
        if (!(w > 0.0)) throw ConfigError("mu", "mu: weights must be strictly positive");
        total += w;
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw ConfigError("mu", "mu: weights must sum to 1");
    if (alpha.size() != rays.size())
        throw ConfigError("alpha", "alpha: expected one coefficient per ray");
    for (double a : alpha)
        if (!std::isfinite(a)) throw ConfigError("alpha", "alpha: must be finite");
    if (!std::isfinite(gamma)) throw ConfigError("gamma", "gamma: must be finite");
    if (!(t > 0.0)) throw ConfigError("t", "t: must be positive");
    for (double tg : t_grid)
        if (!(tg >= s)) throw ConfigError("t_grid", "t_grid: entries must be >= s");
    if (!(s > 0.0)) throw ConfigError("s", "s: must be positive");
    if (!(x0 >= 0.0)) throw ConfigError("x0", "x0: must be nonnegative");
    if (start_ray < 0 || start_ray >= static_cast<int>(rays.size()))
        throw ConfigError("start_ray", "start_ray: unknown ray index");
    if (steps == 0) throw ConfigError("steps", "steps: must be positive");
    if (n_paths == 0) throw ConfigError("n_paths", "n_paths: must be positive");
    if (out.empty()) throw ConfigError("out", "out: output path required");
}

std::string ExperimentConfig::canonical() const {
    std::ostringstream os;
    auto list = [&](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i)
            s += (i ? "," : "") + format_double(v[i]);
        return s;
    };
    std::string names;
    for (std::size_t i = 0; i < rays.size(); ++i) names += (i ? "," : "") + rays[i];
    os << "alpha=" << list(alpha) << "\ngamma=" << format_double(gamma)
       << "\nmu=" << list(mu) << "\nn_paths=" << n_paths << "\nrays=" << names
       << "\ns=" << format_double(s) << "\nseed=" << seed
       << "\nstart_ray=" << start_ray << "\nsteps=" << steps
       << "\nsuite=" << suite << "\nt=" << format_double(t)
       << "\nt_grid=" << list(t_grid) << "\nx0=" << format_double(x0) << "\n";
    return os.str();
}

std::string ExperimentConfig::hash() const {
    const std::string c = canonical();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : c) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void load_config_file(const std::string& path, ExperimentConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "config: cannot read '" + path + "'");
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config", "config: line " + std::to_string(lineno) +
                                            ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "rays") cfg.rays = parse_name_list(value);
        else if (key == "mu") cfg.mu = parse_double_list(value, "mu");
        else if (key == "alpha") cfg.alpha = parse_double_list(value, "alpha");
        else if (key == "gamma") cfg.gamma = parse_double(value, "gamma");
        else if (key == "t") cfg.t = parse_double(value, "t");
        else if (key == "t_grid") cfg.t_grid = parse_double_list(value, "t_grid");
        else if (key == "s") cfg.s = parse_double(value, "s");
        else if (key == "x0") cfg.x0 = parse_double(value, "x0");
        else if (key == "start_ray")
            cfg.start_ray = static_cast<int>(parse_u64(value, "start_ray"));
        else if (key == "steps") cfg.steps = parse_u64(value, "steps");
        else if (key == "n_paths") cfg.n_paths = parse_u64(value, "n_paths");
        else if (key == "seed") cfg.seed = parse_u64(value, "seed");
        else if (key == "threads")
            cfg.threads = static_cast<unsigned>(parse_u64(value, "threads"));
        else if (key == "out") cfg.out = value;
        else if (key == "suite") cfg.suite = value;
        else throw ConfigError(key, key + ": unknown configuration key");
    }
}

}  // namespace spider
