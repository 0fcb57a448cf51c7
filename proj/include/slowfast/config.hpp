#pragma once

#include <cctype>
#include <fstream>
#include <string>
#include <vector>

#include "slowfast/errors.hpp"

namespace slowfast {

/// Run parameters shared by the command-line driver and the sweep engine.
struct RunConfig {
    int n = 256;                 ///< element count of the uniform mesh
    double eps_hi = 0.25;        ///< largest scale (2^-2)
    double eps_lo = 0.0009765625;///< smallest scale (2^-10)
    std::string family = "f1";
    std::string reaction = "cubic";
    unsigned long seed = 12345;  ///< reserved for randomized probes
    std::string out = "out";

    double slope_floor = 0.9;
    int n_quad = 32;             ///< contour quadrature nodes
    int k_modes = 12;            ///< modes kept in the graph transform
    int manifold_grid = 129;
    int attractor_pts = 65;
    double dt = 1e-3;            ///< integrator and quadrature step
    double dt_max = 0.05;
    double newton_tol = 1e-10;
    double manifold_tol = 1e-9;
    double lipschitz_cap = 4.0;

    void validate() const {
        if (n < 8) throw ConfigError("config: mesh needs at least 8 elements");
        if (!(eps_lo > 0.0) || !(eps_hi < 1.0) || !(eps_lo <= eps_hi))
            throw ConfigError("config: eps bounds must satisfy 0 < eps_lo <= eps_hi < 1");
        if (family != "f1" && family != "f2" && family != "const")
            throw ConfigError("config: unknown family '" + family + "'");
        if (reaction != "cubic" && reaction != "linear")
            throw ConfigError("config: unknown reaction '" + reaction + "'");
        if (!(slope_floor > 0.0)) throw ConfigError("config: slope floor must be positive");
        if (n_quad < 4 || n_quad % 2 != 0)
            throw ConfigError("config: contour quadrature count must be even and at least 4");
        if (k_modes < 3) throw ConfigError("config: need at least 3 modes");
        if (manifold_grid < 9) throw ConfigError("config: manifold grid needs at least 9 points");
        if (attractor_pts < 5) throw ConfigError("config: attractor sample needs at least 5 points");
        if (!(dt > 0.0) || !(dt_max >= dt)) throw ConfigError("config: need 0 < dt <= dt_max");
        if (!(newton_tol > 0.0) || !(manifold_tol > 0.0) || !(lipschitz_cap > 0.0))
            throw ConfigError("config: tolerances must be positive");
    }
};

/// Dyadic scale grid eps_hi, eps_hi/2, ... down to eps_lo; at least five
/// entries are required for the rate fits downstream.
inline std::vector<double> epsilon_grid(const RunConfig& cfg) {
    std::vector<double> grid;
    for (double eps = cfg.eps_hi; eps >= cfg.eps_lo * (1.0 - 1e-9); eps *= 0.5)
        grid.push_back(eps);
    if (grid.size() < 5)
        throw ConfigError("config: eps grid from " + std::to_string(cfg.eps_hi) + " to " +
                          std::to_string(cfg.eps_lo) + " has fewer than 5 points");
    return grid;
}

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text);

template <>
inline double parse_number<double>(const std::string& key, const std::string& text) {
    std::size_t pos = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config: invalid number for key '" + key + "': " + text);
    }
    if (pos != text.size())
        throw ConfigError("config: trailing characters for key '" + key + "': " + text);
    return value;
}

template <>
inline int parse_number<int>(const std::string& key, const std::string& text) {
    std::size_t pos = 0;
    int value = 0;
    try {
        value = std::stoi(text, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config: invalid integer for key '" + key + "': " + text);
    }
    if (pos != text.size())
        throw ConfigError("config: trailing characters for key '" + key + "': " + text);
    return value;
}

template <>
inline unsigned long parse_number<unsigned long>(const std::string& key, const std::string& text) {
    std::size_t pos = 0;
    unsigned long value = 0;
    try {
        value = std::stoul(text, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config: invalid integer for key '" + key + "': " + text);
    }
    if (pos != text.size())
        throw ConfigError("config: trailing characters for key '" + key + "': " + text);
    return value;
}

} // namespace detail

/// Applies one key = value assignment to a config; unknown keys are errors.
inline void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
    using detail::parse_number;
    if (key == "n") cfg.n = parse_number<int>(key, value);
    else if (key == "eps_hi") cfg.eps_hi = parse_number<double>(key, value);
    else if (key == "eps_lo") cfg.eps_lo = parse_number<double>(key, value);
    else if (key == "family") cfg.family = value;
    else if (key == "reaction") cfg.reaction = value;
    else if (key == "seed") cfg.seed = parse_number<unsigned long>(key, value);
    else if (key == "out") cfg.out = value;
    else if (key == "slope_floor") cfg.slope_floor = parse_number<double>(key, value);
    else if (key == "n_quad") cfg.n_quad = parse_number<int>(key, value);
    else if (key == "k_modes") cfg.k_modes = parse_number<int>(key, value);
    else if (key == "manifold_grid") cfg.manifold_grid = parse_number<int>(key, value);
    else if (key == "attractor_pts") cfg.attractor_pts = parse_number<int>(key, value);
    else if (key == "dt") cfg.dt = parse_number<double>(key, value);
    else if (key == "dt_max") cfg.dt_max = parse_number<double>(key, value);
    else if (key == "newton_tol") cfg.newton_tol = parse_number<double>(key, value);
    else if (key == "manifold_tol") cfg.manifold_tol = parse_number<double>(key, value);
    else if (key == "lipschitz_cap") cfg.lipschitz_cap = parse_number<double>(key, value);
    else throw ConfigError("config: unknown key '" + key + "'");
}

/// Reads a flat key = value file with '#' comments into a config.
inline RunConfig load_config_file(const std::string& path, RunConfig base = RunConfig{}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string text = detail::trim(line);
        if (text.empty()) continue;
        const std::size_t eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: missing '=' at " + path + ":" + std::to_string(line_no));
        const std::string key = detail::trim(text.substr(0, eq));
        const std::string value = detail::trim(text.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config: empty key or value at " + path + ":" +
                              std::to_string(line_no));
        apply_config_entry(base, key, value);
    }
    return base;
}

} // namespace slowfast
