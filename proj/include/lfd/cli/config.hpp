#pragma once

#include "lfd/equilibrium.hpp"
#include "lfd/integrator.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lfd::cli {

/// Everything a subcommand may read. Sections and keys:
///   [physics]  gamma, eps, eps_over_dagger, rho, E, eps_list
///   [grid]     n, v_max
///   [initial]  preset, theta1, theta2, weight, fraction, width, T
///   [time]     t_end, dt_out, cfl, scheme, max_stages, converged_l12
///   [spectrum] n_coarse, n_fine, v_max
///   [run]      seed
/// eps_over_dagger, when given, wins over eps and is resolved against the thresholds of (rho, E).
struct Config {
    SimulationConfig sim;
    GasMoments moments;
    double eps_over_dagger = -1.0;
    std::vector<double> eps_list = {0.0, 1e-3, 1e-2, 0.1, 1.0};
    int spectrum_coarse = 14;
    int spectrum_fine = 20;
    double spectrum_v_max = 5.0;
    std::uint64_t seed = 20240611;
};

/// Throws ConfigError "origin:line: message" on malformed input.
Config parse_config(std::string_view text, const std::string& origin = "<config>");
Config load_config(const std::string& path);

/// Fills in eps from eps_over_dagger and copies (rho, E) into the initial condition.
void resolve(Config& cfg);

/// Canonical text form of a resolved config; parse_config(render_config(c)) reproduces c.
std::string render_config(const Config& cfg);

std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t x);

} // namespace lfd::cli
