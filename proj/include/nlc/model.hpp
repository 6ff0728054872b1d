#pragma once

#include <stdexcept>
#include <string>

namespace nlc {

/// Elastic constants and damping of the one-constant (alpha = beta) system.
/// Wave speed: c^2(n1) = alpha + (gamma - alpha) n1^2, planar c^2(u) =
/// gamma cos^2 u + alpha sin^2 u.
struct MaterialParams {
    double alpha = 2.0;
    double gamma = 1.0;
    double mu = 0.0;

    void validate() const;
};

/// Numeric knobs of the energy-coordinate solver.
struct SolverConfig {
    double grid_step = 1e-2;
    double picard_tol = 1e-12;
    int picard_max_iters = 50;
    double h_floor = 1e-6;
    double domain_radius = 3.0;

    void validate() const;
};

struct SpeedBounds {
    double c_lower;  // C_L
    double c_upper;  // C_U
    double c_deriv;  // C_D, bound on |c'(u)|
};

double wave_speed(const MaterialParams& params, double n1);
double wave_speed_planar(const MaterialParams& params, double u);
double speed_derivative_planar(const MaterialParams& params, double u);
SpeedBounds speed_bounds(const MaterialParams& params);

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parse {material, solver} from a JSON object with keys alpha, gamma, mu,
/// grid_step, picard_tol, picard_max_iters, h_floor, domain_radius.
/// Missing keys keep defaults; non-numeric or invalid values throw ConfigError.
struct LoadedConfig {
    MaterialParams material;
    SolverConfig solver;
};
LoadedConfig load_config_json(const std::string& json_text);
LoadedConfig load_config_file(const std::string& path);

}  // namespace nlc
