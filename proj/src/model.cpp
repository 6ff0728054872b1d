#include "nlc/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace nlc {

void MaterialParams::validate() const {
    if (!(alpha > 0.0)) throw ConfigError("alpha must be > 0");
    if (!(gamma > 0.0)) throw ConfigError("gamma must be > 0");
    if (!(mu >= 0.0)) throw ConfigError("mu must be >= 0");
}

void SolverConfig::validate() const {
    if (!(grid_step > 0.0)) throw ConfigError("grid_step must be > 0");
    if (!(picard_tol > 0.0)) throw ConfigError("picard_tol must be > 0");
    if (picard_max_iters < 1) throw ConfigError("picard_max_iters must be >= 1");
    if (!(h_floor > 0.0 && h_floor < 1.0)) throw ConfigError("h_floor must be in (0,1)");
    if (!(domain_radius > 0.0)) throw ConfigError("domain_radius must be > 0");
}

double wave_speed(const MaterialParams& params, double n1) {
    constexpr double kTol = 1e-9;
    if (std::abs(n1) > 1.0 + kTol)
        throw std::domain_error("wave_speed: |n1| > 1, unit-vector constraint violated upstream");
    n1 = std::clamp(n1, -1.0, 1.0);
    return std::sqrt(params.alpha + (params.gamma - params.alpha) * n1 * n1);
}

double wave_speed_planar(const MaterialParams& params, double u) {
    double cu = std::cos(u), su = std::sin(u);
    return std::sqrt(params.gamma * cu * cu + params.alpha * su * su);
}

double speed_derivative_planar(const MaterialParams& params, double u) {
    return (params.alpha - params.gamma) * std::sin(u) * std::cos(u) /
           wave_speed_planar(params, u);
}

SpeedBounds speed_bounds(const MaterialParams& params) {
    SpeedBounds b;
    b.c_lower = std::sqrt(std::min(params.alpha, params.gamma));
    b.c_upper = std::sqrt(std::max(params.alpha, params.gamma));
    // Dense scan for max |c'|, capped by the closed-form ceiling |alpha-gamma|/(2 C_L).
    const int kSamples = 100000;
    double cd = 0.0;
    for (int i = 0; i <= kSamples; ++i) {
        double u = 2.0 * M_PI * i / kSamples;
        cd = std::max(cd, std::abs(speed_derivative_planar(params, u)));
    }
    b.c_deriv = std::min(cd, std::abs(params.alpha - params.gamma) / (2.0 * b.c_lower));
    return b;
}

namespace {

double get_num(const nlohmann::json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw ConfigError(std::string("config key '") + key + "' must be numeric");
    return j.at(key).get<double>();
}

}  // namespace

LoadedConfig load_config_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    LoadedConfig cfg;
    cfg.material.alpha = get_num(j, "alpha", cfg.material.alpha);
    cfg.material.gamma = get_num(j, "gamma", cfg.material.gamma);
    cfg.material.mu = get_num(j, "mu", cfg.material.mu);
    cfg.solver.grid_step = get_num(j, "grid_step", cfg.solver.grid_step);
    cfg.solver.picard_tol = get_num(j, "picard_tol", cfg.solver.picard_tol);
    if (j.contains("picard_max_iters")) {
        if (!j.at("picard_max_iters").is_number_integer())
            throw ConfigError("config key 'picard_max_iters' must be an integer");
        cfg.solver.picard_max_iters = j.at("picard_max_iters").get<int>();
    }
    cfg.solver.h_floor = get_num(j, "h_floor", cfg.solver.h_floor);
    cfg.solver.domain_radius = get_num(j, "domain_radius", cfg.solver.domain_radius);
    cfg.material.validate();
    cfg.solver.validate();
    return cfg;
}

LoadedConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_config_json(ss.str());
}

}  // namespace nlc
