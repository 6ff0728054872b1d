#pragma once

#include <numbers>
#include <optional>
#include <vector>

#include "nlc/model.hpp"

namespace nlc {

/// Sampled (u, R, S) fields on a fixed uniform grid at one time.
/// R = u_t + c(u) u_x, S = u_t - c(u) u_x.
struct PlanarState {
    double time = 0.0;
    std::vector<double> x;  // strictly increasing, uniform
    std::vector<double> u;
    std::vector<double> R;
    std::vector<double> S;
};

/// Build a state from (u, u_t, u_x) samples.
PlanarState make_planar_state(const MaterialParams& params, std::vector<double> x,
                              const std::vector<double>& u, const std::vector<double>& ut,
                              const std::vector<double>& ux, double time = 0.0);

/// Compactly supported C^1 bump family used for both phi and eta.
struct BlowupProfileSpec {
    double u0 = std::numbers::pi / 4;
    double eps = 1e-2;
    double amplitude = 6.0;  // A
    double skew = 1.0;       // s in (0,1]

    void validate(const MaterialParams& params) const;
};

struct BlowupReport {
    bool blew_up = false;
    std::optional<double> t_star;
    double x_star = 0.0;
    double max_gradient = 0.0;
    double theoretical_bound = 0.0;
};

/// A (1-a^2)^2 (1-s a) for |a| < 1, else 0. C^1, derivative -A s at a = 0,
/// strictly negative derivative on [0,1).
double bump_profile(double A, double s, double a);
double bump_profile_derivative(double A, double s, double a);

/// Initial data of the finite-time blowup family on the given grid.
/// u(0,x) = u0 + eps phi(x/eps) + eps^2 eta(eps^{2/3} x), u_t = (-c+eps) u_x.
PlanarState blowup_initial_data(const MaterialParams& params, const BlowupProfileSpec& spec,
                                const std::vector<double>& x_grid);

/// E(t) = (1/2) int R^2 + S^2 dx by trapezoid.
double planar_energy(const PlanarState& state);

struct EvolveResult {
    PlanarState state;
    bool overflowed = false;  // |R| or |S| exceeded the overflow guard
};

/// One semi-Lagrangian characteristic step of size dt (Heun corrector,
/// monotone cubic interpolation at the characteristic feet).
EvolveResult evolve_planar(const PlanarState& state, const MaterialParams& params, double dt);

/// 16 C_U / (c'(u0) S00), the characteristic-Riccati blowup-time bound.
double blowup_time_bound(const MaterialParams& params, double u0, double S00);

/// Scan a run for the first time max(|R|,|S|) exceeds threshold.
BlowupReport detect_blowup(const std::vector<PlanarState>& run, double threshold,
                           const MaterialParams& params, double u0);

struct PlanarRunOptions {
    double cfl = 0.45;
    double t_max = 10.0;
    double overflow_guard = 1e9;
    double threshold = 0.0;        // 0: default 1e3 x initial max |S|
    int record_stride = 0;         // keep every k-th full state (0: only first/last)
    double growth_halving = 0.10;  // halve dt when max|S| grows by more than this per step
    // When > 0, assert R <= 0, S >= 0 each step inside the characteristic
    // trapezoid between the forward characteristic from x = 0 and the backward
    // characteristic from x = sign_region_right.
    double sign_region_right = 0.0;
    // Lagrangian particles riding S-characteristics. The grid max of |S| is
    // capped by the fixed resolution (the spike width shrinks like 1/S^2), so
    // blowup detection integrates the S equation along tracked characteristics
    // with u and R, which stay bounded, read off the grid. 0 disables.
    int trackers = 64;
};

struct PlanarSample {
    double t;
    double max_abs_R;
    double max_abs_S;
    double energy;
};

struct PlanarRun {
    std::vector<PlanarState> states;  // recorded snapshots (always first and last)
    std::vector<PlanarSample> series;  // max_abs_S includes tracked characteristics
    BlowupReport report;              // theoretical_bound left 0, see blowup_time_bound
    bool sign_structure_ok = true;
    double sign_violation = 0.0;
    double tracked_max_S = 0.0;
};

/// Drive evolve_planar with CFL step control and adaptive halving near blowup.
PlanarRun run_planar(const PlanarState& initial, const MaterialParams& params,
                     const PlanarRunOptions& opts);

}  // namespace nlc
