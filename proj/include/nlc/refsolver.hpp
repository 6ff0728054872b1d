#pragma once

#include <span>
#include <vector>

#include "nlc/energycoords.hpp"
#include "nlc/model.hpp"
#include "nlc/vec3.hpp"

namespace nlc {

/// Snapshot of the finite-difference solver on a uniform x grid. Planar runs
/// fill (u, u_t); director runs fill (n, n_t).
struct FDState {
    double time = 0.0;
    double x0 = 0.0, dx = 0.0;
    std::vector<double> u, u_t;
    std::vector<Vec3> n, n_t;

    double x(std::size_t i) const { return x0 + double(i) * dx; }
    std::size_t size() const { return u.empty() ? n.size() : u.size(); }
};

struct FDOptions {
    double cfl = 0.45;
    double gradient_guard = 1e3;  // abort when max gradient exceeds this times initial
    double pad_margin = 0.5;      // extra padding beyond the propagation cone C_U * T
};

struct FDRun {
    std::vector<FDState> states;  // at the requested output times, in order
    std::vector<double> energy;   // discrete (1/2) sum (|u_t|^2 + c^2 |u_x|^2) dx per state
    bool aborted = false;         // gradient guard tripped before the last requested time
    double last_valid_time = 0.0;
    double max_renorm_correction = 0.0;  // director mode only
};

/// Leapfrog for u_tt + mu u_t = c (c u_x)_x with second-order centered space
/// and time-centered damping. The domain is padded so the propagation cone
/// stays clear of the edges over the run.
FDRun fd_solve_planar(std::span<const double> x, std::span<const double> u,
                      std::span<const double> ut, const MaterialParams& params,
                      std::span<const double> out_times, double dx, const FDOptions& opts = {});

/// Leapfrog on all three director components with flux-form c^2 n_x terms and
/// the pointwise quadratic sources, renormalized to the unit sphere each step.
/// Throws when a per-step renormalization correction exceeds dx^2.
FDRun fd_solve_director(const DirectorInitialData& initial, const MaterialParams& params,
                        std::span<const double> out_times, double dx, const FDOptions& opts = {});

struct CompareReport {
    struct Row {
        double time, linf, l2;
    };
    std::vector<Row> rows;
    double max_linf() const;
    double max_l2() const;
};

/// Pointwise and L2 differences over the overlap of two runs at each requested
/// time, interpolating between the two grids.
CompareReport compare_runs(const FDRun& a, const FDRun& b, std::span<const double> times);

struct FieldDiff {
    double linf = 0.0, l2 = 0.0;
};
FieldDiff compare_scalar(std::span<const double> xa, std::span<const double> ua,
                         std::span<const double> xb, std::span<const double> ub);
FieldDiff compare_vec3(std::span<const double> xa, std::span<const Vec3> na,
                       std::span<const double> xb, std::span<const Vec3> nb);

}  // namespace nlc
