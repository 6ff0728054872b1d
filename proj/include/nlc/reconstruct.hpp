#pragma once

#include <vector>

#include "nlc/energycoords.hpp"

namespace nlc {

/// Reconstructed physical fields along a level set t(X,Y) = tau.
struct TimeSlice {
    struct Point {
        double x;
        Vec3 n;
        Vec3 n_t, n_x;   // meaningless when singular
        bool singular = false;
        double h1 = 1.0, h2 = 1.0, p = 1.0, q = 1.0;
        double X = 0.0, Y = 0.0;
    };
    double tau = 0.0;
    std::vector<Point> points;  // sorted by x
    double energy = 0.0;        // line integral of the energy 1-form
};

/// Fill t, x by trapezoidal path integration of t_X = p h1/(2c),
/// t_Y = q h2/(2c), x_X = p h1/2, x_Y = -q h2/2 from the boundary curve.
/// X-path and Y-path values are averaged; a mismatch above 100 step^2 throws.
void integrate_coordinates(EnergyGrid& grid, const BoundaryCurve& curve,
                           const MaterialParams& params);

/// Physical derivatives at a node: n_t = ell/(2h1) + m/(2h2),
/// n_x = (ell/h1 - m/h2)/(2c). Singular when h1 or h2 < h_floor.
struct PhysicalFields {
    Vec3 n, n_t, n_x;
    bool singular = false;
};
PhysicalFields physical_fields(const NodeState& node, const MaterialParams& params,
                               double h_floor);

/// Contour the monotone field t(X,Y) = tau by per-cell edge crossings.
TimeSlice extract_time_slice(const EnergyGrid& grid, const MaterialParams& params, double tau);

/// Line integral of p(1-h1)/4 dX - q(1-h2)/4 dY along the tau level set.
double slice_energy(const EnergyGrid& grid, const MaterialParams& params, double tau);

/// L2 norm of the component-wise director difference over the common x range.
double l2_distance(const TimeSlice& a, const TimeSlice& b);

/// Empirical Hoelder-1/2 constant: max over sampled point pairs of
/// |n(x1)-n(x2)| / sqrt(|x1-x2|).
double hoelder_constant(const TimeSlice& slice);

/// Attainable [t_min, t_max] over computed nodes.
struct TimeRange {
    double t_min, t_max;
};
TimeRange attainable_times(const EnergyGrid& grid);

}  // namespace nlc
