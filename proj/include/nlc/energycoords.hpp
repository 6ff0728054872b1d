#pragma once

#include <cstdint>
#include <vector>

#include "nlc/model.hpp"
#include "nlc/vec3.hpp"

namespace nlc {

/// Sampled physical initial data (x, n, n_t, n_x) with |n| = 1 and
/// n.n_t = n.n_x = 0 at every sample.
struct DirectorInitialData {
    std::vector<double> x;  // strictly increasing
    std::vector<Vec3> n;
    std::vector<Vec3> nt;
    std::vector<Vec3> nx;

    void validate() const;  // throws std::invalid_argument on constraint violation
};

/// The image of the line t = 0 in energy coordinates, Y = phi(X), with the
/// Goursat boundary data carried along it. X increases and Y decreases in x.
class BoundaryCurve {
public:
    struct Sample {
        double x;  // source position
        double X, Y;
        Vec3 n, R, S;
    };

    BoundaryCurve() = default;
    BoundaryCurve(std::vector<Sample> samples, double e0);

    const std::vector<Sample>& samples() const { return samples_; }
    double energy0() const { return e0_; }  // (1/4) int |R|^2 + |S|^2, equals E(0)

    double phi(double X) const;       // Y on the curve; slope -1 vacuum continuation outside
    double phi_inverse(double Y) const;

    /// Boundary data where the curve crosses the vertical line at X
    /// (derived fields recomputed from interpolated R, S, n).
    struct Point {
        double x, X, Y;
        Vec3 n, ell, m;
        double h1, h2, p, q;
    };
    Point at_X(double X) const;
    Point at_Y(double Y) const;

private:
    Point from_interp(double x) const;
    std::vector<Sample> samples_;
    double e0_ = 0.0;
};

/// X(x) = int_0^x (1+|R|^2), Y(x) = int_x^0 (1+|S|^2) by cumulative trapezoid;
/// boundary data h1 = 1/(1+|R|^2), ell = R h1, p = q = 1 (and mirrors).
BoundaryCurve forward_transform(const DirectorInitialData& initial, const MaterialParams& params);

enum class NodeStatus : std::uint8_t { outside = 0, boundary = 1, interior = 2, singular = 3 };

/// Rectangular lattice over the region above the boundary curve carrying the
/// twelve unknowns plus integrated (t, x) and diagnostics.
struct EnergyGrid {
    double X0 = 0.0, Y0 = 0.0, step = 0.0;
    int nx = 0, ny = 0;
    double e0 = 0.0;
    double h_floor = 1e-6;

    std::vector<NodeStatus> status;
    std::vector<Vec3> n, ell, m;
    std::vector<double> h1, h2, p, q;
    std::vector<double> t, x;            // filled by integrate_coordinates
    std::vector<double> residual;        // max |conserved-quantity residual| per node
    std::vector<double> route_mismatch;  // |n via Y-family - n via X-family| per node
    std::vector<double> cum_p, cum_q;    // row/column trapezoids of p dX, q dY from the curve

    int idx(int i, int j) const { return j * nx + i; }
    double X(int i) const { return X0 + i * step; }
    double Y(int j) const { return Y0 + j * step; }
    bool computed(int i, int j) const { return status[idx(i, j)] != NodeStatus::outside; }
    bool coords_ready = false;

    double max_residual() const;
    double min_h() const;
};

/// One node's worth of unknowns of the semi-linear system.
struct NodeState {
    Vec3 n, ell, m;
    double h1 = 1.0, h2 = 1.0, p = 1.0, q = 1.0;
};

/// Right sides of the semi-linear system: Y-derivatives of (ell, h1, p, n)
/// and X-derivatives of (m, h2, q, n).
struct NodeRhs {
    Vec3 ell_Y, m_X, n_Y, n_X;
    double h1_Y = 0.0, h2_X = 0.0, p_Y = 0.0, q_X = 0.0;
};
NodeRhs rhs_2_19(const NodeState& node, const MaterialParams& params);

/// Residuals of the conserved quantities:
/// (ell.n, m.n, |n|^2-1, |ell|^2+h1^2-h1, |m|^2+h2^2-h2).
struct InvariantResiduals {
    double ell_dot_n, m_dot_n, unit_n, ell_sphere, m_sphere;
    double max_abs() const;
};
InvariantResiduals invariant_residuals(const NodeState& node);

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Optional window overriding the default |X| <= r, |Y| <= r truncation.
struct SolveWindow {
    double X_lo, X_hi, Y_hi;
};

struct SolveOptions {
    bool project = false;  // renormalize invariants after each cell (off by default)
};

/// March the lattice over the region above the curve by anti-diagonal
/// wavefronts with per-cell trapezoidal closure and Picard iteration.
EnergyGrid solve_region(const BoundaryCurve& curve, const MaterialParams& params,
                        const SolverConfig& config);
EnergyGrid solve_region(const BoundaryCurve& curve, const MaterialParams& params,
                        const SolverConfig& config, const SolveWindow& window,
                        const SolveOptions& opts = {});

}  // namespace nlc
