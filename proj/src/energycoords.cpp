#include "nlc/energycoords.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nlc {

namespace {

// Unclamped speed; Picard iterates can carry n1 a hair beyond 1.
inline double cspeed(const MaterialParams& mp, double n1) {
    return std::sqrt(std::max(mp.alpha + (mp.gamma - mp.alpha) * n1 * n1, 1e-300));
}
inline double cprime(const MaterialParams& mp, double n1, double c) {
    return (mp.gamma - mp.alpha) * n1 / c;
}

}  // namespace

void DirectorInitialData::validate() const {
    const std::size_t N = x.size();
    if (N < 2 || n.size() != N || nt.size() != N || nx.size() != N)
        throw std::invalid_argument("initial data: need >= 2 samples with matching field sizes");
    for (std::size_t i = 0; i < N; ++i) {
        if (i > 0 && !(x[i] > x[i - 1]))
            throw std::invalid_argument("initial data: x not strictly increasing");
        if (!std::isfinite(norm2(nt[i])) || !std::isfinite(norm2(nx[i])))
            throw std::invalid_argument("initial data: non-finite derivative sample");
        if (std::abs(norm(n[i]) - 1.0) > 1e-11)
            throw std::invalid_argument("initial data: |n| != 1 at sample " + std::to_string(i));
        double scale = std::max({1.0, norm(nt[i]), norm(nx[i])});
        if (std::abs(dot(n[i], nt[i])) > 1e-6 * scale || std::abs(dot(n[i], nx[i])) > 1e-6 * scale)
            throw std::invalid_argument("initial data: n not orthogonal to its derivatives at sample " +
                                        std::to_string(i));
    }
}

BoundaryCurve::BoundaryCurve(std::vector<Sample> samples, double e0)
    : samples_(std::move(samples)), e0_(e0) {
    for (std::size_t i = 1; i < samples_.size(); ++i) {
        if (!(samples_[i].X > samples_[i - 1].X) || !(samples_[i].Y < samples_[i - 1].Y))
            throw std::invalid_argument("boundary curve: X must increase and Y decrease in x");
    }
}

double BoundaryCurve::phi(double X) const {
    const auto& s = samples_;
    if (X <= s.front().X) return s.front().Y - (X - s.front().X);
    if (X >= s.back().X) return s.back().Y - (X - s.back().X);
    auto it = std::upper_bound(s.begin(), s.end(), X,
                               [](double v, const Sample& a) { return v < a.X; });
    std::size_t i = std::size_t(it - s.begin()) - 1;
    double t = (X - s[i].X) / (s[i + 1].X - s[i].X);
    return s[i].Y + t * (s[i + 1].Y - s[i].Y);
}

double BoundaryCurve::phi_inverse(double Y) const {
    const auto& s = samples_;
    if (Y >= s.front().Y) return s.front().X - (Y - s.front().Y);
    if (Y <= s.back().Y) return s.back().X - (Y - s.back().Y);
    auto it = std::upper_bound(s.begin(), s.end(), Y,
                               [](double v, const Sample& a) { return v > a.Y; });
    std::size_t i = std::size_t(it - s.begin()) - 1;
    double t = (Y - s[i].Y) / (s[i + 1].Y - s[i].Y);
    return s[i].X + t * (s[i + 1].X - s[i].X);
}

BoundaryCurve::Point BoundaryCurve::from_interp(double xq) const {
    const auto& s = samples_;
    Vec3 n, R, S;
    double X, Y;
    if (xq <= s.front().x) {
        n = s.front().n;
        X = s.front().X + (xq - s.front().x);
        Y = s.front().Y - (xq - s.front().x);
    } else if (xq >= s.back().x) {
        n = s.back().n;
        X = s.back().X + (xq - s.back().x);
        Y = s.back().Y - (xq - s.back().x);
    } else {
        auto it = std::upper_bound(s.begin(), s.end(), xq,
                                   [](double v, const Sample& a) { return v < a.x; });
        std::size_t i = std::size_t(it - s.begin()) - 1;
        double t = (xq - s[i].x) / (s[i + 1].x - s[i].x);
        n = normalized(s[i].n + t * (s[i + 1].n - s[i].n));
        R = s[i].R + t * (s[i + 1].R - s[i].R);
        S = s[i].S + t * (s[i + 1].S - s[i].S);
        X = s[i].X + t * (s[i + 1].X - s[i].X);
        Y = s[i].Y + t * (s[i + 1].Y - s[i].Y);
    }
    // Interpolated R, S drift off the tangent plane of the renormalized n by
    // O(sample spacing^2); project so the derived (ell, m, h) satisfy the
    // conserved quantities exactly.
    R -= dot(R, n) * n;
    S -= dot(S, n) * n;
    Point pt;
    pt.x = xq;
    pt.X = X;
    pt.Y = Y;
    pt.n = n;
    pt.h1 = 1.0 / (1.0 + norm2(R));
    pt.h2 = 1.0 / (1.0 + norm2(S));
    pt.ell = R * pt.h1;
    pt.m = S * pt.h2;
    pt.p = 1.0;
    pt.q = 1.0;
    return pt;
}

BoundaryCurve::Point BoundaryCurve::at_X(double X) const {
    const auto& s = samples_;
    double xq;
    if (X <= s.front().X)
        xq = s.front().x + (X - s.front().X);
    else if (X >= s.back().X)
        xq = s.back().x + (X - s.back().X);
    else {
        auto it = std::upper_bound(s.begin(), s.end(), X,
                                   [](double v, const Sample& a) { return v < a.X; });
        std::size_t i = std::size_t(it - s.begin()) - 1;
        double t = (X - s[i].X) / (s[i + 1].X - s[i].X);
        xq = s[i].x + t * (s[i + 1].x - s[i].x);
    }
    Point pt = from_interp(xq);
    pt.X = X;
    pt.Y = phi(X);
    return pt;
}

BoundaryCurve::Point BoundaryCurve::at_Y(double Y) const {
    const auto& s = samples_;
    double xq;
    if (Y >= s.front().Y)
        xq = s.front().x - (Y - s.front().Y);
    else if (Y <= s.back().Y)
        xq = s.back().x - (Y - s.back().Y);
    else {
        auto it = std::upper_bound(s.begin(), s.end(), Y,
                                   [](double v, const Sample& a) { return v > a.Y; });
        std::size_t i = std::size_t(it - s.begin()) - 1;
        double t = (Y - s[i].Y) / (s[i + 1].Y - s[i].Y);
        xq = s[i].x + t * (s[i + 1].x - s[i].x);
    }
    Point pt = from_interp(xq);
    pt.Y = Y;
    pt.X = phi_inverse(Y);
    return pt;
}

BoundaryCurve forward_transform(const DirectorInitialData& initial, const MaterialParams& params) {
    initial.validate();
    const std::size_t N = initial.x.size();
    if (!(initial.x.front() <= 0.0 && initial.x.back() >= 0.0))
        throw std::invalid_argument("forward_transform: sample range must contain x = 0");

    std::vector<Vec3> R(N), S(N);
    for (std::size_t i = 0; i < N; ++i) {
        double c = cspeed(params, initial.n[i].x);
        R[i] = initial.nt[i] + c * initial.nx[i];
        S[i] = initial.nt[i] - c * initial.nx[i];
        if (!std::isfinite(norm2(R[i])) || !std::isfinite(norm2(S[i])))
            throw std::invalid_argument("forward_transform: non-finite R or S");
    }

    // Cumulative trapezoids from the left end, then re-anchor at x = 0.
    std::vector<double> IX(N, 0.0), IS(N, 0.0);
    double e0 = 0.0;
    for (std::size_t i = 1; i < N; ++i) {
        double dx = initial.x[i] - initial.x[i - 1];
        IX[i] = IX[i - 1] + 0.5 * dx * (2.0 + norm2(R[i - 1]) + norm2(R[i]));
        IS[i] = IS[i - 1] + 0.5 * dx * (2.0 + norm2(S[i - 1]) + norm2(S[i]));
        e0 += 0.125 * dx * (norm2(R[i - 1]) + norm2(S[i - 1]) + norm2(R[i]) + norm2(S[i]));
    }
    auto anchor = [&](const std::vector<double>& I) {
        auto it = std::upper_bound(initial.x.begin(), initial.x.end(), 0.0);
        std::size_t i = std::min<std::size_t>(std::size_t(it - initial.x.begin()), N - 1);
        if (i == 0) return I[0];
        double t = (0.0 - initial.x[i - 1]) / (initial.x[i] - initial.x[i - 1]);
        return I[i - 1] + t * (I[i] - I[i - 1]);
    };
    double ax = anchor(IX), as = anchor(IS);

    std::vector<BoundaryCurve::Sample> samples(N);
    for (std::size_t i = 0; i < N; ++i) {
        samples[i].x = initial.x[i];
        samples[i].X = IX[i] - ax;
        samples[i].Y = -(IS[i] - as);
        samples[i].n = initial.n[i];
        samples[i].R = R[i];
        samples[i].S = S[i];
    }
    return BoundaryCurve(std::move(samples), e0);
}

NodeRhs rhs_2_19(const NodeState& nd, const MaterialParams& mp) {
    const double c = cspeed(mp, nd.n.x);
    const double cd = cprime(mp, nd.n.x, c);
    const double c2 = c * c, c3 = c2 * c;
    const double lm = dot(nd.ell, nd.m);
    const double hh = nd.h1 + nd.h2 - 2.0 * nd.h1 * nd.h2;
    const double mu = mp.mu;

    NodeRhs r;
    for (int k = 0; k < 3; ++k) {
        double kap = (k == 0) ? mp.gamma : mp.alpha;
        double bracket = (c2 - kap) * hh - 2.0 * (3.0 * c2 - kap) * lm;
        r.ell_Y[k] = nd.q / (8.0 * c3) * bracket * nd.n[k] +
                     cd / (4.0 * c2) * nd.ell.x * nd.q * (nd.ell[k] - nd.m[k]) +
                     mu * nd.q / (4.0 * c) *
                         (2.0 * nd.ell[k] * (nd.h2 - nd.h1 * nd.h2 + lm) -
                          nd.ell[k] * nd.h2 - nd.m[k] * nd.h1);
        r.m_X[k] = nd.p / (8.0 * c3) * bracket * nd.n[k] -
                   cd / (4.0 * c2) * nd.m.x * nd.p * (nd.ell[k] - nd.m[k]) +
                   mu * nd.p / (4.0 * c) *
                       (2.0 * nd.m[k] * (nd.h1 - nd.h1 * nd.h2 + lm) -
                        nd.ell[k] * nd.h2 - nd.m[k] * nd.h1);
    }
    r.n_Y = nd.q / (2.0 * c) * nd.m;
    r.n_X = nd.p / (2.0 * c) * nd.ell;
    r.h1_Y = cd / (4.0 * c2) * nd.q * nd.ell.x * (nd.h1 - nd.h2) +
             mu / (2.0 * c) * nd.q * nd.h1 * (nd.h2 - nd.h1 * nd.h2 + lm);
    r.h2_X = cd / (4.0 * c2) * nd.p * nd.m.x * (nd.h2 - nd.h1) +
             mu / (2.0 * c) * nd.p * nd.h2 * (nd.h1 - nd.h1 * nd.h2 + lm);
    r.p_Y = nd.p * nd.q / (2.0 * c) *
            (-cd / (2.0 * c) * (nd.ell.x - nd.m.x) - mu * (nd.h2 - nd.h1 * nd.h2 + lm));
    r.q_X = nd.p * nd.q / (2.0 * c) *
            (cd / (2.0 * c) * (nd.ell.x - nd.m.x) - mu * (nd.h1 - nd.h1 * nd.h2 + lm));
    return r;
}

double InvariantResiduals::max_abs() const {
    return std::max({std::abs(ell_dot_n), std::abs(m_dot_n), std::abs(unit_n),
                     std::abs(ell_sphere), std::abs(m_sphere)});
}

InvariantResiduals invariant_residuals(const NodeState& nd) {
    InvariantResiduals r;
    r.ell_dot_n = dot(nd.ell, nd.n);
    r.m_dot_n = dot(nd.m, nd.n);
    r.unit_n = norm2(nd.n) - 1.0;
    r.ell_sphere = norm2(nd.ell) + nd.h1 * nd.h1 - nd.h1;
    r.m_sphere = norm2(nd.m) + nd.h2 * nd.h2 - nd.h2;
    return r;
}

double EnergyGrid::max_residual() const {
    double r = 0.0;
    for (int k = 0; k < nx * ny; ++k)
        if (status[k] != NodeStatus::outside) r = std::max(r, residual[k]);
    return r;
}

double EnergyGrid::min_h() const {
    double r = 1.0;
    for (int k = 0; k < nx * ny; ++k)
        if (status[k] != NodeStatus::outside) r = std::min({r, h1[k], h2[k]});
    return r;
}

EnergyGrid solve_region(const BoundaryCurve& curve, const MaterialParams& params,
                        const SolverConfig& config) {
    double r = config.domain_radius;
    return solve_region(curve, params, config, SolveWindow{-r, r, r});
}

namespace {

NodeState state_from_point(const BoundaryCurve::Point& pt) {
    NodeState s;
    s.n = pt.n;
    s.ell = pt.ell;
    s.m = pt.m;
    s.h1 = pt.h1;
    s.h2 = pt.h2;
    s.p = pt.p;
    s.q = pt.q;
    return s;
}

void project_invariants(NodeState& s) {
    s.n = normalized(s.n);
    s.ell -= dot(s.ell, s.n) * s.n;
    s.m -= dot(s.m, s.n) * s.n;
    auto rescale = [](Vec3& v, double h) {
        double target = std::max(h * (1.0 - h), 0.0);
        double cur = norm2(v);
        if (cur > 0.0) v *= std::sqrt(target / cur);
    };
    s.h1 = std::clamp(s.h1, 0.0, 1.0);
    s.h2 = std::clamp(s.h2, 0.0, 1.0);
    rescale(s.ell, s.h1);
    rescale(s.m, s.h2);
}

}  // namespace

EnergyGrid solve_region(const BoundaryCurve& curve, const MaterialParams& params,
                        const SolverConfig& config, const SolveWindow& window,
                        const SolveOptions& opts) {
    config.validate();
    params.validate();
    const double d = config.grid_step;

    EnergyGrid g;
    g.step = d;
    g.e0 = curve.energy0();
    g.h_floor = config.h_floor;
    g.X0 = window.X_lo;
    g.nx = int(std::ceil((window.X_hi - window.X_lo) / d)) + 1;

    // Extend left to where the curve reaches Y_hi so every node's dependence
    // triangle down to the curve is gridded; otherwise edge columns would
    // integrate from the curve in a single long (hence low-order) step.
    double X_ext = curve.phi_inverse(window.Y_hi) - d;
    if (X_ext < g.X0) {
        int extra = int(std::ceil((g.X0 - X_ext) / d));
        g.X0 -= extra * d;
        g.nx += extra;
    }

    double phi_min = 0.0;
    for (int i = 0; i < g.nx; ++i) phi_min = std::min(phi_min, curve.phi(g.X0 + i * d));
    g.Y0 = phi_min - d;
    g.ny = int(std::ceil((window.Y_hi - g.Y0) / d)) + 1;

    const int total = g.nx * g.ny;
    g.status.assign(total, NodeStatus::outside);
    g.n.assign(total, Vec3{});
    g.ell.assign(total, Vec3{});
    g.m.assign(total, Vec3{});
    g.h1.assign(total, 1.0);
    g.h2.assign(total, 1.0);
    g.p.assign(total, 1.0);
    g.q.assign(total, 1.0);
    g.t.assign(total, 0.0);
    g.x.assign(total, 0.0);
    g.residual.assign(total, 0.0);
    g.route_mismatch.assign(total, 0.0);
    g.cum_p.assign(total, 0.0);
    g.cum_q.assign(total, 0.0);

    std::vector<double> phi_col(g.nx);
    for (int i = 0; i < g.nx; ++i) phi_col[i] = curve.phi(g.X(i));

    auto node_state = [&](int k) {
        NodeState s;
        s.n = g.n[k]; s.ell = g.ell[k]; s.m = g.m[k];
        s.h1 = g.h1[k]; s.h2 = g.h2[k]; s.p = g.p[k]; s.q = g.q[k];
        return s;
    };

    const double h_tol = d * d;

    // Anti-diagonal wavefronts: every dependency of (i,j) has smaller i+j.
    for (int diag = 0; diag < g.nx + g.ny - 1; ++diag) {
        for (int i = std::max(0, diag - g.ny + 1); i <= std::min(diag, g.nx - 1); ++i) {
            int j = diag - i;
            if (g.Y(j) < phi_col[i]) continue;  // below the curve
            const int k = g.idx(i, j);

            bool y_from_curve = (j == 0) || g.Y(j - 1) < phi_col[i];
            bool x_from_curve = (i == 0) || g.Y(j) < phi_col[i - 1];

            NodeState yp, xp;
            double dY, dX, cum_p0 = 0.0, cum_q0 = 0.0;
            if (y_from_curve) {
                yp = state_from_point(curve.at_X(g.X(i)));
                dY = g.Y(j) - phi_col[i];
            } else {
                yp = node_state(g.idx(i, j - 1));
                dY = d;
                cum_q0 = g.cum_q[g.idx(i, j - 1)];
            }
            if (x_from_curve) {
                xp = state_from_point(curve.at_Y(g.Y(j)));
                dX = g.X(i) - curve.phi_inverse(g.Y(j));
            } else {
                xp = node_state(g.idx(i - 1, j));
                dX = d;
                cum_p0 = g.cum_p[g.idx(i - 1, j)];
            }
            dY = std::max(dY, 0.0);
            dX = std::max(dX, 0.0);

            const NodeRhs fy = rhs_2_19(yp, params);
            const NodeRhs fx = rhs_2_19(xp, params);

            NodeState u;
            u.ell = yp.ell; u.h1 = yp.h1; u.p = yp.p;
            u.m = xp.m; u.h2 = xp.h2; u.q = xp.q;
            u.n = 0.5 * (yp.n + xp.n);

            double mismatch = 0.0;
            bool converged = false;
            for (int it = 0; it < config.picard_max_iters; ++it) {
                const NodeRhs f = rhs_2_19(u, params);
                NodeState v;
                v.ell = yp.ell + 0.5 * dY * (fy.ell_Y + f.ell_Y);
                v.h1 = yp.h1 + 0.5 * dY * (fy.h1_Y + f.h1_Y);
                v.p = yp.p + 0.5 * dY * (fy.p_Y + f.p_Y);
                v.m = xp.m + 0.5 * dX * (fx.m_X + f.m_X);
                v.h2 = xp.h2 + 0.5 * dX * (fx.h2_X + f.h2_X);
                v.q = xp.q + 0.5 * dX * (fx.q_X + f.q_X);
                Vec3 ny = yp.n + 0.5 * dY * (fy.n_Y + f.n_Y);
                Vec3 nx2 = xp.n + 0.5 * dX * (fx.n_X + f.n_X);
                v.n = 0.5 * (ny + nx2);
                mismatch = norm(ny - nx2);

                double delta = std::max({norm(v.ell - u.ell), norm(v.m - u.m), norm(v.n - u.n),
                                         std::abs(v.h1 - u.h1), std::abs(v.h2 - u.h2),
                                         std::abs(v.p - u.p) / std::max(1.0, std::abs(u.p)),
                                         std::abs(v.q - u.q) / std::max(1.0, std::abs(u.q))});
                u = v;
                if (delta < config.picard_tol) { converged = true; break; }
            }
            if (!converged) {
                std::ostringstream ss;
                ss << "solve_region: Picard did not converge at cell (X=" << g.X(i)
                   << ", Y=" << g.Y(j) << ")";
                throw SolverError(ss.str());
            }
            if (!(u.p > 0.0) || !(u.q > 0.0)) {
                std::ostringstream ss;
                ss << "solve_region: nonpositive p or q at (X=" << g.X(i) << ", Y=" << g.Y(j)
                   << "); grid_step too coarse";
                throw SolverError(ss.str());
            }
            for (double* h : {&u.h1, &u.h2}) {
                if (*h < -h_tol || *h > 1.0 + h_tol) {
                    std::ostringstream ss;
                    ss << "solve_region: h out of [0,1] beyond tolerance at (X=" << g.X(i)
                       << ", Y=" << g.Y(j) << "): h=" << *h;
                    throw SolverError(ss.str());
                }
                *h = std::clamp(*h, 0.0, 1.0);
            }
            if (opts.project) project_invariants(u);

            g.n[k] = u.n;
            g.ell[k] = u.ell;
            g.m[k] = u.m;
            g.h1[k] = u.h1;
            g.h2[k] = u.h2;
            g.p[k] = u.p;
            g.q[k] = u.q;
            g.residual[k] = invariant_residuals(u).max_abs();
            g.route_mismatch[k] = mismatch;
            g.cum_p[k] = cum_p0 + 0.5 * dX * (xp.p + u.p);
            g.cum_q[k] = cum_q0 + 0.5 * dY * (yp.q + u.q);

            if (u.h1 < config.h_floor || u.h2 < config.h_floor)
                g.status[k] = NodeStatus::singular;
            else if (y_from_curve || x_from_curve)
                g.status[k] = NodeStatus::boundary;
            else
                g.status[k] = NodeStatus::interior;
        }
    }
    return g;
}

}  // namespace nlc
