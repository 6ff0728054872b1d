#include "nlc/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nlc {

namespace {

inline double cspeed(const MaterialParams& mp, double n1) {
    return std::sqrt(std::max(mp.alpha + (mp.gamma - mp.alpha) * n1 * n1, 1e-300));
}

struct CoordRates {
    double t_X, t_Y, x_X, x_Y;
};

CoordRates coord_rates(double p, double q, double h1, double h2, double c) {
    return {p * h1 / (2.0 * c), q * h2 / (2.0 * c), p * h1 / 2.0, -q * h2 / 2.0};
}

}  // namespace

void integrate_coordinates(EnergyGrid& g, const BoundaryCurve& curve,
                           const MaterialParams& params) {
    const double d = g.step;
    const double mismatch_tol = 100.0 * d * d;

    std::vector<double> phi_col(g.nx);
    for (int i = 0; i < g.nx; ++i) phi_col[i] = curve.phi(g.X(i));

    for (int diag = 0; diag < g.nx + g.ny - 1; ++diag) {
        for (int i = std::max(0, diag - g.ny + 1); i <= std::min(diag, g.nx - 1); ++i) {
            int j = diag - i;
            const int k = g.idx(i, j);
            if (!g.computed(i, j)) continue;

            CoordRates rk = coord_rates(g.p[k], g.q[k], g.h1[k], g.h2[k], cspeed(params, g.n[k].x));

            bool y_from_curve = (j == 0) || g.Y(j - 1) < phi_col[i];
            bool x_from_curve = (i == 0) || g.Y(j) < phi_col[i - 1];

            double tY, xY, tX, xX;
            {
                double t0, x0, dY;
                CoordRates rp;
                if (y_from_curve) {
                    auto pt = curve.at_X(g.X(i));
                    t0 = 0.0;
                    x0 = pt.x;
                    dY = std::max(g.Y(j) - phi_col[i], 0.0);
                    rp = coord_rates(pt.p, pt.q, pt.h1, pt.h2, cspeed(params, pt.n.x));
                } else {
                    int kp = g.idx(i, j - 1);
                    t0 = g.t[kp];
                    x0 = g.x[kp];
                    dY = d;
                    rp = coord_rates(g.p[kp], g.q[kp], g.h1[kp], g.h2[kp],
                                     cspeed(params, g.n[kp].x));
                }
                tY = t0 + 0.5 * dY * (rp.t_Y + rk.t_Y);
                xY = x0 + 0.5 * dY * (rp.x_Y + rk.x_Y);
            }
            {
                double t0, x0, dX;
                CoordRates rp;
                if (x_from_curve) {
                    auto pt = curve.at_Y(g.Y(j));
                    t0 = 0.0;
                    x0 = pt.x;
                    dX = std::max(g.X(i) - curve.phi_inverse(g.Y(j)), 0.0);
                    rp = coord_rates(pt.p, pt.q, pt.h1, pt.h2, cspeed(params, pt.n.x));
                } else {
                    int kp = g.idx(i - 1, j);
                    t0 = g.t[kp];
                    x0 = g.x[kp];
                    dX = d;
                    rp = coord_rates(g.p[kp], g.q[kp], g.h1[kp], g.h2[kp],
                                     cspeed(params, g.n[kp].x));
                }
                tX = t0 + 0.5 * dX * (rp.t_X + rk.t_X);
                xX = x0 + 0.5 * dX * (rp.x_X + rk.x_X);
            }

            double mt = std::abs(tX - tY), mx = std::abs(xX - xY);
            if (mt > mismatch_tol || mx > mismatch_tol) {
                std::ostringstream ss;
                ss << "integrate_coordinates: route mismatch " << std::max(mt, mx) << " > "
                   << mismatch_tol << " at (X=" << g.X(i) << ", Y=" << g.Y(j) << ")";
                throw SolverError(ss.str());
            }
            g.t[k] = 0.5 * (tX + tY);
            g.x[k] = 0.5 * (xX + xY);
        }
    }
    g.coords_ready = true;
}

PhysicalFields physical_fields(const NodeState& node, const MaterialParams& params,
                               double h_floor) {
    PhysicalFields f;
    f.n = node.n;
    f.singular = node.h1 < h_floor || node.h2 < h_floor;
    if (!f.singular) {
        Vec3 R = node.ell / node.h1;
        Vec3 S = node.m / node.h2;
        f.n_t = 0.5 * (R + S);
        f.n_x = (R - S) / (2.0 * cspeed(params, node.n.x));
    }
    return f;
}

TimeRange attainable_times(const EnergyGrid& g) {
    if (!g.coords_ready) throw std::logic_error("attainable_times: coordinates not integrated");
    TimeRange r{1e300, -1e300};
    for (int k = 0; k < g.nx * g.ny; ++k) {
        if (g.status[k] == NodeStatus::outside) continue;
        r.t_min = std::min(r.t_min, g.t[k]);
        r.t_max = std::max(r.t_max, g.t[k]);
    }
    return r;
}

namespace {

struct Crossing {
    double X, Y, x, t;
    NodeState state;
};

NodeState lerp_state(const EnergyGrid& g, int ka, int kb, double th) {
    NodeState s;
    s.n = g.n[ka] + th * (g.n[kb] - g.n[ka]);
    s.ell = g.ell[ka] + th * (g.ell[kb] - g.ell[ka]);
    s.m = g.m[ka] + th * (g.m[kb] - g.m[ka]);
    s.h1 = g.h1[ka] + th * (g.h1[kb] - g.h1[ka]);
    s.h2 = g.h2[ka] + th * (g.h2[kb] - g.h2[ka]);
    s.p = g.p[ka] + th * (g.p[kb] - g.p[ka]);
    s.q = g.q[ka] + th * (g.q[kb] - g.q[ka]);
    return s;
}

std::vector<Crossing> contour_crossings(const EnergyGrid& g, double tau) {
    std::vector<Crossing> out;
    auto try_edge = [&](int ia, int ja, int ib, int jb) {
        if (!g.computed(ia, ja) || !g.computed(ib, jb)) return;
        int ka = g.idx(ia, ja), kb = g.idx(ib, jb);
        double ta = g.t[ka], tb = g.t[kb];
        if (ta == tb) return;
        if ((ta - tau) * (tb - tau) > 0.0) return;
        double th = (tau - ta) / (tb - ta);
        if (th < 0.0 || th > 1.0) return;
        Crossing c;
        c.X = g.X(ia) + th * (g.X(ib) - g.X(ia));
        c.Y = g.Y(ja) + th * (g.Y(jb) - g.Y(ja));
        c.x = g.x[ka] + th * (g.x[kb] - g.x[ka]);
        c.t = tau;
        c.state = lerp_state(g, ka, kb, th);
        out.push_back(std::move(c));
    };
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (i + 1 < g.nx) try_edge(i, j, i + 1, j);
            if (j + 1 < g.ny) try_edge(i, j, i, j + 1);
        }
    // The level curve of a monotone field is a staircase: order by X, then -Y.
    std::sort(out.begin(), out.end(), [](const Crossing& a, const Crossing& b) {
        if (a.X != b.X) return a.X < b.X;
        return a.Y > b.Y;
    });
    // Collapse duplicates where the contour passes exactly through a node.
    std::vector<Crossing> uniq;
    for (auto& c : out) {
        if (!uniq.empty() && std::abs(uniq.back().X - c.X) < 1e-12 &&
            std::abs(uniq.back().Y - c.Y) < 1e-12)
            continue;
        uniq.push_back(std::move(c));
    }
    return uniq;
}

void check_tau(const EnergyGrid& g, double tau) {
    TimeRange r = attainable_times(g);
    if (tau < r.t_min || tau > r.t_max) {
        std::ostringstream ss;
        ss << "tau=" << tau << " outside attainable time span [" << r.t_min << ", " << r.t_max
           << "]";
        throw std::out_of_range(ss.str());
    }
}

}  // namespace

TimeSlice extract_time_slice(const EnergyGrid& g, const MaterialParams& params, double tau) {
    check_tau(g, tau);
    auto crossings = contour_crossings(g, tau);

    TimeSlice slice;
    slice.tau = tau;
    for (const auto& c : crossings) {
        TimeSlice::Point pt;
        pt.x = c.x;
        pt.X = c.X;
        pt.Y = c.Y;
        pt.h1 = c.state.h1;
        pt.h2 = c.state.h2;
        pt.p = c.state.p;
        pt.q = c.state.q;
        PhysicalFields f = physical_fields(c.state, params, g.h_floor);
        pt.n = f.n;
        pt.n_t = f.n_t;
        pt.n_x = f.n_x;
        pt.singular = f.singular;
        slice.points.push_back(pt);
    }
    // Energy 1-form along the contour, oriented with increasing X (=
    // increasing x); crossings are already in that order.
    double e = 0.0;
    for (std::size_t k = 1; k < crossings.size(); ++k) {
        const auto& a = crossings[k - 1];
        const auto& b = crossings[k];
        double fa = a.state.p * (1.0 - a.state.h1), fb = b.state.p * (1.0 - b.state.h1);
        double ga = a.state.q * (1.0 - a.state.h2), gb = b.state.q * (1.0 - b.state.h2);
        e += 0.125 * (fa + fb) * (b.X - a.X) - 0.125 * (ga + gb) * (b.Y - a.Y);
    }
    slice.energy = e;

    std::sort(slice.points.begin(), slice.points.end(),
              [](const TimeSlice::Point& a, const TimeSlice::Point& b) { return a.x < b.x; });
    return slice;
}

double slice_energy(const EnergyGrid& g, const MaterialParams& params, double tau) {
    return extract_time_slice(g, params, tau).energy;
}

namespace {

Vec3 slice_n_at(const TimeSlice& s, double x) {
    const auto& p = s.points;
    if (x <= p.front().x) return p.front().n;
    if (x >= p.back().x) return p.back().n;
    auto it = std::upper_bound(p.begin(), p.end(), x,
                               [](double v, const TimeSlice::Point& a) { return v < a.x; });
    std::size_t i = std::size_t(it - p.begin()) - 1;
    double den = p[i + 1].x - p[i].x;
    if (den <= 0.0) return p[i].n;
    double t = (x - p[i].x) / den;
    return p[i].n + t * (p[i + 1].n - p[i].n);
}

}  // namespace

double l2_distance(const TimeSlice& a, const TimeSlice& b) {
    if (a.points.empty() || b.points.empty())
        throw std::domain_error("l2_distance: empty slice");
    double lo = std::max(a.points.front().x, b.points.front().x);
    double hi = std::min(a.points.back().x, b.points.back().x);
    if (!(hi > lo)) throw std::domain_error("l2_distance: disjoint x ranges");

    std::vector<double> xs;
    for (const auto& p : a.points)
        if (p.x >= lo && p.x <= hi) xs.push_back(p.x);
    for (const auto& p : b.points)
        if (p.x >= lo && p.x <= hi) xs.push_back(p.x);
    xs.push_back(lo);
    xs.push_back(hi);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    double acc = 0.0;
    double prev_x = xs.front();
    double prev_f = norm2(slice_n_at(a, prev_x) - slice_n_at(b, prev_x));
    for (std::size_t i = 1; i < xs.size(); ++i) {
        double f = norm2(slice_n_at(a, xs[i]) - slice_n_at(b, xs[i]));
        acc += 0.5 * (prev_f + f) * (xs[i] - prev_x);
        prev_x = xs[i];
        prev_f = f;
    }
    return std::sqrt(acc);
}

double hoelder_constant(const TimeSlice& slice) {
    const auto& p = slice.points;
    if (p.size() < 2) return 0.0;
    std::size_t stride = std::max<std::size_t>(1, p.size() / 200);
    double H = 0.0;
    for (std::size_t i = 0; i < p.size(); i += stride)
        for (std::size_t j = i + stride; j < p.size(); j += stride) {
            double dx = std::abs(p[j].x - p[i].x);
            if (dx < 1e-12) continue;
            H = std::max(H, norm(p[j].n - p[i].n) / std::sqrt(dx));
        }
    return H;
}

}  // namespace nlc
