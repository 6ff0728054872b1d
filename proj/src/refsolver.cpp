#include "nlc/refsolver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nlc/interp.hpp"

namespace nlc {

namespace {

double max_out_time(std::span<const double> out_times) {
    double T = 0.0;
    for (double t : out_times) {
        if (t < 0.0) throw std::invalid_argument("output times must be non-negative");
        T = std::max(T, t);
    }
    return T;
}

struct Lattice {
    double x0, dx;
    std::size_t n;
};

Lattice padded_lattice(double xmin, double xmax, double dx, double T,
                       const MaterialParams& params, const FDOptions& opts) {
    if (dx <= 0.0) throw std::invalid_argument("dx must be positive");
    double pad = speed_bounds(params).c_upper * T + opts.pad_margin + dx;
    double lo = xmin - pad, hi = xmax + pad;
    std::size_t n = std::size_t(std::ceil((hi - lo) / dx)) + 1;
    return {lo, dx, n};
}

}  // namespace

double CompareReport::max_linf() const {
    double m = 0.0;
    for (const auto& r : rows) m = std::max(m, r.linf);
    return m;
}

double CompareReport::max_l2() const {
    double m = 0.0;
    for (const auto& r : rows) m = std::max(m, r.l2);
    return m;
}

FDRun fd_solve_planar(std::span<const double> x, std::span<const double> u,
                      std::span<const double> ut, const MaterialParams& params,
                      std::span<const double> out_times, double dx, const FDOptions& opts) {
    if (x.size() < 2 || x.size() != u.size() || x.size() != ut.size())
        throw std::invalid_argument("fd_solve_planar: mismatched or too-short input arrays");
    const double T = max_out_time(out_times);
    Lattice lat = padded_lattice(x.front(), x.back(), dx, T, params, opts);
    const std::size_t N = lat.n;
    const double mu = params.mu;
    const double dt = opts.cfl * dx / speed_bounds(params).c_upper;

    std::vector<double> um(N), uc(N), un(N), utm(N), utc(N);
    for (std::size_t i = 0; i < N; ++i) {
        um[i] = lerp_tabulated(x, u, lat.x0 + double(i) * dx);
        utm[i] = lerp_tabulated(x, ut, lat.x0 + double(i) * dx);
    }
    // Edge nodes are pinned; watch their neighbors to detect the cone arriving.
    const double edge_lo = um[1], edge_hi = um[N - 2];

    auto cplanar = [&](double v) { return wave_speed_planar(params, v); };
    auto flux = [&](const std::vector<double>& w, std::size_t i) {
        double cr = cplanar(0.5 * (w[i] + w[i + 1]));
        double cl = cplanar(0.5 * (w[i] + w[i - 1]));
        return cplanar(w[i]) * (cr * (w[i + 1] - w[i]) - cl * (w[i] - w[i - 1])) / (dx * dx);
    };

    double g0 = 0.0;
    for (std::size_t i = 0; i + 1 < N; ++i) g0 = std::max(g0, std::abs(um[i + 1] - um[i]) / dx);
    const double guard = opts.gradient_guard * std::max(g0, 1.0);

    // Taylor bootstrap for the first step.
    uc = um;
    for (std::size_t i = 1; i + 1 < N; ++i)
        uc[i] = um[i] + dt * utm[i] + 0.5 * dt * dt * (flux(um, i) - mu * utm[i]);

    FDRun run;
    std::vector<double> taus(out_times.begin(), out_times.end());
    std::sort(taus.begin(), taus.end());
    std::size_t next_tau = 0;

    auto energy_of = [&](const std::vector<double>& w, const std::vector<double>& wt) {
        double e = 0.0;
        for (std::size_t i = 0; i + 1 < N; ++i) {
            double wx = (w[i + 1] - w[i]) / dx;
            double c = cplanar(0.5 * (w[i] + w[i + 1]));
            double wtm2 = 0.5 * (wt[i] * wt[i] + wt[i + 1] * wt[i + 1]);
            e += 0.5 * dx * (wtm2 + c * c * wx * wx);
        }
        return e;
    };
    auto record = [&](double tau, double t_lo, const std::vector<double>& wlo,
                      const std::vector<double>& wtlo, const std::vector<double>& whi,
                      const std::vector<double>& wthi) {
        double th = std::clamp((tau - t_lo) / dt, 0.0, 1.0);
        FDState st;
        st.time = tau;
        st.x0 = lat.x0;
        st.dx = dx;
        st.u.resize(N);
        st.u_t.resize(N);
        for (std::size_t i = 0; i < N; ++i) {
            st.u[i] = wlo[i] + th * (whi[i] - wlo[i]);
            st.u_t[i] = wtlo[i] + th * (wthi[i] - wtlo[i]);
        }
        run.energy.push_back(energy_of(st.u, st.u_t));
        run.states.push_back(std::move(st));
    };

    const double a_plus = 1.0 / (dt * dt) + 0.5 * mu / dt;
    const double a_minus = 1.0 / (dt * dt) - 0.5 * mu / dt;

    double t_prev = 0.0;  // time of um
    for (;;) {
        double g = 0.0;
        for (std::size_t i = 0; i + 1 < N; ++i) g = std::max(g, std::abs(uc[i + 1] - uc[i]) / dx);
        if (g > guard || !std::isfinite(g)) {
            run.aborted = true;
            run.last_valid_time = t_prev;
            return run;
        }

        un.front() = uc.front();
        un.back() = uc.back();
        for (std::size_t i = 1; i + 1 < N; ++i)
            un[i] = (flux(uc, i) + 2.0 * uc[i] / (dt * dt) - a_minus * um[i]) / a_plus;
        for (std::size_t i = 0; i < N; ++i) utc[i] = (un[i] - um[i]) / (2.0 * dt);

        while (next_tau < taus.size() && taus[next_tau] <= t_prev + dt + 1e-12) {
            record(taus[next_tau], t_prev, um, utm, uc, utc);
            ++next_tau;
        }
        if (next_tau >= taus.size()) break;

        um.swap(uc);
        uc.swap(un);
        utm.swap(utc);
        t_prev += dt;
    }
    run.last_valid_time = t_prev + dt;

    if (std::abs(uc[1] - edge_lo) > 1e-9 || std::abs(uc[N - 2] - edge_hi) > 1e-9)
        throw SolverError("fd_solve_planar: propagation cone reached the padded boundary");
    return run;
}

FDRun fd_solve_director(const DirectorInitialData& initial, const MaterialParams& params,
                        std::span<const double> out_times, double dx, const FDOptions& opts) {
    initial.validate();
    const double T = max_out_time(out_times);
    Lattice lat = padded_lattice(initial.x.front(), initial.x.back(), dx, T, params, opts);
    const std::size_t N = lat.n;
    const double mu = params.mu;
    const double dt = opts.cfl * dx / speed_bounds(params).c_upper;
    const double kappa[3] = {params.gamma, params.alpha, params.alpha};

    std::vector<Vec3> nm(N), nc(N), nn(N), ntm(N), ntc(N);
    {
        std::vector<double> comp(initial.x.size());
        auto fill = [&](std::vector<Vec3>& dst, const std::vector<Vec3>& src) {
            for (int k = 0; k < 3; ++k) {
                for (std::size_t r = 0; r < src.size(); ++r) comp[r] = src[r][k];
                for (std::size_t i = 0; i < N; ++i)
                    dst[i][k] = lerp_tabulated(initial.x, comp, lat.x0 + double(i) * dx);
            }
        };
        fill(nm, initial.n);
        fill(ntm, initial.nt);
        for (auto& v : nm) v = normalized(v);
    }
    const Vec3 edge_lo = nm[1], edge_hi = nm[N - 2];

    auto c2_of = [&](double n1) { return params.alpha + (params.gamma - params.alpha) * n1 * n1; };
    auto step_body = [&](const std::vector<Vec3>& w, const std::vector<Vec3>& wm,
                         const std::vector<Vec3>& wt, std::vector<Vec3>& out) {
        const double ap = 1.0 / (dt * dt) + 0.5 * mu / dt;
        const double am = 1.0 / (dt * dt) - 0.5 * mu / dt;
        out.front() = w.front();
        out.back() = w.back();
        for (std::size_t i = 1; i + 1 < N; ++i) {
            double c2r = c2_of(0.5 * (w[i].x + w[i + 1].x));
            double c2l = c2_of(0.5 * (w[i].x + w[i - 1].x));
            Vec3 flux = (c2r * (w[i + 1] - w[i]) - c2l * (w[i] - w[i - 1])) / (dx * dx);
            Vec3 wx = (w[i + 1] - w[i - 1]) / (2.0 * dx);
            double c2 = c2_of(w[i].x);
            double nt2 = norm2(wt[i]), nx2 = norm2(wx);
            Vec3 src{(-nt2 + (2.0 * c2 - kappa[0]) * nx2) * w[i].x,
                     (-nt2 + (2.0 * c2 - kappa[1]) * nx2) * w[i].y,
                     (-nt2 + (2.0 * c2 - kappa[2]) * nx2) * w[i].z};
            out[i] = (flux + src + (2.0 / (dt * dt)) * w[i] - am * wm[i]) / ap;
        }
    };

    double g0 = 0.0;
    for (std::size_t i = 0; i + 1 < N; ++i) g0 = std::max(g0, norm(nm[i + 1] - nm[i]) / dx);
    const double guard = opts.gradient_guard * std::max(g0, 1.0);

    // Taylor bootstrap for the first step.
    nc = nm;
    {
        for (std::size_t i = 1; i + 1 < N; ++i) {
            double c2r = c2_of(0.5 * (nm[i].x + nm[i + 1].x));
            double c2l = c2_of(0.5 * (nm[i].x + nm[i - 1].x));
            Vec3 flux = (c2r * (nm[i + 1] - nm[i]) - c2l * (nm[i] - nm[i - 1])) / (dx * dx);
            Vec3 wx = (nm[i + 1] - nm[i - 1]) / (2.0 * dx);
            double c2 = c2_of(nm[i].x);
            double nt2 = norm2(ntm[i]), nx2 = norm2(wx);
            Vec3 src{(-nt2 + (2.0 * c2 - kappa[0]) * nx2) * nm[i].x,
                     (-nt2 + (2.0 * c2 - kappa[1]) * nx2) * nm[i].y,
                     (-nt2 + (2.0 * c2 - kappa[2]) * nx2) * nm[i].z};
            nc[i] = nm[i] + dt * ntm[i] + 0.5 * dt * dt * (flux + src - mu * ntm[i]);
        }
        for (auto& v : nc) v = normalized(v);
    }

    FDRun run;
    std::vector<double> taus(out_times.begin(), out_times.end());
    std::sort(taus.begin(), taus.end());
    std::size_t next_tau = 0;

    auto energy_of = [&](const std::vector<Vec3>& w, const std::vector<Vec3>& wt) {
        double e = 0.0;
        for (std::size_t i = 0; i + 1 < N; ++i) {
            Vec3 wx = (w[i + 1] - w[i]) / dx;
            double c2 = c2_of(0.5 * (w[i].x + w[i + 1].x));
            double wt2 = 0.5 * (norm2(wt[i]) + norm2(wt[i + 1]));
            e += 0.5 * dx * (wt2 + c2 * norm2(wx));
        }
        return e;
    };
    auto record = [&](double tau, double t_lo, const std::vector<Vec3>& wlo,
                      const std::vector<Vec3>& wtlo, const std::vector<Vec3>& whi,
                      const std::vector<Vec3>& wthi) {
        double th = std::clamp((tau - t_lo) / dt, 0.0, 1.0);
        FDState st;
        st.time = tau;
        st.x0 = lat.x0;
        st.dx = dx;
        st.n.resize(N);
        st.n_t.resize(N);
        for (std::size_t i = 0; i < N; ++i) {
            st.n[i] = normalized(wlo[i] + th * (whi[i] - wlo[i]));
            st.n_t[i] = wtlo[i] + th * (wthi[i] - wtlo[i]);
        }
        run.energy.push_back(energy_of(st.n, st.n_t));
        run.states.push_back(std::move(st));
    };

    std::vector<Vec3> guess(N);
    double t_prev = 0.0;
    for (;;) {
        double g = 0.0;
        for (std::size_t i = 0; i + 1 < N; ++i) g = std::max(g, norm(nc[i + 1] - nc[i]) / dx);
        if (g > guard || !std::isfinite(g)) {
            run.aborted = true;
            run.last_valid_time = t_prev;
            return run;
        }

        // Pass 1 with a one-sided n_t guess, pass 2 with the centered estimate.
        for (std::size_t i = 0; i < N; ++i) guess[i] = (nc[i] - nm[i]) / dt;
        step_body(nc, nm, guess, nn);
        for (std::size_t i = 0; i < N; ++i) guess[i] = (nn[i] - nm[i]) / (2.0 * dt);
        step_body(nc, nm, guess, nn);

        double corr = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            double r = norm(nn[i]);
            corr = std::max(corr, std::abs(r - 1.0));
            nn[i] = nn[i] / r;
        }
        run.max_renorm_correction = std::max(run.max_renorm_correction, corr);
        if (corr > dx * dx) {
            std::ostringstream ss;
            ss << "fd_solve_director: renormalization correction " << corr << " exceeds dx^2 at t="
               << t_prev + dt;
            throw SolverError(ss.str());
        }
        for (std::size_t i = 0; i < N; ++i) ntc[i] = (nn[i] - nm[i]) / (2.0 * dt);

        while (next_tau < taus.size() && taus[next_tau] <= t_prev + dt + 1e-12) {
            record(taus[next_tau], t_prev, nm, ntm, nc, ntc);
            ++next_tau;
        }
        if (next_tau >= taus.size()) break;

        nm.swap(nc);
        nc.swap(nn);
        ntm.swap(ntc);
        t_prev += dt;
    }
    run.last_valid_time = t_prev + dt;

    if (norm(nc[1] - edge_lo) > 1e-9 || norm(nc[N - 2] - edge_hi) > 1e-9)
        throw SolverError("fd_solve_director: propagation cone reached the padded boundary");
    return run;
}

namespace {

struct Overlap {
    double lo, hi, h;
};

Overlap overlap_of(double alo, double ahi, double ha, double blo, double bhi, double hb) {
    double lo = std::max(alo, blo), hi = std::min(ahi, bhi);
    if (!(hi > lo)) throw std::domain_error("compare: empty domain overlap");
    return {lo, hi, std::min(ha, hb)};
}

}  // namespace

FieldDiff compare_scalar(std::span<const double> xa, std::span<const double> ua,
                         std::span<const double> xb, std::span<const double> ub) {
    double ha = (xa.back() - xa.front()) / double(xa.size() - 1);
    double hb = (xb.back() - xb.front()) / double(xb.size() - 1);
    Overlap ov = overlap_of(xa.front(), xa.back(), ha, xb.front(), xb.back(), hb);
    std::size_t m = std::size_t((ov.hi - ov.lo) / ov.h) + 1;
    FieldDiff d;
    double acc = 0.0, prev = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        double xx = ov.lo + double(k) * ov.h;
        double e = lerp_tabulated(xa, ua, xx) - lerp_tabulated(xb, ub, xx);
        d.linf = std::max(d.linf, std::abs(e));
        if (k > 0) acc += 0.5 * ov.h * (prev * prev + e * e);
        prev = e;
    }
    d.l2 = std::sqrt(acc);
    return d;
}

FieldDiff compare_vec3(std::span<const double> xa, std::span<const Vec3> na,
                       std::span<const double> xb, std::span<const Vec3> nb) {
    double ha = (xa.back() - xa.front()) / double(xa.size() - 1);
    double hb = (xb.back() - xb.front()) / double(xb.size() - 1);
    Overlap ov = overlap_of(xa.front(), xa.back(), ha, xb.front(), xb.back(), hb);
    std::size_t m = std::size_t((ov.hi - ov.lo) / ov.h) + 1;

    std::vector<double> ca(na.size()), cb(nb.size());
    FieldDiff d;
    double acc = 0.0;
    std::vector<double> err2(m, 0.0);
    for (int comp = 0; comp < 3; ++comp) {
        for (std::size_t i = 0; i < na.size(); ++i) ca[i] = na[i][comp];
        for (std::size_t i = 0; i < nb.size(); ++i) cb[i] = nb[i][comp];
        for (std::size_t k = 0; k < m; ++k) {
            double xx = ov.lo + double(k) * ov.h;
            double e = lerp_tabulated(xa, ca, xx) - lerp_tabulated(xb, cb, xx);
            d.linf = std::max(d.linf, std::abs(e));
            err2[k] += e * e;
        }
    }
    for (std::size_t k = 1; k < m; ++k) acc += 0.5 * ov.h * (err2[k - 1] + err2[k]);
    d.l2 = std::sqrt(acc);
    return d;
}

CompareReport compare_runs(const FDRun& a, const FDRun& b, std::span<const double> times) {
    if (a.states.empty() || b.states.empty())
        throw std::domain_error("compare_runs: empty time series");
    auto nearest = [](const FDRun& r, double t) -> const FDState& {
        const FDState* best = &r.states.front();
        for (const auto& s : r.states)
            if (std::abs(s.time - t) < std::abs(best->time - t)) best = &s;
        return *best;
    };
    CompareReport rep;
    for (double t : times) {
        const FDState& sa = nearest(a, t);
        const FDState& sb = nearest(b, t);
        std::vector<double> xa(sa.size()), xb(sb.size());
        for (std::size_t i = 0; i < sa.size(); ++i) xa[i] = sa.x(i);
        for (std::size_t i = 0; i < sb.size(); ++i) xb[i] = sb.x(i);
        FieldDiff d;
        if (!sa.u.empty() && !sb.u.empty())
            d = compare_scalar(xa, sa.u, xb, sb.u);
        else if (!sa.n.empty() && !sb.n.empty())
            d = compare_vec3(xa, sa.n, xb, sb.n);
        else
            throw std::domain_error("compare_runs: mismatched run modes");
        rep.rows.push_back({t, d.linf, d.l2});
    }
    return rep;
}

}  // namespace nlc
