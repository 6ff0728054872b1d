// Acceptance gate: one pass/fail line per criterion, exit 0 only if all pass.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "nlc/io.hpp"
#include "nlc/reconstruct.hpp"
#include "nlc/refsolver.hpp"

using namespace nlc;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("criterion %d %s: %s\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
    if (!pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

DirectorInitialData smooth_data(double grid_step, double amp, double ut_amp) {
    int npts = int(8.0 / (0.5 * grid_step)) + 1;
    return planar_to_director(make_gauss_planar(0.8, amp, 0.6, ut_amp, -4.0, 4.0, npts));
}

struct Goursat {
    MaterialParams mp;
    BoundaryCurve curve;
    EnergyGrid grid;
};

Goursat solve_smooth(double mu, double step, double amp, double ut_amp, double radius,
                     bool coords) {
    Goursat g;
    g.mp = MaterialParams{2.0, 1.0, mu};
    g.curve = forward_transform(smooth_data(step, amp, ut_amp), g.mp);
    SolverConfig cfg;
    cfg.grid_step = step;
    g.grid = solve_region(g.curve, g.mp, cfg, SolveWindow{-radius, radius, radius});
    if (coords) integrate_coordinates(g.grid, g.curve, g.mp);
    return g;
}

BlowupProfileSpec sized_spec(const MaterialParams& mp, double eps) {
    BlowupProfileSpec spec;
    spec.eps = eps;
    SpeedBounds b = speed_bounds(mp);
    double cp = std::abs(speed_derivative_planar(mp, spec.u0));
    spec.amplitude = std::max(6.0, 2.2 * 8.0 * mp.mu * b.c_upper / (cp * b.c_lower));
    return spec;
}

std::vector<double> uniform(double lo, double hi, double dx) {
    std::vector<double> xs;
    for (double v = lo; v <= hi + 0.5 * dx; v += dx) xs.push_back(v);
    return xs;
}

struct BlowupCase {
    double mu;
    PlanarState init;
    PlanarRun run;
    double bound = 0.0;
    double t_first_singular = 0.0;  // earliest coordinate time with h2 < 1e-6
    double min_h2 = 1.0;
    bool signs_ok_initial = true;
    Goursat goursat;
};

// Planar run plus Goursat continuation on the same data. The planar detection
// threshold |S| = 1000 matches the h2 < 1e-6 floor (h2 = 1/(1+|S|^2)).
BlowupCase run_blowup_case(double mu, double goursat_step, SolveWindow win) {
    BlowupCase cs;
    cs.mu = mu;
    MaterialParams mp{2.0, 1.0, mu};
    BlowupProfileSpec spec = sized_spec(mp, 1e-2);
    spec.validate(mp);
    double support = std::pow(spec.eps, -2.0 / 3.0);

    cs.init = blowup_initial_data(mp, spec, uniform(-(support + 1.1), support + 1.1, 2e-3));
    std::size_t i0 = 0;
    for (std::size_t i = 0; i < cs.init.x.size(); ++i)
        if (std::abs(cs.init.x[i]) < std::abs(cs.init.x[i0])) i0 = i;
    cs.bound = blowup_time_bound(mp, spec.u0, cs.init.S[i0]);

    for (std::size_t i = 0; i < cs.init.x.size(); ++i) {
        double x = cs.init.x[i];
        if (x < 0.0 || x >= support - 1e-9) continue;
        double c = wave_speed_planar(mp, cs.init.u[i]);
        double ux = (cs.init.R[i] - cs.init.S[i]) / (2.0 * c);
        cs.signs_ok_initial =
            cs.signs_ok_initial && ux < 0.0 && cs.init.R[i] < 0.0 && cs.init.S[i] > 0.0;
    }

    PlanarRunOptions opts;
    opts.t_max = 2.0 * cs.bound;
    opts.threshold = 1000.0;
    opts.sign_region_right = support;
    cs.run = run_planar(cs.init, mp, opts);

    cs.goursat.mp = mp;
    cs.goursat.curve = forward_transform(
        make_blowup_director(mp, spec,
                             uniform(-(support + 1.1), support + 1.1,
                                     std::min(0.5 * goursat_step, spec.eps / 20.0))),
        mp);
    SolverConfig cfg;
    cfg.grid_step = goursat_step;
    cs.goursat.grid = solve_region(cs.goursat.curve, mp, cfg, win);
    integrate_coordinates(cs.goursat.grid, cs.goursat.curve, mp);

    const EnergyGrid& g = cs.goursat.grid;
    cs.t_first_singular = 1e300;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (!g.computed(i, j)) continue;
            int k = g.idx(i, j);
            cs.min_h2 = std::min(cs.min_h2, g.h2[k]);
            if (g.h2[k] < 1e-6) cs.t_first_singular = std::min(cs.t_first_singular, g.t[k]);
        }
    return cs;
}

struct PQCheck {
    bool positive = true;
    bool growth = true;
};

PQCheck check_pq(const EnergyGrid& g, double e0) {
    PQCheck r;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (!g.computed(i, j)) continue;
            int k = g.idx(i, j);
            r.positive = r.positive && g.p[k] > 0.0 && g.q[k] > 0.0;
            double cap = 2.0 * (std::abs(g.X(i)) + std::abs(g.Y(j)) + 4.0 * e0);
            r.growth = r.growth && g.cum_p[k] + g.cum_q[k] <= 1.05 * cap;
        }
    return r;
}

}  // namespace

int main() {
    // Criteria 1, 2, 6, 8 share the smooth damped run: E0 ~ 0.1, window wide
    // enough that every slice spans the full energy support.
    const double amp = 0.2287, ut_amp = 0.1525;
    Goursat coarse = solve_smooth(0.5, 0.01, amp, ut_amp, 3.4, true);
    Goursat fine = solve_smooth(0.5, 0.005, amp, ut_amp, 3.4, false);
    double e0 = coarse.curve.energy0();

    {
        double res1 = coarse.grid.max_residual();
        double ratio = res1 / fine.grid.max_residual();
        bool pass = e0 > 0.08 && e0 < 0.12 && res1 <= 1e-4 && ratio >= 3.4 && ratio <= 4.6;
        report(1, pass,
               fmt("E0 %.4f, max residual %.3g at step 1e-2, halving ratio %.2f", e0, res1,
                   ratio));
    }

    std::vector<TimeSlice> slices;
    {
        bool mono = true;
        double prev = 1e300;
        for (int k = 0; k < 10; ++k) {
            slices.push_back(extract_time_slice(coarse.grid, coarse.mp, 0.05 + 0.05 * k));
            mono = mono && slices.back().energy <= prev + 1e-4;
            prev = slices.back().energy;
        }
        Goursat undamped = solve_smooth(0.0, 0.01, amp, ut_amp, 3.4, true);
        double emin = 1e300, emax = -1e300;
        for (int k = 0; k < 10; ++k) {
            double e = slice_energy(undamped.grid, undamped.mp, 0.05 + 0.05 * k);
            emin = std::min(emin, e);
            emax = std::max(emax, e);
        }
        bool pass = mono && emax - emin <= 1e-4;
        report(2, pass,
               fmt("damped energies non-increasing within 1e-4 over 10 times, "
                   "undamped spread %.2g",
                   emax - emin));
    }

    BlowupCase b0 = run_blowup_case(0.0, 0.01, SolveWindow{-1.0, 2.0, 5.0});
    BlowupCase b1 = run_blowup_case(1.0, 0.005, SolveWindow{-0.1, 0.25, -150.0});
    {
        bool pass = true;
        std::string detail;
        for (const BlowupCase* cs : {&b0, &b1}) {
            bool blew = cs->run.report.blew_up && cs->run.report.t_star.has_value();
            double ts = blew ? *cs->run.report.t_star : -1.0;
            double rel = blew ? std::abs(cs->t_first_singular - ts) / ts : 1.0;
            bool ok = blew && ts <= cs->bound && cs->min_h2 < 1e-6 && rel <= 0.10;
            pass = pass && ok;
            detail += fmt("mu=%g: t*=%.4g <= bound %.3g, ", cs->mu, ts, cs->bound) +
                      fmt("h2 min %.2g, coord-time gap %.1f%%; ", cs->min_h2, 100.0 * rel);
        }
        report(3, pass, detail);
    }

    {
        MaterialParams mp{2.0, 1.0, 0.0};
        std::vector<double> le, leps;
        for (double eps : {1e-1, 1e-2, 1e-3}) {
            BlowupProfileSpec spec = sized_spec(mp, eps);
            double support = std::pow(eps, -2.0 / 3.0);
            PlanarState st = blowup_initial_data(
                mp, spec, uniform(-(support + 1.1), support + 1.1, eps / 10.0));
            le.push_back(std::log(planar_energy(st)));
            leps.push_back(std::log(eps));
        }
        double mx = (leps[0] + leps[1] + leps[2]) / 3.0, my = (le[0] + le[1] + le[2]) / 3.0;
        double num = 0.0, den = 0.0;
        for (int k = 0; k < 3; ++k) {
            num += (leps[k] - mx) * (le[k] - my);
            den += (leps[k] - mx) * (leps[k] - mx);
        }
        double slope = num / den;
        bool pass = slope >= 0.85 && slope <= 1.15;
        report(4, pass, fmt("E(0) ~ eps^%.3f over eps in {1e-1, 1e-2, 1e-3}", slope));
    }

    {
        bool pass = true;
        std::string detail;
        for (double mu : {0.0, 1.0}) {
            double tau = 1.0;
            Goursat gc = solve_smooth(mu, 0.04, 0.0723, 0.0482, 3.0, true);
            Goursat gf = solve_smooth(mu, 0.02, 0.0723, 0.0482, 3.0, true);
            TimeSlice sc = extract_time_slice(gc.grid, gc.mp, tau);
            TimeSlice sf = extract_time_slice(gf.grid, gf.mp, tau);
            auto arrays = [](const TimeSlice& s, std::vector<double>& x, std::vector<Vec3>& n) {
                for (const auto& p : s.points)
                    if (!p.singular) {
                        x.push_back(p.x);
                        n.push_back(p.n);
                    }
            };
            std::vector<double> xc, xf;
            std::vector<Vec3> nc, nf;
            arrays(sc, xc, nc);
            arrays(sf, xf, nf);
            double self_rec = compare_vec3(xc, nc, xf, nf).linf;

            MaterialParams mp{2.0, 1.0, mu};
            auto data = smooth_data(0.02, 0.0723, 0.0482);
            std::vector<double> times{tau};
            auto r1 = fd_solve_director(data, mp, times, 0.01);
            auto r2 = fd_solve_director(data, mp, times, 0.005);
            double self_fd = compare_runs(r1, r2, times).max_linf();

            const FDState& st = r2.states[0];
            std::vector<double> xg(st.size());
            for (std::size_t i = 0; i < st.size(); ++i) xg[i] = st.x(i);
            double cross = compare_vec3(xf, nf, xg, st.n).linf;
            double gate = 3.0 * std::max(self_rec, self_fd);
            pass = pass && cross <= gate;
            detail += fmt("mu=%g: cross linf %.2g vs gate %.2g; ", mu, cross, gate);
        }
        report(5, pass, detail);
    }

    {
        double lip = std::sqrt(2.0 * e0);
        double worst = 0.0;
        for (std::size_t k = 1; k < slices.size(); ++k) {
            double d = l2_distance(slices[k - 1], slices[k]);
            worst = std::max(worst, d / (0.05 * lip * 1.05));
        }
        report(6, worst <= 1.0,
               fmt("worst adjacent-slice l2 over bound: %.2f (<= 1 required)", worst));
    }

    {
        bool pass = b0.signs_ok_initial && b1.signs_ok_initial && b0.run.sign_structure_ok &&
                    b1.run.sign_structure_ok;
        report(7, pass,
               fmt("initial u_x<0, R<0, S>0 on [0, eps^-2/3) and tracked persistence; "
                   "worst violation %.2g",
                   std::max(b0.run.sign_violation, b1.run.sign_violation)));
    }

    {
        PQCheck a = check_pq(coarse.grid, e0);
        PQCheck b = check_pq(fine.grid, fine.curve.energy0());
        PQCheck c = check_pq(b0.goursat.grid, b0.goursat.curve.energy0());
        PQCheck d = check_pq(b1.goursat.grid, b1.goursat.curve.energy0());
        bool positive = a.positive && b.positive && c.positive && d.positive;
        bool growth = a.growth && b.growth && c.growth && d.growth;
        report(8, positive && growth,
               fmt("p,q > 0 on all %.0f grids, row/column integrals within 5%% of the "
                   "2(|X|+|Y|+4E0) bound",
                   4.0));
    }

    return failures == 0 ? 0 : 1;
}
