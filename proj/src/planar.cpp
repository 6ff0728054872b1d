#include "nlc/planar.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nlc/interp.hpp"

namespace nlc {

PlanarState make_planar_state(const MaterialParams& params, std::vector<double> x,
                              const std::vector<double>& u, const std::vector<double>& ut,
                              const std::vector<double>& ux, double time) {
    const std::size_t n = x.size();
    if (u.size() != n || ut.size() != n || ux.size() != n)
        throw std::invalid_argument("make_planar_state: size mismatch");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x[i] > x[i - 1])) throw std::invalid_argument("make_planar_state: x not increasing");
    PlanarState st;
    st.time = time;
    st.x = std::move(x);
    st.u = u;
    st.R.resize(n);
    st.S.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double c = wave_speed_planar(params, u[i]);
        st.R[i] = ut[i] + c * ux[i];
        st.S[i] = ut[i] - c * ux[i];
    }
    return st;
}

double bump_profile(double A, double s, double a) {
    if (!(A > 0.0) || !(s > 0.0 && s <= 1.0))
        throw std::invalid_argument("bump_profile: need A > 0, 0 < s <= 1");
    if (std::abs(a) >= 1.0) return 0.0;
    double w = 1.0 - a * a;
    return A * w * w * (1.0 - s * a);
}

double bump_profile_derivative(double A, double s, double a) {
    if (!(A > 0.0) || !(s > 0.0 && s <= 1.0))
        throw std::invalid_argument("bump_profile: need A > 0, 0 < s <= 1");
    if (std::abs(a) >= 1.0) return 0.0;
    double w = 1.0 - a * a;
    return A * (-4.0 * a * w * (1.0 - s * a) - s * w * w);
}

void BlowupProfileSpec::validate(const MaterialParams& params) const {
    if (!(amplitude > 0.0)) throw std::invalid_argument("blowup profile: amplitude must be > 0");
    if (!(skew > 0.0 && skew <= 1.0)) throw std::invalid_argument("blowup profile: skew in (0,1]");
    if (!(eps > 0.0)) throw std::invalid_argument("blowup profile: eps must be > 0");
    if (!(speed_derivative_planar(params, u0) > 0.0))
        throw std::invalid_argument("blowup profile: c'(u0) must be > 0");
    if (params.mu > 0.0) {
        auto b = speed_bounds(params);
        double need = 8.0 * params.mu * b.c_upper /
                      (speed_derivative_planar(params, u0) * b.c_lower);
        if (!(amplitude * skew > need))
            throw std::invalid_argument("blowup profile: -phi'(0) = A s must exceed 8 mu C_U / (c'(u0) C_L)");
    }
}

PlanarState blowup_initial_data(const MaterialParams& params, const BlowupProfileSpec& spec,
                                const std::vector<double>& x_grid) {
    spec.validate(params);
    auto b = speed_bounds(params);
    if (!(spec.eps < b.c_lower))
        throw std::invalid_argument("blowup_initial_data: eps must be < C_L");
    double support = std::pow(spec.eps, -2.0 / 3.0);
    if (x_grid.empty() || x_grid.front() > -support - 1.0 || x_grid.back() < support + 1.0)
        throw std::domain_error("blowup_initial_data: grid must cover [-eps^{-2/3}-1, eps^{-2/3}+1]");

    const double A = spec.amplitude, s = spec.skew, eps = spec.eps;
    const double e23 = std::pow(eps, 2.0 / 3.0);
    const double e83 = std::pow(eps, 8.0 / 3.0);
    const std::size_t n = x_grid.size();
    std::vector<double> u(n), ut(n), ux(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x = x_grid[i];
        u[i] = spec.u0 + eps * bump_profile(A, s, x / eps) + eps * eps * bump_profile(A, s, e23 * x);
        ux[i] = bump_profile_derivative(A, s, x / eps) + e83 * bump_profile_derivative(A, s, e23 * x);
        ut[i] = (-wave_speed_planar(params, u[i]) + eps) * ux[i];
    }
    return make_planar_state(params, x_grid, u, ut, ux);
}

double planar_energy(const PlanarState& state) {
    double e = 0.0;
    for (std::size_t i = 1; i < state.x.size(); ++i) {
        double fa = state.R[i - 1] * state.R[i - 1] + state.S[i - 1] * state.S[i - 1];
        double fb = state.R[i] * state.R[i] + state.S[i] * state.S[i];
        e += 0.25 * (fa + fb) * (state.x[i] - state.x[i - 1]);
    }
    return e;
}

namespace {

inline double rhs_R(const MaterialParams& p, double u, double R, double S) {
    double c = wave_speed_planar(p, u);
    return speed_derivative_planar(p, u) / (4.0 * c) * (R * R - S * S) - 0.5 * p.mu * (R + S);
}

inline double rhs_S(const MaterialParams& p, double u, double R, double S) {
    double c = wave_speed_planar(p, u);
    return speed_derivative_planar(p, u) / (4.0 * c) * (S * S - R * R) - 0.5 * p.mu * (R + S);
}

}  // namespace

EvolveResult evolve_planar(const PlanarState& state, const MaterialParams& params, double dt) {
    const std::size_t n = state.x.size();
    const double dx = state.x[1] - state.x[0];
    const double x0 = state.x[0];

    MonotoneCubic iu(x0, dx, state.u), iR(x0, dx, state.R), iS(x0, dx, state.S);

    EvolveResult out;
    out.state.time = state.time + dt;
    out.state.x = state.x;
    out.state.u.resize(n);
    out.state.R.resize(n);
    out.state.S.resize(n);

    for (std::size_t i = 0; i < n; ++i) {
        double ck = wave_speed_planar(params, state.u[i]);
        // R rides dx/dt = -c: backward-in-time foot at x + c dt.
        double xr = state.x[i] + wave_speed_planar(params, iu(state.x[i] + 0.5 * ck * dt)) * dt;
        // S rides dx/dt = +c.
        double xs = state.x[i] - wave_speed_planar(params, iu(state.x[i] - 0.5 * ck * dt)) * dt;

        double uf = iu(xr), Rf = iR(xr), Sf = iS(xr);
        double ug = iu(xs), Rg = iR(xs), Sg = iS(xs);

        double k1r = rhs_R(params, uf, Rf, Sf);
        double k1s = rhs_S(params, ug, Rg, Sg);
        double Rp = Rf + dt * k1r;
        double Sp = Sg + dt * k1s;
        double up = state.u[i] + 0.5 * dt * (state.R[i] + state.S[i]);

        double k2r = rhs_R(params, up, Rp, Sp);
        double k2s = rhs_S(params, up, Rp, Sp);
        double Rn = Rf + 0.5 * dt * (k1r + k2r);
        double Sn = Sg + 0.5 * dt * (k1s + k2s);

        out.state.R[i] = Rn;
        out.state.S[i] = Sn;
        out.state.u[i] =
            state.u[i] + 0.25 * dt * (state.R[i] + state.S[i] + Rn + Sn);

        if (!std::isfinite(Rn) || !std::isfinite(Sn) || std::abs(Rn) > 1e9 || std::abs(Sn) > 1e9)
            out.overflowed = true;
    }
    return out;
}

double blowup_time_bound(const MaterialParams& params, double u0, double S00) {
    double cd = speed_derivative_planar(params, u0);
    if (!(cd > 0.0)) throw std::invalid_argument("blowup_time_bound: c'(u0) must be > 0");
    if (!(S00 > 0.0)) throw std::invalid_argument("blowup_time_bound: S(0,0) must be > 0");
    return 16.0 * speed_bounds(params).c_upper / (cd * S00);
}

namespace {

double state_max_abs(const std::vector<double>& v, std::size_t* argmax = nullptr) {
    double m = 0.0;
    std::size_t am = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (std::abs(v[i]) > m) { m = std::abs(v[i]); am = i; }
    if (argmax) *argmax = am;
    return m;
}

double value_near_zero(const PlanarState& st, const std::vector<double>& field) {
    auto it = std::lower_bound(st.x.begin(), st.x.end(), 0.0);
    std::size_t i = std::size_t(it - st.x.begin());
    if (i > 0 && (i == st.x.size() || std::abs(st.x[i - 1]) < std::abs(st.x[i]))) --i;
    return field[i];
}

}  // namespace

BlowupReport detect_blowup(const std::vector<PlanarState>& run, double threshold,
                           const MaterialParams& params, double u0) {
    BlowupReport rep;
    if (run.empty()) return rep;
    double S00 = value_near_zero(run.front(), run.front().S);
    if (S00 > 0.0 && speed_derivative_planar(params, u0) > 0.0)
        rep.theoretical_bound = blowup_time_bound(params, u0, S00);
    for (const auto& st : run) {
        std::size_t ar = 0, as = 0;
        double mr = state_max_abs(st.R, &ar);
        double ms = state_max_abs(st.S, &as);
        rep.max_gradient = std::max(rep.max_gradient, std::max(mr, ms));
        if (std::max(mr, ms) > threshold) {
            rep.blew_up = true;
            rep.t_star = st.time;
            rep.x_star = (ms >= mr) ? st.x[as] : st.x[ar];
            return rep;
        }
    }
    return rep;
}

namespace {

// Particle riding an S-characteristic, dx/dt = c. The S equation along it is
// a Riccati in S with u and R as bounded coefficients.
struct Tracker {
    double x, S;
    bool alive = true;
};

std::vector<Tracker> seed_trackers(const PlanarState& st, int count) {
    std::vector<Tracker> out;
    if (count <= 0) return out;
    double ms = state_max_abs(st.S);
    if (ms <= 0.0) return out;
    double lo = st.x.back(), hi = st.x.front();
    for (std::size_t i = 0; i < st.x.size(); ++i) {
        if (std::abs(st.S[i]) >= 0.5 * ms) {
            lo = std::min(lo, st.x[i]);
            hi = std::max(hi, st.x[i]);
        }
    }
    if (!(hi >= lo)) return out;
    MonotoneCubic iS(st.x[0], st.x[1] - st.x[0], st.S);
    for (int k = 0; k < count; ++k) {
        double x = count == 1 ? lo : lo + (hi - lo) * k / double(count - 1);
        out.push_back({x, iS(x)});
    }
    return out;
}

}  // namespace

PlanarRun run_planar(const PlanarState& initial, const MaterialParams& params,
                     const PlanarRunOptions& opts) {
    PlanarRun run;
    auto bounds = speed_bounds(params);
    const double dx = initial.x[1] - initial.x[0];
    double dt = opts.cfl * dx / bounds.c_upper;

    double threshold = opts.threshold;
    double s_prev = state_max_abs(initial.S);
    if (threshold <= 0.0) threshold = 1e3 * std::max(s_prev, 1e-12);

    std::vector<Tracker> trackers = seed_trackers(initial, opts.trackers);

    // Characteristic trapezoid edges for the sign-structure diagnostic.
    bool track = opts.sign_region_right > 0.0;
    double x_left = 0.0, x_right = opts.sign_region_right;

    PlanarState st = initial;
    run.states.push_back(st);
    run.series.push_back({st.time, state_max_abs(st.R), s_prev, planar_energy(st)});

    long step = 0;
    while (st.time < opts.t_max) {
        double step_dt = std::min(dt, opts.t_max - st.time);
        EvolveResult ev = evolve_planar(st, params, step_dt);
        ++step;

        double tracked = 0.0;
        if (!trackers.empty()) {
            MonotoneCubic iu(st.x[0], dx, st.u), iR(st.x[0], dx, st.R);
            for (auto& tr : trackers) {
                if (!tr.alive) continue;
                // Substeps sized so |dS| stays ~10% of S per substep.
                double rate = bounds.c_deriv * std::abs(tr.S) / (4.0 * bounds.c_lower);
                int nsub = std::clamp(int(std::ceil(step_dt * rate / 0.1)), 1, 1 << 14);
                double h = step_dt / nsub;
                for (int ks = 0; ks < nsub; ++ks) {
                    double u1 = iu(tr.x), R1 = iR(tr.x);
                    double k1 = rhs_S(params, u1, R1, tr.S);
                    double c1 = wave_speed_planar(params, u1);
                    double x2 = tr.x + h * c1;
                    double u2 = iu(x2), R2 = iR(x2);
                    double Sp = tr.S + h * k1;
                    double k2 = rhs_S(params, u2, R2, Sp);
                    tr.S += 0.5 * h * (k1 + k2);
                    tr.x += 0.5 * h * (c1 + wave_speed_planar(params, u2));
                    if (!std::isfinite(tr.S) || std::abs(tr.S) > opts.overflow_guard) {
                        tr.S = std::isfinite(tr.S) ? tr.S : opts.overflow_guard;
                        break;
                    }
                }
                if (tr.x > st.x.back() || tr.x < st.x.front()) tr.alive = false;
                if (tr.alive) tracked = std::max(tracked, std::abs(tr.S));
            }
            run.tracked_max_S = std::max(run.tracked_max_S, tracked);
        }

        if (track && x_left < x_right) {
            MonotoneCubic iu(st.x[0], dx, st.u);
            x_left += step_dt * wave_speed_planar(params, iu(x_left));
            x_right -= step_dt * wave_speed_planar(params, iu(x_right));
            double scale = std::max(1.0, state_max_abs(ev.state.S));
            for (std::size_t i = 0; i < ev.state.x.size(); ++i) {
                if (ev.state.x[i] < x_left || ev.state.x[i] > x_right) continue;
                double viol = std::max(ev.state.R[i], -ev.state.S[i]);
                if (viol > run.sign_violation) run.sign_violation = viol;
                if (viol > 1e-9 * scale) run.sign_structure_ok = false;
            }
        }

        std::size_t ar = 0, as = 0;
        double mr = state_max_abs(ev.state.R, &ar);
        double ms = state_max_abs(ev.state.S, &as);
        double energy = planar_energy(ev.state);
        run.series.push_back({ev.state.time, mr, std::max(ms, tracked), energy});

        bool exceeded = std::max({mr, ms, tracked}) > std::min(threshold, opts.overflow_guard) ||
                        ev.overflowed;
        if (exceeded) {
            run.report.blew_up = true;
            run.report.t_star = ev.state.time;
            if (tracked > std::max(mr, ms)) {
                for (const auto& tr : trackers)
                    if (tr.alive && std::abs(tr.S) == tracked) run.report.x_star = tr.x;
            } else {
                run.report.x_star = (ms >= mr) ? ev.state.x[as] : ev.state.x[ar];
            }
            run.report.max_gradient = std::max({mr, ms, tracked});
            run.states.push_back(std::move(ev.state));
            return run;
        }

        // Resolve the Riccati acceleration: shrink dt once growth passes 10%.
        if (ms > (1.0 + opts.growth_halving) * std::max(s_prev, 1e-12)) dt *= 0.5;
        s_prev = ms;
        run.report.max_gradient = std::max({run.report.max_gradient, mr, ms, tracked});

        bool record = opts.record_stride > 0 && step % opts.record_stride == 0;
        st = std::move(ev.state);
        if (record) run.states.push_back(st);
    }
    if (run.states.empty() || run.states.back().time != st.time) run.states.push_back(st);
    return run;
}

}  // namespace nlc
