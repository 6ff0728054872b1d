// nlcwave: command-line driver for the damped director-wave solvers.
//
// Subcommands:
//   simulate     energy-coordinate pipeline; grid + time-slice artifacts
//   blowup-demo  planar characteristic run on the gradient-blowup family
//   verify       invariant / positivity / energy-monotonicity gate
//   compare-fd   reconstructed slices against the finite-difference reference
//
// Exit codes: 0 pass, 1 verification gate failed, 2 bad config or input,
// 3 solver failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nlc/io.hpp"
#include "nlc/refsolver.hpp"

using namespace nlc;
using json = nlohmann::ordered_json;

namespace {

struct CliArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::string times_csv;
    std::string initial_csv;
    std::string profile = "gauss";
    double grid_step = 0.0;  // 0: keep config value
    double mu = std::nan("");
    double eps = 1e-2;
    double gate = 2e-2;  // compare-fd L-inf gate
    bool project = false;
};

std::vector<double> parse_times(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        if (cell.empty()) continue;
        char* end = nullptr;
        double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str() || *end != '\0')
            throw ConfigError("--times: cannot parse '" + cell + "'");
        if (v < 0.0) throw ConfigError("--times: times must be non-negative");
        if (!out.empty() && v <= out.back())
            throw ConfigError("--times: times must be strictly increasing");
        out.push_back(v);
    }
    return out;
}

LoadedConfig effective_config(const CliArgs& args) {
    LoadedConfig cfg;
    if (!args.config_path.empty()) cfg = load_config_file(args.config_path);
    if (args.grid_step > 0.0) cfg.solver.grid_step = args.grid_step;
    if (!std::isnan(args.mu)) cfg.material.mu = args.mu;
    cfg.material.validate();
    cfg.solver.validate();
    return cfg;
}

json config_echo(const CliArgs& args, const LoadedConfig& cfg, const std::string& experiment) {
    json j;
    j["experiment"] = experiment;
    j["alpha"] = cfg.material.alpha;
    j["gamma"] = cfg.material.gamma;
    j["mu"] = cfg.material.mu;
    j["grid_step"] = cfg.solver.grid_step;
    j["picard_tol"] = cfg.solver.picard_tol;
    j["picard_max_iters"] = cfg.solver.picard_max_iters;
    j["h_floor"] = cfg.solver.h_floor;
    j["domain_radius"] = cfg.solver.domain_radius;
    j["profile"] = args.initial_csv.empty() ? args.profile : "csv:" + args.initial_csv;
    j["eps"] = args.eps;
    j["project"] = args.project;
    return j;
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << j.dump(2) << '\n';
}

// Sample spacing tied to grid_step/2 so data interpolation error refines with
// the lattice.
int tied_npts(double span, double grid_step) {
    return int(std::ceil(span / (0.5 * grid_step))) + 1;
}

// Profile amplitude sized so the blowup condition A s / 2 > 8 mu C_U / (c' C_L)
// holds with margin.
BlowupProfileSpec sized_blowup_spec(const MaterialParams& mp, double eps) {
    BlowupProfileSpec spec;
    spec.eps = eps;
    SpeedBounds b = speed_bounds(mp);
    double cp = std::abs(speed_derivative_planar(mp, spec.u0));
    double needed = 8.0 * mp.mu * b.c_upper / (cp * b.c_lower);
    spec.amplitude = std::max(6.0, 2.2 * needed / spec.skew);
    return spec;
}

std::vector<double> blowup_grid(double eps, double dx) {
    double half = std::pow(eps, -2.0 / 3.0) + 1.1;
    std::vector<double> xs;
    for (double v = -half; v <= half + 0.5 * dx; v += dx) xs.push_back(v);
    return xs;
}

DirectorInitialData make_data(const CliArgs& args, const LoadedConfig& cfg) {
    if (!args.initial_csv.empty()) return load_initial_csv(args.initial_csv);
    double d = cfg.solver.grid_step;
    if (args.profile == "constant")
        return planar_to_director(make_constant_planar(0.8, -4.0, 4.0, tied_npts(8.0, d)));
    if (args.profile == "gauss")
        return planar_to_director(
            make_gauss_planar(0.8, 0.3, 0.6, 0.2, -4.0, 4.0, tied_npts(8.0, d)));
    if (args.profile == "twist")
        return make_twist_director(0.4, 0.7, -3.0, 3.0, tied_npts(6.0, d));
    if (args.profile == "blowup") {
        BlowupProfileSpec spec = sized_blowup_spec(cfg.material, args.eps);
        double dx = std::min(0.5 * d, args.eps / 10.0);
        return make_blowup_director(cfg.material, spec, blowup_grid(args.eps, dx));
    }
    throw ConfigError("unknown profile '" + args.profile +
                      "' (expected constant, gauss, twist, or blowup)");
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

struct SlicePack {
    std::vector<double> taus, energies, min_h, hoelder;
    std::vector<TimeSlice> slices;
};

SlicePack extract_slices(const EnergyGrid& grid, const MaterialParams& mp,
                         const std::vector<double>& taus) {
    SlicePack pack;
    for (double tau : taus) {
        TimeSlice s = extract_time_slice(grid, mp, tau);
        double mh = 1.0;
        for (const auto& p : s.points) mh = std::min({mh, p.h1, p.h2});
        pack.taus.push_back(tau);
        pack.energies.push_back(s.energy);
        pack.min_h.push_back(mh);
        pack.hoelder.push_back(hoelder_constant(s));
        pack.slices.push_back(std::move(s));
    }
    return pack;
}

std::vector<double> default_taus(const EnergyGrid& grid, int count) {
    TimeRange r = attainable_times(grid);
    std::vector<double> taus;
    for (int k = 1; k <= count; ++k)
        taus.push_back(r.t_min + (r.t_max - r.t_min) * 0.8 * double(k) / double(count));
    return taus;
}

int finish_manifest(const std::string& out_dir, json manifest, const Timer& timer) {
    bool pass = true;
    for (const auto& [key, val] : manifest["checks"].items()) {
        (void)key;
        pass = pass && val.get<bool>();
    }
    manifest["pass"] = pass;
    manifest["wall_time_s"] = timer.seconds();
    write_json(out_dir + "/manifest.json", manifest);
    return pass ? 0 : 1;
}

int run_simulate(const CliArgs& args) {
    Timer timer;
    LoadedConfig cfg = effective_config(args);
    DirectorInitialData data = make_data(args, cfg);

    BoundaryCurve curve = forward_transform(data, cfg.material);
    SolveWindow win{-cfg.solver.domain_radius, cfg.solver.domain_radius,
                    cfg.solver.domain_radius};
    SolveOptions opts;
    opts.project = args.project;
    EnergyGrid grid = solve_region(curve, cfg.material, cfg.solver, win, opts);
    integrate_coordinates(grid, curve, cfg.material);

    write_grid_csv(args.out_dir + "/grid.csv", grid);
    json summary;
    summary["energy0"] = curve.energy0();
    summary["r"] = 4.0 * curve.energy0() + 2.0;
    summary["grid_step"] = cfg.solver.grid_step;
    summary["max_residual"] = grid.max_residual();
    summary["min_h"] = grid.min_h();
    write_json(args.out_dir + "/summary.json", summary);

    std::vector<double> taus =
        args.times_csv.empty() ? default_taus(grid, 5) : parse_times(args.times_csv);
    SlicePack pack = extract_slices(grid, cfg.material, taus);
    for (std::size_t k = 0; k < pack.slices.size(); ++k) {
        char name[64];
        std::snprintf(name, sizeof name, "/slice_%03zu.csv", k);
        write_slice_csv(args.out_dir + name, pack.slices[k]);
    }
    json slices;
    slices["taus"] = pack.taus;
    slices["energies"] = pack.energies;
    slices["min_h_per_tau"] = pack.min_h;
    slices["hoelder_H"] = pack.hoelder;
    write_json(args.out_dir + "/slices.json", slices);

    bool pq_positive = true;
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            if (!grid.computed(i, j)) continue;
            int k = grid.idx(i, j);
            pq_positive = pq_positive && grid.p[k] > 0.0 && grid.q[k] > 0.0;
        }

    json manifest;
    manifest["config"] = config_echo(args, cfg, "simulate");
    manifest["times"] = pack.taus;
    manifest["energy0"] = curve.energy0();
    manifest["min_h"] = grid.min_h();
    manifest["max_residual"] = grid.max_residual();
    manifest["energies"] = pack.energies;
    manifest["checks"]["residual_gate"] = grid.max_residual() <= 1e-3;
    manifest["checks"]["pq_positive"] = pq_positive;
    return finish_manifest(args.out_dir, manifest, timer);
}

int run_blowup_demo(const CliArgs& args) {
    Timer timer;
    LoadedConfig cfg = effective_config(args);
    const MaterialParams& mp = cfg.material;

    BlowupProfileSpec spec = sized_blowup_spec(mp, args.eps);
    spec.validate(mp);
    double dx = std::min(2e-3, args.eps / 5.0);
    std::vector<double> xs = blowup_grid(args.eps, dx);
    PlanarState init = blowup_initial_data(mp, spec, xs);

    // S(0,0) from the grid point nearest x = 0.
    std::size_t i0 = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (std::abs(xs[i]) < std::abs(xs[i0])) i0 = i;
    double s00 = init.S[i0];
    double bound = blowup_time_bound(mp, spec.u0, s00);

    PlanarRunOptions ropts;
    ropts.t_max = 2.0 * bound;
    ropts.sign_region_right = std::pow(args.eps, -2.0 / 3.0);
    PlanarRun run = run_planar(init, mp, ropts);
    run.report.theoretical_bound = bound;

    write_blowup_csv(args.out_dir + "/blowup.csv", run);
    json report;
    report["blew_up"] = run.report.blew_up;
    report["t_star"] = run.report.t_star ? json(*run.report.t_star) : json(nullptr);
    report["x_star"] = run.report.x_star;
    report["theoretical_bound"] = bound;
    write_json(args.out_dir + "/report.json", report);

    json manifest;
    manifest["config"] = config_echo(args, cfg, "blowup-demo");
    manifest["amplitude"] = spec.amplitude;
    manifest["S00"] = s00;
    manifest["energy0"] = planar_energy(init);
    manifest["min_h"] = 1.0 / (1.0 + run.tracked_max_S * run.tracked_max_S);
    manifest["max_residual"] = 0.0;
    json energies = json::array();
    if (!run.series.empty()) {
        energies.push_back(run.series.front().energy);
        energies.push_back(run.series.back().energy);
    }
    manifest["energies"] = energies;
    manifest["checks"]["blew_up"] = run.report.blew_up;
    manifest["checks"]["t_star_below_bound"] =
        run.report.t_star.has_value() && *run.report.t_star <= bound;
    manifest["checks"]["sign_structure"] = run.sign_structure_ok;
    return finish_manifest(args.out_dir, manifest, timer);
}

int run_verify(const CliArgs& args) {
    Timer timer;
    LoadedConfig cfg = effective_config(args);
    DirectorInitialData data = make_data(args, cfg);

    BoundaryCurve curve = forward_transform(data, cfg.material);
    SolveWindow win{-cfg.solver.domain_radius, cfg.solver.domain_radius,
                    cfg.solver.domain_radius};
    SolveOptions opts;
    opts.project = args.project;
    EnergyGrid grid = solve_region(curve, cfg.material, cfg.solver, win, opts);
    integrate_coordinates(grid, curve, cfg.material);

    double e0 = curve.energy0();
    bool pq_positive = true, growth_ok = true;
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            if (!grid.computed(i, j)) continue;
            int k = grid.idx(i, j);
            pq_positive = pq_positive && grid.p[k] > 0.0 && grid.q[k] > 0.0;
            double cap = 2.0 * (std::abs(grid.X(i)) + std::abs(grid.Y(j)) + 4.0 * e0);
            growth_ok = growth_ok && grid.cum_p[k] + grid.cum_q[k] <= 1.05 * cap;
        }

    std::vector<double> taus =
        args.times_csv.empty() ? default_taus(grid, 6) : parse_times(args.times_csv);
    SlicePack pack = extract_slices(grid, cfg.material, taus);
    bool energy_monotone = true;
    for (std::size_t k = 1; k < pack.energies.size(); ++k)
        energy_monotone = energy_monotone && pack.energies[k] <= pack.energies[k - 1] + 1e-4;

    json verify;
    verify["energy0"] = e0;
    verify["max_residual"] = grid.max_residual();
    verify["min_h"] = grid.min_h();
    verify["taus"] = pack.taus;
    verify["energies"] = pack.energies;
    write_json(args.out_dir + "/verify.json", verify);

    json manifest;
    manifest["config"] = config_echo(args, cfg, "verify");
    manifest["energy0"] = e0;
    manifest["min_h"] = grid.min_h();
    manifest["max_residual"] = grid.max_residual();
    manifest["energies"] = pack.energies;
    manifest["checks"]["residual_gate"] = grid.max_residual() <= 1e-3;
    manifest["checks"]["pq_positive"] = pq_positive;
    manifest["checks"]["growth_bound"] = growth_ok;
    manifest["checks"]["energy_monotone"] = energy_monotone;
    return finish_manifest(args.out_dir, manifest, timer);
}

int run_compare_fd(const CliArgs& args) {
    Timer timer;
    LoadedConfig cfg = effective_config(args);
    DirectorInitialData data = make_data(args, cfg);

    BoundaryCurve curve = forward_transform(data, cfg.material);
    SolveWindow win{-cfg.solver.domain_radius, cfg.solver.domain_radius,
                    cfg.solver.domain_radius};
    EnergyGrid grid = solve_region(curve, cfg.material, cfg.solver, win);
    integrate_coordinates(grid, curve, cfg.material);

    std::vector<double> taus =
        args.times_csv.empty() ? std::vector<double>{0.1, 0.2, 0.3} : parse_times(args.times_csv);
    SlicePack pack = extract_slices(grid, cfg.material, taus);

    FDRun fd = fd_solve_director(data, cfg.material, taus, 0.5 * cfg.solver.grid_step);
    if (fd.aborted) throw SolverError("compare-fd: reference run aborted");

    std::ofstream csv(args.out_dir + "/compare.csv");
    if (!csv) throw InputError("cannot write " + args.out_dir + "/compare.csv");
    csv << "time,linf_error,l2_error\n";
    bool under_gate = true;
    json rows = json::array();
    for (std::size_t k = 0; k < taus.size(); ++k) {
        std::vector<double> xs;
        std::vector<Vec3> ns;
        for (const auto& p : pack.slices[k].points) {
            if (p.singular) continue;
            xs.push_back(p.x);
            ns.push_back(p.n);
        }
        const FDState& st = fd.states[k];
        std::vector<double> xf(st.size());
        for (std::size_t i = 0; i < st.size(); ++i) xf[i] = st.x(i);
        FieldDiff diff = compare_vec3(xs, ns, xf, st.n);
        char line[96];
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", taus[k], diff.linf, diff.l2);
        csv << line;
        rows.push_back({{"time", taus[k]}, {"linf", diff.linf}, {"l2", diff.l2}});
        under_gate = under_gate && diff.linf <= args.gate;
    }

    json manifest;
    manifest["config"] = config_echo(args, cfg, "compare-fd");
    manifest["gate"] = args.gate;
    manifest["energy0"] = curve.energy0();
    manifest["min_h"] = grid.min_h();
    manifest["max_residual"] = grid.max_residual();
    manifest["energies"] = pack.energies;
    manifest["rows"] = rows;
    manifest["checks"]["errors_under_gate"] = under_gate;
    return finish_manifest(args.out_dir, manifest, timer);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"damped director-wave simulator and verification suite"};
    app.require_subcommand(1);

    CliArgs args;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", args.config_path, "JSON config file");
        sub->add_option("--out", args.out_dir, "output directory");
        sub->add_option("--times", args.times_csv, "comma-separated output times");
        sub->add_option("--grid-step", args.grid_step, "lattice step override");
        sub->add_option("--mu", args.mu, "damping override");
        sub->add_option("--eps", args.eps, "blowup family scale");
        sub->add_option("--initial", args.initial_csv, "initial data CSV");
        sub->add_option("--profile", args.profile,
                        "builtin profile: constant, gauss, twist, blowup");
        sub->add_flag("--project", args.project, "invariant projection mode");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "energy-coordinate pipeline");
    CLI::App* blowup = app.add_subcommand("blowup-demo", "planar blowup reproduction");
    CLI::App* verify = app.add_subcommand("verify", "invariant and energy gates");
    CLI::App* compare = app.add_subcommand("compare-fd", "slices vs finite differences");
    for (CLI::App* sub : {simulate, blowup, verify, compare}) add_common(sub);
    compare->add_option("--gate", args.gate, "L-inf error gate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        std::filesystem::create_directories(args.out_dir);
        if (simulate->parsed()) return run_simulate(args);
        if (blowup->parsed()) return run_blowup_demo(args);
        if (verify->parsed()) return run_verify(args);
        return run_compare_fd(args);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const InputError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 2;
    } catch (const std::out_of_range& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const SolverError& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return 3;
    }
}
