#include "nlc/io.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace nlc {

namespace {

std::vector<double> uniform_grid(double lo, double hi, int npts) {
    if (npts < 2 || !(hi > lo)) throw std::invalid_argument("bad grid request");
    std::vector<double> x(npts);
    double h = (hi - lo) / double(npts - 1);
    for (int i = 0; i < npts; ++i) x[i] = lo + i * h;
    return x;
}

std::vector<Vec3> centered_diff(const std::vector<double>& x, const std::vector<Vec3>& f) {
    const std::size_t n = x.size();
    std::vector<Vec3> d(n);
    d[0] = (f[1] - f[0]) / (x[1] - x[0]);
    d[n - 1] = (f[n - 1] - f[n - 2]) / (x[n - 1] - x[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (x[i + 1] - x[i - 1]);
    return d;
}

void fmt(std::ostream& os, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

}  // namespace

DirectorInitialData planar_to_director(const PlanarInitialData& data) {
    DirectorInitialData out;
    out.x = data.x;
    const std::size_t n = data.x.size();
    out.n.resize(n);
    out.nt.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double cu = std::cos(data.u[i]), su = std::sin(data.u[i]);
        out.n[i] = {cu, su, 0.0};
        out.nt[i] = {-su * data.ut[i], cu * data.ut[i], 0.0};
    }
    // u_x by centered differencing, then n_x = u_x (-sin u, cos u, 0) so the
    // orthogonality constraint holds exactly.
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t a = i > 0 ? i - 1 : 0, b = i + 1 < n ? i + 1 : n - 1;
        double ux = (data.u[b] - data.u[a]) / (data.x[b] - data.x[a]);
        double cu = std::cos(data.u[i]), su = std::sin(data.u[i]);
        out.nx.push_back({-su * ux, cu * ux, 0.0});
    }
    out.validate();
    return out;
}

PlanarInitialData make_constant_planar(double u0, double x_lo, double x_hi, int npts) {
    PlanarInitialData d;
    d.x = uniform_grid(x_lo, x_hi, npts);
    d.u.assign(d.x.size(), u0);
    d.ut.assign(d.x.size(), 0.0);
    return d;
}

PlanarInitialData make_gauss_planar(double u0, double amp, double width, double ut_amp,
                                    double x_lo, double x_hi, int npts) {
    PlanarInitialData d;
    d.x = uniform_grid(x_lo, x_hi, npts);
    for (double xx : d.x) {
        double g = std::exp(-(xx / width) * (xx / width));
        d.u.push_back(u0 + amp * g);
        d.ut.push_back(ut_amp * g);
    }
    return d;
}

DirectorInitialData make_twist_director(double amp, double width, double x_lo, double x_hi,
                                        int npts) {
    DirectorInitialData out;
    out.x = uniform_grid(x_lo, x_hi, npts);
    const std::size_t n = out.x.size();
    auto ang = [&](double xx) {
        double g = std::exp(-(xx / width) * (xx / width));
        return std::pair<double, double>{amp * g, 0.5 * amp * std::sin(xx / width) * g};
    };
    out.n.resize(n);
    out.nt.assign(n, Vec3{});
    for (std::size_t i = 0; i < n; ++i) {
        auto [u, w] = ang(out.x[i]);
        out.n[i] = {std::cos(u) * std::cos(w), std::sin(u) * std::cos(w), std::sin(w)};
    }
    out.nx = centered_diff(out.x, out.n);
    // Project the differenced slope onto the tangent plane so n . n_x = 0 holds
    // to validation tolerance.
    for (std::size_t i = 0; i < n; ++i) out.nx[i] -= dot(out.nx[i], out.n[i]) * out.n[i];
    out.validate();
    return out;
}

DirectorInitialData make_blowup_director(const MaterialParams& params,
                                         const BlowupProfileSpec& spec,
                                         const std::vector<double>& x_grid) {
    PlanarState st = blowup_initial_data(params, spec, x_grid);
    PlanarInitialData d;
    d.x = st.x;
    d.u = st.u;
    d.ut.resize(st.x.size());
    for (std::size_t i = 0; i < st.x.size(); ++i) d.ut[i] = 0.5 * (st.R[i] + st.S[i]);
    return planar_to_director(d);
}

namespace {

std::vector<double> parse_row(const std::string& line, std::size_t row, std::size_t want) {
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        char* end = nullptr;
        double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str()) {
            throw InputError("row " + std::to_string(row) + ": cannot parse '" + cell + "'");
        }
        vals.push_back(v);
    }
    if (vals.size() != want)
        throw InputError("row " + std::to_string(row) + ": expected " + std::to_string(want) +
                         " columns, got " + std::to_string(vals.size()));
    return vals;
}

}  // namespace

DirectorInitialData load_initial_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    std::string header;
    if (!std::getline(in, header)) throw InputError(path + ": empty file");
    while (!header.empty() && (header.back() == '\r' || header.back() == '\n')) header.pop_back();

    bool planar;
    if (header == "x,u,ut")
        planar = true;
    else if (header == "x,n1,n2,n3,nt1,nt2,nt3")
        planar = false;
    else
        throw InputError(path + ": unrecognized header '" + header + "'");

    PlanarInitialData pd;
    DirectorInitialData dd;
    std::string line;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (line.empty()) continue;
        if (planar) {
            auto v = parse_row(line, row, 3);
            pd.x.push_back(v[0]);
            pd.u.push_back(v[1]);
            pd.ut.push_back(v[2]);
        } else {
            auto v = parse_row(line, row, 7);
            Vec3 n{v[1], v[2], v[3]};
            if (std::abs(norm(n) - 1.0) > 1e-6)
                throw InputError("row " + std::to_string(row) + ": |n| deviates from 1 by " +
                                 std::to_string(std::abs(norm(n) - 1.0)));
            dd.x.push_back(v[0]);
            dd.n.push_back(n);
            dd.nt.push_back({v[4], v[5], v[6]});
        }
    }
    if (planar) {
        if (pd.x.size() < 2) throw InputError(path + ": need at least two data rows");
        return planar_to_director(pd);
    }
    if (dd.x.size() < 2) throw InputError(path + ": need at least two data rows");
    dd.nx = centered_diff(dd.x, dd.n);
    for (std::size_t i = 0; i < dd.x.size(); ++i) dd.nx[i] -= dot(dd.nx[i], dd.n[i]) * dd.n[i];
    try {
        dd.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(path + ": " + e.what());
    }
    return dd;
}

void save_initial_csv(const std::string& path, const DirectorInitialData& data) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << "x,n1,n2,n3,nt1,nt2,nt3\n";
    for (std::size_t i = 0; i < data.x.size(); ++i) {
        fmt(out, data.x[i]);
        for (int k = 0; k < 3; ++k) {
            out << ',';
            fmt(out, data.n[i][k]);
        }
        for (int k = 0; k < 3; ++k) {
            out << ',';
            fmt(out, data.nt[i][k]);
        }
        out << '\n';
    }
}

void write_grid_csv(const std::string& path, const EnergyGrid& g) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << "X,Y,status,n1,n2,n3,ell1,ell2,ell3,m1,m2,m3,h1,h2,p,q,t,x\n";
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            int k = g.idx(i, j);
            fmt(out, g.X(i));
            out << ',';
            fmt(out, g.Y(j));
            out << ',' << int(g.status[k]);
            auto put3 = [&](const Vec3& v) {
                for (int c = 0; c < 3; ++c) {
                    out << ',';
                    fmt(out, v[c]);
                }
            };
            put3(g.n[k]);
            put3(g.ell[k]);
            put3(g.m[k]);
            for (double v : {g.h1[k], g.h2[k], g.p[k], g.q[k], g.t[k], g.x[k]}) {
                out << ',';
                fmt(out, v);
            }
            out << '\n';
        }
}

void write_slice_csv(const std::string& path, const TimeSlice& slice) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << "x,n1,n2,n3,nt1,nt2,nt3,nx1,nx2,nx3,singular\n";
    for (const auto& p : slice.points) {
        fmt(out, p.x);
        auto put3 = [&](const Vec3& v) {
            for (int c = 0; c < 3; ++c) {
                out << ',';
                fmt(out, v[c]);
            }
        };
        put3(p.n);
        put3(p.n_t);
        put3(p.n_x);
        out << ',' << (p.singular ? 1 : 0) << '\n';
    }
}

void write_blowup_csv(const std::string& path, const PlanarRun& run) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << "t,max_abs_R,max_abs_S,energy\n";
    for (const auto& s : run.series) {
        fmt(out, s.t);
        out << ',';
        fmt(out, s.max_abs_R);
        out << ',';
        fmt(out, s.max_abs_S);
        out << ',';
        fmt(out, s.energy);
        out << '\n';
    }
}

}  // namespace nlc
