#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "nlc/io.hpp"

using namespace nlc;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/nlc_io_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
    void write(const std::string& text) const {
        std::ofstream out(path);
        out << text;
    }
};

}  // namespace

TEST_CASE("planar embedding keeps the constraints exact") {
    auto d = planar_to_director(make_gauss_planar(0.8, 0.3, 0.6, 0.2, -4.0, 4.0, 401));
    for (std::size_t i = 0; i < d.x.size(); ++i) {
        CHECK(std::abs(norm(d.n[i]) - 1.0) < 1e-15);
        CHECK(std::abs(dot(d.n[i], d.nt[i])) < 1e-15);
        CHECK(std::abs(dot(d.n[i], d.nx[i])) < 1e-15);
        CHECK(d.n[i].z == 0.0);
    }
}

TEST_CASE("builtin profiles validate and have the stated shapes") {
    auto c = make_constant_planar(0.7, -2.0, 2.0, 41);
    CHECK(c.x.size() == 41);
    CHECK(c.x.front() == doctest::Approx(-2.0));
    CHECK(c.x.back() == doctest::Approx(2.0));
    for (double v : c.u) CHECK(v == 0.7);
    for (double v : c.ut) CHECK(v == 0.0);

    auto g = make_gauss_planar(0.5, 0.2, 0.8, 0.1, -3.0, 3.0, 121);
    std::size_t mid = g.x.size() / 2;
    CHECK(g.u[mid] == doctest::Approx(0.7));
    CHECK(g.ut[mid] == doctest::Approx(0.1));
    CHECK(g.u.front() == doctest::Approx(0.5).epsilon(1e-4));

    CHECK_THROWS_AS(make_constant_planar(0.7, 2.0, -2.0, 41), std::invalid_argument);
    CHECK_THROWS_AS(make_constant_planar(0.7, -2.0, 2.0, 1), std::invalid_argument);

    CHECK_NOTHROW(make_twist_director(0.4, 0.7, -3.0, 3.0, 201).validate());

    MaterialParams mp{2.0, 1.0, 0.0};
    BlowupProfileSpec spec;
    spec.eps = 0.05;
    std::vector<double> xs;
    for (double v = -9.0; v <= 9.0; v += 0.01) xs.push_back(v);
    CHECK_NOTHROW(make_blowup_director(mp, spec, xs).validate());
}

TEST_CASE("director csv round-trips bit-identically") {
    auto orig = make_twist_director(0.4, 0.7, -3.0, 3.0, 151);
    TempFile f("roundtrip.csv");
    save_initial_csv(f.path, orig);
    auto back = load_initial_csv(f.path);
    REQUIRE(back.x.size() == orig.x.size());
    for (std::size_t i = 0; i < orig.x.size(); ++i) {
        CHECK(back.x[i] == orig.x[i]);
        for (int k = 0; k < 3; ++k) {
            CHECK(back.n[i][k] == orig.n[i][k]);
            CHECK(back.nt[i][k] == orig.nt[i][k]);
        }
    }
}

TEST_CASE("planar header csv loads as embedded director data") {
    TempFile f("planar.csv");
    f.write("x,u,ut\n-1,0.5,0\n0,0.6,0.1\n1,0.5,0\n");
    auto d = load_initial_csv(f.path);
    REQUIRE(d.x.size() == 3);
    CHECK(d.n[1].x == doctest::Approx(std::cos(0.6)));
    CHECK(d.n[1].y == doctest::Approx(std::sin(0.6)));
    CHECK(norm(d.nt[1]) == doctest::Approx(0.1));
}

TEST_CASE("load errors carry the offending row") {
    TempFile f("bad.csv");

    f.write("x,u,ut\n0,0.5,0\n1,oops,0\n");
    CHECK_THROWS_WITH_AS(load_initial_csv(f.path),
                         doctest::Contains("row 3"), InputError);

    f.write("x,u,ut\n0,0.5\n");
    CHECK_THROWS_WITH_AS(load_initial_csv(f.path),
                         doctest::Contains("row 2"), InputError);

    f.write("x,n1,n2,n3,nt1,nt2,nt3\n0,1,0,0,0,0,0\n1,0.5,0,0,0,0,0\n");
    CHECK_THROWS_WITH_AS(load_initial_csv(f.path),
                         doctest::Contains("row 3"), InputError);

    f.write("a,b\n1,2\n");
    CHECK_THROWS_AS(load_initial_csv(f.path), InputError);

    f.write("x,u,ut\n0,0.5,0\n");
    CHECK_THROWS_AS(load_initial_csv(f.path), InputError);

    CHECK_THROWS_AS(load_initial_csv("/tmp/nlc_io_does_not_exist.csv"), InputError);
}

TEST_CASE("slice and blowup csv writers produce the documented columns") {
    TimeSlice s;
    TimeSlice::Point pt;
    pt.x = 0.25;
    pt.n = {1.0, 0.0, 0.0};
    pt.n_t = {0.0, 0.5, 0.0};
    pt.n_x = {0.0, 0.0, -0.5};
    pt.singular = true;
    s.points.push_back(pt);
    TempFile f1("slice.csv");
    write_slice_csv(f1.path, s);
    std::ifstream in(f1.path);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "x,n1,n2,n3,nt1,nt2,nt3,nx1,nx2,nx3,singular");
    CHECK(row == "0.25,1,0,0,0,0.5,0,0,0,-0.5,1");

    PlanarRun run;
    run.series.push_back({0.0, 1.0, 2.0, 3.0});
    TempFile f2("blowup.csv");
    write_blowup_csv(f2.path, run);
    std::ifstream in2(f2.path);
    std::getline(in2, header);
    std::getline(in2, row);
    CHECK(header == "t,max_abs_R,max_abs_S,energy");
    CHECK(row == "0,1,2,3");
}
