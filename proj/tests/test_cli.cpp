#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

int run(const std::string& cli_args) {
    std::string cmd = std::string(NLCWAVE_BIN) + " " + cli_args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("verify on vacuum data exits 0 with zero residuals") {
    CHECK(run("verify --profile constant --grid-step 0.05 --out /tmp/nlc_cli_vac") == 0);
    auto m = slurp("/tmp/nlc_cli_vac/manifest.json");
    CHECK(m.find("\"max_residual\": 0.0") != std::string::npos);
    CHECK(m.find("\"pass\": true") != std::string::npos);
}

TEST_CASE("config and input errors exit 2") {
    std::ofstream("/tmp/nlc_cli_bad.json") << "{\"alpha\": -1}\n";
    CHECK(run("verify --config /tmp/nlc_cli_bad.json --out /tmp/nlc_cli_e1") == 2);
    CHECK(run("simulate --profile nope --out /tmp/nlc_cli_e2") == 2);
    CHECK(run("simulate --times 0.2,0.1 --out /tmp/nlc_cli_e3") == 2);
    CHECK(run("simulate --grid-step 0.05 --times 99 --out /tmp/nlc_cli_e4") == 2);
    CHECK(run("simulate --initial /tmp/nlc_cli_missing.csv --out /tmp/nlc_cli_e5") == 2);
    CHECK(run("bogus-subcommand") == 2);
}

TEST_CASE("blowup-demo detects blowup below the bound") {
    CHECK(run("blowup-demo --eps 0.05 --mu 0 --out /tmp/nlc_cli_bd") == 0);
    auto r = slurp("/tmp/nlc_cli_bd/report.json");
    CHECK(r.find("\"blew_up\": true") != std::string::npos);
}

TEST_CASE("compare-fd on smooth data passes the gate") {
    CHECK(run("compare-fd --grid-step 0.02 --mu 0.5 --times 0.1,0.2 "
              "--out /tmp/nlc_cli_cf") == 0);
    auto csv = slurp("/tmp/nlc_cli_cf/compare.csv");
    CHECK(csv.rfind("time,linf_error,l2_error", 0) == 0);
}

TEST_CASE("identical configs give byte-identical artifacts") {
    std::string flags = "simulate --grid-step 0.05 --mu 0.5 --times 0.05,0.1 --out ";
    REQUIRE(run(flags + "/tmp/nlc_cli_d1") == 0);
    REQUIRE(run(flags + "/tmp/nlc_cli_d2") == 0);
    for (const char* f : {"grid.csv", "slice_000.csv", "slice_001.csv", "slices.json",
                          "summary.json"}) {
        CHECK(slurp(std::string("/tmp/nlc_cli_d1/") + f) ==
              slurp(std::string("/tmp/nlc_cli_d2/") + f));
    }
}
