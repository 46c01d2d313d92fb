#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "coneflow/io.hpp"
#include "coneflow/soliton.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace coneflow;

namespace {

const fs::path kWork = [] {
    fs::path p = fs::temp_directory_path() / "coneflow-cli-test";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}();

struct RunResult {
    int code;
    std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
    const fs::path log = kWork / "run.log";
    const std::string cmd =
        std::string(CONEFLOW_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WEXITSTATUS(status), ss.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<double>> read_csv_columns(const fs::path& p, std::size_t n_cols) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);  // header
    std::vector<std::vector<double>> cols(n_cols);
    while (std::getline(in, line)) {
        std::stringstream row(line);
        std::string cell;
        for (std::size_t i = 0; i < n_cols; ++i) {
            REQUIRE(std::getline(row, cell, ','));
            cols[i].push_back(std::stod(cell));
        }
    }
    return cols;
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_cli("").code == 2);                                        // no subcommand
    CHECK(run_cli("soliton --out x.csv").code == 2);                     // missing --c
    CHECK(run_cli("soliton --c 0 --out x.csv --bogus 1").code == 2);     // unknown flag
    RunResult neg = run_cli("soliton --c -2 --out " + (kWork / "x.csv").string());
    CHECK(neg.code == 2);
    CHECK(neg.output.find("must exceed -1") != std::string::npos);
    CHECK(run_cli("soliton-solve --beta -1 --out x.csv").code == 2);
    CHECK(run_cli("football --beta1 -2 --beta2 0 --out x.json").code == 2);
    CHECK(run_cli("--help").code == 0);
}

TEST_CASE("runtime errors exit with code 1") {
    CHECK(run_cli("flow --config " + (kWork / "missing.json").string()).code == 1);
    // cmin outside the admissible range is caught at dispatch time
    CHECK(run_cli("sweep --cmin -2 --out " + (kWork / "x.csv").string()).code == 1);
}

TEST_CASE("soliton profile run writes the documented CSV") {
    const fs::path out = kWork / "p.csv";
    RunResult r = run_cli("soliton --c 0 --rmax 100 --tol 1e-10 --out " + out.string());
    CHECK(r.code == 0);
    CHECK(r.output.find("A_c=-2.000") != std::string::npos);
    std::ifstream in(out);
    std::string header;
    std::getline(in, header);
    CHECK(header == "r,u,A,B");
    auto cols = read_csv_columns(out, 4);
    REQUIRE(cols[0].size() > 100);
    for (std::size_t n = 1; n < cols[0].size(); ++n) CHECK(cols[0][n] > cols[0][n - 1]);
}

TEST_CASE("soliton-solve hits the target order") {
    const fs::path out = kWork / "t.csv";
    RunResult r = run_cli("soliton-solve --beta -0.5 --out " + out.string());
    CHECK(r.code == 0);
    CHECK(r.output.find("c=") != std::string::npos);
    CHECK(r.output.find("beta=-0.500000") != std::string::npos);
    CHECK(fs::exists(out));
}

TEST_CASE("sweep output is deterministic with monotone columns") {
    const fs::path a = kWork / "sweep_a.csv", b = kWork / "sweep_b.csv";
    const std::string args = "sweep --n 12 --cmin -0.9 --cmax 10 --out ";
    CHECK(run_cli(args + a.string()).code == 0);
    CHECK(run_cli(args + b.string()).code == 0);
    CHECK(slurp(a) == slurp(b));  // byte-identical rerun
    CHECK(!slurp(a).empty());

    auto cols = read_csv_columns(a, 6);
    REQUIRE(cols[0].size() == 12);
    for (std::size_t n = 1; n < 12; ++n) {
        CHECK(cols[0][n] > cols[0][n - 1]);  // c increasing
        CHECK(cols[1][n] > cols[1][n - 1]);  // A_c increasing toward -1
    }
    for (std::size_t n = 0; n < 12; ++n) {
        CHECK(cols[1][n] < -1.0);
        CHECK(cols[3][n] == doctest::Approx(-cols[1][n] - 2.0));  // beta column
        CHECK(cols[5][n] > 0.0);                                  // minK positive
    }
}

TEST_CASE("football JSON summary") {
    const fs::path out = kWork / "fb.json";
    RunResult r = run_cli("football --beta1 1 --beta2 0 --out " + out.string());
    CHECK(r.code == 0);
    const json j = json::parse(slurp(out));
    CHECK(j.at("lambda").get<double>() == doctest::Approx(1.0));
    CHECK(j.at("angular_factor").get<double>() == doctest::Approx(1.0));
    CHECK(j.at("angles")[0].get<double>() == doctest::Approx(4.0 * M_PI));
    CHECK(j.at("angles")[1].get<double>() == doctest::Approx(2.0 * M_PI));
    CHECK(j.at("area").get<double>() > 0.0);
}

TEST_CASE("holder-norm reports the constant-field value") {
    GridSpec g(-6.0, 0.0, 61, 16);
    const fs::path field = kWork / "const_field.csv";
    write_field_csv(ScalarField(g, 2.5), field);
    const fs::path out = kWork / "norm.json";
    RunResult r = run_cli("holder-norm --field " + field.string() +
                          " --beta 0 --kmax 6 --l 0 --alpha 0.5 --out " + out.string());
    CHECK(r.code == 0);
    const json j = json::parse(slurp(out));
    CHECK(j.at("total").get<double>() == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(j.at("parts").size() >= 2);
}

TEST_CASE("flow on the exported round sphere stays put") {
    // stage the metric and its base curvature from the c = 0 profile
    ExportedMetric ex =
        export_as_cone_metric(integrate_profile(0.0), GridSpec(-5.0, 2.0, 71, 8));
    const fs::path mjson = kWork / "sphere.json";
    write_metric_json(ex.metric, mjson);
    write_field_csv(ex.K0, kWork / "k0.csv");
    json cfg = {{"metric", "sphere.json"}, {"k0", "k0.csv"}, {"r_const", "auto"},
                {"T", 0.1},                {"dt", 0.01}};
    const fs::path cfile = kWork / "flow.json";
    std::ofstream(cfile) << cfg.dump(2);

    const fs::path outdir = kWork / "flowout";
    RunResult r = run_cli("flow --config " + cfile.string() + " --outdir " + outdir.string());
    CHECK(r.code == 0);
    CHECK(fs::exists(outdir / "u_000000.csv"));
    CHECK(fs::exists(outdir / "u_000010.csv"));
    auto ledger = read_csv_columns(outdir / "ledger.csv", 6);
    REQUIRE(ledger[0].size() == 11);
    const double v0 = ledger[1][0];
    for (std::size_t n = 0; n < 11; ++n) {
        CHECK(std::abs(ledger[1][n] - v0) / v0 < 1e-8);  // volume drift
        CHECK(ledger[4][n] < 1e-8);                      // sup_u
    }
}

TEST_CASE("heat run with space-constant forcing reproduces u = t") {
    ConeMetric m(ConeChart(0.0, 4), ScalarField(GridSpec(-4.0, 0.0, 41, 8)),
                 ScalarField(GridSpec(-4.0, 0.0, 41, 8)), 2.0);
    const fs::path mjson = kWork / "flat.json";
    write_metric_json(m, mjson);
    json cfg = {{"metric", "flat.json"}, {"a", 1.0}, {"f", 1.0},
                {"T", 0.1},              {"dt", 0.02}, {"k", 4}};
    const fs::path cfile = kWork / "heat.json";
    std::ofstream(cfile) << cfg.dump(2);

    const fs::path outdir = kWork / "heatout";
    RunResult r = run_cli("heat --config " + cfile.string() + " --outdir " + outdir.string());
    CHECK(r.code == 0);
    auto times = read_csv_columns(outdir / "times.csv", 1);
    REQUIRE(times[0].size() == 6);
    ScalarField last = read_field_csv(outdir / "frame_000005.csv");
    ScalarField diff = last - ScalarField(last.grid(), 0.1);
    CHECK(diff.max_abs() <= 1e-10);
}
