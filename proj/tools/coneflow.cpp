// coneflow command-line front end: soliton shooting, flows, heat runs,
// and weighted Holder norms on truncated cone surfaces.
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "coneflow/flow.hpp"
#include "coneflow/heat.hpp"
#include "coneflow/holder.hpp"
#include "coneflow/io.hpp"
#include "coneflow/soliton.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace coneflow;

namespace {

int thread_budget() {
    if (const char* env = std::getenv("CONEFLOW_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? int(hc) : 1;
}

void write_profile_csv(const SolitonProfile& p, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << "r,u,A,B\n";
    for (const auto& s : p.samples)
        out << format_double(s.r) << ',' << format_double(s.u) << ',' << format_double(s.A)
            << ',' << format_double(s.B) << '\n';
}

void print_profile_summary(const SolitonProfile& p) {
    std::printf("A_c=%.6f %s%.3g beta=%.6f area=%.5f minK=%.6g\n", p.A_limit,
                p.limit_reliable ? "±" : "±(unreliable) ", p.tail_uncertainty,
                -p.A_limit - 2.0, p.area, curvature_min(p));
}

IntegrateOptions integrate_opts(double r_max, double eps_b, double tol, double r_start) {
    IntegrateOptions o;
    o.r_max = r_max;
    o.eps_B = eps_b;
    o.tol = tol;
    o.r_start = r_start;
    return o;
}

SpaceTimeField load_coefficient(const json& j, const fs::path& dir, const GridSpec& grid,
                                const char* name) {
    if (j.is_number()) return SpaceTimeField::constant(ScalarField(grid, j.get<double>()));
    if (j.is_string()) {
        ScalarField f = read_field_csv(dir / j.get<std::string>());
        if (!(f.grid() == grid))
            throw std::runtime_error(std::string(name) + ": grid does not match the metric");
        return SpaceTimeField::constant(std::move(f));
    }
    throw std::runtime_error(std::string(name) + ": expected a number or a CSV path");
}

json norm_report_json(const NormReport& rep) {
    json parts = json::array();
    for (const auto& p : rep.parts) parts.push_back({{"k", p.k}, {"value", p.value}});
    return {{"total", rep.total},
            {"parts", parts},
            {"saturating_k", rep.saturating_k},
            {"slack", rep.slack}};
}

int cmd_soliton(double c, double r_max, double eps_b, double tol, double r_start,
                const std::string& out) {
    SolitonProfile p = integrate_profile(c, integrate_opts(r_max, eps_b, tol, r_start));
    write_profile_csv(p, out);
    print_profile_summary(p);
    return 0;
}

int cmd_soliton_solve(double beta, double tol_beta, double r_max, double tol,
                      const std::string& out) {
    auto [c, p] = shoot_for_beta(beta, tol_beta, integrate_opts(r_max, 1e-12, tol, 0.0));
    write_profile_csv(p, out);
    std::printf("c=%.10g ", c);
    print_profile_summary(p);
    return 0;
}

int cmd_sweep(int n, double c_min, double c_max, double tol, const std::string& out) {
    if (n < 2) throw std::runtime_error("sweep: need at least 2 points");
    if (!(c_min > -1.0) || !(c_max > c_min))
        throw std::runtime_error("sweep: need -1 < cmin < cmax");
    // geometric spacing in 1+c resolves the c -> -1 blowup region
    std::vector<double> cs(n);
    for (int i = 0; i < n; ++i)
        cs[i] = -1.0 + (1.0 + c_min) * std::pow((1.0 + c_max) / (1.0 + c_min),
                                                double(i) / (n - 1));
    struct Row {
        double c, A_c, unc, beta, area, minK;
    };
    std::vector<Row> rows(n);
    std::atomic<int> next{0};
    auto worker = [&] {
        IntegrateOptions o;
        o.tol = tol;
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            SolitonProfile p = integrate_profile(cs[i], o);
            rows[i] = {cs[i], p.A_limit, p.tail_uncertainty, -p.A_limit - 2.0, p.area,
                       curvature_min(p)};
        }
    };
    const int nthreads = std::min(thread_budget(), n);
    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot open " + out);
    os << "c,A_c,uncertainty,beta,area,minK\n";
    for (const Row& r : rows)
        os << format_double(r.c) << ',' << format_double(r.A_c) << ',' << format_double(r.unc)
           << ',' << format_double(r.beta) << ',' << format_double(r.area) << ','
           << format_double(r.minK) << '\n';
    std::printf("sweep n=%d c in [%.6g, %.6g] -> %s\n", n, c_min, c_max, out.c_str());
    return 0;
}

int cmd_football(double beta1, double beta2, double tol_beta, const std::string& out) {
    FootballMetric fb = construct_football(beta1, beta2, tol_beta);
    json j = {{"beta1", fb.beta1},
              {"beta2", fb.beta2},
              {"lambda", fb.lambda},
              {"c", fb.c},
              {"angular_factor", fb.angular_factor},
              {"angles", {fb.angle1(), fb.angle2()}},
              {"area", fb.total_area()}};
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot open " + out);
    os << j.dump(2) << '\n';
    std::printf("lambda=%.6g c=%.10g angles=(%.6g, %.6g) area=%.6g\n", fb.lambda, fb.c,
                fb.angle1(), fb.angle2(), fb.total_area());
    return 0;
}

int cmd_flow(const std::string& config, const std::string& outdir) {
    std::ifstream in(config);
    if (!in) throw std::runtime_error("cannot open " + config);
    const json j = json::parse(in);
    const fs::path dir = fs::path(config).parent_path();

    ConeMetric g0 = read_metric_json(dir / j.at("metric").get<std::string>());
    ScalarField K0 = j.contains("k0")
                         ? read_field_csv(dir / j.at("k0").get<std::string>())
                         : compute_base_curvature(g0);
    if (!(K0.grid() == g0.grid())) throw std::runtime_error("flow: K0 grid mismatch");
    double r_const;
    if (!j.contains("r_const") || j.at("r_const") == "auto")
        r_const = auto_r_const(g0, K0);
    else
        r_const = j.at("r_const").get<double>();
    FlowProblem prob(std::move(g0), std::move(K0), r_const, j.at("T").get<double>(),
                     j.at("dt").get<double>());
    if (j.contains("picard_tol")) prob.picard_tol = j.at("picard_tol").get<double>();
    if (j.contains("picard_max")) prob.picard_max = j.at("picard_max").get<int>();
    if (j.contains("sup_guard")) prob.sup_guard = j.at("sup_guard").get<double>();

    FlowTrajectory traj = run_flow(prob);
    fs::create_directories(outdir);
    for (std::size_t nf = 0; nf < traj.u.size(); ++nf) {
        char name[32];
        std::snprintf(name, sizeof name, "u_%06zu.csv", nf);
        write_field_csv(traj.u.frame(nf), fs::path(outdir) / name);
    }
    std::ofstream ledger(fs::path(outdir) / "ledger.csv");
    ledger << "t,volume,gb_integral,boundary_flux,sup_u,picard_iters\n";
    for (const auto& e : traj.ledger)
        ledger << format_double(e.t) << ',' << format_double(e.volume) << ','
               << format_double(e.gb_integral) << ',' << format_double(e.boundary_flux) << ','
               << format_double(e.sup_u) << ',' << e.picard_iters << '\n';
    const auto& last = traj.ledger.back();
    std::printf("r_const=%.6g steps=%zu volume=%.8g (drift %.3g) sup_u=%.3g\n", r_const,
                traj.ledger.size() - 1, last.volume,
                std::abs(last.volume - traj.ledger.front().volume) / traj.ledger.front().volume,
                last.sup_u);
    return 0;
}

int cmd_heat(const std::string& config, const std::string& outdir) {
    std::ifstream in(config);
    if (!in) throw std::runtime_error("cannot open " + config);
    const json j = json::parse(in);
    const fs::path dir = fs::path(config).parent_path();

    ConeMetric metric = read_metric_json(dir / j.at("metric").get<std::string>());
    const GridSpec& grid = metric.grid();
    SpaceTimeField a = load_coefficient(j.at("a"), dir, grid, "a");
    SpaceTimeField f = load_coefficient(j.at("f"), dir, grid, "f");
    ScalarField u0(grid);
    if (j.contains("u0")) {
        SpaceTimeField tmp = load_coefficient(j.at("u0"), dir, grid, "u0");
        u0 = tmp.frame(0);
    }
    HeatProblem prob(std::move(metric), std::move(a), std::move(f), std::move(u0),
                     j.at("T").get<double>(), j.at("dt").get<double>());

    fs::create_directories(outdir);
    SpaceTimeField sol = [&] {
        if (j.contains("k_schedule")) {
            auto [deep, study] = solve_singular(prob, j.at("k_schedule").get<std::vector<int>>());
            std::printf("levels:");
            for (int k : study.levels) std::printf(" %d", k);
            std::printf("  sup_gaps:");
            for (double g : study.sup_gaps) std::printf(" %.3g", g);
            std::printf("  converging=%d\n", int(study.converging));
            return std::move(deep);
        }
        const int k = j.contains("k") ? j.at("k").get<int>() : prob.metric.chart.k_max;
        return solve_truncated(prob, k);
    }();

    std::ofstream times(fs::path(outdir) / "times.csv");
    times << "t\n";
    for (std::size_t nf = 0; nf < sol.size(); ++nf) {
        times << format_double(sol.times()[nf]) << '\n';
        char name[32];
        std::snprintf(name, sizeof name, "frame_%06zu.csv", nf);
        write_field_csv(sol.frame(nf), fs::path(outdir) / name);
    }
    std::printf("frames=%zu T=%.6g sup|u(T)|=%.6g\n", sol.size(), sol.times().back(),
                sol.frame(sol.size() - 1).max_abs());
    return 0;
}

int cmd_holder(const std::string& field_path, double beta, int k_max, int l, double alpha,
               int stride, const std::string& out) {
    ScalarField field = read_field_csv(field_path);
    HolderOptions opts;
    opts.pair_stride = stride;
    NormReport rep = weighted_holder_norm(field, ConeChart(beta, k_max), HolderSpec(l, alpha),
                                          opts);
    if (!out.empty()) {
        std::ofstream os(out);
        if (!os) throw std::runtime_error("cannot open " + out);
        os << norm_report_json(rep).dump(2) << '\n';
    }
    std::printf("total=%.8g saturating_k=%d parts=%zu slack=%.3g\n", rep.total,
                rep.saturating_k, rep.parts.size(), rep.slack);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coneflow: Ricci solitons, flows and heat equations on cone surfaces"};
    app.require_subcommand(1);

    double c = 0.0, r_max = 1e6, eps_b = 1e-12, tol = 1e-10, r_start = 0.0;
    double beta = 0.0, tol_beta = 1e-6, beta1 = 0.0, beta2 = 0.0, alpha = 0.5;
    double c_min = -0.99, c_max = 100.0;
    int n = 50, k_max = 8, l = 0, stride = 1;
    std::string out, config, outdir = ".", field_path;

    auto* s_sol = app.add_subcommand("soliton", "integrate one soliton profile");
    s_sol->add_option("--c", c, "shooting parameter, > -1 (or exactly -1)")->required();
    s_sol->add_option("--rmax", r_max, "outer integration radius");
    s_sol->add_option("--eps-b", eps_b, "stop when r*B drops below this");
    s_sol->add_option("--tol", tol, "integrator tolerance");
    s_sol->add_option("--rstart", r_start, "series launch radius (0 = auto)");
    s_sol->add_option("--out", out, "profile CSV path")->required();

    auto* s_slv = app.add_subcommand("soliton-solve", "shoot for a target cone order");
    s_slv->add_option("--beta", beta, "target cone order, > -1")->required();
    s_slv->add_option("--tol-beta", tol_beta, "|A_c + beta + 2| tolerance");
    s_slv->add_option("--rmax", r_max, "outer integration radius");
    s_slv->add_option("--tol", tol, "integrator tolerance");
    s_slv->add_option("--out", out, "profile CSV path")->required();

    auto* s_swp = app.add_subcommand("sweep", "sweep c and record limits");
    s_swp->add_option("--n", n, "number of c values");
    s_swp->add_option("--cmin", c_min, "lower end, > -1");
    s_swp->add_option("--cmax", c_max, "upper end");
    s_swp->add_option("--tol", tol, "integrator tolerance");
    s_swp->add_option("--out", out, "sweep CSV path")->required();

    auto* s_fb = app.add_subcommand("football", "two-cone soliton metric");
    s_fb->add_option("--beta1", beta1, "first cone order")->required();
    s_fb->add_option("--beta2", beta2, "second cone order")->required();
    s_fb->add_option("--tol-beta", tol_beta, "shooting tolerance");
    s_fb->add_option("--out", out, "football JSON path")->required();

    auto* s_flow = app.add_subcommand("flow", "normalized Ricci flow");
    s_flow->add_option("--config", config, "FlowProblem JSON")->required();
    s_flow->add_option("--outdir", outdir, "trajectory output directory");

    auto* s_heat = app.add_subcommand("heat", "linear heat equation");
    s_heat->add_option("--config", config, "HeatProblem JSON")->required();
    s_heat->add_option("--outdir", outdir, "frame output directory");

    auto* s_hn = app.add_subcommand("holder-norm", "weighted Holder norm of a field CSV");
    s_hn->add_option("--field", field_path, "ScalarField CSV")->required();
    s_hn->add_option("--beta", beta, "cone order of the chart")->required();
    s_hn->add_option("--kmax", k_max, "chart truncation depth")->required();
    s_hn->add_option("--l", l, "derivative order, 0..2");
    s_hn->add_option("--alpha", alpha, "Holder exponent in (0,1)");
    s_hn->add_option("--stride", stride, "pair subsampling stride (1 = all pairs)");
    s_hn->add_option("--out", out, "NormReport JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints usage/help
        return code == 0 ? 0 : 2;
    }

    try {
        if (s_sol->parsed()) {
            if (c < -1.0) {
                std::fprintf(stderr, "usage error: --c must exceed -1\n");
                return 2;
            }
            return cmd_soliton(c, r_max, eps_b, tol, r_start, out);
        }
        if (s_slv->parsed()) {
            if (beta <= -1.0) {
                std::fprintf(stderr, "usage error: --beta must exceed -1\n");
                return 2;
            }
            return cmd_soliton_solve(beta, tol_beta, r_max, tol, out);
        }
        if (s_swp->parsed()) return cmd_sweep(n, c_min, c_max, tol, out);
        if (s_fb->parsed()) {
            if (beta1 <= -1.0 || beta2 <= -1.0) {
                std::fprintf(stderr, "usage error: cone orders must exceed -1\n");
                return 2;
            }
            return cmd_football(beta1, beta2, tol_beta, out);
        }
        if (s_flow->parsed()) return cmd_flow(config, outdir);
        if (s_heat->parsed()) return cmd_heat(config, outdir);
        if (s_hn->parsed()) return cmd_holder(field_path, beta, k_max, l, alpha, stride, out);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
