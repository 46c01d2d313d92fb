#include "coneflow/heat.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

namespace coneflow {

namespace {
constexpr double kLn2 = 0.6931471805599453094;
constexpr double kSolveTol = 1e-10;
}  // namespace

SpaceTimeField::SpaceTimeField(std::vector<double> times, std::vector<ScalarField> frames)
    : times_(std::move(times)), frames_(std::move(frames)) {
    if (times_.size() != frames_.size() || frames_.empty())
        throw std::invalid_argument("SpaceTimeField: times and frames must match and be nonempty");
    for (std::size_t n = 1; n < times_.size(); ++n) {
        if (!(times_[n] > times_[n - 1]))
            throw std::invalid_argument("SpaceTimeField: times must increase");
        require_same_grid(frames_[n], frames_[0], "SpaceTimeField");
    }
}

SpaceTimeField SpaceTimeField::constant(ScalarField frame) {
    return SpaceTimeField({0.0}, {std::move(frame)});
}

ScalarField SpaceTimeField::at_time(double t) const {
    if (frames_.size() == 1 || t <= times_.front()) return frames_.front();
    if (t >= times_.back()) return frames_.back();
    std::size_t n = 1;
    while (times_[n] < t) ++n;
    const double lam = (t - times_[n - 1]) / (times_[n] - times_[n - 1]);
    ScalarField out = frames_[n - 1];
    out *= (1.0 - lam);
    ScalarField hi = frames_[n];
    hi *= lam;
    out += hi;
    return out;
}

HeatProblem::HeatProblem(ConeMetric metric_, SpaceTimeField a_, SpaceTimeField f_,
                         ScalarField u0_, double T_, double dt_)
    : metric(std::move(metric_)),
      a(std::move(a_)),
      f(std::move(f_)),
      u0(std::move(u0_)),
      T(T_),
      dt(dt_) {
    require_same_grid(metric.background, u0, "HeatProblem");
    require_same_grid(metric.background, a.frames().front(), "HeatProblem(a)");
    require_same_grid(metric.background, f.frames().front(), "HeatProblem(f)");
    if (!(T > 0.0) || !(dt > 0.0))
        throw std::invalid_argument("HeatProblem: T and dt must be positive");
    for (const auto& fr : a.frames())
        for (double v : fr.values())
            if (v < 0.0) throw std::invalid_argument("HeatProblem: a must be nonnegative");
}

ScalarField truncate_field(const ScalarField& field, int k) {
    const GridSpec& g = field.grid();
    const double target = -double(k);
    int i0 = -1;
    for (int i = 0; i < g.n_w; ++i)
        if (std::abs(g.w(i) - target) < 1e-9 * std::max(1.0, std::abs(target))) {
            i0 = i;
            break;
        }
    if (i0 < 0)
        throw std::invalid_argument("truncate_field: w = -k does not land on a grid row (k=" +
                                    std::to_string(k) + ")");
    if (i0 == 0) return field;
    GridSpec sub(target, g.w_max, g.n_w - i0, g.n_theta);
    ScalarField out(sub);
    for (int i = 0; i < sub.n_w; ++i)
        for (int j = 0; j < g.n_theta; ++j) out.at(i, j) = field.at(i + i0, j);
    return out;
}

ConeMetric truncate_metric(const ConeMetric& metric, int k) {
    if (k > metric.chart.k_max)
        throw std::invalid_argument("truncate_metric: k exceeds the chart's k_max");
    return ConeMetric(ConeChart(metric.chart.beta, k), truncate_field(metric.background, k),
                      truncate_field(metric.conformal, k), metric.euler);
}

namespace {

SpaceTimeField truncate_spacetime(const SpaceTimeField& f, int k) {
    std::vector<ScalarField> frames;
    frames.reserve(f.size());
    for (const auto& fr : f.frames()) frames.push_back(truncate_field(fr, k));
    return SpaceTimeField(f.times(), std::move(frames));
}

using SpMat = Eigen::SparseMatrix<double>;

// A = I - dt * diag(m) * L, with L the (w,theta) cone stencil (Neumann in
// w via ghost reflection, periodic in theta) and m the pointwise
// coefficient a * e^{-2(u+w~)} / rho^2.
SpMat assemble(const ConeMetric& metric, const ScalarField& a_t, double dt) {
    const GridSpec& g = metric.grid();
    const int nw = g.n_w, nt = g.n_theta;
    const double cw = 1.0 / (kLn2 * kLn2 * g.h_w() * g.h_w());
    const double ct = 1.0 / ((metric.chart.beta + 1.0) * (metric.chart.beta + 1.0) *
                             g.h_theta() * g.h_theta());
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(std::size_t(nw) * nt * 5);
    auto id = [nt](int i, int j) { return i * nt + ((j % nt + nt) % nt); };
    for (int i = 0; i < nw; ++i) {
        const double rho = rho_of_w(g.w(i));
        for (int j = 0; j < nt; ++j) {
            const double m = a_t.at(i, j) *
                             std::exp(-2.0 * (metric.conformal.at(i, j) +
                                              metric.background.at(i, j))) /
                             (rho * rho);
            const double aw = dt * m * cw, at = dt * m * ct;
            double diag = 1.0 + 2.0 * aw + 2.0 * at;
            trips.emplace_back(id(i, j), id(i, j - 1), -at);
            trips.emplace_back(id(i, j), id(i, j + 1), -at);
            if (i == 0) {
                trips.emplace_back(id(i, j), id(1, j), -2.0 * aw);
            } else if (i == nw - 1) {
                trips.emplace_back(id(i, j), id(nw - 2, j), -2.0 * aw);
            } else {
                trips.emplace_back(id(i, j), id(i - 1, j), -aw);
                trips.emplace_back(id(i, j), id(i + 1, j), -aw);
            }
            trips.emplace_back(id(i, j), id(i, j), diag);
        }
    }
    SpMat A(nw * nt, nw * nt);
    A.setFromTriplets(trips.begin(), trips.end());
    return A;
}

}  // namespace

SpaceTimeField solve_truncated(const HeatProblem& problem, int k) {
    ConeMetric metric = truncate_metric(problem.metric, k);
    SpaceTimeField a = truncate_spacetime(problem.a, k);
    SpaceTimeField f = truncate_spacetime(problem.f, k);
    ScalarField u = truncate_field(problem.u0, k);

    const GridSpec& g = metric.grid();
    const int n = g.n_w * g.n_theta;
    const int n_steps = std::max(1, int(std::llround(problem.T / problem.dt)));
    const double dt = problem.T / n_steps;

    Eigen::BiCGSTAB<SpMat, Eigen::IncompleteLUT<double>> solver;
    solver.setTolerance(kSolveTol);
    solver.setMaxIterations(20000);
    const bool constant_a = (a.size() == 1);
    SpMat A;
    if (constant_a) {
        A = assemble(metric, a.frame(0), dt);
        solver.compute(A);
    }

    std::vector<double> times{0.0};
    std::vector<ScalarField> frames{u};
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(u.values().data(), n);
    for (int step = 1; step <= n_steps; ++step) {
        const double t_new = step * dt;
        if (!constant_a) {
            A = assemble(metric, a.at_time(t_new), dt);
            solver.compute(A);
        }
        ScalarField f_t = f.at_time(t_new);
        Eigen::VectorXd b = x + dt * Eigen::Map<const Eigen::VectorXd>(f_t.values().data(), n);
        x = solver.solveWithGuess(b, x);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("solve_truncated: linear solve did not converge, residual " +
                                     std::to_string(solver.error()));
        std::vector<double> vals(x.data(), x.data() + n);
        frames.emplace_back(g, std::move(vals));
        times.push_back(t_new);
    }
    return SpaceTimeField(std::move(times), std::move(frames));
}

std::pair<SpaceTimeField, TruncationStudy> solve_singular(const HeatProblem& problem,
                                                          const std::vector<int>& k_schedule) {
    if (k_schedule.empty())
        throw std::invalid_argument("solve_singular: empty level schedule");
    for (std::size_t i = 1; i < k_schedule.size(); ++i)
        if (k_schedule[i] <= k_schedule[i - 1])
            throw std::invalid_argument("solve_singular: levels must increase");
    if (k_schedule.back() > problem.metric.chart.k_max)
        throw std::invalid_argument("solve_singular: level exceeds chart k_max");

    const int band_k = k_schedule.front();
    std::vector<SpaceTimeField> sols;
    for (int k : k_schedule) sols.push_back(solve_truncated(problem, k));

    TruncationStudy study;
    study.levels = k_schedule;
    for (std::size_t p = 1; p < sols.size(); ++p) {
        double gap = 0.0;
        for (std::size_t n = 0; n < sols[p].size(); ++n) {
            ScalarField lo = truncate_field(sols[p - 1].frame(n), band_k);
            ScalarField hi = truncate_field(sols[p].frame(n), band_k);
            gap = std::max(gap, (hi - lo).max_abs());
        }
        study.sup_gaps.push_back(gap);
    }
    study.converging = true;
    if (study.sup_gaps.size() >= 2) {
        const auto& s = study.sup_gaps;
        study.converging = s[s.size() - 1] <= s[s.size() - 2] + 1e-15;
    }
    return {std::move(sols.back()), std::move(study)};
}

MaxPrincipleReport check_max_principle(const SpaceTimeField& solution, double C1, double C2) {
    double margin = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < solution.size(); ++n)
        margin = std::max(margin,
                          solution.frame(n).max_abs() - C1 - C2 * solution.times()[n]);
    return {margin, margin <= 1e-9};
}

double energy(const ConeMetric& metric, const ScalarField& field) {
    require_same_grid(metric.background, field, "energy");
    const GridSpec& g = field.grid();
    const double b1 = metric.chart.beta + 1.0;
    const double cell = g.h_w() * g.h_theta();
    double sum = 0.0;
    for (int i = 0; i < g.n_w; ++i) {
        const double tw = (i == 0 || i == g.n_w - 1) ? 0.5 : 1.0;
        for (int j = 0; j < g.n_theta; ++j) {
            const double fw = field.dw(i, j);
            const double ft = field.dtheta(i, j);
            sum += tw * cell * b1 * (fw * fw / kLn2 + kLn2 * ft * ft / (b1 * b1));
        }
    }
    return sum;
}

EnergyGrowthReport check_energy_growth(const HeatProblem& problem,
                                       const SpaceTimeField& solution) {
    if (problem.u0.max_abs() > 0.0)
        throw std::invalid_argument("check_energy_growth: requires u0 == 0");
    double ef = 0.0;
    for (const auto& fr : problem.f.frames()) ef = std::max(ef, energy(problem.metric, fr));
    const int k = int(std::llround(-solution.grid().w_min));
    ConeMetric metric = truncate_metric(problem.metric, k);
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < solution.size(); ++n) {
        const double t = solution.times()[n];
        worst = std::max(worst, energy(metric, solution.frame(n)) - (std::exp(t) - 1.0) * ef);
    }
    return {worst, worst <= 1e-8};
}

}  // namespace coneflow
