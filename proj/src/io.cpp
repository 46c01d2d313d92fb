#include "coneflow/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace coneflow {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_field_csv(const ScalarField& field, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << "w,theta,value\n";
    const GridSpec& g = field.grid();
    for (int i = 0; i < g.n_w; ++i)
        for (int j = 0; j < g.n_theta; ++j)
            out << format_double(g.w(i)) << ',' << format_double(g.theta(j)) << ','
                << format_double(field.at(i, j)) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

ScalarField read_field_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("w,theta,value", 0) != 0)
        throw std::runtime_error("bad field CSV header in " + path.string());
    std::vector<double> ws, thetas, vals;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        double w, th, v;
        char c1, c2;
        if (!(ss >> w >> c1 >> th >> c2 >> v) || c1 != ',' || c2 != ',')
            throw std::runtime_error("bad field CSV row in " + path.string());
        ws.push_back(w);
        thetas.push_back(th);
        vals.push_back(v);
    }
    if (vals.empty()) throw std::runtime_error("empty field CSV: " + path.string());
    int n_theta = 1;
    while (n_theta < int(ws.size()) && ws[n_theta] == ws[0]) ++n_theta;
    if (ws.size() % n_theta != 0)
        throw std::runtime_error("ragged field CSV: " + path.string());
    int n_w = int(ws.size()) / n_theta;
    GridSpec grid(ws.front(), ws.back(), n_w, n_theta);
    return ScalarField(grid, std::move(vals));
}

void write_metric_json(const ConeMetric& metric, const std::filesystem::path& path) {
    const auto dir = path.parent_path();
    const std::string stem = path.stem().string();
    const std::string bg = stem + "_background.csv";
    const std::string cf = stem + "_conformal.csv";
    write_field_csv(metric.background, dir / bg);
    write_field_csv(metric.conformal, dir / cf);
    nlohmann::json j = {{"beta", metric.chart.beta},
                        {"k_max", metric.chart.k_max},
                        {"w_max", metric.grid().w_max},
                        {"n_w", metric.grid().n_w},
                        {"n_theta", metric.grid().n_theta},
                        {"euler", metric.euler},
                        {"background", bg},
                        {"conformal", cf}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << j.dump(2) << '\n';
}

ConeMetric read_metric_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    nlohmann::json j;
    in >> j;
    const auto dir = path.parent_path();
    ScalarField bg = read_field_csv(dir / j.at("background").get<std::string>());
    ScalarField cf = read_field_csv(dir / j.at("conformal").get<std::string>());
    ConeChart chart(j.at("beta").get<double>(), j.at("k_max").get<int>());
    ConeMetric m(chart, std::move(bg), std::move(cf), j.at("euler").get<double>());
    if (m.grid().n_w != j.at("n_w").get<int>() || m.grid().n_theta != j.at("n_theta").get<int>())
        throw std::runtime_error("metric JSON grid disagrees with CSV: " + path.string());
    return m;
}

}  // namespace coneflow
