#ifndef CONEFLOW_IO_HPP
#define CONEFLOW_IO_HPP

#include <filesystem>
#include <string>

#include "coneflow/surface.hpp"

namespace coneflow {

// ScalarField CSV: header "w,theta,value", rows w-major, 17 significant digits.
void write_field_csv(const ScalarField& field, const std::filesystem::path& path);
ScalarField read_field_csv(const std::filesystem::path& path);

// ConeMetric JSON: {beta, k_max, w_max, n_w, n_theta, euler,
// background: "<csv>", conformal: "<csv>"}; the CSV paths are relative to
// the JSON file's directory.
void write_metric_json(const ConeMetric& metric, const std::filesystem::path& path);
ConeMetric read_metric_json(const std::filesystem::path& path);

std::string format_double(double v);  // %.17g

}  // namespace coneflow

#endif
