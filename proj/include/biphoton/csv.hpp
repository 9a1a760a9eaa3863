#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

namespace biphoton {

// Matrix CSV: cell (0,0) is 0, first row is the column axis, first column
// the row axis. Values use max-precision %.17g so reruns are bit-identical.
void write_matrix_csv(const std::string& path, std::span<const double> row_axis,
                      std::span<const double> col_axis, const Eigen::MatrixXd& m);

void write_columns_csv(const std::string& path, const std::vector<std::string>& headers,
                       const std::vector<std::span<const double>>& columns);

// Sidecar metadata next to an artifact: "<path>.meta", plain key=value
// (itself a valid config) plus commented version/seed lines.
void write_sidecar(const std::string& artifact_path, const std::string& resolved_config,
                   const std::vector<std::pair<std::string, std::string>>& extra = {});

std::string format_double(double v);  // shortest round-trip-exact decimal

}  // namespace biphoton
