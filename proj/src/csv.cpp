#include "biphoton/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "biphoton/constants.hpp"

namespace biphoton {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    return os;
}

}  // namespace

void write_matrix_csv(const std::string& path, std::span<const double> row_axis,
                      std::span<const double> col_axis, const Eigen::MatrixXd& m) {
    if (m.rows() != static_cast<long>(row_axis.size()) ||
        m.cols() != static_cast<long>(col_axis.size()))
        throw std::invalid_argument("matrix does not match its axes");
    auto os = open_out(path);
    os << "0";
    for (double c : col_axis) os << ',' << format_double(c);
    os << '\n';
    for (long i = 0; i < m.rows(); ++i) {
        os << format_double(row_axis[i]);
        for (long j = 0; j < m.cols(); ++j) os << ',' << format_double(m(i, j));
        os << '\n';
    }
}

void write_columns_csv(const std::string& path, const std::vector<std::string>& headers,
                       const std::vector<std::span<const double>>& columns) {
    if (headers.size() != columns.size() || columns.empty())
        throw std::invalid_argument("column headers do not match the data");
    const size_t rows = columns.front().size();
    for (const auto& c : columns)
        if (c.size() != rows) throw std::invalid_argument("columns have unequal lengths");
    auto os = open_out(path);
    for (size_t j = 0; j < headers.size(); ++j)
        os << (j ? "," : "") << headers[j];
    os << '\n';
    for (size_t i = 0; i < rows; ++i) {
        for (size_t j = 0; j < columns.size(); ++j)
            os << (j ? "," : "") << format_double(columns[j][i]);
        os << '\n';
    }
}

void write_sidecar(const std::string& artifact_path, const std::string& resolved_config,
                   const std::vector<std::pair<std::string, std::string>>& extra) {
    auto os = open_out(artifact_path + ".meta");
    os << "# sidecar for " << artifact_path << "\n";
    os << "# generator biphoton " << kVersion << "\n";
    os << "# reusable as --config to reproduce this artifact bit-identically\n";
    os << resolved_config;
    for (const auto& [k, v] : extra) os << k << " = " << v << "\n";
}

}  // namespace biphoton
