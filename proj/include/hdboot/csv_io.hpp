#pragma once

#include "hdboot/models.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace hdboot {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

/// Header `t,x1,...,xd`, one row per time index.
void write_series_csv(const std::filesystem::path& path, const TimeSeriesMatrix& x);

/// Reads a numeric CSV.  A non-numeric first line is treated as a header,
/// and a leading column named `t` is dropped.
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

/// One value per line.
void write_vector(const std::filesystem::path& path, const Eigen::VectorXd& v);
Eigen::VectorXd read_vector(const std::filesystem::path& path);

}  // namespace hdboot
