#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mam/model_io.hpp"
#include "mam/sbf.hpp"

namespace mam {

// CSV files are comma-separated with a mandatory header and '.' decimals.
// A sample file has columns x1..xq followed by the lower triangle of Y in
// row-major order (y11, y21, y22, y31, ...).

struct CsvError : std::runtime_error {
  CsvError(const std::string& what, int row) : std::runtime_error(what), row(row) {}
  int row;  // 1-based data row index (0 for header problems)
};

// Splits one CSV record with RFC-4180-style quoting.
std::vector<std::string> split_csv_record(const std::string& line);

// Formats a double with 17 significant digits (value-preserving).
std::string format_double(double value);

std::vector<std::string> sample_header(int q, int m);
int triangle_size(int m);

// Reconstructs a symmetric matrix from its lower triangle (row-major).
Eigen::MatrixXd triangle_to_matrix(const std::vector<double>& tri, int m);
std::vector<double> matrix_to_triangle(const Eigen::MatrixXd& full);

struct LoadedSample {
  SampleTable table;
  std::optional<RescaleMap> rescale;
};

// Reads a labeled sample (predictors + responses). When rescale is true,
// each predictor column is min-max mapped to [0, 1] and the map returned;
// when a map is supplied it is applied instead.
LoadedSample read_sample_csv(const std::string& path, int q, int m,
                             bool rescale = false,
                             const std::optional<RescaleMap>& apply = {});

// Reads a predictors-only file (columns x1..xq).
Eigen::MatrixXd read_predictors_csv(const std::string& path, int q,
                                    const std::optional<RescaleMap>& apply = {});

std::string sample_to_csv(const SampleTable& table);

}  // namespace mam
