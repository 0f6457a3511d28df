#include "mam/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mam {

std::vector<std::string> split_csv_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

int triangle_size(int m) { return m * (m + 1) / 2; }

std::vector<std::string> sample_header(int q, int m) {
  std::vector<std::string> header;
  for (int k = 1; k <= q; ++k) header.push_back("x" + std::to_string(k));
  for (int i = 1; i <= m; ++i) {
    for (int j = 1; j <= i; ++j) {
      header.push_back("y" + std::to_string(i) + std::to_string(j));
    }
  }
  return header;
}

Eigen::MatrixXd triangle_to_matrix(const std::vector<double>& tri, int m) {
  if (static_cast<int>(tri.size()) != triangle_size(m)) {
    throw DimensionMismatch("triangle_to_matrix: wrong triangle length");
  }
  Eigen::MatrixXd full(m, m);
  int idx = 0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j <= i; ++j) {
      full(i, j) = full(j, i) = tri[idx++];
    }
  }
  return full;
}

std::vector<double> matrix_to_triangle(const Eigen::MatrixXd& full) {
  std::vector<double> tri;
  tri.reserve(triangle_size(static_cast<int>(full.rows())));
  for (Eigen::Index i = 0; i < full.rows(); ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) tri.push_back(full(i, j));
  }
  return tri;
}

namespace {

double parse_double(const std::string& field, int row) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  while (begin < end && *begin == ' ') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw CsvError("cannot parse number '" + field + "'", row);
  }
  return value;
}

std::vector<std::vector<double>> read_numeric_csv(const std::string& path,
                                                  int columns) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open " + path, 0);
  std::string line;
  if (!std::getline(in, line)) throw CsvError("missing header", 0);
  const auto header = split_csv_record(line);
  if (static_cast<int>(header.size()) != columns) {
    throw CsvError("expected " + std::to_string(columns) + " columns, header has " +
                       std::to_string(header.size()),
                   0);
  }
  std::vector<std::vector<double>> rows;
  int row_index = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++row_index;
    const auto fields = split_csv_record(line);
    if (static_cast<int>(fields.size()) != columns) {
      throw CsvError("wrong field count", row_index);
    }
    std::vector<double> row;
    row.reserve(columns);
    for (const auto& f : fields) row.push_back(parse_double(f, row_index));
    rows.push_back(std::move(row));
  }
  return rows;
}

RescaleMap fit_rescale(const Eigen::MatrixXd& predictors) {
  RescaleMap map;
  for (Eigen::Index k = 0; k < predictors.cols(); ++k) {
    map.lo.push_back(predictors.col(k).minCoeff());
    map.hi.push_back(predictors.col(k).maxCoeff());
  }
  return map;
}

}  // namespace

LoadedSample read_sample_csv(const std::string& path, int q, int m,
                             bool rescale,
                             const std::optional<RescaleMap>& apply) {
  const int columns = q + triangle_size(m);
  const auto rows = read_numeric_csv(path, columns);
  if (rows.empty()) throw CsvError("no data rows", 0);

  LoadedSample out;
  out.table.predictors.resize(rows.size(), q);
  out.table.responses.reserve(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    for (int k = 0; k < q; ++k) out.table.predictors(i, k) = rows[i][k];
    std::vector<double> tri(rows[i].begin() + q, rows[i].end());
    try {
      out.table.responses.emplace_back(triangle_to_matrix(tri, m));
    } catch (const NotPositiveDefinite&) {
      throw CsvError("response is not positive definite",
                     static_cast<int>(i) + 1);
    }
  }
  if (rescale) {
    out.rescale = fit_rescale(out.table.predictors);
  }
  const std::optional<RescaleMap>& map = rescale ? out.rescale : apply;
  if (map) {
    for (Eigen::Index i = 0; i < out.table.predictors.rows(); ++i) {
      for (int k = 0; k < q; ++k) {
        out.table.predictors(i, k) = map->apply(k, out.table.predictors(i, k));
      }
    }
  }
  return out;
}

Eigen::MatrixXd read_predictors_csv(const std::string& path, int q,
                                    const std::optional<RescaleMap>& apply) {
  const auto rows = read_numeric_csv(path, q);
  Eigen::MatrixXd predictors(rows.size(), q);
  for (size_t i = 0; i < rows.size(); ++i) {
    for (int k = 0; k < q; ++k) {
      predictors(i, k) =
          apply ? apply->apply(k, rows[i][k]) : rows[i][k];
    }
  }
  return predictors;
}

std::string sample_to_csv(const SampleTable& table) {
  std::ostringstream out;
  const auto header = sample_header(table.q(), table.m());
  for (size_t i = 0; i < header.size(); ++i) {
    out << (i ? "," : "") << header[i];
  }
  out << "\n";
  for (int i = 0; i < table.n(); ++i) {
    for (int k = 0; k < table.q(); ++k) {
      out << (k ? "," : "") << format_double(table.predictors(i, k));
    }
    for (double v : matrix_to_triangle(table.responses[i].entries())) {
      out << "," << format_double(v);
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace mam
