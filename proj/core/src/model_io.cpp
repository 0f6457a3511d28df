#include "mam/model_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace mam {

using nlohmann::json;

double RescaleMap::apply(int column, double x) const {
  const double span = hi.at(column) - lo.at(column);
  if (span <= 0.0) return 0.0;
  return (x - lo[column]) / span;
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
  const auto r = rows.size();
  const auto c = rows.empty() ? 0 : rows.at(0).size();
  Eigen::MatrixXd m(r, c);
  for (size_t i = 0; i < r; ++i) {
    for (size_t j = 0; j < c; ++j) m(i, j) = rows.at(i).at(j).get<double>();
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from_json(const json& arr) {
  Eigen::VectorXd v(arr.size());
  for (size_t i = 0; i < arr.size(); ++i) v(i) = arr.at(i).get<double>();
  return v;
}

}  // namespace

json fit_to_json(const AdditiveFit& fit,
                 const std::optional<RescaleMap>& rescale) {
  json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["metric"] = metric_name(fit.metric);
  doc["m"] = fit.m();
  doc["q"] = fit.q();
  doc["mu_hat"] = matrix_to_json(fit.mu_hat.entries());
  doc["grid_points"] = fit.grid.points;
  doc["kernel"] = kernel_name(fit.kernel.family);
  doc["bandwidths"] = fit.kernel.bandwidths;
  json basis = json::array();
  for (const auto& b : fit.basis) basis.push_back(matrix_to_json(b.value));
  doc["basis"] = std::move(basis);
  json components = json::array();
  for (const auto& f : fit.components) components.push_back(matrix_to_json(f));
  doc["components"] = std::move(components);
  json density = json::array();
  for (const auto& p : fit.density) density.push_back(vector_to_json(p));
  doc["density"] = std::move(density);
  doc["diagnostics"] = {{"sweeps", fit.diagnostics.sweeps},
                        {"final_change", fit.diagnostics.final_change},
                        {"mean_residual", fit.diagnostics.mean_residual}};
  if (rescale) {
    doc["rescale"] = {{"lo", rescale->lo}, {"hi", rescale->hi}};
  }
  return doc;
}

LoadedModel fit_from_json(const json& doc) {
  if (doc.at("format_version").get<int>() != kModelFormatVersion) {
    throw std::invalid_argument("model file: unsupported format_version");
  }
  auto geometry = std::shared_ptr<const Geometry>(
      make_geometry(metric_from_name(doc.at("metric").get<std::string>())));
  SpdMatrix mu(matrix_from_json(doc.at("mu_hat")));
  std::vector<TangentVector> basis;
  for (const auto& b : doc.at("basis")) {
    basis.emplace_back(mu, matrix_from_json(b));
  }
  std::vector<Eigen::MatrixXd> components;
  for (const auto& f : doc.at("components")) {
    components.push_back(matrix_from_json(f));
  }
  std::vector<Eigen::VectorXd> density;
  for (const auto& p : doc.at("density")) {
    density.push_back(vector_from_json(p));
  }
  KernelSpec kernel{kernel_from_name(doc.at("kernel").get<std::string>()),
                    doc.at("bandwidths").get<std::vector<double>>()};
  GridSpec grid{doc.at("grid_points").get<int>()};
  FitDiagnostics diag;
  if (doc.contains("diagnostics")) {
    diag.sweeps = doc["diagnostics"].value("sweeps", 0);
    diag.final_change = doc["diagnostics"].value("final_change", 0.0);
    diag.mean_residual = doc["diagnostics"].value("mean_residual", 0.0);
  }
  LoadedModel out{AdditiveFit{geometry->metric(), geometry, std::move(mu),
                              std::move(basis), grid, std::move(kernel),
                              std::move(components), std::move(density), diag},
                  std::nullopt};
  if (doc.contains("rescale")) {
    out.rescale = RescaleMap{doc["rescale"].at("lo").get<std::vector<double>>(),
                             doc["rescale"].at("hi").get<std::vector<double>>()};
  }
  return out;
}

json report_to_json(const SimReport& report) {
  json doc;
  doc["config"] = {{"setting", setting_name(report.config.setting)},
                   {"q", report.config.q},
                   {"n", report.config.n},
                   {"snr", report.config.snr},
                   {"m", report.config.m},
                   {"metric", metric_name(report.config.metric)},
                   {"reps", report.config.reps},
                   {"seed", report.config.seed},
                   {"test_size", report.config.test_size},
                   {"grid_points", report.config.grid.points},
                   {"kernel", kernel_name(report.config.kernel)}};
  if (report.config.bandwidth_c) {
    doc["config"]["bandwidth_c"] = *report.config.bandwidth_c;
  }
  doc["sigma"] = report.sigma;
  json per_rep = json::array();
  for (double r : report.rmse) {
    if (std::isnan(r)) {
      per_rep.push_back(nullptr);
    } else {
      per_rep.push_back(r);
    }
  }
  doc["rmse_per_rep"] = std::move(per_rep);
  doc["failed_reps"] = report.failed_reps;
  doc["rmse_mean"] = report.rmse_mean;
  doc["rmse_se"] = report.rmse_se;
  doc["single_rep"] = report.single_rep;
  return doc;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    }
    out << content;
    if (!out.flush()) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace mam
