#include "mam/smoothing.hpp"

#include <algorithm>
#include <cmath>

namespace mam {

KernelFamily kernel_from_name(const std::string& name) {
  if (name == "epanechnikov") return KernelFamily::Epanechnikov;
  if (name == "quartic") return KernelFamily::Quartic;
  throw std::invalid_argument("unknown kernel '" + name + "'");
}

std::string kernel_name(KernelFamily family) {
  return family == KernelFamily::Epanechnikov ? "epanechnikov" : "quartic";
}

double base_kernel(KernelFamily family, double u) {
  if (std::abs(u) >= 1.0) return 0.0;
  const double w = 1.0 - u * u;
  switch (family) {
    case KernelFamily::Epanechnikov:
      return 0.75 * w;
    case KernelFamily::Quartic:
      return 0.9375 * w * w;
  }
  return 0.0;
}

double base_kernel_cdf(KernelFamily family, double t) {
  const double c = std::clamp(t, -1.0, 1.0);
  switch (family) {
    case KernelFamily::Epanechnikov:
      return 0.5 + 0.75 * c - 0.25 * c * c * c;
    case KernelFamily::Quartic: {
      const double c3 = c * c * c;
      return 0.5 + 0.9375 * (c - 2.0 * c3 / 3.0 + c3 * c * c / 5.0);
    }
  }
  return 0.0;
}

void KernelSpec::validate(int q) const {
  if (static_cast<int>(bandwidths.size()) != q) {
    throw BandwidthOutOfRange("expected " + std::to_string(q) +
                              " bandwidths, got " +
                              std::to_string(bandwidths.size()));
  }
  for (double h : bandwidths) {
    if (!(h > 0.0) || h > 0.5) {
      throw BandwidthOutOfRange("bandwidth " + std::to_string(h) +
                                " outside (0, 0.5]");
    }
  }
}

std::vector<double> GridSpec::nodes() const {
  std::vector<double> out(points);
  for (int i = 0; i < points; ++i) {
    out[i] = static_cast<double>(i) / (points - 1);
  }
  return out;
}

Eigen::VectorXd GridSpec::node_vector() const {
  return Eigen::VectorXd::LinSpaced(points, 0.0, 1.0);
}

Eigen::VectorXd GridSpec::trapezoid_weights() const {
  const double dx = 1.0 / (points - 1);
  Eigen::VectorXd w = Eigen::VectorXd::Constant(points, dx);
  w(0) *= 0.5;
  w(points - 1) *= 0.5;
  return w;
}

double normalized_kernel(KernelFamily family, double x, double xi, double h) {
  if (!(h > 0.0) || h > 0.5) {
    throw BandwidthOutOfRange("bandwidth " + std::to_string(h) +
                              " outside (0, 0.5]");
  }
  const double u = (x - xi) / h;
  if (std::abs(u) >= 1.0) return 0.0;
  // Mass of h^{-1} K((w - xi)/h) over w in [0, 1].
  const double mass = base_kernel_cdf(family, (1.0 - xi) / h) -
                      base_kernel_cdf(family, (0.0 - xi) / h);
  return base_kernel(family, u) / (h * mass);
}

Eigen::MatrixXd kernel_weights(const Eigen::VectorXd& column,
                               KernelFamily family, double h,
                               const GridSpec& grid) {
  const Eigen::VectorXd nodes = grid.node_vector();
  Eigen::MatrixXd w(grid.points, column.size());
  for (Eigen::Index i = 0; i < column.size(); ++i) {
    const double xi = column(i);
    const double mass = base_kernel_cdf(family, (1.0 - xi) / h) -
                        base_kernel_cdf(family, (0.0 - xi) / h);
    const double scale = 1.0 / (h * mass);
    for (int g = 0; g < grid.points; ++g) {
      w(g, i) = base_kernel(family, (nodes(g) - xi) / h) * scale;
    }
  }
  return w;
}

DensityEstimates estimate_densities(const Eigen::MatrixXd& predictors,
                                    const KernelSpec& kernel,
                                    const GridSpec& grid) {
  const int n = static_cast<int>(predictors.rows());
  const int q = static_cast<int>(predictors.cols());
  if (n < 2) throw EmptySample("estimate_densities: needs n >= 2");
  kernel.validate(q);

  DensityEstimates out;
  out.weights.reserve(q);
  for (int k = 0; k < q; ++k) {
    out.weights.push_back(kernel_weights(predictors.col(k), kernel.family,
                                         kernel.bandwidths[k], grid));
    out.marginal.push_back(out.weights.back().rowwise().mean());
  }
  out.pairwise.assign(q, std::vector<Eigen::MatrixXd>(q));
  for (int k = 0; k < q; ++k) {
    for (int j = k + 1; j < q; ++j) {
      Eigen::MatrixXd pkj = out.weights[k] * out.weights[j].transpose() / n;
      out.pairwise[j][k] = pkj.transpose();
      out.pairwise[k][j] = std::move(pkj);
    }
  }
  return out;
}

Eigen::MatrixXd marginal_regressor(const DensityEstimates& densities, int axis,
                                   const Eigen::MatrixXd& responses) {
  const Eigen::MatrixXd& w = densities.weights.at(axis);
  const Eigen::VectorXd& pk = densities.marginal.at(axis);
  if (w.cols() != responses.rows()) {
    throw DimensionMismatch("marginal_regressor: response count mismatch");
  }
  if (pk.minCoeff() < 1e-8) {
    throw DegenerateDensity("marginal_regressor: density below 1e-8 on axis " +
                            std::to_string(axis));
  }
  Eigen::MatrixXd m = w * responses / static_cast<double>(responses.rows());
  m.array().colwise() /= pk.array();
  return m;
}

}  // namespace mam
