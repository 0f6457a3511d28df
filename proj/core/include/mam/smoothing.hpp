#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mam/errors.hpp"

namespace mam {

enum class KernelFamily { Epanechnikov, Quartic };

KernelFamily kernel_from_name(const std::string& name);
std::string kernel_name(KernelFamily family);

// Base kernel on [-1, 1] and its antiderivative (CDF), used for the
// closed-form boundary normalizer.
double base_kernel(KernelFamily family, double u);
double base_kernel_cdf(KernelFamily family, double t);

struct KernelSpec {
  KernelFamily family = KernelFamily::Epanechnikov;
  std::vector<double> bandwidths;  // one per predictor axis, in (0, 0.5]

  void validate(int q) const;
};

// Equispaced grid {0, 1/(M-1), ..., 1} per axis.
struct GridSpec {
  int points = 101;

  std::vector<double> nodes() const;
  Eigen::VectorXd node_vector() const;
  // Trapezoid quadrature weights over [0, 1].
  Eigen::VectorXd trapezoid_weights() const;
};

// Boundary-normalized kernel on [0, 1]: K_h(x, xi) is h^{-1} K((x - xi)/h)
// divided by its integral over [0, 1] in x, so that the integral equals one
// for every xi.
double normalized_kernel(KernelFamily family, double x, double xi, double h);

// Predictor matrix: n rows, q columns, entries in [0, 1].
// Kernel weight matrix for axis k: W(g, i) = K_{h}(node_g, X_ik).
Eigen::MatrixXd kernel_weights(const Eigen::VectorXd& column,
                               KernelFamily family, double h,
                               const GridSpec& grid);

struct DensityEstimates {
  std::vector<Eigen::MatrixXd> weights;   // per axis, M x n
  std::vector<Eigen::VectorXd> marginal;  // p_k on the grid, per axis
  // pairwise(k, j) for k != j: M x M matrix with rows indexed by x_k nodes.
  std::vector<std::vector<Eigen::MatrixXd>> pairwise;
};

DensityEstimates estimate_densities(const Eigen::MatrixXd& predictors,
                                    const KernelSpec& kernel,
                                    const GridSpec& grid);

// Nadaraya-Watson marginal regressor on the grid for axis k:
// m_k(g) = (n p_k(g))^{-1} sum_i W_k(g, i) responses.row(i).
// responses is n x D (tangent coordinates). Throws DegenerateDensity when
// p_k vanishes at a grid node.
Eigen::MatrixXd marginal_regressor(const DensityEstimates& densities, int axis,
                                   const Eigen::MatrixXd& responses);

}  // namespace mam
