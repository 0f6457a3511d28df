#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "mam/geometry.hpp"
#include "mam/smoothing.hpp"

namespace mam {

// n observations of (x_1..x_q in [0,1]^q, Y SPD).
struct SampleTable {
  Eigen::MatrixXd predictors;  // n x q
  std::vector<SpdMatrix> responses;

  int n() const { return static_cast<int>(predictors.rows()); }
  int q() const { return static_cast<int>(predictors.cols()); }
  int m() const { return responses.empty() ? 0 : responses.front().dim(); }

  void validate() const;
};

struct FitDiagnostics {
  int sweeps = 0;
  double final_change = 0.0;
  // Norm of the residual mean term n^{-1} sum Log_mu Y_i.
  double mean_residual = 0.0;
};

// Fitted additive model: Frechet mean, orthonormal tangent basis at it, and
// gridded component functions in tangent coordinates (M x D per predictor).
struct AdditiveFit {
  Metric metric;
  std::shared_ptr<const Geometry> geometry;
  SpdMatrix mu_hat;
  std::vector<TangentVector> basis;
  GridSpec grid;
  KernelSpec kernel;
  std::vector<Eigen::MatrixXd> components;  // per axis, M x D
  std::vector<Eigen::VectorXd> density;     // p_k on the grid, per axis
  FitDiagnostics diagnostics;

  int q() const { return static_cast<int>(components.size()); }
  int m() const { return mu_hat.dim(); }

  // Component function value at x (linear interpolation between grid nodes),
  // as tangent coordinates at mu_hat.
  Eigen::VectorXd component_coords(int axis, double x) const;
};

struct FitOptions {
  double tol = 1e-6;
  int max_sweeps = 200;
};

// One Gauss-Seidel pass of the backfitting system over k = 1..q, applying the
// integral-equation update and re-centering each component against p_k.
// components and marginals are per-axis M x D arrays. Returns the sup-norm
// change of the pass.
double backfit_sweep(std::vector<Eigen::MatrixXd>& components,
                     const std::vector<Eigen::MatrixXd>& marginals,
                     const Eigen::RowVectorXd& mean_term,
                     const DensityEstimates& densities, const GridSpec& grid);

// Full estimation pipeline: Frechet mean, tangent lift, smooth backfitting.
AdditiveFit fit(const SampleTable& sample, std::shared_ptr<const Geometry> geometry,
                const KernelSpec& kernel, const GridSpec& grid,
                const FitOptions& options = {});

// Group-level component function w_k(x) = lie_exp(transport_{mu,e} f_k(x)).
SpdMatrix component_to_group(const AdditiveFit& fit, int axis, double x);

// Prediction mu ++ w_1(x_1) ++ ... ++ w_q(x_q).
SpdMatrix predict(const AdditiveFit& fit, const Eigen::VectorXd& x);

// Root mean squared geodesic distance between predictions and responses.
double evaluate_rmse(const AdditiveFit& fit, const SampleTable& test);

// Bandwidth selection: h_k = c * n^{-1/5} (clamped to (0, 0.5]) with c chosen
// by 5-fold cross-validation minimizing out-of-fold squared distance.
std::vector<double> select_bandwidths_cv(
    const SampleTable& sample, std::shared_ptr<const Geometry> geometry,
    KernelFamily family, const GridSpec& grid,
    const std::vector<double>& c_grid = {0.1, 0.15, 0.25, 0.5, 0.75, 1.0, 1.5},
    int folds = 5);

}  // namespace mam
