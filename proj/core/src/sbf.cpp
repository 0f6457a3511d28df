#include "mam/sbf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mam {

void SampleTable::validate() const {
  if (responses.empty()) throw EmptySample("SampleTable: no observations");
  if (static_cast<int>(responses.size()) != n()) {
    throw DimensionMismatch("SampleTable: predictor/response row mismatch");
  }
  const int dim = responses.front().dim();
  for (const auto& y : responses) {
    if (y.dim() != dim) {
      throw DimensionMismatch("SampleTable: mixed response dimensions");
    }
  }
  if (predictors.size() > 0 &&
      (predictors.minCoeff() < -1e-9 || predictors.maxCoeff() > 1.0 + 1e-9)) {
    throw OutOfDomain("SampleTable: predictor outside [0, 1]");
  }
}

Eigen::VectorXd AdditiveFit::component_coords(int axis, double x) const {
  if (x < -1e-9 || x > 1.0 + 1e-9) {
    throw OutOfDomain("component_coords: x = " + std::to_string(x));
  }
  const double clamped = std::clamp(x, 0.0, 1.0);
  const Eigen::MatrixXd& f = components.at(axis);
  const double pos = clamped * (grid.points - 1);
  const int lo = std::min(static_cast<int>(pos), grid.points - 2);
  const double t = pos - lo;
  return ((1.0 - t) * f.row(lo) + t * f.row(lo + 1)).transpose();
}

namespace {

// Projects a gridded component onto the centering constraint
// integral of f_k p_k over [0,1] equals zero.
void center_component(Eigen::MatrixXd& f, const Eigen::VectorXd& pk,
                      const Eigen::VectorXd& quad) {
  const Eigen::VectorXd w = quad.cwiseProduct(pk);
  const double mass = w.sum();
  f.rowwise() -= (w.transpose() * f) / mass;
}

}  // namespace

double backfit_sweep(std::vector<Eigen::MatrixXd>& components,
                     const std::vector<Eigen::MatrixXd>& marginals,
                     const Eigen::RowVectorXd& mean_term,
                     const DensityEstimates& densities, const GridSpec& grid) {
  const int q = static_cast<int>(components.size());
  const Eigen::VectorXd quad = grid.trapezoid_weights();
  double change = 0.0;
  for (int k = 0; k < q; ++k) {
    const Eigen::VectorXd& pk = densities.marginal[k];
    if (pk.minCoeff() < 1e-8) {
      throw DegenerateDensity("backfit_sweep: density below 1e-8 on axis " +
                              std::to_string(k));
    }
    Eigen::MatrixXd updated = marginals[k];
    updated.rowwise() -= mean_term;
    for (int j = 0; j < q; ++j) {
      if (j == k) continue;
      // integral over x_j of f_j(x_j) p_kj(x_k, x_j) / p_k(x_k)
      Eigen::MatrixXd corr =
          densities.pairwise[k][j] * quad.asDiagonal() * components[j];
      corr.array().colwise() /= pk.array();
      updated -= corr;
    }
    center_component(updated, pk, quad);
    change = std::max(change,
                      (updated - components[k]).cwiseAbs().maxCoeff());
    components[k] = std::move(updated);
  }
  return change;
}

AdditiveFit fit(const SampleTable& sample, std::shared_ptr<const Geometry> geometry,
                const KernelSpec& kernel, const GridSpec& grid,
                const FitOptions& options) {
  sample.validate();
  const int n = sample.n();
  const int q = sample.q();
  if (n < 10) throw EmptySample("fit: needs n >= 10");
  kernel.validate(q);

  // Step 1: sample Frechet mean.
  SpdMatrix mu = geometry->frechet_mean(sample.responses);

  // Step 2: lift responses to tangent coordinates at mu.
  std::vector<TangentVector> basis = geometry->tangent_basis(mu);
  const int d = static_cast<int>(basis.size());
  Eigen::MatrixXd responses(n, d);
  for (int i = 0; i < n; ++i) {
    responses.row(i) =
        geometry->coordinates(basis, geometry->riem_log(mu, sample.responses[i]))
            .transpose();
  }
  const Eigen::RowVectorXd mean_term = responses.colwise().mean();

  // Step 3: smooth backfitting.
  DensityEstimates densities = estimate_densities(sample.predictors, kernel, grid);
  std::vector<Eigen::MatrixXd> marginals;
  marginals.reserve(q);
  for (int k = 0; k < q; ++k) {
    marginals.push_back(marginal_regressor(densities, k, responses));
  }

  std::vector<Eigen::MatrixXd> components(q,
                                          Eigen::MatrixXd::Zero(grid.points, d));
  FitDiagnostics diag;
  diag.mean_residual = mean_term.norm();
  double change = 0.0;
  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    change = backfit_sweep(components, marginals, mean_term, densities, grid);
    diag.sweeps = sweep + 1;
    if (change <= options.tol) break;
  }
  diag.final_change = change;
  if (change > options.tol) {
    throw NoConvergence("fit: backfitting did not converge (change " +
                            std::to_string(change) + ")",
                        diag.sweeps, change);
  }

  AdditiveFit out{geometry->metric(), std::move(geometry), std::move(mu),
                  std::move(basis),   grid,                kernel,
                  std::move(components), std::move(densities.marginal), diag};
  return out;
}

SpdMatrix component_to_group(const AdditiveFit& fit, int axis, double x) {
  const Geometry& geo = *fit.geometry;
  TangentVector f =
      geo.from_coordinates(fit.basis, fit.component_coords(axis, x));
  const SpdMatrix e = SpdMatrix::identity(fit.m());
  return geo.lie_exp(geo.transport(fit.mu_hat, e, f).value);
}

SpdMatrix predict(const AdditiveFit& fit, const Eigen::VectorXd& x) {
  if (x.size() != fit.q()) {
    throw DimensionMismatch("predict: expected " + std::to_string(fit.q()) +
                            " predictors");
  }
  const Geometry& geo = *fit.geometry;
  // Tangent route: Exp_mu(sum_k f_k(x_k)); equivalent to the group
  // composition mu ++ w_1(x_1) ++ ... ++ w_q(x_q).
  Eigen::VectorXd coords = Eigen::VectorXd::Zero(fit.basis.size());
  for (int k = 0; k < fit.q(); ++k) {
    coords += fit.component_coords(k, x(k));
  }
  return geo.riem_exp(fit.mu_hat, geo.from_coordinates(fit.basis, coords));
}

double evaluate_rmse(const AdditiveFit& fit, const SampleTable& test) {
  test.validate();
  const Geometry& geo = *fit.geometry;
  double acc = 0.0;
  for (int i = 0; i < test.n(); ++i) {
    const double d = geo.distance(predict(fit, test.predictors.row(i)),
                                  test.responses[i]);
    acc += d * d;
  }
  return std::sqrt(acc / test.n());
}

std::vector<double> select_bandwidths_cv(
    const SampleTable& sample, std::shared_ptr<const Geometry> geometry,
    KernelFamily family, const GridSpec& grid,
    const std::vector<double>& c_grid, int folds) {
  sample.validate();
  const int n = sample.n();
  const int q = sample.q();
  folds = std::min(folds, n / 10);
  if (folds < 2 || c_grid.empty()) {
    // Too little data to cross-validate; fall back to c = 1.
    const double h = std::min(0.5, std::pow(n, -0.2));
    return std::vector<double>(q, h);
  }

  double best_c = c_grid.front();
  double best_score = std::numeric_limits<double>::infinity();
  for (double c : c_grid) {
    const double h = std::min(0.5, c * std::pow(n, -0.2));
    KernelSpec kernel{family, std::vector<double>(q, h)};
    double score = 0.0;
    bool feasible = true;
    for (int fold = 0; fold < folds && feasible; ++fold) {
      SampleTable train, held;
      for (int i = 0; i < n; ++i) {
        SampleTable& dst = (i % folds == fold) ? held : train;
        dst.responses.push_back(sample.responses[i]);
      }
      train.predictors.resize(train.responses.size(), q);
      held.predictors.resize(held.responses.size(), q);
      int it = 0, ih = 0;
      for (int i = 0; i < n; ++i) {
        if (i % folds == fold) {
          held.predictors.row(ih++) = sample.predictors.row(i);
        } else {
          train.predictors.row(it++) = sample.predictors.row(i);
        }
      }
      try {
        AdditiveFit f = fit(train, geometry, kernel, grid);
        for (int i = 0; i < held.n(); ++i) {
          const double d = geometry->distance(
              predict(f, held.predictors.row(i)), held.responses[i]);
          score += d * d;
        }
      } catch (const DegenerateDensity&) {
        feasible = false;
      } catch (const NoConvergence&) {
        feasible = false;
      }
    }
    if (feasible && score < best_score) {
      best_score = score;
      best_c = c;
    }
  }
  const double h = std::min(0.5, best_c * std::pow(n, -0.2));
  return std::vector<double>(q, h);
}

}  // namespace mam
