#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mam/spd.hpp"

namespace mam {

// Tangent vector of the SPD manifold: a symmetric matrix attached to the
// base point it lives at.
struct TangentVector {
  SpdMatrix base;
  Eigen::MatrixXd value;

  TangentVector(SpdMatrix base, Eigen::MatrixXd value)
      : base(std::move(base)), value(symmetrize(value)) {
    if (this->base.dim() != this->value.rows()) {
      throw DimensionMismatch("TangentVector: base/value dimension mismatch");
    }
  }
};

enum class Metric { LogCholesky, LogEuclidean };

std::string metric_name(Metric metric);
Metric metric_from_name(const std::string& name);

// Riemannian/Lie-group structure of the SPD manifold under a bi-invariant
// metric with abelian group operation. Implementations are stateless and
// thread-safe.
class Geometry {
 public:
  virtual ~Geometry() = default;

  virtual Metric metric() const = 0;
  std::string name() const { return metric_name(metric()); }

  // Abelian group operation; identity element is I_m.
  virtual SpdMatrix group_op(const SpdMatrix& p1, const SpdMatrix& p2) const = 0;

  // Lie exponential/logarithm between the tangent space at e = I_m and the
  // group. With a bi-invariant metric these coincide with Exp_e / Log_e.
  virtual SpdMatrix lie_exp(const Eigen::MatrixXd& u) const = 0;
  virtual Eigen::MatrixXd lie_log(const SpdMatrix& p) const = 0;

  virtual SpdMatrix riem_exp(const SpdMatrix& base,
                             const TangentVector& u) const = 0;
  virtual TangentVector riem_log(const SpdMatrix& base,
                                 const SpdMatrix& q) const = 0;

  // Parallel transport along the geodesic from `from` to `to`.
  virtual TangentVector transport(const SpdMatrix& from, const SpdMatrix& to,
                                  const TangentVector& u) const = 0;

  virtual double inner(const SpdMatrix& base, const TangentVector& u,
                       const TangentVector& v) const = 0;
  double norm(const SpdMatrix& base, const TangentVector& u) const;

  virtual double distance(const SpdMatrix& p, const SpdMatrix& q) const = 0;

  // Closed-form Frechet mean (both metrics are flat images of linear spaces).
  virtual SpdMatrix frechet_mean(const std::vector<SpdMatrix>& sample) const = 0;

  // Orthonormal basis of the tangent space at `base` under this metric,
  // built by Gram-Schmidt on the canonical symmetric basis.
  // D = m(m+1)/2 elements.
  std::vector<TangentVector> tangent_basis(const SpdMatrix& base) const;

  // Coordinates of u in the given orthonormal basis, and reconstruction.
  Eigen::VectorXd coordinates(const std::vector<TangentVector>& basis,
                              const TangentVector& u) const;
  TangentVector from_coordinates(const std::vector<TangentVector>& basis,
                                 const Eigen::VectorXd& coords) const;

 protected:
  static void check_same_dim(const SpdMatrix& a, const SpdMatrix& b);
  static void check_base(const SpdMatrix& base, const TangentVector& u);
};

std::unique_ptr<Geometry> make_geometry(Metric metric);

}  // namespace mam
