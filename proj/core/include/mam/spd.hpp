#pragma once

#include <Eigen/Dense>

#include "mam/errors.hpp"

namespace mam {

// Relative asymmetry above which a matrix is rejected rather than symmetrized.
inline constexpr double kSymmetryTol = 1e-12;

// Eigenvalues (and Cholesky pivots) at or below this count as not positive
// definite.
inline constexpr double kEigenvalueFloor = 1e-14;

// Returns (A + A^T)/2 after checking that the asymmetry is within
// kSymmetryTol relative to the largest entry. Throws DimensionMismatch for
// non-square input.
Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& a);

// Symmetric positive-definite matrix. Construction symmetrizes the input and
// verifies positive definiteness via a Cholesky factorization.
class SpdMatrix {
 public:
  explicit SpdMatrix(Eigen::MatrixXd entries);

  static SpdMatrix identity(int m) {
    return SpdMatrix(Eigen::MatrixXd::Identity(m, m));
  }

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const { return entries_; }

 private:
  Eigen::MatrixXd entries_;
};

// Lower-triangular matrix with strictly positive diagonal (a Cholesky factor).
class CholeskyFactor {
 public:
  explicit CholeskyFactor(Eigen::MatrixXd entries);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const { return entries_; }

  SpdMatrix to_spd() const { return SpdMatrix(entries_ * entries_.transpose()); }

 private:
  Eigen::MatrixXd entries_;
};

// Cholesky factorization P = L L^T with L lower triangular, positive diagonal.
// Throws NotPositiveDefinite when a pivot falls at or below kEigenvalueFloor.
CholeskyFactor cholesky(const SpdMatrix& p);

// Strict lower-triangular part (diagonal zeroed).
Eigen::MatrixXd strict_lower(const Eigen::MatrixXd& l);

// Diagonal part as a full matrix.
Eigen::MatrixXd diag_part(const Eigen::MatrixXd& l);

// Half-lower operator: strict_lower(s) + diag_part(s)/2.
Eigen::MatrixXd half_lower(const Eigen::MatrixXd& s);

// Matrix exponential of a symmetric matrix, via eigendecomposition.
SpdMatrix sym_exp(const Eigen::MatrixXd& s);

// Matrix logarithm of an SPD matrix, via eigendecomposition.
Eigen::MatrixXd sym_log(const SpdMatrix& p);

// Directional derivative of sym_exp at s in direction e (Daleckii-Krein on
// the eigenbasis of s). Linear in e.
Eigen::MatrixXd dexp(const Eigen::MatrixXd& s, const Eigen::MatrixXd& e);

// Directional derivative of sym_log at p in direction u.
Eigen::MatrixXd dlog(const SpdMatrix& p, const Eigen::MatrixXd& u);

// Fractional anisotropy of a 3x3 tensor; value in [0, 1].
double fractional_anisotropy(const SpdMatrix& p);

}  // namespace mam
