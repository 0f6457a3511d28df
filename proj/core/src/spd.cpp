#include "mam/spd.hpp"

#include <cmath>
#include <string>

namespace mam {

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) {
    throw DimensionMismatch("symmetrize: matrix is not square (" +
                            std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + ")");
  }
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol * scale) {
    throw DimensionMismatch("symmetrize: asymmetry " + std::to_string(asym) +
                            " exceeds tolerance");
  }
  return 0.5 * (a + a.transpose());
}

SpdMatrix::SpdMatrix(Eigen::MatrixXd entries)
    : entries_(symmetrize(entries)) {
  // Positive definiteness check by attempting a Cholesky factorization.
  Eigen::LLT<Eigen::MatrixXd> llt(entries_);
  if (llt.info() != Eigen::Success ||
      llt.matrixLLT().diagonal().minCoeff() <= std::sqrt(kEigenvalueFloor)) {
    throw NotPositiveDefinite("SpdMatrix: matrix is not positive definite");
  }
}

CholeskyFactor::CholeskyFactor(Eigen::MatrixXd entries)
    : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) {
    throw DimensionMismatch("CholeskyFactor: matrix is not square");
  }
  const int m = static_cast<int>(entries_.rows());
  for (int i = 0; i < m; ++i) {
    if (entries_(i, i) <= 0.0) {
      throw NotPositiveDefinite("CholeskyFactor: nonpositive diagonal entry");
    }
    for (int j = i + 1; j < m; ++j) {
      if (entries_(i, j) != 0.0) {
        throw DimensionMismatch("CholeskyFactor: nonzero above diagonal");
      }
    }
  }
}

CholeskyFactor cholesky(const SpdMatrix& p) {
  const Eigen::MatrixXd& a = p.entries();
  const int m = p.dim();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(m, m);
  for (int j = 0; j < m; ++j) {
    double pivot = a(j, j) - l.row(j).head(j).squaredNorm();
    if (pivot <= kEigenvalueFloor) {
      throw NotPositiveDefinite("cholesky: pivot " + std::to_string(pivot) +
                                " at column " + std::to_string(j));
    }
    l(j, j) = std::sqrt(pivot);
    for (int i = j + 1; i < m; ++i) {
      l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
    }
  }
  return CholeskyFactor(std::move(l));
}

Eigen::MatrixXd strict_lower(const Eigen::MatrixXd& l) {
  Eigen::MatrixXd out = l.triangularView<Eigen::StrictlyLower>();
  return out;
}

Eigen::MatrixXd diag_part(const Eigen::MatrixXd& l) {
  return l.diagonal().asDiagonal();
}

Eigen::MatrixXd half_lower(const Eigen::MatrixXd& s) {
  if (s.rows() != s.cols()) {
    throw DimensionMismatch("half_lower: matrix is not square");
  }
  return strict_lower(s) + 0.5 * diag_part(s);
}

namespace {

struct EigenDecomp {
  Eigen::MatrixXd q;
  Eigen::VectorXd lambda;
};

EigenDecomp decompose(const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
  return {solver.eigenvectors(), solver.eigenvalues()};
}

// Loewner matrix of divided differences phi(a, b) = (f(a) - f(b))/(a - b),
// with the derivative limit on the near-diagonal.
template <typename F, typename DF>
Eigen::MatrixXd loewner(const Eigen::VectorXd& lambda, F f, DF df) {
  const int m = static_cast<int>(lambda.size());
  Eigen::MatrixXd phi(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double a = lambda(i), b = lambda(j);
      if (std::abs(a - b) < 1e-8) {
        phi(i, j) = df(0.5 * (a + b));
      } else {
        phi(i, j) = (f(a) - f(b)) / (a - b);
      }
    }
  }
  return phi;
}

}  // namespace

SpdMatrix sym_exp(const Eigen::MatrixXd& s) {
  auto [q, lambda] = decompose(symmetrize(s));
  Eigen::VectorXd el = lambda.array().exp();
  return SpdMatrix(q * el.asDiagonal() * q.transpose());
}

Eigen::MatrixXd sym_log(const SpdMatrix& p) {
  auto [q, lambda] = decompose(p.entries());
  if (lambda.minCoeff() <= kEigenvalueFloor) {
    throw NotPositiveDefinite("sym_log: eigenvalue at or below floor");
  }
  Eigen::VectorXd ll = lambda.array().log();
  return symmetrize(q * ll.asDiagonal() * q.transpose());
}

Eigen::MatrixXd dexp(const Eigen::MatrixXd& s, const Eigen::MatrixXd& e) {
  if (s.rows() != e.rows() || s.cols() != e.cols()) {
    throw DimensionMismatch("dexp: shape mismatch");
  }
  auto [q, lambda] = decompose(symmetrize(s));
  Eigen::MatrixXd et = q.transpose() * symmetrize(e) * q;
  Eigen::MatrixXd phi = loewner(
      lambda, [](double x) { return std::exp(x); },
      [](double x) { return std::exp(x); });
  return symmetrize(q * et.cwiseProduct(phi) * q.transpose());
}

Eigen::MatrixXd dlog(const SpdMatrix& p, const Eigen::MatrixXd& u) {
  if (p.dim() != u.rows() || p.dim() != u.cols()) {
    throw DimensionMismatch("dlog: shape mismatch");
  }
  auto [q, lambda] = decompose(p.entries());
  if (lambda.minCoeff() <= kEigenvalueFloor) {
    throw NotPositiveDefinite("dlog: eigenvalue at or below floor");
  }
  Eigen::MatrixXd ut = q.transpose() * symmetrize(u) * q;
  Eigen::MatrixXd phi = loewner(
      lambda, [](double x) { return std::log(x); },
      [](double x) { return 1.0 / x; });
  return symmetrize(q * ut.cwiseProduct(phi) * q.transpose());
}

double fractional_anisotropy(const SpdMatrix& p) {
  if (p.dim() != 3) {
    throw DimensionMismatch("fractional_anisotropy: requires a 3x3 tensor");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(p.entries());
  const Eigen::VectorXd rho = solver.eigenvalues();
  const double mean = rho.mean();
  const double num = (rho.array() - mean).square().sum();
  const double den = rho.array().square().sum();
  const double fa = std::sqrt(1.5 * num / den);
  return std::min(fa, 1.0);
}

}  // namespace mam
