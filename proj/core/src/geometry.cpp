#include "mam/geometry.hpp"

#include <cmath>

namespace mam {

std::string metric_name(Metric metric) {
  switch (metric) {
    case Metric::LogCholesky:
      return "log_cholesky";
    case Metric::LogEuclidean:
      return "log_euclidean";
  }
  throw std::invalid_argument("metric_name: unknown metric");
}

Metric metric_from_name(const std::string& name) {
  if (name == "log_cholesky") return Metric::LogCholesky;
  if (name == "log_euclidean") return Metric::LogEuclidean;
  throw std::invalid_argument("unknown metric '" + name +
                              "' (expected log_cholesky or log_euclidean)");
}

void Geometry::check_same_dim(const SpdMatrix& a, const SpdMatrix& b) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch("geometry: operand dimensions differ");
  }
}

void Geometry::check_base(const SpdMatrix& base, const TangentVector& u) {
  check_same_dim(base, u.base);
  const double scale = std::max(1.0, base.entries().cwiseAbs().maxCoeff());
  if ((base.entries() - u.base.entries()).cwiseAbs().maxCoeff() >
      1e-12 * scale) {
    throw BaseMismatch("geometry: tangent vector attached to a different base");
  }
}

double Geometry::norm(const SpdMatrix& base, const TangentVector& u) const {
  return std::sqrt(inner(base, u, u));
}

std::vector<TangentVector> Geometry::tangent_basis(
    const SpdMatrix& base) const {
  const int m = base.dim();
  std::vector<TangentVector> basis;
  basis.reserve(m * (m + 1) / 2);
  // Canonical symmetric basis: E_ii then E_ij + E_ji, column-major over i>=j.
  std::vector<Eigen::MatrixXd> raw;
  for (int i = 0; i < m; ++i) {
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(m, m);
    e(i, i) = 1.0;
    raw.push_back(e);
  }
  for (int j = 0; j < m; ++j) {
    for (int i = j + 1; i < m; ++i) {
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(m, m);
      e(i, j) = e(j, i) = 1.0;
      raw.push_back(e);
    }
  }
  for (const auto& e : raw) {
    TangentVector v(base, e);
    for (const auto& b : basis) {
      v.value -= inner(base, v, b) * b.value;
    }
    const double n = norm(base, v);
    v.value /= n;
    basis.push_back(std::move(v));
  }
  return basis;
}

Eigen::VectorXd Geometry::coordinates(const std::vector<TangentVector>& basis,
                                      const TangentVector& u) const {
  Eigen::VectorXd c(basis.size());
  for (size_t i = 0; i < basis.size(); ++i) {
    c(i) = inner(u.base, u, basis[i]);
  }
  return c;
}

TangentVector Geometry::from_coordinates(
    const std::vector<TangentVector>& basis, const Eigen::VectorXd& coords) const {
  if (basis.empty() || static_cast<size_t>(coords.size()) != basis.size()) {
    throw DimensionMismatch("from_coordinates: coordinate count mismatch");
  }
  Eigen::MatrixXd value =
      Eigen::MatrixXd::Zero(basis[0].base.dim(), basis[0].base.dim());
  for (size_t i = 0; i < basis.size(); ++i) {
    value += coords(i) * basis[i].value;
  }
  return TangentVector(basis[0].base, value);
}

namespace {

// ---------------------------------------------------------------------------
// Log-Cholesky metric. The Cholesky-factor space LT+(m) is flat under
// phi(L) = strict_lower(L) + log diag(L); SPD-level maps conjugate through
// the Cholesky diffeomorphism P = L L^T with tangent correspondence
// X = L (L^{-1} U L^{-T})_half  <->  U = X L^T + L X^T.
// ---------------------------------------------------------------------------
class LogCholeskyGeometry final : public Geometry {
 public:
  Metric metric() const override { return Metric::LogCholesky; }

  SpdMatrix group_op(const SpdMatrix& p1, const SpdMatrix& p2) const override {
    check_same_dim(p1, p2);
    const Eigen::MatrixXd l1 = cholesky(p1).entries();
    const Eigen::MatrixXd l2 = cholesky(p2).entries();
    Eigen::MatrixXd l = strict_lower(l1) + strict_lower(l2) +
                        diag_part(l1) * diag_part(l2);
    return CholeskyFactor(std::move(l)).to_spd();
  }

  SpdMatrix lie_exp(const Eigen::MatrixXd& u) const override {
    // At e = I the factor-space tangent of u is (u)_half.
    return CholeskyFactor(
               factor_exp(Eigen::MatrixXd::Identity(u.rows(), u.cols()),
                          half_lower(symmetrize(u))))
        .to_spd();
  }

  Eigen::MatrixXd lie_log(const SpdMatrix& p) const override {
    const Eigen::MatrixXd x = factor_log(
        Eigen::MatrixXd::Identity(p.dim(), p.dim()), cholesky(p).entries());
    return x + x.transpose();
  }

  SpdMatrix riem_exp(const SpdMatrix& base, const TangentVector& u) const override {
    check_base(base, u);
    const Eigen::MatrixXd l = cholesky(base).entries();
    return CholeskyFactor(factor_exp(l, spd_to_factor_tangent(l, u.value)))
        .to_spd();
  }

  TangentVector riem_log(const SpdMatrix& base, const SpdMatrix& q) const override {
    check_same_dim(base, q);
    const Eigen::MatrixXd l = cholesky(base).entries();
    const Eigen::MatrixXd x = factor_log(l, cholesky(q).entries());
    return TangentVector(base, factor_to_spd_tangent(l, x));
  }

  TangentVector transport(const SpdMatrix& from, const SpdMatrix& to,
                          const TangentVector& u) const override {
    check_base(from, u);
    check_same_dim(from, to);
    const Eigen::MatrixXd l = cholesky(from).entries();
    const Eigen::MatrixXd k = cholesky(to).entries();
    const Eigen::MatrixXd x = spd_to_factor_tangent(l, u.value);
    Eigen::MatrixXd y = strict_lower(x);
    y.diagonal() = k.diagonal().cwiseQuotient(l.diagonal()).cwiseProduct(
        x.diagonal());
    return TangentVector(to, factor_to_spd_tangent(k, y));
  }

  double inner(const SpdMatrix& base, const TangentVector& u,
               const TangentVector& v) const override {
    check_base(base, u);
    check_base(base, v);
    const Eigen::MatrixXd l = cholesky(base).entries();
    return factor_inner(l, spd_to_factor_tangent(l, u.value),
                        spd_to_factor_tangent(l, v.value));
  }

  double distance(const SpdMatrix& p, const SpdMatrix& q) const override {
    check_same_dim(p, q);
    return (phi(cholesky(q).entries()) - phi(cholesky(p).entries())).norm();
  }

  SpdMatrix frechet_mean(const std::vector<SpdMatrix>& sample) const override {
    if (sample.empty()) throw EmptySample("frechet_mean: empty sample");
    const int m = sample.front().dim();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(m, m);
    for (const auto& p : sample) {
      check_same_dim(sample.front(), p);
      acc += phi(cholesky(p).entries());
    }
    acc /= static_cast<double>(sample.size());
    return CholeskyFactor(phi_inv(acc)).to_spd();
  }

 private:
  static Eigen::MatrixXd phi(const Eigen::MatrixXd& l) {
    Eigen::MatrixXd out = strict_lower(l);
    out.diagonal() = l.diagonal().array().log();
    return out;
  }

  static Eigen::MatrixXd phi_inv(const Eigen::MatrixXd& x) {
    Eigen::MatrixXd out = strict_lower(x);
    out.diagonal() = x.diagonal().array().exp();
    return out;
  }

  // Exp_L(X) and Log_L(K) in the Cholesky-factor space.
  static Eigen::MatrixXd factor_exp(const Eigen::MatrixXd& l,
                                    const Eigen::MatrixXd& x) {
    Eigen::MatrixXd out = strict_lower(l) + strict_lower(x);
    out.diagonal() = l.diagonal().array() *
                     (x.diagonal().array() / l.diagonal().array()).exp();
    return out;
  }

  static Eigen::MatrixXd factor_log(const Eigen::MatrixXd& l,
                                    const Eigen::MatrixXd& k) {
    Eigen::MatrixXd out = strict_lower(k) - strict_lower(l);
    out.diagonal() = l.diagonal().array() *
                     (k.diagonal().array() / l.diagonal().array()).log();
    return out;
  }

  static double factor_inner(const Eigen::MatrixXd& l, const Eigen::MatrixXd& a,
                             const Eigen::MatrixXd& b) {
    double acc = strict_lower(a).cwiseProduct(strict_lower(b)).sum();
    acc += (a.diagonal().cwiseProduct(b.diagonal()).array() /
            l.diagonal().array().square())
               .sum();
    return acc;
  }

  static Eigen::MatrixXd spd_to_factor_tangent(const Eigen::MatrixXd& l,
                                               const Eigen::MatrixXd& u) {
    const auto lt = l.triangularView<Eigen::Lower>();
    Eigen::MatrixXd w = lt.solve(u);
    w = lt.solve(w.transpose()).transpose();  // L^{-1} U L^{-T}
    return l * half_lower(w);
  }

  static Eigen::MatrixXd factor_to_spd_tangent(const Eigen::MatrixXd& l,
                                               const Eigen::MatrixXd& x) {
    return x * l.transpose() + l * x.transpose();
  }
};

// ---------------------------------------------------------------------------
// Log-Euclidean metric: sym_log is a global isometry onto the linear space of
// symmetric matrices; transport is the coordinate identity there.
// ---------------------------------------------------------------------------
class LogEuclideanGeometry final : public Geometry {
 public:
  Metric metric() const override { return Metric::LogEuclidean; }

  SpdMatrix group_op(const SpdMatrix& p1, const SpdMatrix& p2) const override {
    check_same_dim(p1, p2);
    return sym_exp(sym_log(p1) + sym_log(p2));
  }

  SpdMatrix lie_exp(const Eigen::MatrixXd& u) const override {
    return sym_exp(u);
  }

  Eigen::MatrixXd lie_log(const SpdMatrix& p) const override {
    return sym_log(p);
  }

  SpdMatrix riem_exp(const SpdMatrix& base, const TangentVector& u) const override {
    check_base(base, u);
    return sym_exp(sym_log(base) + dlog(base, u.value));
  }

  TangentVector riem_log(const SpdMatrix& base, const SpdMatrix& q) const override {
    check_same_dim(base, q);
    return TangentVector(base, dexp(sym_log(base), sym_log(q) - sym_log(base)));
  }

  TangentVector transport(const SpdMatrix& from, const SpdMatrix& to,
                          const TangentVector& u) const override {
    check_base(from, u);
    check_same_dim(from, to);
    return TangentVector(to, dexp(sym_log(to), dlog(from, u.value)));
  }

  double inner(const SpdMatrix& base, const TangentVector& u,
               const TangentVector& v) const override {
    check_base(base, u);
    check_base(base, v);
    return (dlog(base, u.value) * dlog(base, v.value)).trace();
  }

  double distance(const SpdMatrix& p, const SpdMatrix& q) const override {
    check_same_dim(p, q);
    return (sym_log(p) - sym_log(q)).norm();
  }

  SpdMatrix frechet_mean(const std::vector<SpdMatrix>& sample) const override {
    if (sample.empty()) throw EmptySample("frechet_mean: empty sample");
    const int m = sample.front().dim();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(m, m);
    for (const auto& p : sample) {
      check_same_dim(sample.front(), p);
      acc += sym_log(p);
    }
    return sym_exp(acc / static_cast<double>(sample.size()));
  }
};

}  // namespace

std::unique_ptr<Geometry> make_geometry(Metric metric) {
  switch (metric) {
    case Metric::LogCholesky:
      return std::make_unique<LogCholeskyGeometry>();
    case Metric::LogEuclidean:
      return std::make_unique<LogEuclideanGeometry>();
  }
  throw std::invalid_argument("make_geometry: unknown metric");
}

}  // namespace mam
