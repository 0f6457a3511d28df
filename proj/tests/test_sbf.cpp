#include <doctest.h>

#include <cmath>

#include <mam/rng.hpp>
#include <mam/sbf.hpp>

using namespace mam;

namespace {

// Additive two-predictor sample with mean-zero low-frequency components.
SampleTable make_additive_sample(int n, int m, const Geometry& geometry,
                                 double noise, SplitMix64& rng) {
  const SpdMatrix e = SpdMatrix::identity(m);
  auto basis = geometry.tangent_basis(e);
  Eigen::MatrixXd a1 = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd a2 = Eigen::MatrixXd::Zero(m, m);
  a1(0, 0) = 1.0;
  a2(m - 1, m - 1) = 0.8;
  if (m > 1) a1(1, 0) = a1(0, 1) = 0.5;

  SampleTable table;
  table.predictors.resize(n, 2);
  table.responses.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double x1 = rng.uniform();
    const double x2 = rng.uniform();
    table.predictors(i, 0) = x1;
    table.predictors(i, 1) = x2;
    Eigen::MatrixXd u = std::sin(2.0 * M_PI * x1) * a1 +
                        std::cos(2.0 * M_PI * x2) * a2;
    for (const auto& v : basis) u += noise * rng.normal() * v.value;
    table.responses.push_back(geometry.lie_exp(u));
  }
  return table;
}

}  // namespace

TEST_CASE("sample table validation") {
  SampleTable t;
  CHECK_THROWS_AS(t.validate(), EmptySample);
  t.predictors.resize(2, 1);
  t.predictors << 0.2, 1.5;  // out of [0,1]
  t.responses.emplace_back(SpdMatrix::identity(2));
  t.responses.emplace_back(SpdMatrix::identity(2));
  CHECK_THROWS_AS(t.validate(), OutOfDomain);
  t.predictors << 0.2, 0.8;
  CHECK_NOTHROW(t.validate());
  t.responses[1] = SpdMatrix::identity(3);
  CHECK_THROWS_AS(t.validate(), DimensionMismatch);
}

TEST_CASE("iterative backfitting equals the dense constrained solve") {
  // Scalar responses (m = 1), two predictors, coarse grid: the discrete
  // backfitting system is small enough to solve directly.
  const int n = 50;
  const GridSpec grid{21};
  auto geometry = std::shared_ptr<const Geometry>(
      make_geometry(Metric::LogCholesky));
  SplitMix64 rng(40);
  SampleTable sample = make_additive_sample(n, 1, *geometry, 0.1, rng);
  KernelSpec kernel{KernelFamily::Epanechnikov, {0.3, 0.3}};

  AdditiveFit model = fit(sample, geometry, kernel, grid);

  // Rebuild the same discrete system independently.
  SpdMatrix mu = geometry->frechet_mean(sample.responses);
  auto basis = geometry->tangent_basis(mu);
  Eigen::MatrixXd responses(n, 1);
  for (int i = 0; i < n; ++i) {
    responses(i, 0) =
        geometry->coordinates(basis, geometry->riem_log(mu, sample.responses[i]))(0);
  }
  const double mean_term = responses.col(0).mean();
  DensityEstimates dens = estimate_densities(sample.predictors, kernel, grid);
  const Eigen::VectorXd quad = grid.trapezoid_weights();
  const int M = grid.points;

  // Blocks: F_k = P_k (b_k - C_kj F_j) with P_k the centering projection.
  auto projection = [&](int k) {
    const Eigen::VectorXd w = quad.cwiseProduct(dens.marginal[k]);
    return Eigen::MatrixXd(Eigen::MatrixXd::Identity(M, M) -
                           Eigen::VectorXd::Ones(M) * w.transpose() / w.sum());
  };
  auto coupling = [&](int k, int j) {
    Eigen::MatrixXd c = dens.pairwise[k][j] * quad.asDiagonal();
    c.array().colwise() /= dens.marginal[k].array();
    return c;
  };
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2 * M, 2 * M);
  Eigen::VectorXd rhs(2 * M);
  for (int k = 0; k < 2; ++k) {
    const int j = 1 - k;
    const Eigen::MatrixXd pk = projection(k);
    A.block(k * M, j * M, M, M) = pk * coupling(k, j);
    Eigen::VectorXd bk =
        marginal_regressor(dens, k, responses).col(0).array() - mean_term;
    rhs.segment(k * M, M) = pk * bk;
  }
  Eigen::VectorXd dense = A.fullPivLu().solve(rhs);

  for (int k = 0; k < 2; ++k) {
    for (int g = 0; g < M; ++g) {
      CHECK(std::abs(model.components[k](g, 0) - dense(k * M + g)) <= 1e-6);
    }
  }
}

TEST_CASE("fitted components are centered against the marginal density") {
  auto geometry = std::shared_ptr<const Geometry>(
      make_geometry(Metric::LogEuclidean));
  SplitMix64 rng(41);
  SampleTable sample = make_additive_sample(120, 2, *geometry, 0.2, rng);
  KernelSpec kernel{KernelFamily::Epanechnikov, {0.15, 0.15}};
  GridSpec grid{101};
  AdditiveFit model = fit(sample, geometry, kernel, grid);
  const Eigen::VectorXd quad = grid.trapezoid_weights();
  for (int k = 0; k < model.q(); ++k) {
    Eigen::RowVectorXd integral =
        quad.cwiseProduct(model.density[k]).transpose() * model.components[k];
    CHECK(integral.cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("fit recovers a smooth additive signal") {
  SplitMix64 rng(42);
  for (Metric metric : {Metric::LogCholesky, Metric::LogEuclidean}) {
    auto geometry = std::shared_ptr<const Geometry>(make_geometry(metric));
    SampleTable train = make_additive_sample(400, 2, *geometry, 0.05, rng);
    SampleTable test = make_additive_sample(200, 2, *geometry, 0.0, rng);
    KernelSpec kernel{KernelFamily::Epanechnikov, {0.1, 0.1}};
    AdditiveFit model = fit(train, geometry, kernel, GridSpec{101});
    const double rmse = evaluate_rmse(model, test);
    CHECK(rmse < 0.15);

    // A flat fit would be much worse: signal magnitude is O(1).
    double flat = 0.0;
    for (int i = 0; i < test.n(); ++i) {
      const double d = geometry->distance(model.mu_hat, test.responses[i]);
      flat += d * d;
    }
    flat = std::sqrt(flat / test.n());
    CHECK(rmse < 0.5 * flat);
  }
}

TEST_CASE("group translation of the responses translates the fit") {
  SplitMix64 rng(43);
  for (Metric metric : {Metric::LogCholesky, Metric::LogEuclidean}) {
    auto geometry = std::shared_ptr<const Geometry>(make_geometry(metric));
    SampleTable sample = make_additive_sample(80, 2, *geometry, 0.2, rng);
    KernelSpec kernel{KernelFamily::Epanechnikov, {0.2, 0.2}};

    Eigen::MatrixXd shift(2, 2);
    shift << 0.4, -0.3, -0.3, 0.2;
    SpdMatrix g = geometry->lie_exp(shift);
    SampleTable translated = sample;
    for (auto& y : translated.responses) y = geometry->group_op(g, y);

    AdditiveFit base = fit(sample, geometry, kernel, GridSpec{51});
    AdditiveFit moved = fit(translated, geometry, kernel, GridSpec{51});

    for (int i = 0; i < 20; ++i) {
      Eigen::VectorXd x(2);
      x << rng.uniform(), rng.uniform();
      SpdMatrix expected = geometry->group_op(g, predict(base, x));
      SpdMatrix got = predict(moved, x);
      CHECK(geometry->distance(expected, got) <= 1e-7);
    }
  }
}

TEST_CASE("prediction agrees with the group composition of components") {
  SplitMix64 rng(44);
  auto geometry = std::shared_ptr<const Geometry>(
      make_geometry(Metric::LogCholesky));
  SampleTable sample = make_additive_sample(80, 2, *geometry, 0.2, rng);
  KernelSpec kernel{KernelFamily::Epanechnikov, {0.2, 0.2}};
  AdditiveFit model = fit(sample, geometry, kernel, GridSpec{51});
  for (int i = 0; i < 10; ++i) {
    Eigen::VectorXd x(2);
    x << rng.uniform(), rng.uniform();
    SpdMatrix composed = model.mu_hat;
    for (int k = 0; k < 2; ++k) {
      composed = geometry->group_op(composed, component_to_group(model, k, x(k)));
    }
    CHECK(geometry->distance(composed, predict(model, x)) < 1e-8);
  }
}

TEST_CASE("fit input validation and prediction domain") {
  auto geometry = std::shared_ptr<const Geometry>(
      make_geometry(Metric::LogCholesky));
  SplitMix64 rng(45);
  SampleTable tiny = make_additive_sample(8, 2, *geometry, 0.1, rng);
  KernelSpec kernel{KernelFamily::Epanechnikov, {0.3, 0.3}};
  CHECK_THROWS_AS(fit(tiny, geometry, kernel, GridSpec{21}), EmptySample);

  SampleTable sample = make_additive_sample(60, 2, *geometry, 0.1, rng);
  AdditiveFit model = fit(sample, geometry, kernel, GridSpec{21});
  Eigen::VectorXd x(2);
  x << 0.5, 1.2;
  CHECK_THROWS_AS(predict(model, x), OutOfDomain);
  Eigen::VectorXd wrong(3);
  wrong.setConstant(0.5);
  CHECK_THROWS_AS(predict(model, wrong), DimensionMismatch);
  // boundary values are inside the domain
  x << 0.0, 1.0;
  CHECK_NOTHROW(predict(model, x));
}

TEST_CASE("cross-validated bandwidths are valid and shared across axes") {
  auto geometry = std::shared_ptr<const Geometry>(
      make_geometry(Metric::LogCholesky));
  SplitMix64 rng(46);
  SampleTable sample = make_additive_sample(100, 2, *geometry, 0.2, rng);
  auto h = select_bandwidths_cv(sample, geometry, KernelFamily::Epanechnikov,
                                GridSpec{51});
  REQUIRE(h.size() == 2);
  CHECK(h[0] == h[1]);
  CHECK(h[0] > 0.0);
  CHECK(h[0] <= 0.5);
}
