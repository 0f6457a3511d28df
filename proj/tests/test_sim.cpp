#include <doctest.h>

#include <cmath>

#include <mam/sim.hpp>

using namespace mam;

TEST_CASE("setting names round-trip") {
  CHECK(setting_from_name("I") == SimSetting::I);
  CHECK(setting_from_name("III") == SimSetting::III);
  CHECK(setting_name(SimSetting::II) == "II");
  CHECK_THROWS_AS(setting_from_name("IV"), std::invalid_argument);
}

TEST_CASE("g_entry matches its formula") {
  for (int q : {3, 4}) {
    for (int j = 1; j <= 3; ++j) {
      for (int l = 1; l <= 3; ++l) {
        for (double x : {0.0, 0.17, 0.5, 0.93}) {
          const double expected = std::exp(-std::abs(j - l) / double(q)) *
                                  std::sin(2.0 * q * M_PI * (x - double(j + l) / q));
          CHECK(g_entry(x, j, l, q) == doctest::Approx(expected).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("setting-I components are symmetric and mean-zero") {
  const int q = 3, m = 3;
  Eigen::MatrixXd f = setting1_component(0.3, 0, q, m);
  CHECK((f - f.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  // integral over [0,1] of sin(2 q pi x) is zero, so the average vanishes
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(m, m);
  const int steps = 10000;
  for (int i = 0; i < steps; ++i) {
    acc += setting1_component((i + 0.5) / steps, 0, q, m);
  }
  CHECK((acc / steps).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("make_f settings II and III match their definitions") {
  const int q = 3, m = 2;
  Eigen::VectorXd x(q);
  x << 0.2, 0.7, 0.4;

  auto f2 = make_f(SimSetting::II, q, m);
  Eigen::MatrixXd expected2(m, m);
  for (int j = 1; j <= m; ++j)
    for (int l = 1; l <= m; ++l)
      expected2(j - 1, l - 1) = g_entry(x(0), j, l, q) * g_entry(x(1), j, l, q);
  expected2 += setting1_component(x(2), 2, q, m);
  CHECK((f2(x) - expected2).cwiseAbs().maxCoeff() < 1e-12);

  auto f3 = make_f(SimSetting::III, q, m);
  Eigen::MatrixXd expected3(m, m);
  for (int j = 1; j <= m; ++j)
    for (int l = 1; l <= m; ++l)
      expected3(j - 1, l - 1) = std::exp(-(j + l) * (x(0) + x(1)));
  expected3 *= std::sin(2.0 * M_PI * x(2));
  CHECK((f3(x) - expected3).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("noise draws have the prescribed second moment") {
  for (Metric metric : {Metric::LogCholesky, Metric::LogEuclidean}) {
    auto geometry = make_geometry(metric);
    const SpdMatrix e = SpdMatrix::identity(3);
    auto basis = geometry->tangent_basis(e);
    const double sigma = 0.5;
    SplitMix64 rng(50);
    double acc = 0.0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
      SpdMatrix zeta = draw_noise(sigma, *geometry, basis, rng);
      TangentVector u(e, geometry->lie_log(zeta));
      acc += geometry->inner(e, u, u);
    }
    const double expected = basis.size() * sigma * sigma;  // D sigma^2
    CHECK(std::abs(acc / draws - expected) < 0.02 * expected);
  }
}

TEST_CASE("sigma calibration is deterministic and scales with snr") {
  auto geometry = make_geometry(Metric::LogCholesky);
  const double s2 =
      calibrate_sigma(SimSetting::I, 3, 3, 2.0, *geometry, 20000, 42);
  const double again =
      calibrate_sigma(SimSetting::I, 3, 3, 2.0, *geometry, 20000, 42);
  CHECK(s2 == again);
  const double s4 =
      calibrate_sigma(SimSetting::I, 3, 3, 4.0, *geometry, 20000, 42);
  CHECK(s4 == doctest::Approx(0.5 * s2).epsilon(1e-12));
  CHECK(s2 > 0.0);
}

TEST_CASE("generated data is reproducible per (seed, rep) and in-domain") {
  SimConfig cfg;
  cfg.q = 2;
  cfg.n = 30;
  cfg.m = 2;
  cfg.seed = 9;
  cfg.test_size = 20;
  GeneratedData a = generate(cfg, 0.3, 4);
  GeneratedData b = generate(cfg, 0.3, 4);
  CHECK((a.train.predictors - b.train.predictors).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.train.responses[7].entries() - b.train.responses[7].entries())
            .cwiseAbs()
            .maxCoeff() == 0.0);

  GeneratedData c = generate(cfg, 0.3, 5);
  CHECK((a.train.predictors - c.train.predictors).cwiseAbs().maxCoeff() > 0.0);

  CHECK(a.train.predictors.minCoeff() >= 0.0);
  CHECK(a.train.predictors.maxCoeff() <= 1.0);
  CHECK(a.train.n() == 30);
  CHECK(a.test.n() == 20);
}

TEST_CASE("test responses lie exactly on the regression surface") {
  SimConfig cfg;
  cfg.q = 2;
  cfg.n = 30;
  cfg.m = 2;
  cfg.seed = 11;
  cfg.test_size = 25;
  auto geometry = make_geometry(cfg.metric);
  auto f = make_f(cfg.setting, cfg.q, cfg.m);
  GeneratedData data = generate(cfg, 0.4, 1);
  for (int i = 0; i < data.test.n(); ++i) {
    SpdMatrix truth = geometry->lie_exp(f(data.test.predictors.row(i)));
    CHECK(geometry->distance(truth, data.test.responses[i]) < 1e-9);
  }
}

TEST_CASE("benchmark runs are deterministic and aggregate correctly") {
  SimConfig cfg;
  cfg.q = 2;
  cfg.n = 60;
  cfg.m = 2;
  cfg.reps = 3;
  cfg.seed = 21;
  cfg.test_size = 50;
  cfg.bandwidth_c = 0.5;
  cfg.calibration_draws = 5000;

  SimReport a = run_benchmark(cfg);
  SimReport b = run_benchmark(cfg);
  REQUIRE(a.rmse.size() == 3);
  CHECK(a.failed_reps == 0);
  for (int i = 0; i < 3; ++i) CHECK(a.rmse[i] == b.rmse[i]);
  CHECK(a.sigma == b.sigma);

  const double mean = (a.rmse[0] + a.rmse[1] + a.rmse[2]) / 3.0;
  CHECK(a.rmse_mean == doctest::Approx(mean).epsilon(1e-12));
  double ss = 0.0;
  for (double r : a.rmse) ss += (r - mean) * (r - mean);
  CHECK(a.rmse_se == doctest::Approx(std::sqrt(ss / 2.0 / 3.0)).epsilon(1e-12));
  CHECK_FALSE(a.single_rep);
  CHECK(a.rmse_mean > 0.0);
}

TEST_CASE("config validation") {
  SimConfig cfg;
  cfg.n = 5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.n = 100;
  cfg.snr = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.snr = 2.0;
  cfg.reps = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.reps = 1;
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("component_ise vanishes when truth equals the estimate") {
  SimConfig cfg;
  cfg.q = 2;
  cfg.n = 80;
  cfg.m = 2;
  cfg.seed = 31;
  auto geometry = std::shared_ptr<const Geometry>(make_geometry(cfg.metric));
  GeneratedData data = generate(cfg, 0.2, 1);
  KernelSpec kernel{KernelFamily::Epanechnikov, {0.25, 0.25}};
  AdditiveFit model = fit(data.train, geometry, kernel, cfg.grid);

  const SpdMatrix e = SpdMatrix::identity(cfg.m);
  auto self = [&](double x) {
    TangentVector est =
        geometry->from_coordinates(model.basis, model.component_coords(0, x));
    return geometry->transport(model.mu_hat, e, est).value;
  };
  CHECK(component_ise(model, 0, self, 0.0, 1.0) < 1e-18);

  // against zero, the ISE equals the squared norm integral: positive
  auto zero = [&](double) { return Eigen::MatrixXd::Zero(cfg.m, cfg.m); };
  CHECK(component_ise(model, 0, zero, 0.0, 1.0) > 0.0);
}

TEST_CASE("rate probe slope is negative on a small configuration") {
  SimConfig cfg;
  cfg.q = 2;
  cfg.n = 50;
  cfg.m = 2;
  cfg.reps = 5;
  cfg.seed = 13;
  cfg.bandwidth_c = 0.25;
  cfg.calibration_draws = 5000;
  RateProbeResult r = rate_probe(cfg, {100, 400});
  REQUIRE(r.interior_ise.size() == 2);
  CHECK(r.interior_ise[1] < r.interior_ise[0]);
  CHECK(r.slope < 0.0);
  CHECK(r.full_ise[0] >= r.interior_ise[0]);

  cfg.setting = SimSetting::II;
  CHECK_THROWS_AS(rate_probe(cfg, {50, 100}), std::invalid_argument);
}
