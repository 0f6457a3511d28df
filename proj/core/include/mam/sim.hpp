#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mam/rng.hpp"
#include "mam/sbf.hpp"

namespace mam {

enum class SimSetting { I, II, III };

SimSetting setting_from_name(const std::string& name);
std::string setting_name(SimSetting setting);

struct SimConfig {
  SimSetting setting = SimSetting::I;
  int q = 3;
  int n = 100;
  double snr = 2.0;
  int m = 3;
  Metric metric = Metric::LogCholesky;
  int reps = 100;
  std::uint64_t seed = 0;
  int test_size = 1000;
  GridSpec grid{101};
  KernelFamily kernel = KernelFamily::Epanechnikov;
  // When set, h_k = bandwidth_c * n^{-1/5}; otherwise cross-validated.
  std::optional<double> bandwidth_c;
  int calibration_draws = 100000;

  void validate() const;
};

struct SimReport {
  SimConfig config;
  double sigma = 0.0;
  std::vector<double> rmse;  // per successful rep, indexed by rep order
  int failed_reps = 0;
  double rmse_mean = 0.0;
  double rmse_se = 0.0;        // sample SD / sqrt(reps); 0 when reps == 1
  bool single_rep = false;     // rmse_se not meaningful
  double wall_seconds = 0.0;   // not serialized (reports must be deterministic)
};

// Entry (j, l) of the setting-I component matrix, 1-based indices:
// exp(-|j-l|/q) sin(2 q pi (x - (j+l)/q)).
double g_entry(double x, int j, int l, int q);

// Signal function f(x_1..x_q) -> symmetric m x m matrix for a setting.
std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> make_f(
    SimSetting setting, int q, int m);

// Setting-I per-axis component f_k (used as ground truth by rate_probe).
Eigen::MatrixXd setting1_component(double x, int axis, int q, int m);

// Noise draw: lie_exp(sum_j Z_j v_j) with Z_j ~ N(0, sigma^2) and v_j an
// orthonormal basis of the tangent space at the identity.
SpdMatrix draw_noise(double sigma, const Geometry& geometry,
                     const std::vector<TangentVector>& identity_basis,
                     SplitMix64& rng);

// Monte-Carlo calibration of the noise scale from the signal energy:
// sigma = E||lie_log w(X)||_e^2 / (D * snr), D = m(m+1)/2. The scale enters
// on the standard-deviation side; see the note in sim.cpp.
double calibrate_sigma(SimSetting setting, int q, int m, double snr,
                       const Geometry& geometry, int mc_draws,
                       std::uint64_t seed);

// One synthetic dataset: X uniform on [0,1]^q, Y = w(X) ++ noise, mu = I.
SampleTable generate_sample(const SimConfig& config, double sigma, int size,
                            SplitMix64& rng);

struct GeneratedData {
  SampleTable train;
  SampleTable test;
};

GeneratedData generate(const SimConfig& config, double sigma,
                       std::uint64_t rep);

// Full Monte-Carlo benchmark: per rep generate -> fit -> RMSE on the test
// set; reps run concurrently on substreams. Failed reps are counted and
// excluded from the aggregate.
SimReport run_benchmark(const SimConfig& config);

struct RateProbeResult {
  std::vector<int> n_values;
  std::vector<double> interior_ise;  // mean over reps of max_k interior ISE
  std::vector<double> full_ise;      // same over the whole domain
  double slope = 0.0;                // least-squares slope of log ISE vs log n
};

// Empirical convergence-rate probe for setting I: integrated squared error
// of the transported component estimates against the known truth.
RateProbeResult rate_probe(SimConfig config, const std::vector<int>& n_values);

// Interior ISE of a fitted component against a truth function on [0,1]
// (tangent coordinates at the identity); refine multiplies the evaluation
// grid resolution.
double component_ise(const AdditiveFit& fit, int axis,
                     const std::function<Eigen::MatrixXd(double)>& truth,
                     double lo, double hi, int refine = 1);

int worker_count();

}  // namespace mam
