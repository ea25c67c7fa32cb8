#pragma once

#include "segccr/empirical.hpp"
#include "segccr/rng.hpp"
#include "segccr/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace segccr {

enum class Scenario { GumbelMixture, BivariateNormalMixture };

std::string_view to_string(Scenario scenario);

/// Two-component mixture. Component 1 (weak) is drawn with probability pi1,
/// component 2 (strong) otherwise. theta is the Gumbel parameter (>= 1) for
/// GumbelMixture and the correlation (|theta| < 1) for BivariateNormalMixture.
struct ScenarioSpec {
  Scenario scenario = Scenario::GumbelMixture;
  std::size_t n = 10000;
  double pi1 = 0.8;
  double theta1 = 1.0;
  double theta2 = 1.2;
  double mu1 = 0.0;
  double mu2 = 3.0;

  /// Scenario I defaults: theta1 = 1, theta2 = 1.2, mu = (0, 3).
  static ScenarioSpec scenario1(double pi1, double theta2 = 1.2, std::size_t n = 10000);
  /// Scenario II defaults: theta1 = 0, theta2 = 0.9, mu = (0, 2.5).
  static ScenarioSpec scenario2(double pi1, double theta1 = 0.0, std::size_t n = 10000);
};

void validate(const ScenarioSpec& spec);

/// Gumbel-Hougaard copula draws via the Marshall-Olkin frailty construction
/// with a positive stable frailty (Chambers-Mallows-Stuck). theta = 1 gives
/// independent uniforms.
std::vector<std::pair<double, double>> sample_gumbel_copula(std::size_t n, double theta, SeededRng& rng);

/// Scores are oriented so that higher means stronger (the strong component
/// has the larger mean). `component`, when given, receives 1 or 2 per pair.
ScorePairs generate_scenario1(const ScenarioSpec& spec, SeededRng& rng, std::vector<int>* component = nullptr);
ScorePairs generate_scenario2(const ScenarioSpec& spec, SeededRng& rng, std::vector<int>* component = nullptr);
ScorePairs generate(const ScenarioSpec& spec, SeededRng& rng, std::vector<int>* component = nullptr);

/// Strong-component Gumbel parameter used for the change-point test power sweep.
inline constexpr double kPowerTheta2 = 1.2;
/// Scenario I (theta1 = 1, theta2 = kPowerTheta2) at mixing proportion pi1.
ScenarioSpec power_test_spec(double pi1, std::size_t n = 10000);

/// Two-workflow design: workflow 0 gets covariate x = 0, workflow 1 gets x = 1.
std::vector<ScorePairs> generate_two_workflows(const ScenarioSpec& workflow0, const ScenarioSpec& workflow1,
                                               SeededRng& rng);

/// Riemann sum of (fitted - empirical)^2 weighted by (t_m - t_{m-1}), t_0 = 0.
double mise(const std::vector<double>& fitted, const EmpiricalCurve& empirical);

/// Sample Kendall's tau (O(n log n) is not needed at test sizes; O(n^2)).
double kendall_tau(const std::vector<std::pair<double, double>>& xy);
double spearman_rho(const std::vector<std::pair<double, double>>& xy);

// ---------------------------------------------------------------------------
// Monte Carlo benchmark reproducing the simulation tables.

struct BenchmarkConfig {
  std::size_t replicates = 25;
  std::size_t n = 4000;
  std::size_t bootstrap_B = 100;
  std::size_t qlr_NB = 200;
  std::uint64_t seed = 20190601;
  std::size_t threads = 1;
  /// Any of "table1", "table2", "table3", "table5".
  std::vector<std::string> tables{"table1"};

  static BenchmarkConfig fast();
  static BenchmarkConfig full();
};

struct BenchmarkRecord {
  std::string table;
  std::string row;
  std::string scenario;
  std::size_t n = 0;
  double pi1 = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  std::string statistic;
  double value = 0.0;
  /// Reference value for comparison (NaN when not tabulated).
  double reference = 0.0;
};

struct BenchmarkReport {
  BenchmarkConfig config;
  std::vector<BenchmarkRecord> records;
};

/// Per-replicate outcomes, exposed so callers can apply their own criteria.
struct BaselineReplicate {
  double tau_hat = 0.0;
  double mise_segmented = 0.0;
  double mise_homogeneous = 0.0;
};
struct CovariateReplicate {
  Eigen::VectorXd estimate;  // (tau, beta_01, beta_02, beta_11, beta_12)
  Eigen::VectorXd se;
  bool reject_b11 = false;
  bool reject_b12 = false;
};
struct PowerReplicate {
  double qlr = 0.0;
  double p_value = 1.0;
};

BaselineReplicate run_baseline_replicate(const ScenarioSpec& spec, std::uint64_t seed, std::size_t replicate);
CovariateReplicate run_covariate_replicate(const ScenarioSpec& workflow0, const ScenarioSpec& workflow1,
                                           std::size_t B, std::uint64_t seed, std::size_t replicate,
                                           std::size_t threads = 1);
PowerReplicate run_power_replicate(const ScenarioSpec& spec, std::size_t NB, std::uint64_t seed,
                                   std::size_t replicate, std::size_t threads = 1);

BenchmarkReport run_benchmark(const BenchmarkConfig& config);

/// Tab-separated report with header
/// table, row, scenario, n, pi1, theta1, theta2, statistic, value, reference.
void write_report(const BenchmarkReport& report, std::ostream& out);
std::vector<BenchmarkRecord> read_report(std::istream& in);

}  // namespace segccr
