#pragma once

#include "segccr/estimation.hpp"
#include "segccr/types.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace segccr {

/// Shared settings for refitting a data set (original or resampled).
struct ModelSetup {
  Orientation orientation = Orientation::LowerIsStronger;
  CutoffGrid grid = CutoffGrid::equally_spaced(100);
  std::vector<double> tau_grid;
  FitOptions fit;
};

/// Flattened parameter vector (tau, beta_01, beta_02, beta_11, ...).
Eigen::VectorXd parameter_vector(const SegmentedParams& params);
std::vector<std::string> parameter_names(std::size_t design_width);

struct BootstrapResult {
  std::size_t B = 0;
  /// B x P; rows of failed replicates are NaN.
  Eigen::MatrixXd estimates;
  std::vector<bool> converged;
  Eigen::VectorXd mean;
  Eigen::VectorXd se;
  /// Per-coordinate (2.5%, 97.5%) percentiles over converged replicates.
  std::vector<std::pair<double, double>> ci_percentile;
  std::size_t failures = 0;
};

struct BootstrapOptions {
  std::size_t B = 100;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  double max_failure_fraction = 0.2;
};

/// Nonparametric bootstrap: replicate b draws n_s pairs with replacement
/// within each workflow from stream (seed, b), re-ranks, re-bins and refits.
/// Throws TooManyFailures if more than max_failure_fraction of replicates
/// fail to produce a converged fit.
BootstrapResult bootstrap(const std::vector<ScorePairs>& workflows, const ModelSetup& setup,
                          const BootstrapOptions& options);

/// Linear-interpolated sample quantile (type 7) of unsorted data.
double sample_quantile(std::vector<double> values, double prob);

struct WaldTest {
  std::string coefficient;
  double estimate = 0.0;
  double se = 0.0;
  double z = 0.0;
  double p_value = 1.0;
  bool reject = false;
};

/// Two-sided normal tail probability 2 * (1 - Phi(|z|)).
double two_sided_p(double z);

/// One test of H0: beta_sj = 0 per non-baseline coefficient (s >= 1).
std::vector<WaldTest> wald_tests(const FitResult& fit, const BootstrapResult& boot, double level = 0.05);

struct QLRResult {
  double qlr = 0.0;
  double loglik_segmented = 0.0;
  double loglik_homogeneous = 0.0;
  double tau_hat = 0.0;
  double restricted_slope = 0.0;
  std::size_t n = 0;
  std::vector<double> null_draws;
  std::optional<double> p_value;
  std::size_t NB = 0;
  /// tau grid points dropped because the information matrix was singular.
  std::size_t skipped_taus = 0;
};

/// QLR = n (l_hat - l_tilde) for the baseline model of one workflow
/// (covariates are ignored).
QLRResult qlr_statistic(const ScorePairs& pairs, const ModelSetup& setup);

/// Multiplier simulation of the sup-QLR null distribution around the
/// restricted fit. Holds the per-category scores for every tau on the grid.
class QlrNullProcess {
 public:
  QlrNullProcess(const CategoryCounts& counts, const CutoffGrid& grid, const std::vector<double>& tau_grid,
                 double restricted_slope);

  /// D = sup_tau 0.5 [G' I^-1 G - G1' I1^-1 G1] where G and G1 are formed
  /// from the per-category sums of the multipliers (Z_m = sum_{i in m} xi_i).
  double statistic(const Eigen::VectorXd& category_multiplier_sums) const;

  std::size_t usable_taus() const { return taus_.size(); }
  std::size_t skipped_taus() const { return skipped_; }
  /// Information matrix at the k-th usable tau.
  const Eigen::Matrix2d& information(std::size_t k) const { return info_[k]; }

 private:
  double n_;
  std::vector<double> taus_;
  std::vector<Eigen::MatrixXd> scores_;  // M x 2 per usable tau
  std::vector<Eigen::Matrix2d> info_;
  std::vector<Eigen::Matrix2d> info_inv_;
  Eigen::VectorXd restricted_scores_;  // M
  double info1_inv_ = 0.0;
  std::size_t skipped_ = 0;
};

struct QlrOptions {
  std::size_t NB = 1000;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};

/// QLR statistic plus simulated p-value = NB^-1 sum I(D_j > QLR). Draw j
/// uses stream (seed, j) to generate one N(0,1) multiplier per candidate.
QLRResult qlr_null_pvalue(const ScorePairs& pairs, const ModelSetup& setup, const QlrOptions& options);

}  // namespace segccr
