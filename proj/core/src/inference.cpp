#include "segccr/inference.hpp"

#include "segccr/empirical.hpp"
#include "segccr/parallel.hpp"
#include "segccr/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace segccr {
namespace {

std::vector<double> tau_grid_for(const ModelSetup& setup) {
  return setup.tau_grid.empty() ? default_tau_grid(setup.grid) : setup.tau_grid;
}

ScorePairs resample(const ScorePairs& pairs, SeededRng& rng) {
  ScorePairs out;
  out.workflow_id = pairs.workflow_id;
  out.covariates = pairs.covariates;
  const std::size_t n = pairs.size();
  out.y1.resize(n);
  out.y2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = rng.index(n);
    out.y1[i] = pairs.y1[k];
    out.y2[i] = pairs.y2[k];
  }
  return out;
}

}  // namespace

Eigen::VectorXd parameter_vector(const SegmentedParams& params) {
  Eigen::VectorXd v(1 + params.beta.size());
  v[0] = params.tau;
  v.tail(params.beta.size()) = flatten(params.beta);
  return v;
}

std::vector<std::string> parameter_names(std::size_t design_width) {
  std::vector<std::string> names{"tau"};
  for (std::size_t s = 0; s < design_width; ++s) {
    names.push_back("beta_" + std::to_string(s) + "1");
    names.push_back("beta_" + std::to_string(s) + "2");
  }
  return names;
}

double sample_quantile(std::vector<double> values, double prob) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

BootstrapResult bootstrap(const std::vector<ScorePairs>& workflows, const ModelSetup& setup,
                          const BootstrapOptions& options) {
  if (options.B < 2) throw Error(ErrorCode::InvalidArgument, "bootstrap needs B >= 2");
  if (workflows.empty()) throw Error(ErrorCode::InvalidArgument, "bootstrap needs at least one workflow");
  for (const auto& w : workflows) validate_score_pairs(w);

  const std::vector<double> taus = tau_grid_for(setup);
  const std::size_t width = workflows.front().covariates.size() + 1;
  const auto P = static_cast<Eigen::Index>(1 + 2 * width);

  BootstrapResult result;
  result.B = options.B;
  result.estimates = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(options.B), P,
                                               std::numeric_limits<double>::quiet_NaN());
  std::vector<char> ok(options.B, 0);

  FitOptions fit_options = setup.fit;
  fit_options.threads = 1;
  parallel_for(options.B, options.threads, [&](std::size_t b) {
    SeededRng rng(options.seed, b);
    std::vector<ScorePairs> sample;
    sample.reserve(workflows.size());
    for (const auto& w : workflows) sample.push_back(resample(w, rng));
    try {
      const DesignSet data = make_design_set(sample, setup.orientation, setup.grid);
      const FitResult fit = fit_segmented(data, setup.grid, taus, fit_options);
      result.estimates.row(static_cast<Eigen::Index>(b)) = parameter_vector(fit.params).transpose();
      ok[b] = 1;
    } catch (const Error& e) {
      if (is_input_error(e.code())) throw;
    }
  });

  result.converged.assign(ok.begin(), ok.end());
  result.failures = static_cast<std::size_t>(std::count(ok.begin(), ok.end(), 0));
  const std::size_t good = options.B - result.failures;
  if (static_cast<double>(result.failures) > options.max_failure_fraction * static_cast<double>(options.B) || good < 2) {
    throw Error(ErrorCode::TooManyFailures, std::to_string(result.failures) + " of " + std::to_string(options.B) +
                                                " bootstrap replicates failed to converge");
  }

  result.mean = Eigen::VectorXd::Zero(P);
  result.se = Eigen::VectorXd::Zero(P);
  result.ci_percentile.resize(static_cast<std::size_t>(P));
  for (Eigen::Index p = 0; p < P; ++p) {
    std::vector<double> col;
    col.reserve(good);
    for (std::size_t b = 0; b < options.B; ++b) {
      if (ok[b]) col.push_back(result.estimates(static_cast<Eigen::Index>(b), p));
    }
    double mean = 0.0;
    for (double v : col) mean += v;
    mean /= static_cast<double>(col.size());
    double ss = 0.0;
    for (double v : col) ss += (v - mean) * (v - mean);
    result.mean[p] = mean;
    result.se[p] = std::sqrt(ss / static_cast<double>(col.size() - 1));
    result.ci_percentile[static_cast<std::size_t>(p)] = {sample_quantile(col, 0.025), sample_quantile(col, 0.975)};
  }
  return result;
}

double two_sided_p(double z) {
  if (std::isnan(z)) return 1.0;
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

std::vector<WaldTest> wald_tests(const FitResult& fit, const BootstrapResult& boot, double level) {
  const auto rows = fit.params.beta.rows();
  if (boot.se.size() != 1 + 2 * rows) {
    throw Error(ErrorCode::InvalidArgument, "bootstrap result does not match the fitted model");
  }
  const auto names = parameter_names(static_cast<std::size_t>(rows));
  std::vector<WaldTest> tests;
  for (Eigen::Index s = 1; s < rows; ++s) {
    for (Eigen::Index j = 0; j < 2; ++j) {
      const Eigen::Index idx = 1 + 2 * s + j;
      WaldTest t;
      t.coefficient = names[static_cast<std::size_t>(idx)];
      t.estimate = fit.params.beta(s, j);
      t.se = boot.se[idx];
      if (t.estimate == 0.0) {
        t.z = 0.0;
      } else if (t.se > 0.0) {
        t.z = t.estimate / t.se;
      } else {
        t.z = std::copysign(std::numeric_limits<double>::infinity(), t.estimate);
      }
      t.p_value = two_sided_p(t.z);
      t.reject = t.p_value < level;
      tests.push_back(t);
    }
  }
  return tests;
}

namespace {

ScorePairs baseline_only(const ScorePairs& pairs) {
  ScorePairs out = pairs;
  out.covariates.clear();
  return out;
}

// Returns (inverse, ok). A singular matrix gets one ridge of 1e-10 * trace.
std::pair<Eigen::Matrix2d, bool> invert_information(const Eigen::Matrix2d& info) {
  const double trace = info.trace();
  if (!(trace > 0.0) || !info.allFinite()) return {Eigen::Matrix2d::Zero(), false};
  Eigen::Matrix2d a = info;
  for (int attempt = 0; attempt < 2; ++attempt) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(a);
    const double lo = eig.eigenvalues()[0];
    const double hi = eig.eigenvalues()[1];
    if (lo > 1e-12 * hi) return {a.inverse(), true};
    a.diagonal().array() += 1e-10 * trace;
  }
  return {Eigen::Matrix2d::Zero(), false};
}

}  // namespace

QLRResult qlr_statistic(const ScorePairs& pairs, const ModelSetup& setup) {
  const ScorePairs base = baseline_only(validate_score_pairs(pairs));
  const DesignSet data = make_design_set({base}, setup.orientation, setup.grid);
  const FitResult fit = fit_segmented(data, setup.grid, tau_grid_for(setup), setup.fit);

  QLRResult r;
  r.n = base.size();
  r.loglik_segmented = fit.loglik;
  r.loglik_homogeneous = fit.homogeneous_loglik;
  // n * (l_hat/n - l_tilde/n): the per-observation likelihoods are averages
  // over the n candidates, so this is the difference of totals.
  r.qlr = fit.loglik - fit.homogeneous_loglik;
  r.tau_hat = fit.params.tau;
  r.restricted_slope = fit.homogeneous_beta[0];
  return r;
}

QlrNullProcess::QlrNullProcess(const CategoryCounts& counts, const CutoffGrid& grid,
                               const std::vector<double>& tau_grid, double restricted_slope)
    : n_(static_cast<double>(counts.n)) {
  if (counts.M() != grid.M()) throw Error(ErrorCode::GridMismatch, "counts and grid differ in M");
  const auto M = static_cast<Eigen::Index>(grid.M());
  Eigen::VectorXd nm(M);
  for (Eigen::Index m = 0; m < M; ++m) nm[m] = static_cast<double>(counts.counts[static_cast<std::size_t>(m)]);

  restricted_scores_ = category_scores(Eigen::VectorXd::Constant(1, restricted_slope), homogeneous_basis(grid)).col(0);
  const double info1 = nm.dot(restricted_scores_.cwiseAbs2()) / n_;
  if (!(info1 > 0.0)) throw Error(ErrorCode::SingularInformation, "restricted information is zero");
  info1_inv_ = 1.0 / info1;

  const Eigen::VectorXd slopes = Eigen::VectorXd::Constant(2, restricted_slope);
  for (double tau : tau_grid) {
    Eigen::MatrixXd s = category_scores(slopes, segmented_basis(grid, tau));
    Eigen::Matrix2d info = (s.transpose() * nm.asDiagonal() * s) / n_;
    info(1, 0) = info(0, 1);
    auto [inv, ok] = invert_information(info);
    if (!ok) {
      ++skipped_;
      continue;
    }
    taus_.push_back(tau);
    scores_.push_back(std::move(s));
    info_.push_back(info);
    info_inv_.push_back(inv);
  }
  if (taus_.empty()) throw Error(ErrorCode::SingularInformation, "information matrix is singular at every tau");
}

double QlrNullProcess::statistic(const Eigen::VectorXd& z) const {
  const double scale = 1.0 / std::sqrt(n_);
  const double g1 = scale * restricted_scores_.dot(z);
  const double restricted = g1 * g1 * info1_inv_;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < taus_.size(); ++k) {
    const Eigen::Vector2d g = scale * (scores_[k].transpose() * z);
    const double d = 0.5 * (g.dot(info_inv_[k] * g) - restricted);
    best = std::max(best, d);
  }
  return best;
}

QLRResult qlr_null_pvalue(const ScorePairs& pairs, const ModelSetup& setup, const QlrOptions& options) {
  if (options.NB < 1) throw Error(ErrorCode::InvalidArgument, "NB must be positive");
  QLRResult r = qlr_statistic(pairs, setup);

  const ScorePairs base = baseline_only(pairs);
  const UniformRanks ranks = to_uniform_ranks(base, setup.orientation);
  const CategoryCounts counts = category_counts(ranks, setup.grid);
  const QlrNullProcess process(counts, setup.grid, tau_grid_for(setup), r.restricted_slope);
  r.skipped_taus = process.skipped_taus();

  // Category of each candidate, so multipliers are drawn per candidate.
  const auto& t = setup.grid.points();
  std::vector<std::size_t> category(ranks.size());
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    const double v = std::max(ranks.u1(i), ranks.u2(i));
    category[i] = static_cast<std::size_t>(std::lower_bound(t.begin() + 1, t.end(), v) - t.begin()) - 1;
  }

  r.NB = options.NB;
  r.null_draws.assign(options.NB, 0.0);
  const auto M = static_cast<Eigen::Index>(setup.grid.M());
  parallel_for(options.NB, options.threads, [&](std::size_t j) {
    SeededRng rng(options.seed, j);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(M);
    for (std::size_t i = 0; i < category.size(); ++i) z[static_cast<Eigen::Index>(category[i])] += rng.normal();
    r.null_draws[j] = process.statistic(z);
  });

  std::size_t exceed = 0;
  for (double d : r.null_draws) exceed += d > r.qlr ? 1 : 0;
  r.p_value = static_cast<double>(exceed) / static_cast<double>(options.NB);
  return r;
}

}  // namespace segccr
