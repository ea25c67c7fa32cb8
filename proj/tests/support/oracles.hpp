#pragma once

// Independent reference computations used by the unit and acceptance tests.
// They deliberately avoid the library's own code paths.

#include "segccr/likelihood.hpp"
#include "segccr/rng.hpp"
#include "segccr/types.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace segccr::oracle {

/// Rank by direct comparison: r_i = 1 + #{j : y_j weaker than y_i, or tied with j < i}.
inline std::vector<std::size_t> brute_ranks(const std::vector<double>& y, bool higher_is_stronger) {
  const std::size_t n = y.size();
  std::vector<std::size_t> r(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const bool weaker = higher_is_stronger ? y[j] < y[i] : y[j] > y[i];
      if (weaker || (y[j] == y[i] && j < i)) ++r[i];
    }
  }
  return r;
}

/// Psi_n(t) = n^-1 sum_i 1{u_i1 <= t, u_i2 <= t} with u = r / n.
inline double brute_psi(const std::vector<std::size_t>& r1, const std::vector<std::size_t>& r2, double t) {
  const double n = static_cast<double>(r1.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < r1.size(); ++i) {
    if (static_cast<double>(r1[i]) / n <= t && static_cast<double>(r2[i]) / n <= t) ++hits;
  }
  return static_cast<double>(hits) / n;
}

/// n_m = #{i : t_{m-1} < max(u_i1, u_i2) <= t_m}.
inline std::vector<std::size_t> brute_counts(const std::vector<std::size_t>& r1, const std::vector<std::size_t>& r2,
                                             const std::vector<double>& t) {
  const double n = static_cast<double>(r1.size());
  std::vector<std::size_t> counts(t.size() - 1, 0);
  for (std::size_t i = 0; i < r1.size(); ++i) {
    const double u = std::max(static_cast<double>(r1[i]), static_cast<double>(r2[i])) / n;
    for (std::size_t m = 1; m < t.size(); ++m) {
      if (t[m - 1] < u && u <= t[m]) ++counts[m - 1];
    }
  }
  return counts;
}

/// Multinomial log-likelihood written out from the definition
/// p_m = Psi(t_m) - Psi(t_{m-1}), Psi(t) = exp(model_log_psi), Psi(0) = 0.
inline double direct_log_likelihood(const SegmentedParams& params, const DesignSet& data, const CutoffGrid& grid) {
  double ll = 0.0;
  for (const auto& w : data.workflows()) {
    double prev = 0.0;
    for (std::size_t m = 1; m <= grid.M(); ++m) {
      const double cur = std::exp(model_log_psi(params, w.x, grid[m]));
      if (w.counts.counts[m - 1] > 0) ll += static_cast<double>(w.counts.counts[m - 1]) * std::log(cur - prev);
      prev = cur;
    }
  }
  return ll;
}

/// Central differences of log_likelihood in the flattened beta, step h.
inline Eigen::VectorXd fd_score(const SegmentedParams& params, const DesignSet& data, const CutoffGrid& grid,
                                double h) {
  const Eigen::Index rows = params.beta.rows();
  Eigen::VectorXd g(2 * rows);
  for (Eigen::Index k = 0; k < 2 * rows; ++k) {
    SegmentedParams up = params, down = params;
    up.beta(k / 2, k % 2) += h;
    down.beta(k / 2, k % 2) -= h;
    g[k] = (log_likelihood(up, data, grid) - log_likelihood(down, data, grid)) / (2.0 * h);
  }
  return g;
}

/// Random score pairs with a few ties so the tie-break rule is exercised.
inline ScorePairs random_pairs(std::size_t n, SeededRng& rng, std::size_t S = 0) {
  ScorePairs p;
  p.workflow_id = "w";
  for (std::size_t i = 0; i < n; ++i) {
    const double z = rng.normal();
    p.y1.push_back(std::round((z + 0.7 * rng.normal()) * 4.0) / 4.0);
    p.y2.push_back(std::round((z + 0.7 * rng.normal()) * 4.0) / 4.0);
  }
  for (std::size_t s = 0; s < S; ++s) p.covariates.push_back(rng.uniform());
  return p;
}

}  // namespace segccr::oracle
