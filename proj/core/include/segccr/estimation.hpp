#pragma once

#include "segccr/likelihood.hpp"
#include "segccr/types.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace segccr {

struct FitOptions {
  /// Stop when the per-observation gradient sup-norm falls below this.
  double grad_tol = 1e-12;
  /// Stop when the per-observation log-likelihood improves by less than this.
  double value_tol = 1e-10;
  /// A fit is reported as converged when the per-observation gradient
  /// sup-norm at the returned point is below this.
  double converged_grad_tol = 1e-6;
  int max_iterations = 200;
  /// Start each tau from its neighbour's solution. Forces sequential
  /// evaluation of the tau grid; when false, grid points are independent and
  /// are evaluated on `threads` workers.
  bool warm_start = true;
  std::size_t threads = 1;
};

/// Result of maximizing the likelihood over the coefficients of a fixed basis.
struct CoefficientFit {
  Eigen::MatrixXd coef;
  double loglik = 0.0;
  double grad_sup_norm = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Newton ascent with analytic gradient, central-difference curvature and
/// step halving that rejects infeasible (non-monotone) points. The initial
/// point must be feasible.
CoefficientFit maximize_coefficients(const DesignSet& data, const Basis& basis, const Eigen::MatrixXd& init,
                                     const FitOptions& options = {});

struct ProfilePoint {
  double tau = 0.0;
  Eigen::MatrixX2d beta;
  double loglik = 0.0;
  bool converged = false;
  int iterations = 0;
};

struct HomogeneousFit {
  Eigen::VectorXd slopes;
  double loglik = 0.0;
  bool converged = false;
  int iterations = 0;
};

struct FitResult {
  SegmentedParams params;
  double loglik = 0.0;
  std::vector<ProfilePoint> profile;
  /// fitted_curve[s][m-1] = Psi_hat(t_m | x^s)
  std::vector<std::vector<double>> fitted_curve;
  double homogeneous_loglik = 0.0;
  Eigen::VectorXd homogeneous_beta;
};

/// Interior cutoffs t_m with lo <= t_m <= hi.
std::vector<double> default_tau_grid(const CutoffGrid& grid, double lo = 0.05, double hi = 0.95);

HomogeneousFit fit_homogeneous(const DesignSet& data, const CutoffGrid& grid, const FitOptions& options = {});

/// If `init` is infeasible it is shrunk toward `fallback` (beta_s1 = beta_s2 =
/// homogeneous slope) until feasible.
ProfilePoint fit_beta_given_tau(const DesignSet& data, const CutoffGrid& grid, double tau, const Eigen::MatrixX2d& init,
                                const FitOptions& options = {});

/// Grid search over tau. Throws AllFitsFailed if no grid point converged.
/// Ties in the profile maximum resolve to the smallest tau.
FitResult fit_segmented(const DesignSet& data, const CutoffGrid& grid, const std::vector<double>& tau_grid,
                        const FitOptions& options = {});

/// Psi_hat(t_m | x) for every workflow, m = 1..M.
std::vector<std::vector<double>> fitted_curve(const SegmentedParams& params, const DesignSet& data,
                                              const CutoffGrid& grid);

/// Homogeneous curve t_m^(x' slopes) for every workflow.
std::vector<std::vector<double>> homogeneous_curve(const Eigen::VectorXd& slopes, const DesignSet& data,
                                                   const CutoffGrid& grid);

}  // namespace segccr
