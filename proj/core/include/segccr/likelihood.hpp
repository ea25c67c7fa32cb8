#pragma once

#include "segccr/empirical.hpp"
#include "segccr/types.hpp"

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace segccr {

/// One workflow's design vector (1, x1, ..., xS) and its category counts.
struct WorkflowData {
  Eigen::VectorXd x;
  CategoryCounts counts;
};

/// Per-workflow multinomial blocks sharing one cutoff grid and one design
/// width S+1.
class DesignSet {
 public:
  DesignSet() = default;
  explicit DesignSet(std::vector<WorkflowData> workflows);

  std::size_t size() const { return workflows_.size(); }
  std::size_t design_width() const { return workflows_.empty() ? 0 : static_cast<std::size_t>(workflows_.front().x.size()); }
  std::size_t total_count() const;
  const WorkflowData& operator[](std::size_t s) const { return workflows_[s]; }
  const std::vector<WorkflowData>& workflows() const { return workflows_; }

 private:
  std::vector<WorkflowData> workflows_;
};

/// Rank, bin and attach the design vector for every workflow.
DesignSet make_design_set(const std::vector<ScorePairs>& workflows, Orientation orientation, const CutoffGrid& grid);

/// W(t, tau) = ([log t - log tau]_-, log tau + [log t - log tau]_+).
std::pair<double, double> basis_w(double t, double tau);

/// log Psi(t | x) = sum_s x_s beta_s' W(t, tau).
double model_log_psi(const SegmentedParams& params, const Eigen::VectorXd& x, double t);

/// Basis functions evaluated at t_1..t_M; row m-1 holds h(t_m). The value at
/// t_0 = 0 is never evaluated: exp(eta(t_0)) is taken to be exactly 0.
/// Two columns for the segmented model, one (log t) for the homogeneous one.
struct Basis {
  Eigen::MatrixXd values;
  std::size_t K() const { return static_cast<std::size_t>(values.cols()); }
  std::size_t M() const { return static_cast<std::size_t>(values.rows()); }
};

Basis segmented_basis(const CutoffGrid& grid, double tau);
Basis homogeneous_basis(const CutoffGrid& grid);

/// Multinomial log-likelihood for coefficient matrix `coef` ((S+1) x K) on
/// the given basis. Throws NonmonotoneModel if any category probability of
/// any workflow is not positive.
double basis_log_likelihood(const Eigen::MatrixXd& coef, const DesignSet& data, const Basis& basis);

/// Analytic gradient of basis_log_likelihood, same shape as coef.
Eigen::MatrixXd basis_score(const Eigen::MatrixXd& coef, const DesignSet& data, const Basis& basis);

/// Log-likelihood and gradient in one pass. Returns false (and leaves the
/// outputs unspecified) instead of throwing when the point is infeasible.
bool try_basis_log_likelihood(const Eigen::MatrixXd& coef, const DesignSet& data, const Basis& basis, double& loglik,
                              Eigen::MatrixXd* grad);

/// Per-category score d log p_m / d slopes for a single workflow with
/// effective slopes `slopes` (length K); returns an M x K matrix.
Eigen::MatrixXd category_scores(const Eigen::VectorXd& slopes, const Basis& basis);

/// Category probabilities p_m for effective slopes `slopes`.
Eigen::VectorXd category_probabilities(const Eigen::VectorXd& slopes, const Basis& basis);

double log_likelihood(const SegmentedParams& params, const DesignSet& data, const CutoffGrid& grid);

/// Gradient in beta (tau fixed), flattened row-major:
/// (beta_01, beta_02, beta_11, beta_12, ...).
Eigen::VectorXd score_beta(const SegmentedParams& params, const DesignSet& data, const CutoffGrid& grid);

/// Row-major flatten / unflatten helpers for coefficient matrices.
Eigen::VectorXd flatten(const Eigen::MatrixXd& coef);
Eigen::MatrixXd unflatten(const Eigen::VectorXd& v, Eigen::Index rows, Eigen::Index cols);

}  // namespace segccr
