#include "segccr/likelihood.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace segccr {

DesignSet::DesignSet(std::vector<WorkflowData> workflows) : workflows_(std::move(workflows)) {
  if (workflows_.empty()) throw Error(ErrorCode::InvalidArgument, "design set has no workflows");
  const auto width = workflows_.front().x.size();
  const auto M = workflows_.front().counts.M();
  for (const auto& w : workflows_) {
    if (w.x.size() != width) throw Error(ErrorCode::InvalidArgument, "design vectors differ in length");
    if (w.x.size() == 0 || w.x[0] != 1.0) throw Error(ErrorCode::InvalidArgument, "design vector must start with the intercept 1");
    if (!w.x.allFinite()) throw Error(ErrorCode::NonFinite, "non-finite covariate value");
    if (w.counts.M() != M) throw Error(ErrorCode::GridMismatch, "workflows were binned on different grids");
  }
}

std::size_t DesignSet::total_count() const {
  std::size_t n = 0;
  for (const auto& w : workflows_) n += w.counts.n;
  return n;
}

DesignSet make_design_set(const std::vector<ScorePairs>& workflows, Orientation orientation, const CutoffGrid& grid) {
  std::vector<WorkflowData> out;
  out.reserve(workflows.size());
  for (const auto& pairs : workflows) {
    out.push_back({pairs.design(), category_counts(to_uniform_ranks(pairs, orientation), grid)});
  }
  return DesignSet(std::move(out));
}

std::pair<double, double> basis_w(double t, double tau) {
  if (!(t > 0.0 && t <= 1.0)) throw Error(ErrorCode::DomainError, "basis_w: t must lie in (0, 1]");
  if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorCode::DomainError, "basis_w: tau must lie in (0, 1)");
  const double d = std::log(t) - std::log(tau);
  return {std::min(d, 0.0), std::log(tau) + std::max(d, 0.0)};
}

double model_log_psi(const SegmentedParams& params, const Eigen::VectorXd& x, double t) {
  const auto [w1, w2] = basis_w(t, params.tau);
  const Eigen::Vector2d b = params.effective_slopes(x);
  return b[0] * w1 + b[1] * w2;
}

Basis segmented_basis(const CutoffGrid& grid, double tau) {
  Basis basis{Eigen::MatrixXd(static_cast<Eigen::Index>(grid.M()), 2)};
  for (std::size_t m = 1; m <= grid.M(); ++m) {
    const auto [w1, w2] = basis_w(grid[m], tau);
    basis.values(static_cast<Eigen::Index>(m - 1), 0) = w1;
    basis.values(static_cast<Eigen::Index>(m - 1), 1) = w2;
  }
  return basis;
}

Basis homogeneous_basis(const CutoffGrid& grid) {
  Basis basis{Eigen::MatrixXd(static_cast<Eigen::Index>(grid.M()), 1)};
  for (std::size_t m = 1; m <= grid.M(); ++m) basis.values(static_cast<Eigen::Index>(m - 1), 0) = std::log(grid[m]);
  return basis;
}

namespace {

// Accumulates one workflow's log-likelihood and slope-gradient. eta_0 is
// -infinity (Psi(t_0) = 0), so the first category has log p_1 = eta_1.
bool workflow_terms(const Eigen::VectorXd& slopes, const Basis& basis, const CategoryCounts& counts, double& loglik,
                    Eigen::VectorXd* slope_grad) {
  const Eigen::VectorXd eta = basis.values * slopes;
  const Eigen::Index M = eta.size();
  double ll = 0.0;
  for (Eigen::Index m = 0; m < M; ++m) {
    const double nm = static_cast<double>(counts.counts[static_cast<std::size_t>(m)]);
    if (m == 0) {
      if (!std::isfinite(eta[0]) || eta[0] > 0.0) return false;
      if (nm > 0.0) {
        ll += nm * eta[0];
        if (slope_grad) *slope_grad += nm * basis.values.row(0).transpose();
      }
      continue;
    }
    const double diff = eta[m - 1] - eta[m];
    if (!(diff < 0.0) || !std::isfinite(diff)) return false;
    if (nm == 0.0) continue;
    const double one_minus_r = -std::expm1(diff);
    ll += nm * (eta[m] + std::log(one_minus_r));
    if (slope_grad) {
      const double r = std::exp(diff);
      *slope_grad += nm * (basis.values.row(m) - r * basis.values.row(m - 1)).transpose() / one_minus_r;
    }
  }
  loglik += ll;
  return true;
}

}  // namespace

bool try_basis_log_likelihood(const Eigen::MatrixXd& coef, const DesignSet& data, const Basis& basis, double& loglik,
                              Eigen::MatrixXd* grad) {
  if (static_cast<std::size_t>(coef.cols()) != basis.K() || static_cast<std::size_t>(coef.rows()) != data.design_width()) {
    throw Error(ErrorCode::InvalidArgument, "coefficient matrix shape does not match design set / basis");
  }
  loglik = 0.0;
  if (grad) grad->setZero(coef.rows(), coef.cols());
  Eigen::VectorXd slope_grad(coef.cols());
  for (const auto& w : data.workflows()) {
    if (w.counts.M() != basis.M()) throw Error(ErrorCode::GridMismatch, "counts and basis differ in M");
    const Eigen::VectorXd slopes = coef.transpose() * w.x;
    slope_grad.setZero();
    if (!workflow_terms(slopes, basis, w.counts, loglik, grad ? &slope_grad : nullptr)) return false;
    if (grad) *grad += w.x * slope_grad.transpose();
  }
  return std::isfinite(loglik);
}

double basis_log_likelihood(const Eigen::MatrixXd& coef, const DesignSet& data, const Basis& basis) {
  double ll = 0.0;
  if (!try_basis_log_likelihood(coef, data, basis, ll, nullptr)) {
    throw Error(ErrorCode::NonmonotoneModel, "a category probability is not positive at these parameters");
  }
  return ll;
}

Eigen::MatrixXd basis_score(const Eigen::MatrixXd& coef, const DesignSet& data, const Basis& basis) {
  double ll = 0.0;
  Eigen::MatrixXd grad;
  if (!try_basis_log_likelihood(coef, data, basis, ll, &grad)) {
    throw Error(ErrorCode::NonmonotoneModel, "a category probability is not positive at these parameters");
  }
  return grad;
}

Eigen::MatrixXd category_scores(const Eigen::VectorXd& slopes, const Basis& basis) {
  const Eigen::VectorXd eta = basis.values * slopes;
  const Eigen::Index M = eta.size();
  Eigen::MatrixXd out(M, basis.values.cols());
  out.row(0) = basis.values.row(0);
  for (Eigen::Index m = 1; m < M; ++m) {
    const double diff = eta[m - 1] - eta[m];
    if (!(diff < 0.0)) throw Error(ErrorCode::NonmonotoneModel, "a category probability is not positive");
    out.row(m) = (basis.values.row(m) - std::exp(diff) * basis.values.row(m - 1)) / (-std::expm1(diff));
  }
  return out;
}

Eigen::VectorXd category_probabilities(const Eigen::VectorXd& slopes, const Basis& basis) {
  const Eigen::VectorXd psi = (basis.values * slopes).array().exp();
  Eigen::VectorXd p(psi.size());
  p[0] = psi[0];
  for (Eigen::Index m = 1; m < psi.size(); ++m) p[m] = psi[m] - psi[m - 1];
  return p;
}

double log_likelihood(const SegmentedParams& params, const DesignSet& data, const CutoffGrid& grid) {
  return basis_log_likelihood(params.beta, data, segmented_basis(grid, params.tau));
}

Eigen::VectorXd score_beta(const SegmentedParams& params, const DesignSet& data, const CutoffGrid& grid) {
  return flatten(basis_score(params.beta, data, segmented_basis(grid, params.tau)));
}

Eigen::VectorXd flatten(const Eigen::MatrixXd& coef) {
  Eigen::VectorXd v(coef.size());
  for (Eigen::Index r = 0; r < coef.rows(); ++r)
    for (Eigen::Index c = 0; c < coef.cols(); ++c) v[r * coef.cols() + c] = coef(r, c);
  return v;
}

Eigen::MatrixXd unflatten(const Eigen::VectorXd& v, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd coef(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) coef(r, c) = v[r * cols + c];
  return coef;
}

}  // namespace segccr
