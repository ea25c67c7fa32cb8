#include "segccr/estimation.hpp"

#include "segccr/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace segccr {
namespace {

struct Evaluator {
  const DesignSet& data;
  const Basis& basis;
  Eigen::Index rows;
  Eigen::Index cols;

  bool operator()(const Eigen::VectorXd& x, double& ll, Eigen::VectorXd& g) const {
    Eigen::MatrixXd grad;
    if (!try_basis_log_likelihood(unflatten(x, rows, cols), data, basis, ll, &grad)) return false;
    g = flatten(grad);
    return g.allFinite();
  }
};

// Central differences of the analytic gradient, falling back to one-sided
// differences next to the feasibility boundary.
Eigen::MatrixXd fd_hessian(const Evaluator& eval, const Eigen::VectorXd& x, const Eigen::VectorXd& g) {
  const Eigen::Index p = x.size();
  Eigen::MatrixXd H(p, p);
  Eigen::VectorXd gp, gm;
  double ll = 0.0;
  for (Eigen::Index j = 0; j < p; ++j) {
    double h = 1e-5 * std::max(1.0, std::abs(x[j]));
    bool done = false;
    for (int attempt = 0; attempt < 6 && !done; ++attempt, h *= 0.1) {
      Eigen::VectorXd xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      const bool okp = eval(xp, ll, gp);
      const bool okm = eval(xm, ll, gm);
      if (okp && okm) {
        H.col(j) = (gp - gm) / (2.0 * h);
        done = true;
      } else if (okp) {
        H.col(j) = (gp - g) / h;
        done = true;
      } else if (okm) {
        H.col(j) = (g - gm) / h;
        done = true;
      }
    }
    if (!done) H.col(j).setZero();
  }
  return 0.5 * (H + H.transpose());
}

// Ascent direction from the negated Hessian, with Levenberg damping when it
// is not positive definite.
Eigen::VectorXd ascent_direction(const Eigen::MatrixXd& H, const Eigen::VectorXd& g) {
  const Eigen::MatrixXd A = -H;
  const double scale = std::max(A.diagonal().cwiseAbs().maxCoeff(), 1e-12);
  double lambda = 0.0;
  for (int k = 0; k < 12; ++k) {
    Eigen::MatrixXd Ad = A;
    Ad.diagonal().array() += lambda;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(Ad);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
      Eigen::VectorXd d = ldlt.solve(g);
      if (d.allFinite() && d.dot(g) > 0.0) return d;
    }
    lambda = (lambda == 0.0) ? 1e-10 * scale : lambda * 10.0;
  }
  return g / scale;
}

}  // namespace

CoefficientFit maximize_coefficients(const DesignSet& data, const Basis& basis, const Eigen::MatrixXd& init,
                                     const FitOptions& options) {
  const Evaluator eval{data, basis, init.rows(), init.cols()};
  const double N = std::max<double>(1.0, static_cast<double>(data.total_count()));

  CoefficientFit fit;
  Eigen::VectorXd x = flatten(init);
  Eigen::VectorXd g;
  double ll = 0.0;
  if (!eval(x, ll, g)) throw Error(ErrorCode::NonmonotoneModel, "initial coefficients are infeasible");

  int iter = 0;
  while (iter < options.max_iterations) {
    if (g.cwiseAbs().maxCoeff() / N < options.grad_tol) break;
    ++iter;
    const Eigen::VectorXd d = ascent_direction(fd_hessian(eval, x, g), g);

    double alpha = 1.0;
    bool accepted = false;
    Eigen::VectorXd xn, gn;
    double lln = 0.0;
    // Near the optimum the gain drops below round-off in ll; a step that keeps
    // ll within that noise and shrinks the gradient is still progress.
    const double noise = 16.0 * std::numeric_limits<double>::epsilon() * std::abs(ll);
    const double gnorm = g.cwiseAbs().maxCoeff();
    for (int k = 0; k < 60; ++k, alpha *= 0.5) {
      xn = x + alpha * d;
      if (eval(xn, lln, gn) && (lln >= ll || (lln >= ll - noise && gn.cwiseAbs().maxCoeff() < gnorm))) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    const double gain = std::max(0.0, lln - ll);
    x = std::move(xn);
    g = std::move(gn);
    ll = lln;
    if (gain / N < options.value_tol && g.cwiseAbs().maxCoeff() / N < options.converged_grad_tol) break;
  }

  fit.coef = unflatten(x, init.rows(), init.cols());
  fit.loglik = ll;
  fit.grad_sup_norm = g.cwiseAbs().maxCoeff();
  fit.converged = fit.grad_sup_norm / N < options.converged_grad_tol;
  fit.iterations = iter;
  return fit;
}

std::vector<double> default_tau_grid(const CutoffGrid& grid, double lo, double hi) {
  std::vector<double> taus;
  for (std::size_t m = 1; m < grid.M(); ++m) {
    if (grid[m] >= lo && grid[m] <= hi) taus.push_back(grid[m]);
  }
  if (taus.empty()) {
    for (std::size_t m = 1; m < grid.M(); ++m) taus.push_back(grid[m]);
  }
  if (taus.empty()) throw Error(ErrorCode::InvalidArgument, "cutoff grid has no interior points for the tau search");
  return taus;
}

HomogeneousFit fit_homogeneous(const DesignSet& data, const CutoffGrid& grid, const FitOptions& options) {
  const Basis basis = homogeneous_basis(grid);
  Eigen::MatrixXd init = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(data.design_width()), 1);
  init(0, 0) = 1.0;
  const CoefficientFit fit = maximize_coefficients(data, basis, init, options);
  return HomogeneousFit{fit.coef.col(0), fit.loglik, fit.converged, fit.iterations};
}

namespace {

bool feasible(const DesignSet& data, const Basis& basis, const Eigen::MatrixXd& coef) {
  double ll = 0.0;
  return try_basis_log_likelihood(coef, data, basis, ll, nullptr);
}

Eigen::MatrixX2d homogeneous_start(const Eigen::VectorXd& slopes) {
  Eigen::MatrixX2d b(slopes.size(), 2);
  b.col(0) = slopes;
  b.col(1) = slopes;
  return b;
}

ProfilePoint fit_at_tau(const DesignSet& data, const CutoffGrid& grid, double tau, const Eigen::MatrixX2d& init,
                        const Eigen::MatrixX2d& fallback, const FitOptions& options) {
  const Basis basis = segmented_basis(grid, tau);
  Eigen::MatrixXd start = init;
  for (int k = 0; k < 60 && !feasible(data, basis, start); ++k) start = fallback + 0.5 * (start - fallback);
  if (!feasible(data, basis, start)) start = fallback;
  if (!feasible(data, basis, start)) {
    throw Error(ErrorCode::NonmonotoneModel, "no feasible starting point at tau = " + std::to_string(tau));
  }
  const CoefficientFit fit = maximize_coefficients(data, basis, start, options);
  return ProfilePoint{tau, fit.coef, fit.loglik, fit.converged, fit.iterations};
}

}  // namespace

ProfilePoint fit_beta_given_tau(const DesignSet& data, const CutoffGrid& grid, double tau, const Eigen::MatrixX2d& init,
                                const FitOptions& options) {
  if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorCode::DomainError, "tau must lie in (0, 1)");
  const HomogeneousFit h = fit_homogeneous(data, grid, options);
  return fit_at_tau(data, grid, tau, init, homogeneous_start(h.slopes), options);
}

FitResult fit_segmented(const DesignSet& data, const CutoffGrid& grid, const std::vector<double>& tau_grid,
                        const FitOptions& options) {
  if (tau_grid.empty()) throw Error(ErrorCode::InvalidArgument, "tau grid is empty");
  for (double tau : tau_grid) {
    if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorCode::DomainError, "tau grid values must lie in (0, 1)");
  }

  FitResult result;
  const HomogeneousFit h = fit_homogeneous(data, grid, options);
  result.homogeneous_beta = h.slopes;
  result.homogeneous_loglik = h.loglik;
  const Eigen::MatrixX2d start = homogeneous_start(h.slopes);

  result.profile.resize(tau_grid.size());
  if (options.warm_start) {
    Eigen::MatrixX2d init = start;
    for (std::size_t k = 0; k < tau_grid.size(); ++k) {
      result.profile[k] = fit_at_tau(data, grid, tau_grid[k], init, start, options);
      init = result.profile[k].converged ? result.profile[k].beta : start;
    }
  } else {
    parallel_for(tau_grid.size(), options.threads,
                 [&](std::size_t k) { result.profile[k] = fit_at_tau(data, grid, tau_grid[k], start, start, options); });
  }

  const ProfilePoint* best = nullptr;
  for (const auto& p : result.profile) {
    if (!p.converged) continue;
    if (!best || p.loglik > best->loglik || (p.loglik == best->loglik && p.tau < best->tau)) best = &p;
  }
  if (!best) throw Error(ErrorCode::AllFitsFailed, "no tau grid point produced a converged fit");

  result.params.tau = best->tau;
  result.params.beta = best->beta;
  result.loglik = best->loglik;
  result.fitted_curve = fitted_curve(result.params, data, grid);
  return result;
}

std::vector<std::vector<double>> fitted_curve(const SegmentedParams& params, const DesignSet& data,
                                              const CutoffGrid& grid) {
  std::vector<std::vector<double>> curves;
  curves.reserve(data.size());
  for (const auto& w : data.workflows()) {
    std::vector<double> psi(grid.M());
    for (std::size_t m = 1; m <= grid.M(); ++m) psi[m - 1] = std::exp(model_log_psi(params, w.x, grid[m]));
    curves.push_back(std::move(psi));
  }
  return curves;
}

std::vector<std::vector<double>> homogeneous_curve(const Eigen::VectorXd& slopes, const DesignSet& data,
                                                   const CutoffGrid& grid) {
  std::vector<std::vector<double>> curves;
  curves.reserve(data.size());
  for (const auto& w : data.workflows()) {
    const double b = w.x.dot(slopes);
    std::vector<double> psi(grid.M());
    for (std::size_t m = 1; m <= grid.M(); ++m) psi[m - 1] = std::pow(grid[m], b);
    curves.push_back(std::move(psi));
  }
  return curves;
}

}  // namespace segccr
