#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace segccr {

/// Failure categories raised by the library. The CLI maps each one onto an
/// exit code (see is_input_error()).
enum class ErrorCode {
  LengthMismatch,
  NonFinite,
  TooFew,
  DomainError,
  NonmonotoneModel,
  AllFitsFailed,
  TooManyFailures,
  SingularInformation,
  GridMismatch,
  ParseError,
  MissingColumn,
  UnknownWorkflow,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// True for errors caused by bad input (as opposed to numerical failure).
bool is_input_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

enum class Orientation { LowerIsStronger, HigherIsStronger };

/// One workflow's replicate scores. The intercept x0 = 1 is implicit and is
/// never stored in `covariates`.
struct ScorePairs {
  std::string workflow_id;
  std::vector<double> y1;
  std::vector<double> y2;
  std::vector<double> covariates;

  std::size_t size() const { return y1.size(); }
  /// (1, x1, ..., xS)
  Eigen::VectorXd design() const;

  friend bool operator==(const ScorePairs&, const ScorePairs&) = default;
};

/// Checks length, finiteness and n >= 2. Returns the input unchanged.
const ScorePairs& validate_score_pairs(const ScorePairs& pairs);

/// Strict ranks r in {1..n} per column; u = r / n.
struct UniformRanks {
  std::vector<std::size_t> r1;
  std::vector<std::size_t> r2;

  std::size_t size() const { return r1.size(); }
  double u1(std::size_t i) const { return static_cast<double>(r1[i]) / static_cast<double>(r1.size()); }
  double u2(std::size_t i) const { return static_cast<double>(r2[i]) / static_cast<double>(r2.size()); }
};

/// Cutoffs 0 = t_0 < t_1 < ... < t_M = 1.
class CutoffGrid {
 public:
  /// Equally spaced grid t_m = m / M.
  static CutoffGrid equally_spaced(std::size_t M);
  /// Arbitrary grid; `t` must start at exactly 0, end at exactly 1 and be
  /// strictly increasing.
  static CutoffGrid from_points(std::vector<double> t);
  /// M = 100 for n >= 100, otherwise M = n.
  static CutoffGrid default_for(std::size_t n);

  std::size_t M() const { return t_.size() - 1; }
  double operator[](std::size_t m) const { return t_[m]; }
  const std::vector<double>& points() const { return t_; }

  friend bool operator==(const CutoffGrid&, const CutoffGrid&) = default;

 private:
  explicit CutoffGrid(std::vector<double> t) : t_(std::move(t)) {}
  std::vector<double> t_;
};

/// Change point plus an (S+1) x 2 coefficient matrix; row s = (beta_s1, beta_s2).
/// Column 0 acts below the change point (weak candidates), column 1 above it.
struct SegmentedParams {
  double tau = 0.5;
  Eigen::MatrixX2d beta;

  std::size_t num_rows() const { return static_cast<std::size_t>(beta.rows()); }
  /// Effective slopes (x' beta_.1, x' beta_.2) for one design vector.
  Eigen::Vector2d effective_slopes(const Eigen::VectorXd& x) const;
};

}  // namespace segccr
