#include "segccr/types.hpp"

#include <cmath>
#include <sstream>

namespace segccr {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::TooFew: return "TooFew";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NonmonotoneModel: return "NonmonotoneModel";
    case ErrorCode::AllFitsFailed: return "AllFitsFailed";
    case ErrorCode::TooManyFailures: return "TooManyFailures";
    case ErrorCode::SingularInformation: return "SingularInformation";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::UnknownWorkflow: return "UnknownWorkflow";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

bool is_input_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonmonotoneModel:
    case ErrorCode::AllFitsFailed:
    case ErrorCode::TooManyFailures:
    case ErrorCode::SingularInformation:
      return false;
    default:
      return true;
  }
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

Eigen::VectorXd ScorePairs::design() const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(covariates.size() + 1));
  x[0] = 1.0;
  for (std::size_t k = 0; k < covariates.size(); ++k) x[static_cast<Eigen::Index>(k + 1)] = covariates[k];
  return x;
}

const ScorePairs& validate_score_pairs(const ScorePairs& pairs) {
  if (pairs.y1.size() != pairs.y2.size()) {
    std::ostringstream os;
    os << "workflow '" << pairs.workflow_id << "': y1 has " << pairs.y1.size() << " scores, y2 has "
       << pairs.y2.size();
    throw Error(ErrorCode::LengthMismatch, os.str());
  }
  for (std::size_t i = 0; i < pairs.y1.size(); ++i) {
    if (!std::isfinite(pairs.y1[i]) || !std::isfinite(pairs.y2[i])) {
      std::ostringstream os;
      os << "workflow '" << pairs.workflow_id << "': non-finite score at index " << i;
      throw Error(ErrorCode::NonFinite, os.str());
    }
  }
  if (pairs.y1.size() < 2) {
    throw Error(ErrorCode::TooFew, "workflow '" + pairs.workflow_id + "' needs at least 2 candidates");
  }
  for (double x : pairs.covariates) {
    if (!std::isfinite(x)) throw Error(ErrorCode::NonFinite, "workflow '" + pairs.workflow_id + "': non-finite covariate");
  }
  return pairs;
}

CutoffGrid CutoffGrid::equally_spaced(std::size_t M) {
  if (M == 0) throw Error(ErrorCode::InvalidArgument, "cutoff count M must be positive");
  std::vector<double> t(M + 1);
  for (std::size_t m = 0; m <= M; ++m) t[m] = static_cast<double>(m) / static_cast<double>(M);
  t[M] = 1.0;
  return CutoffGrid(std::move(t));
}

CutoffGrid CutoffGrid::from_points(std::vector<double> t) {
  if (t.size() < 2) throw Error(ErrorCode::InvalidArgument, "cutoff grid needs at least two points");
  if (t.front() != 0.0 || t.back() != 1.0) throw Error(ErrorCode::InvalidArgument, "cutoff grid must start at 0 and end at 1");
  for (std::size_t m = 1; m < t.size(); ++m) {
    if (!(t[m] > t[m - 1])) throw Error(ErrorCode::InvalidArgument, "cutoff grid must be strictly increasing");
  }
  return CutoffGrid(std::move(t));
}

CutoffGrid CutoffGrid::default_for(std::size_t n) { return equally_spaced(n >= 100 ? 100 : n); }

Eigen::Vector2d SegmentedParams::effective_slopes(const Eigen::VectorXd& x) const {
  return beta.transpose() * x;
}

}  // namespace segccr
