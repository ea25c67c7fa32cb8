#pragma once

#include "segccr/empirical.hpp"
#include "segccr/estimation.hpp"
#include "segccr/inference.hpp"
#include "segccr/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace segccr {

/// Scores grouped by workflow in order of first appearance, with covariates
/// joined per workflow.
struct InputTable {
  std::vector<ScorePairs> workflows;
  std::vector<std::string> covariate_names;
  /// Fingerprint of the raw input bytes (scores, then covariates).
  std::string digest;
};

/// Header must contain `workflow`, `y1` and `y2` (extra columns ignored).
InputTable parse_scores(std::istream& scores, const std::string& source = "<scores>");
/// Header `workflow x1 ... xS`. Every scored workflow must appear.
void join_covariates(InputTable& table, std::istream& covariates, const std::string& source = "<covariates>");
InputTable read_scores(const std::string& scores_path, const std::optional<std::string>& covariates_path = std::nullopt);

void write_scores(std::ostream& out, const std::vector<ScorePairs>& workflows);

/// 64-bit FNV-1a of the bytes, as 16 hex digits.
std::string content_digest(const std::string& bytes);

struct WorkflowTest {
  std::string workflow_id;
  QLRResult result;
};

/// Everything that goes into a result document.
struct ResultDocument {
  std::string command;
  Orientation orientation = Orientation::LowerIsStronger;
  std::optional<CutoffGrid> grid;
  std::vector<double> tau_grid;
  std::vector<std::string> workflow_ids;
  std::vector<std::string> covariate_names;
  std::optional<FitResult> fit;
  std::vector<EmpiricalCurve> empirical;
  std::optional<BootstrapResult> bootstrap;
  std::vector<WaldTest> wald;
  std::vector<WorkflowTest> qlr;
  std::uint64_t seed = 0;
  std::string input_digest;
  std::size_t bootstrap_B = 0;
  std::size_t qlr_NB = 0;
};

/// JSON text with top-level keys model, estimates, profile, curves, tests,
/// provenance. Contains no timestamps or thread counts, so identical inputs
/// and seed give identical bytes.
std::string render_result_document(const ResultDocument& doc);

/// Tab-separated `workflow t psi_empirical psi_fitted`.
void write_plot_data(std::ostream& out, const ResultDocument& doc);

std::string_view version_string();

}  // namespace segccr
