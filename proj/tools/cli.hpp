#pragma once

#include "segccr/io.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace segccr::cli {

struct ModelFlags {
  std::string scores;
  std::optional<std::string> covariates;
  std::string orientation = "low";
  std::optional<std::size_t> cutoffs;
  std::string tau_grid;
  std::uint64_t seed = 1;
  std::size_t threads = 0;
};

struct FitFlags : ModelFlags {
  std::size_t bootstrap = 100;
};

struct TestFlags : ModelFlags {
  std::size_t nb = 1000;
};

/// Parses "lo:hi" (cutoffs inside [lo, hi]) or "lo:hi:step" (explicit
/// arithmetic grid). An empty spec selects the default trim.
std::vector<double> parse_tau_grid(const std::string& spec, const CutoffGrid& grid);

ResultDocument run_fit(const FitFlags& flags);
ResultDocument run_test(const TestFlags& flags);

/// Full command line entry point. Returns the process exit code:
/// 0 success, 2 bad input or flags, 3 numerical failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace segccr::cli
