#pragma once

#include "segccr/types.hpp"

#include <cstddef>
#include <vector>

namespace segccr {

/// Step-function correspondence curve Psi_n evaluated at t_1..t_M.
struct EmpiricalCurve {
  std::vector<double> t;
  std::vector<double> psi;
};

/// Number of candidates in each category m = 1..M, where candidate i falls in
/// category m iff t_{m-1} < max(u_i1, u_i2) <= t_m.
struct CategoryCounts {
  std::vector<std::size_t> counts;
  std::size_t n = 0;

  std::size_t M() const { return counts.size(); }
  friend bool operator==(const CategoryCounts&, const CategoryCounts&) = default;
};

/// Strict ranks 1..n per column, oriented so that the strongest candidate gets
/// rank n. Ties are broken by original index: among tied scores the earlier
/// candidate receives the smaller rank.
UniformRanks to_uniform_ranks(const ScorePairs& pairs, Orientation orientation);

EmpiricalCurve empirical_curve(const UniformRanks& ranks, const CutoffGrid& grid);

CategoryCounts category_counts(const UniformRanks& ranks, const CutoffGrid& grid);

/// Psi_n(t_m) from counts: cumulative count / n, with psi(t_M) = 1 exactly.
EmpiricalCurve curve_from_counts(const CategoryCounts& counts, const CutoffGrid& grid);

}  // namespace segccr
