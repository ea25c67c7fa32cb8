#include "segccr/empirical.hpp"

#include <algorithm>
#include <numeric>

namespace segccr {
namespace {

std::vector<std::size_t> strict_ranks(const std::vector<double>& y, Orientation orientation) {
  const std::size_t n = y.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Rank n goes to the strongest score. For HigherIsStronger sort ascending;
  // for LowerIsStronger sort descending. stable_sort keeps index order among
  // ties, so the earlier candidate always gets the smaller rank.
  if (orientation == Orientation::HigherIsStronger) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return y[a] < y[b]; });
  } else {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return y[a] > y[b]; });
  }
  std::vector<std::size_t> rank(n);
  for (std::size_t k = 0; k < n; ++k) rank[order[k]] = k + 1;
  return rank;
}

}  // namespace

UniformRanks to_uniform_ranks(const ScorePairs& pairs, Orientation orientation) {
  validate_score_pairs(pairs);
  return UniformRanks{strict_ranks(pairs.y1, orientation), strict_ranks(pairs.y2, orientation)};
}

CategoryCounts category_counts(const UniformRanks& ranks, const CutoffGrid& grid) {
  const std::size_t n = ranks.size();
  const auto& t = grid.points();
  CategoryCounts out;
  out.n = n;
  out.counts.assign(grid.M(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = std::max(ranks.u1(i), ranks.u2(i));
    // first m >= 1 with v <= t_m; v is in (0, 1] so it always exists.
    const auto it = std::lower_bound(t.begin() + 1, t.end(), v);
    const auto m = static_cast<std::size_t>(it - t.begin());
    ++out.counts[m - 1];
  }
  return out;
}

EmpiricalCurve curve_from_counts(const CategoryCounts& counts, const CutoffGrid& grid) {
  if (counts.M() != grid.M()) throw Error(ErrorCode::GridMismatch, "category counts and cutoff grid differ in M");
  EmpiricalCurve curve;
  curve.t.assign(grid.points().begin() + 1, grid.points().end());
  curve.psi.resize(counts.M());
  std::size_t cum = 0;
  for (std::size_t m = 0; m < counts.M(); ++m) {
    cum += counts.counts[m];
    curve.psi[m] = static_cast<double>(cum) / static_cast<double>(counts.n);
  }
  return curve;
}

EmpiricalCurve empirical_curve(const UniformRanks& ranks, const CutoffGrid& grid) {
  return curve_from_counts(category_counts(ranks, grid), grid);
}

}  // namespace segccr
