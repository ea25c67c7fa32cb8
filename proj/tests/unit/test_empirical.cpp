#include "segccr/empirical.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace segccr;

namespace {

ScorePairs pairs_of(std::vector<double> y1, std::vector<double> y2) { return {"w", std::move(y1), std::move(y2), {}}; }

std::vector<double> u_of(const std::vector<std::size_t>& r) {
  std::vector<double> u;
  for (auto v : r) u.push_back(static_cast<double>(v) / static_cast<double>(r.size()));
  return u;
}

UniformRanks ranks_from_u(const std::vector<double>& u1, const std::vector<double>& u2) {
  UniformRanks r;
  const double n = static_cast<double>(u1.size());
  for (std::size_t i = 0; i < u1.size(); ++i) {
    r.r1.push_back(static_cast<std::size_t>(std::lround(u1[i] * n)));
    r.r2.push_back(static_cast<std::size_t>(std::lround(u2[i] * n)));
  }
  return r;
}

}  // namespace

TEST_CASE("ranks follow the orientation") {
  const auto hi = to_uniform_ranks(pairs_of({5.0, 1.0, 3.0}, {5.0, 1.0, 3.0}), Orientation::HigherIsStronger);
  CHECK(u_of(hi.r1) == std::vector<double>{1.0, 1.0 / 3.0, 2.0 / 3.0});
  CHECK(hi.r2 == hi.r1);

  const auto lo = to_uniform_ranks(pairs_of({5.0, 1.0, 3.0}, {5.0, 1.0, 3.0}), Orientation::LowerIsStronger);
  CHECK(u_of(lo.r1) == std::vector<double>{1.0 / 3.0, 1.0, 2.0 / 3.0});
}

TEST_CASE("ties are broken by original index") {
  // Hand derivation: 1.0 is weakest (rank 1); the two 2.0 scores share the
  // remaining ranks, the earlier one taking the smaller: ranks (2, 3, 1).
  const auto r = to_uniform_ranks(pairs_of({2.0, 2.0, 1.0}, {2.0, 2.0, 1.0}), Orientation::HigherIsStronger);
  CHECK(u_of(r.r1) == std::vector<double>{2.0 / 3.0, 1.0, 1.0 / 3.0});
  CHECK(r.r1 == oracle::brute_ranks({2.0, 2.0, 1.0}, true));
}

TEST_CASE("concordant ranks give the diagonal curve") {
  std::vector<double> y(10);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<double>(i);
  const auto ranks = to_uniform_ranks(pairs_of(y, y), Orientation::HigherIsStronger);
  const auto curve = empirical_curve(ranks, CutoffGrid::equally_spaced(10));
  CHECK(curve.psi[4] == 0.5);
  CHECK(curve.psi.back() == 1.0);

  const auto counts = category_counts(ranks, CutoffGrid::equally_spaced(10));
  CHECK(counts.counts == std::vector<std::size_t>(10, 1));
}

TEST_CASE("four-candidate example") {
  // Brute force over the four candidates: max(u1, u2) = (.5, .5, 1, 1), so
  // two fall in (.25, .5] and two in (.75, 1].
  const auto ranks = ranks_from_u({0.25, 0.5, 0.75, 1.0}, {0.5, 0.25, 1.0, 0.75});
  const auto grid = CutoffGrid::equally_spaced(4);
  const auto curve = empirical_curve(ranks, grid);
  CHECK(curve.psi[1] == 0.5);
  CHECK(curve.psi[2] == 0.5);
  CHECK(curve.psi[3] == 1.0);
  CHECK(category_counts(ranks, grid).counts == std::vector<std::size_t>{0, 2, 0, 2});
}

TEST_CASE("curves and counts agree with brute force") {
  SeededRng rng(11, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.index(49);
    const std::size_t M = 1 + rng.index(n + 5);
    const auto pairs = oracle::random_pairs(n, rng);
    const auto orient = trial % 2 ? Orientation::HigherIsStronger : Orientation::LowerIsStronger;
    const auto grid = CutoffGrid::equally_spaced(M);

    const auto ranks = to_uniform_ranks(pairs, orient);
    const bool hi = orient == Orientation::HigherIsStronger;
    REQUIRE(ranks.r1 == oracle::brute_ranks(pairs.y1, hi));
    REQUIRE(ranks.r2 == oracle::brute_ranks(pairs.y2, hi));

    const auto curve = empirical_curve(ranks, grid);
    const auto counts = category_counts(ranks, grid);
    REQUIRE(counts.counts == oracle::brute_counts(ranks.r1, ranks.r2, grid.points()));
    std::size_t total = 0;
    double prev = 0.0;
    for (std::size_t m = 1; m <= M; ++m) {
      REQUIRE(curve.psi[m - 1] == oracle::brute_psi(ranks.r1, ranks.r2, grid[m]));
      REQUIRE(curve.psi[m - 1] >= prev);
      REQUIRE(static_cast<double>(counts.counts[m - 1]) ==
              doctest::Approx(static_cast<double>(n) * (curve.psi[m - 1] - prev)).epsilon(1e-12));
      prev = curve.psi[m - 1];
      total += counts.counts[m - 1];
    }
    CHECK(total == n);
    CHECK(curve.psi.back() == 1.0);
    CHECK(curve_from_counts(counts, grid).psi == curve.psi);
  }
}

TEST_CASE("rank invariance under monotone transforms") {
  SeededRng rng(12, 0);
  const auto pairs = oracle::random_pairs(300, rng);
  ScorePairs moved = pairs;
  for (auto& v : moved.y1) v = std::exp(v);
  for (auto& v : moved.y2) v = 5.0 * v * v * v - 2.0;
  const auto grid = CutoffGrid::equally_spaced(37);
  for (auto o : {Orientation::LowerIsStronger, Orientation::HigherIsStronger}) {
    const auto a = to_uniform_ranks(pairs, o), b = to_uniform_ranks(moved, o);
    CHECK(category_counts(a, grid) == category_counts(b, grid));
    CHECK(empirical_curve(a, grid).psi == empirical_curve(b, grid).psi);
  }
}

TEST_CASE("curve_from_counts checks the grid") {
  CategoryCounts c{{1, 1, 1}, 3};
  CHECK_THROWS_AS(curve_from_counts(c, CutoffGrid::equally_spaced(4)), Error);
}
