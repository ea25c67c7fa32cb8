#include "segccr/simulation.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace segccr;

TEST_CASE("Gumbel sampler: independence at theta = 1") {
  SeededRng rng(51, 0);
  const auto uv = sample_gumbel_copula(10000, 1.0, rng);
  CHECK(std::abs(spearman_rho(uv)) < 0.05);
  for (const auto& [u, v] : uv) {
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(v > 0.0);
    REQUIRE(v < 1.0);
  }
}

TEST_CASE("Gumbel sampler: Kendall's tau and diagonal section") {
  SeededRng rng(52, 0);
  const auto uv = sample_gumbel_copula(10000, 2.0, rng);
  // Kendall's tau of the Gumbel copula is 1 - 1/theta.
  CHECK(std::abs(kendall_tau(uv) - 0.5) < 0.03);
  std::size_t hits = 0;
  for (const auto& [u, v] : uv) hits += std::max(u, v) <= 0.5 ? 1 : 0;
  CHECK(std::abs(static_cast<double>(hits) / 10000.0 - std::pow(0.5, std::sqrt(2.0))) < 0.02);
}

TEST_CASE("Gumbel sampler: diagonal sup-norm at n = 1e5") {
  for (double theta : {1.0, 1.5, 2.0, 3.0}) {
    SeededRng rng(53, static_cast<std::uint64_t>(theta * 10));
    const auto uv = sample_gumbel_copula(100000, theta, rng);
    std::vector<double> mx;
    for (const auto& [u, v] : uv) mx.push_back(std::max(u, v));
    std::sort(mx.begin(), mx.end());
    const double expo = std::pow(2.0, 1.0 / theta);
    double sup = 0.0;
    for (int k = 1; k < 100; ++k) {
      const double t = k / 100.0;
      const auto below = std::upper_bound(mx.begin(), mx.end(), t) - mx.begin();
      sup = std::max(sup, std::abs(static_cast<double>(below) / 1e5 - std::pow(t, expo)));
    }
    CHECK(sup < 0.02);
  }
}

TEST_CASE("mixture proportion and seed determinism") {
  const auto spec = ScenarioSpec::scenario1(0.8, 2.0, 20000);
  SeededRng rng(54, 0), rng2(54, 0);
  std::vector<int> comp;
  const auto a = generate(spec, rng, &comp);
  const auto b = generate(spec, rng2);
  CHECK(a == b);
  REQUIRE(comp.size() == 20000);
  double weak = 0.0;
  for (int c : comp) weak += c == 1 ? 1.0 : 0.0;
  const double sd = std::sqrt(20000 * 0.8 * 0.2);
  CHECK(std::abs(weak - 16000.0) < 4.0 * sd);

  SeededRng other(54, 1);
  CHECK_FALSE(generate(spec, other) == a);
}

TEST_CASE("degenerate mixtures") {
  SeededRng rng(55, 0);
  std::vector<int> comp;
  generate(ScenarioSpec::scenario1(1.0, 1.2, 500), rng, &comp);
  CHECK(std::all_of(comp.begin(), comp.end(), [](int c) { return c == 1; }));

  auto spec = ScenarioSpec::scenario2(0.0, 0.0, 20000);
  spec.theta2 = 0.0;
  const auto p = generate(spec, rng);
  double m1 = 0.0, m2 = 0.0, cross = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    m1 += p.y1[i];
    m2 += p.y2[i];
  }
  m1 /= 20000.0;
  m2 /= 20000.0;
  for (std::size_t i = 0; i < p.size(); ++i) cross += (p.y1[i] - m1) * (p.y2[i] - m2);
  CHECK(std::abs(m1 - spec.mu2) < 0.05);
  CHECK(std::abs(m2 - spec.mu2) < 0.05);
  CHECK(std::abs(cross / 20000.0) < 0.05);
}

TEST_CASE("scenario validation") {
  CHECK_THROWS_AS(validate(ScenarioSpec::scenario1(0.8, 0.5)), Error);
  CHECK_THROWS_AS(validate(ScenarioSpec::scenario2(0.8, 1.0)), Error);
  auto s = ScenarioSpec::scenario1(1.5);
  CHECK_THROWS_AS(validate(s), Error);
  CHECK_NOTHROW(validate(ScenarioSpec::scenario2(0.6, 0.4)));
}

TEST_CASE("two-workflow design") {
  SeededRng rng(56, 0);
  const auto wfs =
      generate_two_workflows(ScenarioSpec::scenario1(0.6, 1.2, 300), ScenarioSpec::scenario1(0.6, 2.0, 300), rng);
  REQUIRE(wfs.size() == 2);
  CHECK(wfs[0].covariates == std::vector<double>{0.0});
  CHECK(wfs[1].covariates == std::vector<double>{1.0});
  CHECK(wfs[0].workflow_id != wfs[1].workflow_id);
}

TEST_CASE("mise") {
  EmpiricalCurve emp{{0.25, 0.5, 0.75, 1.0}, {0.1, 0.3, 0.6, 1.0}};
  CHECK(mise(emp.psi, emp) == 0.0);
  std::vector<double> shifted;
  for (double v : emp.psi) shifted.push_back(v + 0.1);
  CHECK(mise(shifted, emp) == doctest::Approx(0.01));
  CHECK(mise({0.1, 0.3, 0.7, 1.0}, emp) == doctest::Approx(0.01 * 0.25));
  CHECK_THROWS_AS(mise({0.1}, emp), Error);
}

TEST_CASE("rank correlations on small hand examples") {
  const std::vector<std::pair<double, double>> same{{1, 1}, {2, 2}, {3, 3}, {4, 4}};
  const std::vector<std::pair<double, double>> rev{{1, 4}, {2, 3}, {3, 2}, {4, 1}};
  CHECK(kendall_tau(same) == doctest::Approx(1.0));
  CHECK(kendall_tau(rev) == doctest::Approx(-1.0));
  CHECK(spearman_rho(same) == doctest::Approx(1.0));
  CHECK(spearman_rho(rev) == doctest::Approx(-1.0));
  // One discordant pair out of six: (5 - 1) / 6.
  CHECK(kendall_tau({{1, 1}, {2, 3}, {3, 2}, {4, 4}}) == doctest::Approx(4.0 / 6.0));
}

TEST_CASE("benchmark harness smoke run") {
  BenchmarkConfig c = BenchmarkConfig::fast();
  c.replicates = 5;
  CHECK_THROWS_AS(run_benchmark(c), Error);

  c.replicates = 10;
  c.n = 600;
  c.tables = {"table1"};
  const auto report = run_benchmark(c);
  CHECK(report.records.size() == 8 * 5);
  std::stringstream ss;
  write_report(report, ss);
  const auto back = read_report(ss);
  REQUIRE(back.size() == report.records.size());
  CHECK(back[0].table == "table1");
  CHECK(back[0].statistic == "tau_hat_mean");
  CHECK(back[0].reference == doctest::Approx(0.557));
  CHECK(std::isnan(back[1].reference));
  CHECK(back[0].value == doctest::Approx(report.records[0].value).epsilon(1e-9));

  c.tables = {"table9"};
  CHECK_THROWS_AS(run_benchmark(c), Error);
}
