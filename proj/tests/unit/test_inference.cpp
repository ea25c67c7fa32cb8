#include "segccr/inference.hpp"
#include "segccr/simulation.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace segccr;

namespace {

ModelSetup small_setup(std::size_t M = 50) {
  ModelSetup s;
  s.orientation = Orientation::HigherIsStronger;
  s.grid = CutoffGrid::equally_spaced(M);
  return s;
}

}  // namespace

TEST_CASE("parameter naming and flattening") {
  CHECK(parameter_names(1) == std::vector<std::string>{"tau", "beta_01", "beta_02"});
  CHECK(parameter_names(2) == std::vector<std::string>{"tau", "beta_01", "beta_02", "beta_11", "beta_12"});
  SegmentedParams p;
  p.tau = 0.3;
  p.beta.resize(2, 2);
  p.beta << 1, 2, 3, 4;
  const Eigen::VectorXd v = parameter_vector(p);
  CHECK(v.size() == 5);
  CHECK(v[0] == 0.3);
  CHECK(v[2] == 2.0);
  CHECK(v[3] == 3.0);
}

TEST_CASE("sample quantiles use linear interpolation") {
  // Type 7: h = (n - 1) p, interpolate between order statistics floor(h), ceil(h).
  CHECK(sample_quantile({4.0, 1.0, 3.0, 2.0}, 0.25) == doctest::Approx(1.75));
  CHECK(sample_quantile({4.0, 1.0, 3.0, 2.0}, 0.5) == doctest::Approx(2.5));
  CHECK(sample_quantile({5.0}, 0.9) == 5.0);
  CHECK(sample_quantile({1.0, 2.0}, 1.0) == 2.0);
}

TEST_CASE("normal tail probabilities") {
  CHECK(two_sided_p(0.0) == 1.0);
  CHECK(two_sided_p(1.959963984540054) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(two_sided_p(-1.959963984540054) == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("wald tests from a fit and bootstrap") {
  FitResult fit;
  fit.params.tau = 0.5;
  fit.params.beta.resize(2, 2);
  fit.params.beta << 2.0, 1.0, 0.0, 0.3;
  BootstrapResult boot;
  boot.se = Eigen::VectorXd::Constant(5, 0.1);
  const auto tests = wald_tests(fit, boot);
  REQUIRE(tests.size() == 2);
  CHECK(tests[0].coefficient == "beta_11");
  CHECK(tests[0].z == 0.0);
  CHECK(tests[0].p_value == 1.0);
  CHECK_FALSE(tests[0].reject);
  CHECK(tests[1].z == doctest::Approx(3.0));
  CHECK(tests[1].reject);
}

TEST_CASE("bootstrap is deterministic and schedule independent") {
  SeededRng rng(41, 0);
  const std::vector<ScorePairs> wfs{generate(ScenarioSpec::scenario1(0.7, 1.5, 1500), rng)};
  const auto setup = small_setup();
  BootstrapOptions o;
  o.B = 24;
  o.seed = 9;
  const auto a = bootstrap(wfs, setup, o);
  o.threads = 3;
  const auto b = bootstrap(wfs, setup, o);
  CHECK(a.estimates.cwiseEqual(b.estimates).all());
  CHECK(a.se == b.se);

  REQUIRE(a.se.size() == 3);
  for (Eigen::Index p = 0; p < a.se.size(); ++p) {
    CHECK(a.se[p] >= 0.0);
    std::vector<double> col;
    for (Eigen::Index r = 0; r < a.estimates.rows(); ++r) {
      if (a.converged[static_cast<std::size_t>(r)]) col.push_back(a.estimates(r, p));
    }
    const double med = sample_quantile(col, 0.5);
    CHECK(a.ci_percentile[static_cast<std::size_t>(p)].first <= med);
    CHECK(a.ci_percentile[static_cast<std::size_t>(p)].second >= med);
  }

  o.seed = 10;
  CHECK_FALSE(bootstrap(wfs, setup, o).se == a.se);
}

TEST_CASE("bootstrap rejects a single candidate") {
  ScorePairs one{"a", {1.0}, {1.0}, {}};
  BootstrapOptions o;
  o.B = 5;
  try {
    bootstrap({one}, small_setup(1), o);
    FAIL("expected TooFew");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFew);
  }
}

TEST_CASE("QLR statistic and multiplier process") {
  SeededRng rng(42, 0);
  const auto pairs = generate(ScenarioSpec::scenario1(0.8, 2.0, 5000), rng);
  const auto setup = small_setup(100);
  const auto q = qlr_statistic(pairs, setup);
  CHECK(q.qlr >= -1e-6 * static_cast<double>(q.n));
  CHECK(q.qlr == doctest::Approx(q.loglik_segmented - q.loglik_homogeneous));
  CHECK(q.qlr > 20.0);

  const auto counts = category_counts(to_uniform_ranks(pairs, setup.orientation), setup.grid);
  const QlrNullProcess proc(counts, setup.grid, default_tau_grid(setup.grid), q.restricted_slope);
  CHECK(proc.usable_taus() + proc.skipped_taus() == default_tau_grid(setup.grid).size());
  for (std::size_t k = 0; k < proc.usable_taus(); ++k) {
    const Eigen::Matrix2d& I = proc.information(k);
    CHECK(I(0, 1) == I(1, 0));
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(I);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12 * I.trace());
  }

  SeededRng zr(43, 0);
  for (int j = 0; j < 20; ++j) {
    Eigen::VectorXd z(static_cast<Eigen::Index>(counts.M()));
    for (std::size_t m = 0; m < counts.M(); ++m) {
      double s = 0.0;
      for (std::size_t i = 0; i < counts.counts[m]; ++i) s += zr.normal();
      z[static_cast<Eigen::Index>(m)] = s;
    }
    const double d = proc.statistic(z);
    CHECK(d >= -1e-9);
    CHECK(proc.statistic(-z) == doctest::Approx(d).epsilon(1e-12));
  }
}

TEST_CASE("simulated p-values are reproducible across thread counts") {
  SeededRng rng(44, 0);
  const auto pairs = generate(ScenarioSpec::scenario1(1.0, 1.2, 3000), rng);
  const auto setup = small_setup(100);
  QlrOptions o;
  o.NB = 60;
  o.seed = 5;
  const auto a = qlr_null_pvalue(pairs, setup, o);
  o.threads = 4;
  const auto b = qlr_null_pvalue(pairs, setup, o);
  REQUIRE(a.p_value);
  CHECK(*a.p_value == *b.p_value);
  CHECK(a.null_draws == b.null_draws);
  CHECK(*a.p_value >= 0.0);
  CHECK(*a.p_value <= 1.0);
  std::size_t exceed = 0;
  for (double d : a.null_draws) exceed += d > a.qlr ? 1 : 0;
  CHECK(*a.p_value == static_cast<double>(exceed) / 60.0);
}

TEST_CASE("null calibration of the change point test") {
  // Single Gumbel copula, theta = 1.5, n = 5000, 100 data sets, NB = 200:
  // rejection rate at 0.05 must fall inside the binomial 99% band [0, 0.12].
  const auto setup = small_setup(100);
  QlrOptions o;
  o.NB = 200;
  int rejections = 0;
  for (std::uint64_t r = 0; r < 100; ++r) {
    SeededRng rng(45, r);
    ScorePairs p;
    for (const auto& [u, v] : sample_gumbel_copula(5000, 1.5, rng)) {
      p.y1.push_back(u);
      p.y2.push_back(v);
    }
    o.seed = 1000 + r;
    rejections += *qlr_null_pvalue(p, setup, o).p_value < 0.05 ? 1 : 0;
  }
  MESSAGE("null rejection rate " << rejections / 100.0);
  CHECK(rejections <= 12);
}
