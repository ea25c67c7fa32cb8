#include "segccr/simulation.hpp"

#include "segccr/estimation.hpp"
#include "segccr/inference.hpp"
#include "segccr/parallel.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

namespace segccr {

std::string_view to_string(Scenario scenario) {
  return scenario == Scenario::GumbelMixture ? "gumbel_mixture" : "bivariate_normal_mixture";
}

ScenarioSpec ScenarioSpec::scenario1(double pi1, double theta2, std::size_t n) {
  return ScenarioSpec{Scenario::GumbelMixture, n, pi1, 1.0, theta2, 0.0, 3.0};
}

ScenarioSpec ScenarioSpec::scenario2(double pi1, double theta1, std::size_t n) {
  return ScenarioSpec{Scenario::BivariateNormalMixture, n, pi1, theta1, 0.9, 0.0, 2.5};
}

void validate(const ScenarioSpec& spec) {
  if (spec.n < 2) throw Error(ErrorCode::InvalidArgument, "scenario needs n >= 2");
  if (!(spec.pi1 >= 0.0 && spec.pi1 <= 1.0)) throw Error(ErrorCode::InvalidArgument, "pi1 must lie in [0, 1]");
  if (!std::isfinite(spec.mu1) || !std::isfinite(spec.mu2)) throw Error(ErrorCode::InvalidArgument, "means must be finite");
  if (spec.scenario == Scenario::GumbelMixture) {
    if (!(spec.theta1 >= 1.0) || !(spec.theta2 >= 1.0)) {
      throw Error(ErrorCode::DomainError, "Gumbel parameters must be >= 1");
    }
  } else if (!(std::abs(spec.theta1) < 1.0) || !(std::abs(spec.theta2) < 1.0)) {
    throw Error(ErrorCode::DomainError, "correlations must lie in (-1, 1)");
  }
}

namespace {

double clamp_open_unit(double u) {
  constexpr double lo = std::numeric_limits<double>::min();
  const double hi = std::nextafter(1.0, 0.0);
  return std::clamp(u, lo, hi);
}

// Positive stable variable with Laplace transform exp(-s^alpha), 0 < alpha < 1.
double positive_stable(double alpha, SeededRng& rng) {
  const double u = std::numbers::pi * rng.uniform();
  const double e = rng.exponential();
  const double a = std::sin(alpha * u) / std::pow(std::sin(u), 1.0 / alpha);
  const double b = std::pow(std::sin((1.0 - alpha) * u) / e, (1.0 - alpha) / alpha);
  return a * b;
}

std::pair<double, double> gumbel_pair(double theta, SeededRng& rng) {
  if (theta == 1.0) return {rng.uniform(), rng.uniform()};
  const double alpha = 1.0 / theta;
  const double v = positive_stable(alpha, rng);
  const double e1 = rng.exponential();
  const double e2 = rng.exponential();
  return {clamp_open_unit(std::exp(-std::pow(e1 / v, alpha))), clamp_open_unit(std::exp(-std::pow(e2 / v, alpha)))};
}

double normal_quantile(double u) {
  static const boost::math::normal standard;
  return boost::math::quantile(standard, u);
}

}  // namespace

std::vector<std::pair<double, double>> sample_gumbel_copula(std::size_t n, double theta, SeededRng& rng) {
  if (!(theta >= 1.0)) throw Error(ErrorCode::DomainError, "Gumbel copula needs theta >= 1");
  std::vector<std::pair<double, double>> out(n);
  for (auto& p : out) p = gumbel_pair(theta, rng);
  return out;
}

ScorePairs generate_scenario1(const ScenarioSpec& spec, SeededRng& rng, std::vector<int>* component) {
  validate(spec);
  if (spec.scenario != Scenario::GumbelMixture) throw Error(ErrorCode::InvalidArgument, "expected a Gumbel mixture spec");
  ScorePairs out;
  out.workflow_id = "scenario1";
  out.y1.resize(spec.n);
  out.y2.resize(spec.n);
  if (component) component->resize(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const bool weak = rng.uniform() < spec.pi1;
    const auto [u, v] = gumbel_pair(weak ? spec.theta1 : spec.theta2, rng);
    const double mu = weak ? spec.mu1 : spec.mu2;
    out.y1[i] = mu + normal_quantile(u);
    out.y2[i] = mu + normal_quantile(v);
    if (component) (*component)[i] = weak ? 1 : 2;
  }
  return out;
}

ScorePairs generate_scenario2(const ScenarioSpec& spec, SeededRng& rng, std::vector<int>* component) {
  validate(spec);
  if (spec.scenario != Scenario::BivariateNormalMixture) {
    throw Error(ErrorCode::InvalidArgument, "expected a bivariate normal mixture spec");
  }
  ScorePairs out;
  out.workflow_id = "scenario2";
  out.y1.resize(spec.n);
  out.y2.resize(spec.n);
  if (component) component->resize(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const bool weak = rng.uniform() < spec.pi1;
    const double rho = weak ? spec.theta1 : spec.theta2;
    const double mu = weak ? spec.mu1 : spec.mu2;
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    out.y1[i] = mu + z1;
    out.y2[i] = mu + rho * z1 + std::sqrt(1.0 - rho * rho) * z2;
    if (component) (*component)[i] = weak ? 1 : 2;
  }
  return out;
}

ScorePairs generate(const ScenarioSpec& spec, SeededRng& rng, std::vector<int>* component) {
  return spec.scenario == Scenario::GumbelMixture ? generate_scenario1(spec, rng, component)
                                                  : generate_scenario2(spec, rng, component);
}

std::vector<ScorePairs> generate_two_workflows(const ScenarioSpec& workflow0, const ScenarioSpec& workflow1,
                                               SeededRng& rng) {
  std::vector<ScorePairs> out{generate(workflow0, rng), generate(workflow1, rng)};
  out[0].workflow_id = "workflow0";
  out[0].covariates = {0.0};
  out[1].workflow_id = "workflow1";
  out[1].covariates = {1.0};
  return out;
}

double mise(const std::vector<double>& fitted, const EmpiricalCurve& empirical) {
  if (fitted.size() != empirical.psi.size() || empirical.t.size() != empirical.psi.size()) {
    throw Error(ErrorCode::GridMismatch, "fitted and empirical curves are on different grids");
  }
  double sum = 0.0;
  double prev = 0.0;
  for (std::size_t m = 0; m < fitted.size(); ++m) {
    const double d = fitted[m] - empirical.psi[m];
    sum += d * d * (empirical.t[m] - prev);
    prev = empirical.t[m];
  }
  return sum;
}

double kendall_tau(const std::vector<std::pair<double, double>>& xy) {
  const std::size_t n = xy.size();
  double concordant = 0.0;
  double discordant = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = (xy[i].first - xy[j].first) * (xy[i].second - xy[j].second);
      if (s > 0) concordant += 1.0;
      else if (s < 0) discordant += 1.0;
    }
  }
  return (concordant - discordant) / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

double spearman_rho(const std::vector<std::pair<double, double>>& xy) {
  ScorePairs p;
  for (const auto& [x, y] : xy) {
    p.y1.push_back(x);
    p.y2.push_back(y);
  }
  const UniformRanks r = to_uniform_ranks(p, Orientation::HigherIsStronger);
  const double n = static_cast<double>(r.size());
  double d2 = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double d = static_cast<double>(r.r1[i]) - static_cast<double>(r.r2[i]);
    d2 += d * d;
  }
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

// ---------------------------------------------------------------------------

BenchmarkConfig BenchmarkConfig::fast() {
  BenchmarkConfig c;
  c.replicates = 25;
  c.n = 4000;
  c.bootstrap_B = 50;
  c.qlr_NB = 200;
  c.tables = {"table1", "table2", "table3", "table5"};
  return c;
}

BenchmarkConfig BenchmarkConfig::full() {
  BenchmarkConfig c;
  c.replicates = 100;
  c.n = 10000;
  c.bootstrap_B = 100;
  c.qlr_NB = 100;
  c.tables = {"table1", "table2", "table3", "table5"};
  return c;
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t x = seed ^ (salt * 0x9e3779b97f4a7c15ULL);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t row_seed(std::uint64_t seed, const std::string& key) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : key) h = (h ^ c) * 1099511628211ULL;
  return mix_seed(seed, h);
}

ModelSetup simulation_setup(std::size_t n) {
  ModelSetup setup;
  setup.orientation = Orientation::HigherIsStronger;
  setup.grid = CutoffGrid::default_for(n);
  setup.tau_grid = default_tau_grid(setup.grid);
  return setup;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? std::numeric_limits<double>::quiet_NaN() : s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

BaselineReplicate run_baseline_replicate(const ScenarioSpec& spec, std::uint64_t seed, std::size_t replicate) {
  SeededRng rng(seed, replicate);
  const ScorePairs pairs = generate(spec, rng);
  const ModelSetup setup = simulation_setup(spec.n);
  const DesignSet data = make_design_set({pairs}, setup.orientation, setup.grid);
  FitOptions fit_options = setup.fit;
  const FitResult fit = fit_segmented(data, setup.grid, setup.tau_grid, fit_options);
  const EmpiricalCurve emp = curve_from_counts(data[0].counts, setup.grid);
  const auto hom = homogeneous_curve(fit.homogeneous_beta, data, setup.grid);
  return BaselineReplicate{fit.params.tau, mise(fit.fitted_curve[0], emp), mise(hom[0], emp)};
}

CovariateReplicate run_covariate_replicate(const ScenarioSpec& workflow0, const ScenarioSpec& workflow1,
                                           std::size_t B, std::uint64_t seed, std::size_t replicate,
                                           std::size_t threads) {
  SeededRng rng(seed, replicate);
  const auto workflows = generate_two_workflows(workflow0, workflow1, rng);
  const ModelSetup setup = simulation_setup(std::min(workflow0.n, workflow1.n));
  const DesignSet data = make_design_set(workflows, setup.orientation, setup.grid);
  const FitResult fit = fit_segmented(data, setup.grid, setup.tau_grid, setup.fit);
  BootstrapOptions bopt;
  bopt.B = B;
  bopt.seed = mix_seed(seed, replicate + 1);
  bopt.threads = threads;
  const BootstrapResult boot = bootstrap(workflows, setup, bopt);
  const auto tests = wald_tests(fit, boot);
  CovariateReplicate out;
  out.estimate = parameter_vector(fit.params);
  out.se = boot.se;
  out.reject_b11 = tests.at(0).reject;
  out.reject_b12 = tests.at(1).reject;
  return out;
}

PowerReplicate run_power_replicate(const ScenarioSpec& spec, std::size_t NB, std::uint64_t seed,
                                   std::size_t replicate, std::size_t threads) {
  SeededRng rng(seed, replicate);
  const ScorePairs pairs = generate(spec, rng);
  const ModelSetup setup = simulation_setup(spec.n);
  QlrOptions qopt;
  qopt.NB = NB;
  qopt.seed = mix_seed(seed, replicate + 1);
  qopt.threads = threads;
  const QLRResult r = qlr_null_pvalue(pairs, setup, qopt);
  return PowerReplicate{r.qlr, r.p_value.value_or(1.0)};
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct BaselineRow {
  std::string table;
  ScenarioSpec spec;
  double tau_ref, mise_seg_ref, mise_hom_ref;  // MISE references are x 1e-4
};

struct CovariateRow {
  std::string label;
  ScenarioSpec w0, w1;
  double tau_ref, b01_ref, b02_ref, b11_ref, b12_ref, power11_ref, power12_ref;
};

struct PowerRow {
  ScenarioSpec spec;
  double power_ref;
};

std::vector<BaselineRow> baseline_rows(const std::string& table, std::size_t n) {
  const double pis[] = {0.6, 0.8, 0.9, 0.95};
  std::vector<BaselineRow> rows;
  if (table == "table1") {
    const double tau1[] = {0.557, 0.773, 0.882, 0.938}, seg1[] = {8.592, 5.487, 5.142, 5.068},
                 hom1[] = {17.288, 14.969, 9.201, 6.363};
    const double tau2[] = {0.596, 0.800, 0.903, 0.955}, seg2[] = {5.320, 5.313, 5.223, 5.125},
                 hom2[] = {20.567, 15.377, 8.960, 6.200};
    for (int k = 0; k < 4; ++k) rows.push_back({table, ScenarioSpec::scenario1(pis[k], 1.2, n), tau1[k], seg1[k], hom1[k]});
    for (int k = 0; k < 4; ++k) rows.push_back({table, ScenarioSpec::scenario2(pis[k], 0.0, n), tau2[k], seg2[k], hom2[k]});
  } else if (table == "table2") {
    const double tau1[] = {0.584, 0.796, 0.898, 0.953}, seg1[] = {5.280, 5.236, 5.152, 5.115},
                 hom1[] = {23.072, 17.750, 9.953, 6.547};
    const double tau2[] = {0.601, 0.817, 0.919, 0.966}, seg2[] = {5.133, 5.079, 5.156, 5.280},
                 hom2[] = {10.758, 8.118, 5.772, 5.342};
    for (int k = 0; k < 4; ++k) rows.push_back({table, ScenarioSpec::scenario1(pis[k], 3.0, n), tau1[k], seg1[k], hom1[k]});
    for (int k = 0; k < 4; ++k) rows.push_back({table, ScenarioSpec::scenario2(pis[k], 0.4, n), tau2[k], seg2[k], hom2[k]});
  }
  return rows;
}

std::vector<CovariateRow> covariate_rows(std::size_t n) {
  const double pis[] = {0.6, 0.8, 0.9, 0.95};
  const double same[4][7] = {{0.559, 1.911, 1.260, 0.002, -0.000, 0.030, 0.030},
                             {0.773, 1.937, 1.288, 0.002, 0.000, 0.060, 0.040},
                             {0.880, 1.960, 1.351, 0.002, 0.002, 0.050, 0.060},
                             {0.938, 1.974, 1.408, 0.001, 0.002, 0.030, 0.020}};
  const double diff[4][7] = {{0.564, 1.904, 1.256, 0.012, -0.045, 0.080, 0.990},
                             {0.778, 1.933, 1.282, 0.010, -0.031, 0.090, 0.580},
                             {0.886, 1.955, 1.337, 0.008, -0.031, 0.060, 0.330},
                             {0.940, 1.972, 1.402, 0.005, -0.030, 0.050, 0.140}};
  std::vector<CovariateRow> rows;
  for (int k = 0; k < 4; ++k) {
    const auto* r = same[k];
    rows.push_back({"same", ScenarioSpec::scenario1(pis[k], 1.2, n), ScenarioSpec::scenario1(pis[k], 1.2, n), r[0],
                    r[1], r[2], r[3], r[4], r[5], r[6]});
  }
  for (int k = 0; k < 4; ++k) {
    const auto* r = diff[k];
    rows.push_back({"different", ScenarioSpec::scenario1(pis[k], 1.2, n), ScenarioSpec::scenario1(pis[k], 2.0, n),
                    r[0], r[1], r[2], r[3], r[4], r[5], r[6]});
  }
  return rows;
}

std::vector<PowerRow> power_rows(std::size_t n) {
  const double pis[] = {0.0, 0.80, 0.90, 0.95, 0.96, 0.97, 0.98, 0.99, 1.0};
  const double power[] = {0.00, 1.00, 1.00, 1.00, 0.94, 0.29, 0.01, 0.01, 0.01};
  std::vector<PowerRow> rows;
  for (int k = 0; k < 9; ++k) rows.push_back({power_test_spec(pis[k], n), power[k]});
  return rows;
}

std::string row_label(const ScenarioSpec& s) {
  std::ostringstream os;
  os << to_string(s.scenario) << "_pi" << s.pi1 << "_t" << s.theta1 << "_" << s.theta2;
  return os.str();
}

}  // namespace

ScenarioSpec power_test_spec(double pi1, std::size_t n) { return ScenarioSpec::scenario1(pi1, kPowerTheta2, n); }

BenchmarkReport run_benchmark(const BenchmarkConfig& config) {
  if (config.replicates < 10) throw Error(ErrorCode::InvalidArgument, "benchmark needs at least 10 replicates");
  BenchmarkReport report;
  report.config = config;
  const std::size_t R = config.replicates;

  auto add = [&](const std::string& table, const std::string& row, const ScenarioSpec& s, const std::string& stat,
                 double value, double reference) {
    report.records.push_back({table, row, std::string(to_string(s.scenario)), s.n, s.pi1, s.theta1, s.theta2, stat,
                              value, reference});
  };

  for (const auto& table : config.tables) {
    if (table == "table1" || table == "table2") {
      for (const auto& row : baseline_rows(table, config.n)) {
        const std::string label = row_label(row.spec);
        const std::uint64_t seed = row_seed(config.seed, table + label);
        std::vector<BaselineReplicate> reps(R);
        parallel_for(R, config.threads, [&](std::size_t r) { reps[r] = run_baseline_replicate(row.spec, seed, r); });
        std::vector<double> tau, seg, hom;
        double better = 0.0;
        for (const auto& rep : reps) {
          tau.push_back(rep.tau_hat);
          seg.push_back(rep.mise_segmented * 1e4);
          hom.push_back(rep.mise_homogeneous * 1e4);
          better += rep.mise_segmented < rep.mise_homogeneous ? 1.0 : 0.0;
        }
        add(table, label, row.spec, "tau_hat_mean", mean_of(tau), row.tau_ref);
        add(table, label, row.spec, "tau_hat_sd", sd_of(tau), kNaN);
        add(table, label, row.spec, "mise_segmented_x1e4", mean_of(seg), row.mise_seg_ref);
        add(table, label, row.spec, "mise_homogeneous_x1e4", mean_of(hom), row.mise_hom_ref);
        add(table, label, row.spec, "frac_segmented_better", better / static_cast<double>(R), kNaN);
      }
    } else if (table == "table3") {
      for (const auto& row : covariate_rows(config.n)) {
        const std::string label = row.label + "_" + row_label(row.w1);
        const std::uint64_t seed = row_seed(config.seed, table + label);
        std::vector<CovariateReplicate> reps(R);
        parallel_for(R, config.threads, [&](std::size_t r) {
          reps[r] = run_covariate_replicate(row.w0, row.w1, config.bootstrap_B, seed, r, 1);
        });
        const char* names[] = {"tau", "beta_01", "beta_02", "beta_11", "beta_12"};
        const double refs[] = {row.tau_ref, row.b01_ref, row.b02_ref, row.b11_ref, row.b12_ref};
        for (Eigen::Index p = 0; p < 5; ++p) {
          std::vector<double> est, ese;
          for (const auto& rep : reps) {
            est.push_back(rep.estimate[p]);
            ese.push_back(rep.se[p]);
          }
          add(table, label, row.w1, std::string(names[p]) + "_mean", mean_of(est), refs[p]);
          add(table, label, row.w1, std::string(names[p]) + "_sd", sd_of(est), kNaN);
          add(table, label, row.w1, std::string(names[p]) + "_ese", mean_of(ese), kNaN);
        }
        double rej11 = 0.0, rej12 = 0.0;
        for (const auto& rep : reps) {
          rej11 += rep.reject_b11 ? 1.0 : 0.0;
          rej12 += rep.reject_b12 ? 1.0 : 0.0;
        }
        add(table, label, row.w1, "power_beta_11", rej11 / static_cast<double>(R), row.power11_ref);
        add(table, label, row.w1, "power_beta_12", rej12 / static_cast<double>(R), row.power12_ref);
      }
    } else if (table == "table5") {
      for (const auto& row : power_rows(config.n)) {
        const std::string label = row_label(row.spec);
        const std::uint64_t seed = row_seed(config.seed, table + label);
        std::vector<PowerReplicate> reps(R);
        parallel_for(R, config.threads,
                     [&](std::size_t r) { reps[r] = run_power_replicate(row.spec, config.qlr_NB, seed, r, 1); });
        std::vector<double> qlr;
        double rejections = 0.0;
        for (const auto& rep : reps) {
          qlr.push_back(rep.qlr);
          rejections += rep.p_value < 0.05 ? 1.0 : 0.0;
        }
        add(table, label, row.spec, "rejection_rate", rejections / static_cast<double>(R), row.power_ref);
        add(table, label, row.spec, "qlr_mean", mean_of(qlr), kNaN);
      }
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown benchmark table '" + table + "'");
    }
  }
  return report;
}

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "NA";
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

double parse_double(const std::string& s) {
  if (s == "NA") return kNaN;
  return std::stod(s);
}

}  // namespace

void write_report(const BenchmarkReport& report, std::ostream& out) {
  out << "table\trow\tscenario\tn\tpi1\ttheta1\ttheta2\tstatistic\tvalue\treference\n";
  for (const auto& r : report.records) {
    out << r.table << '\t' << r.row << '\t' << r.scenario << '\t' << r.n << '\t' << format_double(r.pi1) << '\t'
        << format_double(r.theta1) << '\t' << format_double(r.theta2) << '\t' << r.statistic << '\t'
        << format_double(r.value) << '\t' << format_double(r.reference) << '\n';
  }
}

std::vector<BenchmarkRecord> read_report(std::istream& in) {
  std::vector<BenchmarkRecord> records;
  std::string line;
  if (!std::getline(in, line) || line.rfind("table\trow\t", 0) != 0) {
    throw Error(ErrorCode::ParseError, "benchmark report header missing");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) f.push_back(field);
    if (f.size() != 10) throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 10 fields");
    try {
      records.push_back({f[0], f[1], f[2], static_cast<std::size_t>(std::stoull(f[3])), parse_double(f[4]),
                         parse_double(f[5]), parse_double(f[6]), f[7], parse_double(f[8]), parse_double(f[9])});
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad number");
    }
  }
  return records;
}

}  // namespace segccr
