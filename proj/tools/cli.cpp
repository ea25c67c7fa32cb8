#include "cli.hpp"

#include "segccr/empirical.hpp"
#include "segccr/estimation.hpp"
#include "segccr/inference.hpp"
#include "segccr/likelihood.hpp"
#include "segccr/parallel.hpp"
#include "segccr/rng.hpp"
#include "segccr/simulation.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace segccr::cli {
namespace {

Orientation parse_orientation(const std::string& s) {
  if (s == "low") return Orientation::LowerIsStronger;
  if (s == "high") return Orientation::HigherIsStronger;
  throw Error(ErrorCode::InvalidArgument, "orientation must be 'low' or 'high'");
}

double parse_real(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || !std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "bad " + what + " '" + s + "'");
  return v;
}

struct Prepared {
  InputTable table;
  ModelSetup setup;
};

Prepared prepare(const ModelFlags& flags) {
  Prepared p;
  p.table = read_scores(flags.scores, flags.covariates);
  std::size_t n_min = std::numeric_limits<std::size_t>::max();
  for (const auto& w : p.table.workflows) n_min = std::min(n_min, w.size());
  p.setup.orientation = parse_orientation(flags.orientation);
  p.setup.grid = flags.cutoffs ? CutoffGrid::equally_spaced(*flags.cutoffs) : CutoffGrid::default_for(n_min);
  p.setup.tau_grid = parse_tau_grid(flags.tau_grid, p.setup.grid);
  p.setup.fit.threads = flags.threads;
  return p;
}

ResultDocument base_document(const std::string& command, const Prepared& p, std::uint64_t seed) {
  ResultDocument doc;
  doc.command = command;
  doc.orientation = p.setup.orientation;
  doc.grid = p.setup.grid;
  doc.tau_grid = p.setup.tau_grid;
  for (const auto& w : p.table.workflows) doc.workflow_ids.push_back(w.workflow_id);
  doc.covariate_names = p.table.covariate_names;
  doc.seed = seed;
  doc.input_digest = p.table.digest;
  return doc;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
  f << text;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") out << text;
  else write_text(path, text);
}

std::vector<std::string> split_commas(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) out.push_back(part);
    }
  }
  return out;
}

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
  cmd->add_option("--scores", f.scores, "Tab-separated scores: workflow, y1, y2")->required()->check(CLI::ExistingFile);
  cmd->add_option("--orientation", f.orientation, "Which scores are stronger")
      ->check(CLI::IsMember({"low", "high"}))
      ->capture_default_str();
  cmd->add_option("--cutoffs", f.cutoffs, "Number of equally spaced cutoffs M (default 100, or n if n < 100)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tau-grid", f.tau_grid, "Change point search grid: lo:hi or lo:hi:step");
  cmd->add_option("--seed", f.seed, "Seed for all resampling")->capture_default_str();
  cmd->add_option("--threads", f.threads, "Worker threads (0: SEGCCR_THREADS or hardware)")->capture_default_str();
}

}  // namespace

std::vector<double> parse_tau_grid(const std::string& spec, const CutoffGrid& grid) {
  if (spec.empty()) return default_tau_grid(grid);
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  if (parts.size() != 2 && parts.size() != 3) {
    throw Error(ErrorCode::InvalidArgument, "tau grid must be lo:hi or lo:hi:step, got '" + spec + "'");
  }
  const double lo = parse_real(parts[0], "tau grid bound");
  const double hi = parse_real(parts[1], "tau grid bound");
  if (!(lo > 0.0 && hi < 1.0 && lo <= hi)) throw Error(ErrorCode::InvalidArgument, "tau grid needs 0 < lo <= hi < 1");
  if (parts.size() == 2) return default_tau_grid(grid, lo, hi);

  const double step = parse_real(parts[2], "tau grid step");
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau grid step must be positive");
  std::vector<double> taus;
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::size_t k = 0; k <= count; ++k) taus.push_back(lo + static_cast<double>(k) * step);
  return taus;
}

ResultDocument run_fit(const FitFlags& flags) {
  const Prepared p = prepare(flags);
  ResultDocument doc = base_document("fit", p, flags.seed);

  const DesignSet data = make_design_set(p.table.workflows, p.setup.orientation, p.setup.grid);
  FitResult fit = fit_segmented(data, p.setup.grid, p.setup.tau_grid, p.setup.fit);
  for (std::size_t s = 0; s < data.size(); ++s) doc.empirical.push_back(curve_from_counts(data[s].counts, p.setup.grid));

  if (flags.bootstrap > 0) {
    BootstrapOptions bo;
    bo.B = flags.bootstrap;
    bo.seed = flags.seed;
    bo.threads = flags.threads;
    BootstrapResult boot = bootstrap(p.table.workflows, p.setup, bo);
    doc.wald = wald_tests(fit, boot);
    doc.bootstrap = std::move(boot);
    doc.bootstrap_B = flags.bootstrap;
  }
  doc.fit = std::move(fit);
  return doc;
}

ResultDocument run_test(const TestFlags& flags) {
  const Prepared p = prepare(flags);
  ResultDocument doc = base_document("test", p, flags.seed);
  doc.qlr_NB = flags.nb;
  QlrOptions qo;
  qo.NB = flags.nb;
  qo.seed = flags.seed;
  qo.threads = flags.threads;
  for (const auto& w : p.table.workflows) {
    const UniformRanks ranks = to_uniform_ranks(w, p.setup.orientation);
    doc.empirical.push_back(empirical_curve(ranks, p.setup.grid));
    doc.qlr.push_back({w.workflow_id, qlr_null_pvalue(w, p.setup, qo)});
  }
  return doc;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Segmented correspondence curve regression"};
  app.set_version_flag("--version", std::string(version_string()));
  app.require_subcommand(1);

  FitFlags fit_flags;
  std::string fit_out, fit_plot;
  auto* fit_cmd = app.add_subcommand("fit", "Fit the segmented model, bootstrap it and write a JSON result document");
  add_model_flags(fit_cmd, fit_flags);
  fit_cmd->add_option("--covariates", fit_flags.covariates, "Tab-separated covariates: workflow, x1..xS")
      ->check(CLI::ExistingFile);
  fit_cmd->add_option("--bootstrap", fit_flags.bootstrap, "Bootstrap replicates (0 disables)")->capture_default_str();
  fit_cmd->add_option("--out", fit_out, "Result document path (default stdout)");
  fit_cmd->add_option("--plot-data", fit_plot, "Also write t, empirical and fitted curves as TSV");

  TestFlags test_flags;
  std::string test_out;
  auto* test_cmd = app.add_subcommand("test", "Per-workflow test for the existence of a change point");
  add_model_flags(test_cmd, test_flags);
  test_cmd->add_option("--nb", test_flags.nb, "Multiplier draws for the null distribution")
      ->check(CLI::Range(std::size_t{10}, std::numeric_limits<std::size_t>::max()))
      ->capture_default_str();
  test_cmd->add_option("--out", test_out, "Result document path (default stdout)");

  FitFlags curve_flags;
  std::string curve_out;
  auto* curve_cmd = app.add_subcommand("curve", "Write empirical and fitted correspondence curves as TSV");
  add_model_flags(curve_cmd, curve_flags);
  curve_cmd->add_option("--covariates", curve_flags.covariates, "Tab-separated covariates")->check(CLI::ExistingFile);
  curve_cmd->add_option("--out", curve_out, "Output path (default stdout)");

  int scenario = 1;
  std::optional<double> pi1, theta1, theta2, mu1, mu2;
  std::size_t sim_n = 10000;
  std::uint64_t sim_seed = 1;
  std::string sim_workflow = "sim", sim_out;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a two-component mixture score table");
  sim_cmd->add_option("--scenario", scenario, "1: Gumbel mixture, 2: bivariate normal mixture")
      ->check(CLI::IsMember({1, 2}))
      ->capture_default_str();
  sim_cmd->add_option("--pi1", pi1, "Weak component proportion")->check(CLI::Range(0.0, 1.0));
  sim_cmd->add_option("--theta1", theta1, "Weak component dependence");
  sim_cmd->add_option("--theta2", theta2, "Strong component dependence");
  sim_cmd->add_option("--mu1", mu1, "Weak component mean");
  sim_cmd->add_option("--mu2", mu2, "Strong component mean");
  sim_cmd->add_option("-n,--n", sim_n, "Number of candidates")->check(CLI::Range(std::size_t{2}, std::size_t{100000000}))
      ->capture_default_str();
  sim_cmd->add_option("--seed", sim_seed, "Seed")->capture_default_str();
  sim_cmd->add_option("--workflow", sim_workflow, "Workflow id written in the first column")->capture_default_str();
  sim_cmd->add_option("--out", sim_out, "Output path (default stdout)");

  std::string profile = "fast", bench_out;
  std::vector<std::string> rows;
  std::optional<std::size_t> bench_R, bench_n, bench_B, bench_NB;
  std::optional<std::uint64_t> bench_seed;
  std::size_t bench_threads = 0;
  auto* bench_cmd = app.add_subcommand("benchmark", "Monte Carlo reproduction of the simulation tables");
  bench_cmd->add_option("--profile", profile, "fast or full")->check(CLI::IsMember({"fast", "full"}))->capture_default_str();
  bench_cmd->add_option("--rows", rows, "Tables to run: table1,table2,table3,table5");
  bench_cmd->add_option("--replicates", bench_R, "Replicates per row (>= 10)");
  bench_cmd->add_option("--n", bench_n, "Candidates per data set");
  bench_cmd->add_option("--bootstrap", bench_B, "Bootstrap replicates for table3");
  bench_cmd->add_option("--nb", bench_NB, "Multiplier draws for table5");
  bench_cmd->add_option("--seed", bench_seed, "Seed");
  bench_cmd->add_option("--threads", bench_threads, "Worker threads (0: SEGCCR_THREADS or hardware)");
  bench_cmd->add_option("--out", bench_out, "Report path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*fit_cmd) {
      const ResultDocument doc = run_fit(fit_flags);
      emit(fit_out, render_result_document(doc), out);
      if (!fit_plot.empty()) {
        std::ostringstream os;
        write_plot_data(os, doc);
        write_text(fit_plot, os.str());
      }
    } else if (*test_cmd) {
      emit(test_out, render_result_document(run_test(test_flags)), out);
    } else if (*curve_cmd) {
      curve_flags.bootstrap = 0;
      std::ostringstream os;
      write_plot_data(os, run_fit(curve_flags));
      emit(curve_out, os.str(), out);
    } else if (*sim_cmd) {
      ScenarioSpec spec = scenario == 1 ? ScenarioSpec::scenario1(0.8) : ScenarioSpec::scenario2(0.8);
      spec.n = sim_n;
      if (pi1) spec.pi1 = *pi1;
      if (theta1) spec.theta1 = *theta1;
      if (theta2) spec.theta2 = *theta2;
      if (mu1) spec.mu1 = *mu1;
      if (mu2) spec.mu2 = *mu2;
      SeededRng rng(sim_seed, 0);
      ScorePairs pairs = generate(spec, rng);
      pairs.workflow_id = sim_workflow;
      std::ostringstream os;
      write_scores(os, {pairs});
      emit(sim_out, os.str(), out);
    } else if (*bench_cmd) {
      BenchmarkConfig config = profile == "full" ? BenchmarkConfig::full() : BenchmarkConfig::fast();
      const auto tables = split_commas(rows);
      if (!tables.empty()) config.tables = tables;
      if (bench_R) config.replicates = *bench_R;
      if (bench_n) config.n = *bench_n;
      if (bench_B) config.bootstrap_B = *bench_B;
      if (bench_NB) config.qlr_NB = *bench_NB;
      if (bench_seed) config.seed = *bench_seed;
      config.threads = bench_threads;
      std::ostringstream os;
      write_report(run_benchmark(config), os);
      emit(bench_out, os.str(), out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_input_error(e.code()) ? 2 : 3;
  }
  return 0;
}

}  // namespace segccr::cli
