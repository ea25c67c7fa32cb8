#include "segccr/io.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace segccr {
namespace {

using nlohmann::ordered_json;

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

double parse_number(const std::string& field, const std::string& source, std::size_t line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &used);
  } catch (const std::logic_error&) {
    used = 0;
  }
  if (used == 0 || used != field.size()) {
    throw Error(ErrorCode::ParseError, source + ":" + std::to_string(line_no) + ": cannot parse number '" + field + "'");
  }
  return v;
}

std::string slurp(std::istream& in) {
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

std::string content_digest(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

InputTable parse_scores(std::istream& scores, const std::string& source) {
  const std::string text = slurp(scores);
  std::istringstream in(text);
  InputTable table;
  table.digest = content_digest(text);

  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, source + ":1: empty file");
  const auto header = split_tabs(strip_cr(line));
  auto column = [&](const std::string& name) -> std::size_t {
    for (std::size_t k = 0; k < header.size(); ++k)
      if (header[k] == name) return k;
    throw Error(ErrorCode::MissingColumn, source + ": header lacks column '" + name + "'");
  };
  const std::size_t c_wf = column("workflow"), c_y1 = column("y1"), c_y2 = column("y2");
  const std::size_t need = std::max({c_wf, c_y1, c_y2}) + 1;

  std::map<std::string, std::size_t> index;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split_tabs(line);
    if (f.size() < need) {
      throw Error(ErrorCode::ParseError, source + ":" + std::to_string(line_no) + ": expected at least " +
                                             std::to_string(need) + " fields");
    }
    const double y1 = parse_number(f[c_y1], source, line_no);
    const double y2 = parse_number(f[c_y2], source, line_no);
    auto [it, inserted] = index.try_emplace(f[c_wf], table.workflows.size());
    if (inserted) table.workflows.push_back(ScorePairs{f[c_wf], {}, {}, {}});
    auto& wf = table.workflows[it->second];
    wf.y1.push_back(y1);
    wf.y2.push_back(y2);
  }
  if (table.workflows.empty()) throw Error(ErrorCode::ParseError, source + ": no data rows");
  for (const auto& wf : table.workflows) validate_score_pairs(wf);
  return table;
}

void join_covariates(InputTable& table, std::istream& covariates, const std::string& source) {
  const std::string text = slurp(covariates);
  table.digest = content_digest(table.digest + text);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, source + ":1: empty file");
  const auto header = split_tabs(strip_cr(line));
  if (header.empty() || header[0] != "workflow") {
    throw Error(ErrorCode::MissingColumn, source + ": first column must be 'workflow'");
  }
  table.covariate_names.assign(header.begin() + 1, header.end());

  std::map<std::string, std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split_tabs(line);
    if (f.size() != header.size()) {
      throw Error(ErrorCode::ParseError, source + ":" + std::to_string(line_no) + ": expected " +
                                             std::to_string(header.size()) + " fields");
    }
    std::vector<double> x;
    for (std::size_t k = 1; k < f.size(); ++k) x.push_back(parse_number(f[k], source, line_no));
    rows[f[0]] = std::move(x);
  }
  for (auto& wf : table.workflows) {
    const auto it = rows.find(wf.workflow_id);
    if (it == rows.end()) {
      throw Error(ErrorCode::UnknownWorkflow, source + ": no covariates for workflow '" + wf.workflow_id + "'");
    }
    wf.covariates = it->second;
    validate_score_pairs(wf);
  }
}

InputTable read_scores(const std::string& scores_path, const std::optional<std::string>& covariates_path) {
  std::ifstream in(scores_path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open scores file '" + scores_path + "'");
  InputTable table = parse_scores(in, scores_path);
  if (covariates_path) {
    std::ifstream cin(*covariates_path, std::ios::binary);
    if (!cin) throw Error(ErrorCode::ParseError, "cannot open covariates file '" + *covariates_path + "'");
    join_covariates(table, cin, *covariates_path);
  }
  return table;
}

void write_scores(std::ostream& out, const std::vector<ScorePairs>& workflows) {
  out << "workflow\ty1\ty2\n";
  out << std::setprecision(17);
  for (const auto& wf : workflows) {
    for (std::size_t i = 0; i < wf.size(); ++i) out << wf.workflow_id << '\t' << wf.y1[i] << '\t' << wf.y2[i] << '\n';
  }
}

std::string_view version_string() { return "0.3.0"; }

namespace {

ordered_json number_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json qlr_json(const std::string& id, const QLRResult& r) {
  ordered_json j;
  j["workflow"] = id;
  j["type"] = "qlr_change_point";
  j["qlr"] = r.qlr;
  j["n"] = r.n;
  j["tau_hat"] = r.tau_hat;
  j["loglik_segmented"] = r.loglik_segmented;
  j["loglik_homogeneous"] = r.loglik_homogeneous;
  j["restricted_slope"] = r.restricted_slope;
  j["NB"] = r.NB;
  j["p_value"] = r.p_value ? ordered_json(*r.p_value) : ordered_json(nullptr);
  j["skipped_taus"] = r.skipped_taus;
  return j;
}

}  // namespace

std::string render_result_document(const ResultDocument& doc) {
  ordered_json root;

  ordered_json model;
  model["command"] = doc.command;
  model["form"] = "gumbel_hougaard_segmented";
  model["orientation"] = doc.orientation == Orientation::LowerIsStronger ? "low" : "high";
  model["cutoffs"] = doc.grid ? ordered_json(doc.grid->M()) : ordered_json(nullptr);
  model["tau_grid"] = doc.tau_grid;
  model["workflows"] = doc.workflow_ids;
  model["covariates"] = doc.covariate_names;
  root["model"] = model;

  ordered_json estimates = ordered_json::object();
  if (doc.fit) {
    const auto& fit = *doc.fit;
    const auto names = parameter_names(static_cast<std::size_t>(fit.params.beta.rows()));
    const Eigen::VectorXd theta = parameter_vector(fit.params);
    ordered_json params = ordered_json::array();
    for (Eigen::Index p = 0; p < theta.size(); ++p) {
      ordered_json e;
      e["name"] = names[static_cast<std::size_t>(p)];
      e["estimate"] = theta[p];
      if (doc.bootstrap) {
        const auto& b = *doc.bootstrap;
        e["se"] = number_or_null(b.se[p]);
        e["ci_symmetric"] = {number_or_null(theta[p] - 1.96 * b.se[p]), number_or_null(theta[p] + 1.96 * b.se[p])};
        const auto& pc = b.ci_percentile[static_cast<std::size_t>(p)];
        e["ci_percentile"] = {number_or_null(pc.first), number_or_null(pc.second)};
      }
      params.push_back(e);
    }
    estimates["segmented"] = params;
    estimates["loglik"] = fit.loglik;
    ordered_json hom;
    std::vector<double> slopes(fit.homogeneous_beta.data(), fit.homogeneous_beta.data() + fit.homogeneous_beta.size());
    hom["slopes"] = slopes;
    hom["loglik"] = fit.homogeneous_loglik;
    estimates["homogeneous"] = hom;
    if (doc.bootstrap) {
      estimates["bootstrap"] = {{"B", doc.bootstrap->B}, {"failures", doc.bootstrap->failures}};
    }
  }
  root["estimates"] = estimates;

  ordered_json profile = ordered_json::array();
  if (doc.fit) {
    for (const auto& p : doc.fit->profile) {
      ordered_json e;
      e["tau"] = p.tau;
      e["loglik"] = p.loglik;
      e["converged"] = p.converged;
      e["iterations"] = p.iterations;
      std::vector<double> beta;
      for (Eigen::Index r = 0; r < p.beta.rows(); ++r) {
        beta.push_back(p.beta(r, 0));
        beta.push_back(p.beta(r, 1));
      }
      e["beta"] = beta;
      profile.push_back(e);
    }
  }
  root["profile"] = profile;

  ordered_json curves = ordered_json::array();
  for (std::size_t s = 0; s < doc.empirical.size(); ++s) {
    ordered_json c;
    c["workflow"] = s < doc.workflow_ids.size() ? doc.workflow_ids[s] : std::to_string(s);
    c["t"] = doc.empirical[s].t;
    c["psi_empirical"] = doc.empirical[s].psi;
    if (doc.fit) c["psi_fitted"] = doc.fit->fitted_curve[s];
    curves.push_back(c);
  }
  root["curves"] = curves;

  ordered_json tests = ordered_json::array();
  for (const auto& w : doc.wald) {
    ordered_json j;
    j["type"] = "wald";
    j["coefficient"] = w.coefficient;
    j["estimate"] = w.estimate;
    j["se"] = w.se;
    j["z"] = number_or_null(w.z);
    j["p_value"] = w.p_value;
    j["reject_at_0.05"] = w.reject;
    tests.push_back(j);
  }
  for (const auto& q : doc.qlr) tests.push_back(qlr_json(q.workflow_id, q.result));
  root["tests"] = tests;

  ordered_json prov;
  prov["seed"] = doc.seed;
  prov["version"] = std::string(version_string());
  prov["input_digest"] = doc.input_digest;
  prov["bootstrap_B"] = doc.bootstrap_B;
  prov["qlr_NB"] = doc.qlr_NB;
  root["provenance"] = prov;

  return root.dump(2) + "\n";
}

void write_plot_data(std::ostream& out, const ResultDocument& doc) {
  out << "workflow\tt\tpsi_empirical\tpsi_fitted\n";
  out << std::setprecision(17);
  for (std::size_t s = 0; s < doc.empirical.size(); ++s) {
    const auto& emp = doc.empirical[s];
    for (std::size_t m = 0; m < emp.t.size(); ++m) {
      out << doc.workflow_ids[s] << '\t' << emp.t[m] << '\t' << emp.psi[m] << '\t';
      if (doc.fit) out << doc.fit->fitted_curve[s][m];
      else out << "NA";
      out << '\n';
    }
  }
}

}  // namespace segccr
