#include "segccr/io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sstream>

using namespace segccr;

namespace {

ErrorCode parse_error(const std::string& scores, const std::string& covariates = "") {
  try {
    std::istringstream in(scores);
    auto table = parse_scores(in);
    if (!covariates.empty()) {
      std::istringstream cin(covariates);
      join_covariates(table, cin);
    }
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected segccr::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("parse a minimal score table") {
  std::istringstream in("workflow\ty1\ty2\na\t1.0\t2.0\na\t2.0\t1.0\n");
  const auto t = parse_scores(in);
  REQUIRE(t.workflows.size() == 1);
  CHECK(t.workflows[0].workflow_id == "a");
  CHECK(t.workflows[0].size() == 2);
  CHECK(t.workflows[0].y1 == std::vector<double>{1.0, 2.0});
  CHECK(t.workflows[0].y2 == std::vector<double>{2.0, 1.0});
}

TEST_CASE("workflows keep first-appearance order and extra columns are ignored") {
  std::istringstream in("y2\tworkflow\tnote\ty1\r\n3\tb\tx\t1\r\n4\ta\ty\t2\r\n5\tb\tz\t3\r\n6\ta\tw\t4\r\n");
  const auto t = parse_scores(in);
  REQUIRE(t.workflows.size() == 2);
  CHECK(t.workflows[0].workflow_id == "b");
  CHECK(t.workflows[0].y1 == std::vector<double>{1.0, 3.0});
  CHECK(t.workflows[1].y2 == std::vector<double>{4.0, 6.0});
}

TEST_CASE("input errors") {
  CHECK(parse_error("workflow\ty1\na\t1\na\t2\n") == ErrorCode::MissingColumn);
  CHECK(parse_error("workflow\ty1\ty2\na\t1\t2\na\tx\t2\n") == ErrorCode::ParseError);
  CHECK(parse_error("") == ErrorCode::ParseError);
  CHECK(parse_error("workflow\ty1\ty2\na\t1\t2\n") == ErrorCode::TooFew);
  CHECK(parse_error("workflow\ty1\ty2\na\t1\t2\na\t2\t1\nb\t1\t2\nb\t2\t1\n", "workflow\tx1\na\t0\n") ==
        ErrorCode::UnknownWorkflow);
  CHECK(parse_error("workflow\ty1\ty2\na\t1\t2\na\t2\t1\n", "wf\tx1\na\t0\n") == ErrorCode::MissingColumn);

  try {
    std::istringstream in("workflow\ty1\ty2\na\t1\t2\na\tnan?\t2\n");
    parse_scores(in, "scores.tsv");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("scores.tsv:3") != std::string::npos);
  }
}

TEST_CASE("covariates are joined per workflow") {
  std::istringstream in("workflow\ty1\ty2\na\t1\t2\na\t2\t1\nb\t1\t2\nb\t2\t1\n");
  auto t = parse_scores(in);
  const auto before = t.digest;
  std::istringstream cin("workflow\tdepth_1\tdepth_2\nb\t1\t0\na\t0\t1\nc\t1\t1\n");
  join_covariates(t, cin);
  CHECK(t.covariate_names == std::vector<std::string>{"depth_1", "depth_2"});
  CHECK(t.workflows[0].covariates == std::vector<double>{0.0, 1.0});
  CHECK(t.workflows[1].covariates == std::vector<double>{1.0, 0.0});
  CHECK(t.digest != before);
}

TEST_CASE("digest tracks input bytes") {
  std::istringstream a("workflow\ty1\ty2\na\t1\t2\na\t2\t1\n"), b("workflow\ty1\ty2\na\t1\t2\na\t2\t1\n"),
      c("workflow\ty1\ty2\na\t1\t2\na\t2\t1.0\n");
  const auto da = parse_scores(a).digest;
  CHECK(da == parse_scores(b).digest);
  CHECK(da != parse_scores(c).digest);
  CHECK(da.size() == 16);
  // FNV-1a offset basis for empty input.
  CHECK(content_digest("") == "cbf29ce484222325");
  CHECK(content_digest("a") == "af63dc4c8601ec8c");
}

TEST_CASE("write_scores round trip is exact") {
  std::vector<ScorePairs> w{{"x", {0.1, 1.0 / 3.0, -2e-300}, {3.5, 1e10, 0.2}, {}}};
  std::stringstream ss;
  write_scores(ss, w);
  const auto t = parse_scores(ss);
  REQUIRE(t.workflows.size() == 1);
  CHECK(t.workflows[0].y1 == w[0].y1);
  CHECK(t.workflows[0].y2 == w[0].y2);
}

TEST_CASE("result document layout") {
  ResultDocument doc;
  doc.command = "fit";
  doc.grid = CutoffGrid::equally_spaced(4);
  doc.workflow_ids = {"a"};
  doc.empirical.push_back({{0.25, 0.5, 0.75, 1.0}, {0.0, 0.5, 0.5, 1.0}});
  doc.seed = 3;
  doc.input_digest = "abc";
  const std::string text = render_result_document(doc);
  CHECK(text == render_result_document(doc));
  const auto j = nlohmann::ordered_json::parse(text);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"model", "estimates", "profile", "curves", "tests", "provenance"});
  CHECK(j["provenance"]["seed"] == 3);
  CHECK(j["provenance"]["version"] == std::string(version_string()));
  CHECK(j["curves"][0]["psi_empirical"][1] == 0.5);

  std::ostringstream plot;
  write_plot_data(plot, doc);
  CHECK(plot.str().rfind("workflow\tt\tpsi_empirical\tpsi_fitted\n", 0) == 0);
  CHECK(plot.str().find("a\t0.5\t0.5\tNA\n") != std::string::npos);
}
