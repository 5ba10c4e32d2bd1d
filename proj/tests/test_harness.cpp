#include "polt/harness.hpp"

#include <doctest.h>

#include <filesystem>
#include <sstream>

using namespace polt;
namespace fs = std::filesystem;

namespace {

Json small(const std::string& learner) {
  Json j = {{"generator", {{"kind", "separable"}, {"d", 3}}},
            {"n", 200},
            {"learner", {{"kind", learner}}},
            {"monte_carlo_m", 300},
            {"holdout_m", 200},
            {"seed", 7}};
  if (learner == "metric-ogd") j["generator"] = {{"kind", "clusters"}, {"d", 2}, {"k", 3}};
  if (learner == "oam-finite" || learner == "ogd-finite") j["learner"]["capacity"] = 20;
  return j;
}

}  // namespace

TEST_CASE("config parsing is strict") {
  const ExperimentConfig cfg = parse_config(small("oam-infinite"));
  CHECK(cfg.n == 200);
  CHECK(cfg.generator.d == 3);
  CHECK(*cfg.seed == 7);
  CHECK(cfg.c == 0.1);

  Json j = small("oam-infinite");
  j["nn"] = 3;
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j = small("oam-infinite");
  j["learner"]["capaicty"] = 3;
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j = small("oam-infinite");
  j["generator"]["gama"] = 0.1;
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j = small("oam-infinite");
  j["n"] = "200";
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j = small("oam-infinite");
  j["n"] = -4;
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j = small("oam-infinite");
  j.erase("seed");
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j = small("oam-infinite");
  j["learner"]["capacity"] = 5;
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j = small("oam-finite");
  j["learner"].erase("capacity");
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j = small("lasso");
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j = small("oam-infinite");
  j["delta"] = 0.0;
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j = small("oam-infinite");
  j["oracle"] = "simplex";
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  CHECK_THROWS_AS(parse_config(Json::array()), ConfigError);

  // JSON round trip.
  Json full = small("ogd-finite");
  full["epsilon"] = 0.5;
  full["margin"] = 0.15;
  full["oracle"] = "subgradient";
  full["learner"]["literal_update_sign"] = true;
  const ExperimentConfig a = parse_config(full);
  Json back = config_to_json(a);
  back["generator"]["seed"] = 0;
  const ExperimentConfig b = parse_config(back);
  CHECK(config_to_json(b) == config_to_json(a));
  CHECK(b.oracle_method == OracleMethod::ProjectedSubgradient);
  CHECK(*b.margin == 0.15);
  CHECK(b.literal_update_sign);
}

TEST_CASE("naive-pair baseline updates on even rounds only") {
  Dataset s;
  for (int i = 0; i < 10; ++i) s.push_back({(Vector(1) << (i % 2 == 0 ? 0.5 : -0.5)).finished(), i % 2 == 0 ? 1 : -1});
  const RunTrace tr = run_naive_pair(LearnerConfig{}, s);
  for (std::size_t t = 1; t <= 10; ++t) {
    if (t % 2 == 1) {
      CHECK(tr.hypothesis(t).index() == 0);
      CHECK(std::get<LinearScorer>(tr.hypothesis(t)).w == std::get<LinearScorer>(tr.hypothesis(t - 1)).w);
      CHECK(tr.round(t).loss == 0.0);
    }
    CHECK_FALSE(tr.round(t).statistic.has_value());
  }
  // First pair: w = 0, l = 1, w += y_2 (x_2 - x_1) = -1 * (-1) = 1.
  CHECK(std::get<LinearScorer>(tr.hypothesis(2)).w[0] == 1.0);
  CHECK(tr.round(2).loss == 1.0);
  CHECK(tr.round(4).loss == 0.0);
}

TEST_CASE("verify_bounds reports for every learner") {
  for (const char* name : {"oam-infinite", "oam-finite", "ogd-infinite", "ogd-finite", "perceptron",
                           "metric-ogd", kNaivePair}) {
    CAPTURE(name);
    const VerifyOutcome out = verify_bounds(parse_config(small(name)));
    const Json& r = out.report;
    CHECK(r.at("format") == "polt-report");
    REQUIRE(r.at("repetitions").size() == 1);
    const Json& rep = r.at("repetitions")[0];
    CHECK(rep.at("series").at("cumulative_loss").size() == 200);
    CHECK(out.all_satisfied == r.at("all_bounds_satisfied").get<bool>());
    const std::string n(name);
    if (n.rfind("oam", 0) == 0) {
      CHECK(rep.contains("oam_bound"));
      CHECK(rep.at("oam_bound_satisfied").get<bool>());
      CHECK(rep.contains("risk_selected"));
    }
    if (n == "perceptron") CHECK(rep.at("perceptron_bound_satisfied").get<bool>());
    if (n.find("ogd") != std::string::npos) {
      CHECK(rep.at("regret_bound_satisfied").get<bool>());
      CHECK(rep.at("regret").get<double>() >= -1e-6);
    }
    if (n == "metric-ogd") {
      CHECK(rep.at("iterates_feasible_satisfied").get<bool>());
      CHECK_FALSE(rep.contains("auc_final"));
    } else {
      CHECK(rep.contains("auc_final"));
      CHECK(rep.contains("auc_naive_pair"));
    }
    if (n == kNaivePair) CHECK(rep.contains("auc_oam"));
  }
  Json mismatch = small("metric-ogd");
  mismatch["generator"] = {{"kind", "separable"}};
  CHECK_THROWS_AS(verify_bounds(parse_config(mismatch)), ConfigError);
}

TEST_CASE("reports are deterministic, thread-count independent, and mergeable") {
  Json j = small("ogd-finite");
  j["repetitions"] = 3;
  j["threads"] = 1;
  const Json a = verify_bounds(parse_config(j)).report;
  j["threads"] = 3;
  const Json b = verify_bounds(parse_config(j)).report;
  CHECK(dump_json(a) == dump_json(b));
  CHECK(a.at("aggregate").at("count") == 3);
  CHECK(a.at("repetitions")[0].at("seed") != a.at("repetitions")[1].at("seed"));

  const Json merged = merge_reports({a, b});
  CHECK(merged.at("repetitions").size() == 6);
  CHECK(merged.at("aggregate").at("means").at("regret") == a.at("aggregate").at("means").at("regret"));
  CHECK_THROWS_AS(merge_reports({Json::object()}), ConfigError);
  CHECK_THROWS(merge_reports({}));

  const std::string csv = plot_csv(a);
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  CHECK(line == "t,M_t,cumulative_loss,bound");
  std::getline(is, line);
  CHECK(line.rfind("1,,0,", 0) == 0);  // no statistic on round 1
  std::size_t rows = 1;
  std::string last;
  while (std::getline(is, line)) {
    ++rows;
    last = line;
  }
  CHECK(rows == 200);
  CHECK(last.rfind("200,", 0) == 0);
  CHECK(last.back() != ',');  // the regret bound is filled in at t = n
}

TEST_CASE("data files and sidecars") {
  const fs::path dir(POLT_TEST_TMP);
  fs::create_directories(dir);
  GeneratorSpec spec;
  spec.seed = 12;
  const GeneratedData g = generate(spec, 150);
  const fs::path csv = dir / "stream.csv";
  save_csv(g.data, csv);
  write_generator_meta({spec, 150, g.witness, g.offset}, meta_path_for(csv));
  const GeneratorMeta m = read_generator_meta(meta_path_for(csv));
  CHECK(m.witness == g.witness);
  CHECK(m.spec.seed == 12);
  CHECK(meta_path_for(csv).string() == csv.string() + ".meta.json");

  Json j = {{"data", csv.string()}, {"learner", {{"kind", "oam-infinite"}}}, {"monte_carlo_m", 100},
            {"holdout_m", 100}};
  const ExperimentConfig cfg = parse_config(j);
  CHECK(*cfg.seed == 12);
  const Json rep = verify_bounds(cfg).report.at("repetitions")[0];
  CHECK(rep.at("n") == 150);
  CHECK(rep.at("oam_bound_satisfied").get<bool>());
  j["repetitions"] = 2;
  CHECK_THROWS_AS(parse_config(j), ConfigError);

  write_text_file(dir / "bad.json", "{not json");
  CHECK_THROWS_AS(read_json_file(dir / "bad.json"), ConfigError);
  CHECK(dump_json(Json{{"a", 1}}) == "{\n  \"a\": 1\n}\n");
}
