// polt: command-line front-end.
//
// Exit codes: 0 success, 1 usage / schema / missing input, 2 runtime
// failure, 3 verify-bounds found a violated bound.

#include "polt/datagen.hpp"
#include "polt/eval.hpp"
#include "polt/harness.hpp"
#include "polt/learners.hpp"
#include "polt/parallel.hpp"
#include "polt/selection.hpp"
#include "polt/trace_io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using polt::Json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw UsageError(std::string("missing --") + what);
  if (!fs::exists(path)) throw UsageError(std::string(what) + " file not found: " + path);
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    polt::write_text_file(out, text);
  }
}

struct GenerateArgs {
  std::string kind = "separable";
  double gamma = 0.2;
  std::size_t n = 0;
  std::size_t d = 5;
  double R = 1.0;
  std::optional<std::uint64_t> seed;
  double flip = 0.0;
  double balance = 0.5;
  double offset = 0.0;
  std::size_t k = 3;
  double spread = 0.1;
  std::string out;
};

int run_generate(const GenerateArgs& a) {
  if (!a.seed) throw UsageError("generate: --seed is required");
  if (a.out.empty()) throw UsageError("generate: --out is required");
  polt::GeneratorSpec spec;
  try {
    spec.kind = polt::generator_kind_from_string(a.kind);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  spec.gamma = a.gamma;
  spec.d = a.d;
  spec.R = a.R;
  spec.seed = *a.seed;
  spec.flip_prob = a.flip;
  spec.balance = a.balance;
  spec.max_offset = a.offset;
  spec.k = a.k;
  spec.spread = a.spread;
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const polt::GeneratedData g = polt::generate(spec, a.n);
  polt::save_csv(g.data, a.out);
  polt::write_generator_meta({spec, a.n, g.witness, g.offset}, polt::meta_path_for(a.out));
  return 0;
}

struct TrainArgs {
  std::string learner = "oam-infinite";
  std::optional<std::size_t> buffer;
  std::string strategy = "fifo";
  std::string data;
  std::string out;
  std::optional<double> R;
  double U = 1.0;
  std::size_t T = 0;
  std::uint64_t seed = 0;
  double c = 0.1;
  std::size_t stride = 1;
  bool literal_sign = false;
  bool literal_normalizer = false;
};

// Learner R when none is given: the generator radius from the sidecar, or
// the largest norm in the data. Doubled for metric learning.
double default_radius(const std::string& data, const polt::Dataset& stream, bool metric) {
  double r = 0.0;
  const fs::path meta = polt::meta_path_for(data);
  if (fs::exists(meta)) {
    r = polt::read_generator_meta(meta).spec.R;
  } else {
    for (const auto& z : stream) r = std::max(r, z.x.norm());
  }
  if (r <= 0.0) r = 1.0;
  return metric ? 2.0 * r : r;
}

int run_train(const TrainArgs& a) {
  require_file(a.data, "data");
  if (a.out.empty()) throw UsageError("train: --out is required");
  if (a.learner == polt::kNaivePair) throw UsageError("train: naive-pair is only available in verify-bounds");
  polt::LearnerConfig cfg;
  try {
    cfg.kind = polt::learner_kind_from_string(a.learner);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const polt::Dataset stream = polt::load_csv(a.data);
  cfg.R = a.R ? *a.R : default_radius(a.data, stream, cfg.kind == polt::LearnerKind::MetricOgd);
  cfg.U = a.U;
  cfg.T = a.T;
  cfg.capacity = a.buffer;
  if (a.strategy == "reservoir") {
    cfg.finite_strategy = polt::BufferStrategy::Reservoir;
  } else if (a.strategy != "fifo") {
    throw UsageError("train: --strategy must be fifo or reservoir");
  }
  cfg.seed = a.seed;
  cfg.c = a.c;
  cfg.snapshot_stride = a.stride;
  cfg.literal_update_sign = a.literal_sign;
  cfg.literal_buffer_normalizer = a.literal_normalizer;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  polt::TraceFile file{cfg, stream, polt::run_online(cfg, stream)};
  polt::write_trace(file, a.out);
  return 0;
}

struct SelectArgs {
  std::string trace;
  std::optional<double> c;
  double delta = 0.05;
  std::optional<double> epsilon;
  std::string loss;
  std::string out;
};

polt::LossKind resolve_loss(const std::string& name, const polt::LearnerConfig& cfg) {
  if (name.empty()) return cfg.loss();
  polt::LossTag tag;
  try {
    tag = polt::loss_tag_from_string(name);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  switch (tag) {
    case polt::LossTag::Misranking: return polt::LossKind::misranking();
    case polt::LossTag::BoundedHinge: return polt::LossKind::bounded_hinge();
    case polt::LossTag::SquaredPairwise: return polt::LossKind::squared_pairwise();
    case polt::LossTag::NormalizedHinge: return polt::LossKind::normalized_hinge(cfg.R, cfg.U);
    case polt::LossTag::MetricHinge: return polt::LossKind::metric_hinge(cfg.R, cfg.U);
  }
  return cfg.loss();
}

int run_select(const SelectArgs& a) {
  require_file(a.trace, "trace");
  const polt::TraceFile file = polt::read_trace(a.trace);
  if (!file.config.is_pairwise()) throw UsageError("select: the perceptron trace carries no pairwise statistic");
  const double c = a.c.value_or(file.config.c);
  const std::size_t n = file.stream.size();
  double delta = a.delta;
  if (a.epsilon) {
    delta = polt::delta_for_epsilon(n, c, *a.epsilon);
    if (!(delta > 0.0 && delta <= 1.0)) throw UsageError("select: --epsilon gives delta outside (0, 1]");
  }
  const polt::LossKind loss = resolve_loss(a.loss, file.config);
  const polt::SelectionResult res =
      polt::select_hypothesis(file.trace, file.stream, loss, c, delta, polt::worker_count());
  Json j = polt::selection_to_json(res);
  j["statistic_mean"] = polt::aggregate_stat(file.trace, c);
  emit(polt::dump_json(j), a.out);
  return 0;
}

struct EvaluateArgs {
  std::string trace;
  std::string data;
  std::optional<std::size_t> index;
  std::vector<std::string> losses;
  std::string out;
};

int run_evaluate(const EvaluateArgs& a) {
  require_file(a.trace, "trace");
  require_file(a.data, "data");
  const polt::TraceFile file = polt::read_trace(a.trace);
  const polt::Dataset holdout = polt::load_csv(a.data);
  const std::size_t index = a.index.value_or(file.stream.size());
  if (!file.trace.has_hypothesis(index)) {
    throw UsageError("evaluate: the trace holds no hypothesis " + std::to_string(index));
  }
  const polt::Hypothesis& h = file.trace.hypothesis(index);
  Json j = {{"index", index}, {"m", holdout.size()}};
  if (const auto* lin = std::get_if<polt::LinearScorer>(&h)) {
    const polt::AucDetail auc = polt::auc_detail(*lin, holdout);
    j["auc"] = auc.auc;
    j["auc_ties_as_correct"] = auc.ties_as_correct;
    j["tied_pairs"] = auc.tied_pairs;
  }
  std::vector<std::string> names = a.losses;
  if (names.empty()) names.push_back(polt::to_string(file.config.loss().tag));
  Json risks = Json::object();
  for (const std::string& name : names) {
    const polt::RiskEstimate r = polt::risk_on_sample(h, holdout, resolve_loss(name, file.config));
    risks[name] = {{"estimate", r.estimate}, {"standard_error", r.standard_error}};
  }
  j["risk"] = std::move(risks);
  emit(polt::dump_json(j), a.out);
  return 0;
}

struct ReportArgs {
  std::vector<std::string> inputs;
  std::string out;
  std::string csv;
};

int run_report(const ReportArgs& a) {
  if (a.inputs.empty()) throw UsageError("report: at least one --inputs file is required");
  std::vector<Json> reports;
  for (const std::string& path : a.inputs) {
    require_file(path, "inputs");
    reports.push_back(polt::read_json_file(path));
  }
  const Json merged = polt::merge_reports(reports);
  Json summary = merged;
  for (Json& rep : summary["repetitions"]) rep.erase("series");
  emit(polt::dump_json(summary), a.out);
  if (!a.csv.empty()) polt::write_text_file(a.csv, polt::plot_csv(merged));
  return 0;
}

// Flags given on the command line, written into the config JSON over
// whatever the file said.
struct VerifyArgs {
  std::string config;
  std::string out;
  std::string plot;
  Json overrides = Json::object();
};

int run_verify(const VerifyArgs& a) {
  Json j = Json::object();
  if (!a.config.empty()) {
    require_file(a.config, "config");
    j = polt::read_json_file(a.config);
    if (!j.is_object()) throw polt::ConfigError(a.config + ": expected a JSON object");
  }
  if (a.overrides.contains("data")) require_file(a.overrides.at("data").get<std::string>(), "data");
  j.merge_patch(a.overrides);
  if (j.contains("data") && j.at("data").is_string() && !j.at("data").get<std::string>().empty()) {
    require_file(j.at("data").get<std::string>(), "data");
  }
  const polt::ExperimentConfig cfg = polt::parse_config(j);
  const polt::VerifyOutcome outcome = polt::verify_bounds(cfg);
  std::string out = a.out;
  if (out.empty() && !cfg.output_dir.empty()) out = (fs::path(cfg.output_dir) / "report.json").string();
  emit(polt::dump_json(outcome.report), out);
  if (!a.plot.empty()) polt::write_text_file(a.plot, polt::plot_csv(outcome.report));
  if (!outcome.all_satisfied) {
    std::cerr << "verify-bounds: at least one bound was violated\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online learning with pairwise losses: training, model selection and bound checks"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Write a synthetic stream as CSV (plus a .meta.json sidecar)");
  g->add_option("--kind", gen.kind, "separable | noisy | clusters");
  g->add_option("--gamma", gen.gamma, "Pairwise margin");
  g->add_option("--n", gen.n, "Number of examples")->required();
  g->add_option("--d", gen.d, "Dimension");
  g->add_option("--R", gen.R, "Feature radius");
  g->add_option("--seed", gen.seed, "Seed")->required();
  g->add_option("--flip", gen.flip, "Label flip probability (noisy)");
  g->add_option("--balance", gen.balance, "Probability of a positive label");
  g->add_option("--offset", gen.offset, "Largest hyperplane offset |b|");
  g->add_option("--k", gen.k, "Clusters");
  g->add_option("--spread", gen.spread, "Cluster standard deviation");
  g->add_option("--out", gen.out, "Output CSV")->required();

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Run an online learner and write a trace file");
  t->add_option("--learner", tr.learner, "oam-infinite | oam-finite | ogd-infinite | ogd-finite | perceptron | metric-ogd");
  t->add_option("--buffer", tr.buffer, "Buffer capacity (finite learners)");
  t->add_option("--strategy", tr.strategy, "fifo | reservoir");
  t->add_option("--data", tr.data, "Input CSV")->required();
  t->add_option("--out", tr.out, "Trace file")->required();
  t->add_option("--R", tr.R, "Feature radius (default: from the data)");
  t->add_option("--U", tr.U, "Hypothesis radius");
  t->add_option("--T", tr.T, "Horizon for the learning rate (default: n)");
  t->add_option("--seed", tr.seed, "Seed (reservoir buffer)");
  t->add_option("--c", tr.c, "Window fraction, for sparse snapshots");
  t->add_option("--stride", tr.stride, "Keep every k-th snapshot plus the selection window");
  t->add_flag("--literal-sign", tr.literal_sign, "Projected-gradient ranking update with the printed sign");
  t->add_flag("--literal-normalizer", tr.literal_normalizer, "Finite-buffer ranking update normalized by t-1");

  SelectArgs se;
  auto* s = app.add_subcommand("select", "Penalized suffix-risk model selection over a trace");
  s->add_option("--trace", se.trace, "Trace file")->required();
  s->add_option("--c", se.c, "Window fraction (default: the trace's)");
  s->add_option("--delta", se.delta, "Confidence level");
  s->add_option("--epsilon", se.epsilon, "Target deviation; overrides --delta");
  s->add_option("--loss", se.loss, "Loss (default: the learner's)");
  s->add_option("--out", se.out, "Output JSON (default: stdout)");

  VerifyArgs ve;
  auto* v = app.add_subcommand("verify-bounds", "Run the bound battery and write a JSON report");
  v->add_option("--config", ve.config, "Experiment config (JSON)");
  v->add_option("--out", ve.out, "Report path (default: <output_dir>/report.json or stdout)");
  v->add_option("--plot", ve.plot, "Also write plot CSV");
  // name, JSON pointer, kind: 0 string, 1 number, 2 count, 3 flag
  struct Override {
    const char* flag;
    const char* pointer;
    int type;
    const char* help;
  };
  const std::vector<Override> table = {
      {"--learner", "/learner/kind", 0, "Learner kind or naive-pair"},
      {"--buffer", "/learner/capacity", 2, "Buffer capacity"},
      {"--strategy", "/learner/strategy", 0, "fifo | reservoir"},
      {"--learner-R", "/learner/R", 1, "Learner radius"},
      {"--U", "/learner/U", 1, "Hypothesis radius"},
      {"--T", "/learner/T", 2, "Learning-rate horizon"},
      {"--stride", "/learner/snapshot_stride", 2, "Snapshot stride"},
      {"--kind", "/generator/kind", 0, "Generator kind"},
      {"--gamma", "/generator/gamma", 1, "Generator margin"},
      {"--d", "/generator/d", 2, "Dimension"},
      {"--R", "/generator/R", 1, "Feature radius"},
      {"--flip", "/generator/flip_prob", 1, "Label flip probability"},
      {"--balance", "/generator/balance", 1, "Positive-label probability"},
      {"--offset", "/generator/max_offset", 1, "Largest hyperplane offset"},
      {"--k", "/generator/k", 2, "Clusters"},
      {"--spread", "/generator/spread", 1, "Cluster standard deviation"},
      {"--n", "/n", 2, "Stream length"},
      {"--data", "/data", 0, "Existing CSV stream"},
      {"--seed", "/seed", 2, "Seed"},
      {"--reps", "/repetitions", 2, "Repetitions"},
      {"--c", "/c", 1, "Window fraction"},
      {"--delta", "/delta", 1, "Confidence level"},
      {"--epsilon", "/epsilon", 1, "Target deviation (derives delta)"},
      {"--mc", "/monte_carlo_m", 2, "Monte Carlo sample size"},
      {"--holdout", "/holdout_m", 2, "Holdout size"},
      {"--margin", "/margin", 1, "Comparator margin"},
      {"--oracle", "/oracle", 0, "ellipsoid | subgradient"},
      {"--output-dir", "/output_dir", 0, "Output directory"},
      {"--threads", "/threads", 2, "Worker cap"},
  };
  std::vector<std::string> strings(table.size());
  std::vector<double> numbers(table.size());
  std::vector<std::uint64_t> counts(table.size());
  std::vector<CLI::Option*> opts;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const Override& o = table[i];
    if (o.type == 0) opts.push_back(v->add_option(o.flag, strings[i], o.help));
    if (o.type == 1) opts.push_back(v->add_option(o.flag, numbers[i], o.help));
    if (o.type == 2) opts.push_back(v->add_option(o.flag, counts[i], o.help));
  }
  bool literal_sign = false;
  bool literal_normalizer = false;
  auto* ls = v->add_flag("--literal-sign", literal_sign, "Printed-sign ranking update");
  auto* ln = v->add_flag("--literal-normalizer", literal_normalizer, "t-1 normalizer for the finite ranking update");

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "Holdout AUC and risk of a trace hypothesis");
  e->add_option("--trace", ev.trace, "Trace file")->required();
  e->add_option("--data", ev.data, "Holdout CSV")->required();
  e->add_option("--index", ev.index, "Hypothesis index (default: final)");
  e->add_option("--loss", ev.losses, "Loss names (repeatable)");
  e->add_option("--out", ev.out, "Output JSON (default: stdout)");

  ReportArgs rp;
  auto* r = app.add_subcommand("report", "Merge verify-bounds reports into a summary and plot CSV");
  r->add_option("--inputs", rp.inputs, "Report files")->required();
  r->add_option("--out", rp.out, "Summary JSON (default: stdout)");
  r->add_option("--csv", rp.csv, "Plot CSV (t, M_t, cumulative loss, bound)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return 1;
  }

  try {
    if (g->parsed()) return run_generate(gen);
    if (t->parsed()) return run_train(tr);
    if (s->parsed()) return run_select(se);
    if (e->parsed()) return run_evaluate(ev);
    if (r->parsed()) return run_report(rp);
    if (v->parsed()) {
      for (std::size_t i = 0; i < table.size(); ++i) {
        if (opts[i]->count() == 0) continue;
        const Json::json_pointer ptr(table[i].pointer);
        if (table[i].type == 0) ve.overrides[ptr] = strings[i];
        if (table[i].type == 1) ve.overrides[ptr] = numbers[i];
        if (table[i].type == 2) ve.overrides[ptr] = counts[i];
      }
      if (ls->count() > 0) ve.overrides["/learner/literal_update_sign"_json_pointer] = literal_sign;
      if (ln->count() > 0) ve.overrides["/learner/literal_buffer_normalizer"_json_pointer] = literal_normalizer;
      return run_verify(ve);
    }
  } catch (const UsageError& err) {
    std::cerr << "polt: " << err.what() << '\n';
    return 1;
  } catch (const polt::ConfigError& err) {
    std::cerr << "polt: " << err.what() << '\n';
    return 1;
  } catch (const polt::FormatError& err) {
    std::cerr << "polt: " << err.what() << '\n';
    return 1;
  } catch (const polt::TraceFormatError& err) {
    std::cerr << "polt: " << err.what() << '\n';
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "polt: " << err.what() << '\n';
    return 2;
  }
  return 1;
}
