#include "polt/harness.hpp"

#include "polt/bounds.hpp"
#include "polt/buffers.hpp"
#include "polt/eval.hpp"
#include "polt/losses.hpp"
#include "polt/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace polt {

namespace {

constexpr std::uint64_t kLearnerSalt = 11;
constexpr std::uint64_t kHoldoutSalt = 101;
constexpr std::uint64_t kMonteCarloSalt = 202;
constexpr std::uint64_t kOracleSalt = 303;
constexpr double kSlackEps = 1e-9;

std::string strategy_name(BufferStrategy s) {
  switch (s) {
    case BufferStrategy::Infinite: return "infinite";
    case BufferStrategy::Fifo: return "fifo";
    case BufferStrategy::Reservoir: return "reservoir";
  }
  return "fifo";
}

BufferStrategy strategy_from_name(const std::string& name) {
  if (name == "fifo") return BufferStrategy::Fifo;
  if (name == "reservoir") return BufferStrategy::Reservoir;
  throw ConfigError("learner.strategy: expected 'fifo' or 'reservoir', got '" + name + "'");
}

std::string oracle_name(OracleMethod m) { return m == OracleMethod::Ellipsoid ? "ellipsoid" : "subgradient"; }

OracleMethod oracle_from_name(const std::string& name) {
  if (name == "ellipsoid") return OracleMethod::Ellipsoid;
  if (name == "subgradient") return OracleMethod::ProjectedSubgradient;
  throw ConfigError("oracle: expected 'ellipsoid' or 'subgradient', got '" + name + "'");
}

// Typed, strict access to one JSON object. finish() rejects keys nobody read.
class Fields {
 public:
  Fields(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  double number(const std::string& key, double def) {
    if (!has(key)) return def;
    const Json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(path(key) + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path(key) + ": must be finite");
    return x;
  }

  std::uint64_t count(const std::string& key, std::uint64_t def) {
    if (!has(key)) return def;
    const Json& v = j_.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    throw ConfigError(path(key) + ": expected a non-negative integer");
  }

  bool flag(const std::string& key, bool def) {
    if (!has(key)) return def;
    const Json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(path(key) + ": expected true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& def) {
    if (!has(key)) return def;
    const Json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(path(key) + ": expected a string");
    return v.get<std::string>();
  }

  const Json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(path(it.key()) + ": unknown key");
    }
  }

 private:
  std::string path(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }

  const Json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Json estimate_json(const RiskEstimate& e) {
  return {{"estimate", e.estimate}, {"standard_error", e.standard_error}, {"m", e.m}};
}

Json tail_json(const RiskStatement& s) {
  return {{"risk_level", s.risk_level},
          {"tail", s.tail.value},
          {"tail_log", s.tail.log_raw},
          {"n_sufficient", s.tail.n_sufficient}};
}

// Prefix sums of the comparator's per-round pairwise hinge loss over the
// learner's own buffer, so buffered learners get the buffered comparator.
std::vector<double> comparator_prefix(const LearnerConfig& cfg, std::span<const Example> stream, const Vector& u,
                                      double gamma) {
  std::vector<double> prefix(stream.size() + 1, 0.0);
  HistoryBuffer buffer = cfg.make_buffer();
  for (std::size_t t = 1; t <= stream.size(); ++t) {
    const Example& zt = stream[t - 1];
    double round = 0.0;
    const auto hist = buffer.contents();
    if (!hist.empty()) {
      for (const Example& zj : hist) {
        if (zt.y == zj.y) continue;
        round += std::max(gamma - static_cast<double>(zt.y) * u.dot(zt.x - zj.x), 0.0);
      }
      round /= static_cast<double>(hist.size());
    }
    prefix[t] = prefix[t - 1] + round;
    buffer.insert(zt);
  }
  return prefix;
}

bool both_classes(std::span<const Example> data) {
  bool pos = false;
  bool neg = false;
  for (const Example& z : data) {
    pos = pos || z.y == 1;
    neg = neg || z.y == -1;
  }
  return pos && neg;
}

Json auc_or_null(const Hypothesis& h, std::span<const Example> holdout) {
  if (!both_classes(holdout)) return nullptr;
  return auc(std::get<LinearScorer>(h), holdout);
}

struct RepetitionResult {
  Json report;
  bool satisfied = true;
};

RepetitionResult run_repetition(const ExperimentConfig& cfg, std::size_t r) {
  const std::uint64_t rep_seed = derive_seed(*cfg.seed, r);
  Dataset stream;
  std::optional<Generator> gen;
  Vector witness;
  if (!cfg.data.empty()) {
    stream = load_csv(cfg.data);
    const GeneratorMeta meta = read_generator_meta(meta_path_for(cfg.data));
    gen.emplace(meta.spec);
    witness = meta.witness;
  } else {
    GeneratorSpec spec = cfg.generator;
    spec.seed = rep_seed;
    GeneratedData g = generate(spec, cfg.n);
    stream = std::move(g.data);
    gen.emplace(spec);
    witness = std::move(g.witness);
  }
  const GeneratorSpec& gspec = gen->spec();
  const std::size_t n = stream.size();
  if (n < 2) throw std::runtime_error("verify-bounds: stream must contain at least 2 examples");

  LearnerConfig lc = cfg.learner_config();
  if (!cfg.learner_R) lc.R = lc.kind == LearnerKind::MetricOgd ? 2.0 * gspec.R : gspec.R;
  lc.seed = derive_seed(rep_seed, kLearnerSalt);
  lc.T = cfg.T == 0 ? n : cfg.T;
  const bool metric = lc.kind == LearnerKind::MetricOgd;
  if (metric != (gspec.kind == GeneratorKind::GaussianClusters)) {
    throw ConfigError("learner " + cfg.learner + " does not fit generator kind " + to_string(gspec.kind));
  }
  const double gamma = cfg.margin.value_or(gspec.gamma);
  const double eps = cfg.epsilon.value_or(0.1);
  const std::size_t d = static_cast<std::size_t>(stream.front().x.size());

  const RunTrace trace = cfg.naive_pair() ? run_naive_pair(lc, stream) : run_online(lc, stream);

  Json rep;
  rep["repetition"] = r;
  rep["seed"] = rep_seed;
  rep["n"] = n;
  rep["learner"] = cfg.learner;
  rep["cumulative_loss"] = trace.cumulative_loss();
  rep["mistakes"] = trace.mistakes();
  rep["radius_violations"] = trace.radius_violations;
  bool satisfied = true;

  std::vector<Json> bound_series(n + 1, nullptr);
  const bool pairwise = lc.is_pairwise() && !cfg.naive_pair();

  if (pairwise) rep["statistic_mean"] = aggregate_stat(trace, cfg.c);

  if (!cfg.naive_pair() && (lc.kind == LearnerKind::OamInfinite || lc.kind == LearnerKind::OamFinite)) {
    const auto prefix = comparator_prefix(lc, stream, witness, gamma);
    const double m_star = prefix[n];
    const double bound = oam_mistake_bound(lc.R, gamma, m_star);
    rep["margin"] = gamma;
    rep["m_star"] = m_star;
    rep["oam_bound"] = bound;
    rep["oam_bound_satisfied"] = trace.cumulative_loss() <= bound + kSlackEps;
    satisfied = satisfied && rep["oam_bound_satisfied"].get<bool>();
    for (std::size_t t = 1; t <= n; ++t) bound_series[t] = oam_mistake_bound(lc.R, gamma, prefix[t]);
    rep["risk_statement"] = tail_json(oam_risk_statement(n, cfg.c, eps, d, lc.R, gamma, m_star, lc.capacity));
  } else if (lc.kind == LearnerKind::Perceptron) {
    // The classification comparator sees half the pairwise margin.
    const double half = 0.5 * gamma;
    const double d1 = perceptron_hinge_total(stream, witness, half);
    const double bound = perceptron_mistake_bound(lc.R, half, d1);
    rep["margin"] = half;
    rep["d1"] = d1;
    rep["perceptron_bound"] = bound;
    rep["perceptron_bound_satisfied"] = static_cast<double>(trace.mistakes()) <= bound + kSlackEps;
    satisfied = satisfied && rep["perceptron_bound_satisfied"].get<bool>();
    double prefix = 0.0;
    for (std::size_t t = 1; t <= n; ++t) {
      const Example& z = stream[t - 1];
      prefix += std::max(half - static_cast<double>(z.y) * witness.dot(z.x), 0.0);
      bound_series[t] = perceptron_mistake_bound(lc.R, half, prefix);
    }
  } else if (lc.is_convex()) {
    OracleOptions opt;
    opt.method = cfg.oracle_method;
    opt.seed = derive_seed(rep_seed, kOracleSalt);
    const OracleResult oracle = batch_oracle(stream, lc, opt);
    const double reg = regret(trace, oracle.value);
    const double bound = ogd_regret_bound(1.0 / lc.U, lc.U, lc.T);
    rep["oracle_value"] = oracle.value;
    rep["oracle_lower_bound"] = oracle.lower_bound;
    rep["oracle_slack"] = oracle.slack();
    rep["regret"] = reg;
    rep["regret_bound"] = bound;
    rep["regret_bound_satisfied"] = reg <= bound + oracle.slack() + kSlackEps;
    satisfied = satisfied && rep["regret_bound_satisfied"].get<bool>();
    bound_series[n] = oracle.value + bound;
    rep["risk_statement"] = tail_json(ogd_risk_statement(n, cfg.c, eps, d, lc.R, oracle.value));
    if (metric) {
      double max_norm = 0.0;
      double min_eig = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i <= n; ++i) {
        if (!trace.has_hypothesis(i)) continue;
        const Matrix& a = std::get<MetricMatrix>(trace.hypothesis(i)).a;
        max_norm = std::max(max_norm, a.norm());
        Eigen::SelfAdjointEigenSolver<Matrix> eig(a, Eigen::EigenvaluesOnly);
        min_eig = std::min(min_eig, eig.eigenvalues().minCoeff());
      }
      rep["max_frobenius_norm"] = max_norm;
      rep["min_eigenvalue"] = min_eig;
      rep["iterates_feasible_satisfied"] = max_norm <= lc.U * (1.0 + 1e-9) && min_eig >= -1e-9;
      satisfied = satisfied && rep["iterates_feasible_satisfied"].get<bool>();
    }
  }

  Hypothesis scored = trace.hypothesis(n);
  if (pairwise) {
    const double delta = cfg.epsilon ? delta_for_epsilon(n, cfg.c, *cfg.epsilon) : cfg.delta;
    if (!(delta > 0.0 && delta <= 1.0)) {
      throw std::runtime_error("verify-bounds: epsilon gives confidence level delta = " + std::to_string(delta) +
                               ", outside (0, 1]");
    }
    const LossKind loss = lc.loss();
    const SelectionResult sel = select_hypothesis(trace, stream, loss, cfg.c, delta);
    const Hypothesis& chosen = trace.hypothesis(sel.chosen);
    const Hypothesis avg = average_hypothesis(trace, cfg.c);
    const std::uint64_t mc_seed = derive_seed(rep_seed, kMonteCarloSalt);
    rep["delta"] = delta;
    rep["selected_t"] = sel.chosen;
    rep["selection_value"] = sel.value;
    rep["risk_selected"] = estimate_json(monte_carlo_risk(chosen, *gen, cfg.monte_carlo_m, loss, mc_seed));
    rep["risk_average"] = estimate_json(monte_carlo_risk(avg, *gen, cfg.monte_carlo_m, loss, mc_seed));
    if (!metric) {
      const Dataset holdout = gen->sample(cfg.holdout_m, derive_seed(rep_seed, kHoldoutSalt));
      rep["auc_selected"] = auc_or_null(chosen, holdout);
      rep["auc_average"] = auc_or_null(avg, holdout);
    }
    scored = chosen;
  }
  if (!metric) {
    const Dataset holdout = gen->sample(cfg.holdout_m, derive_seed(rep_seed, kHoldoutSalt));
    rep["auc_final"] = auc_or_null(trace.hypothesis(n), holdout);
    LearnerConfig oam = lc;
    oam.kind = LearnerKind::OamInfinite;
    oam.capacity.reset();
    oam.snapshot_stride = 1;
    if (cfg.naive_pair()) {
      rep["auc_oam"] = auc_or_null(run_online(oam, stream).hypothesis(n), holdout);
      rep["auc_naive_pair"] = rep["auc_final"];
    } else {
      rep["auc_naive_pair"] = auc_or_null(run_naive_pair(oam, stream).hypothesis(n), holdout);
    }
  }

  Json stat = Json::array();
  Json cum = Json::array();
  Json bnd = Json::array();
  double running = 0.0;
  for (std::size_t t = 1; t <= n; ++t) {
    const RoundRecord& rec = trace.round(t);
    running += rec.loss;
    stat.push_back(rec.statistic ? Json(*rec.statistic) : Json(nullptr));
    cum.push_back(running);
    bnd.push_back(bound_series[t]);
  }
  rep["series"] = {{"statistic", std::move(stat)}, {"cumulative_loss", std::move(cum)}, {"bound", std::move(bnd)}};
  rep["bounds_satisfied"] = satisfied;
  return {std::move(rep), satisfied};
}

// Means of every numeric scalar shared by all repetitions (nested
// estimate objects included), plus counts of the *_satisfied flags.
Json aggregate(const Json& reps) {
  Json out = Json::object();
  if (reps.empty()) return out;
  std::map<std::string, std::pair<double, std::size_t>> sums;
  std::map<std::string, std::pair<std::size_t, std::size_t>> flags;
  for (const Json& rep : reps) {
    for (auto it = rep.begin(); it != rep.end(); ++it) {
      const std::string& key = it.key();
      if (key == "series" || key == "repetition" || key == "seed") continue;
      const Json& v = it.value();
      if (v.is_boolean()) {
        auto& f = flags[key];
        f.first += v.get<bool>() ? 1 : 0;
        f.second += 1;
      } else if (v.is_number()) {
        auto& s = sums[key];
        s.first += v.get<double>();
        s.second += 1;
      } else if (v.is_object() && v.contains("estimate")) {
        auto& s = sums[key + ".estimate"];
        s.first += v.at("estimate").get<double>();
        s.second += 1;
      }
    }
  }
  Json means = Json::object();
  for (const auto& [key, s] : sums) {
    if (s.second == reps.size()) means[key] = s.first / static_cast<double>(s.second);
  }
  Json counts = Json::object();
  bool all = true;
  for (const auto& [key, f] : flags) {
    counts[key] = {{"true", f.first}, {"total", f.second}};
    if (key.size() > 10 && key.compare(key.size() - 10, 10, "_satisfied") == 0) all = all && f.first == f.second;
  }
  out["count"] = reps.size();
  out["means"] = std::move(means);
  out["flags"] = std::move(counts);
  out["all_bounds_satisfied"] = all;
  return out;
}

Json report_config(const ExperimentConfig& cfg) {
  Json j = config_to_json(cfg);
  j.erase("threads");
  j.erase("output_dir");
  return j;
}

}  // namespace

LearnerConfig ExperimentConfig::learner_config() const {
  LearnerConfig lc;
  lc.kind = naive_pair() ? LearnerKind::OamInfinite : learner_kind_from_string(learner);
  lc.R = learner_R.value_or(lc.kind == LearnerKind::MetricOgd ? 2.0 * generator.R : generator.R);
  lc.U = U;
  lc.T = T;
  lc.capacity = lc.is_finite() ? capacity : std::nullopt;
  lc.finite_strategy = strategy;
  lc.literal_update_sign = literal_update_sign;
  lc.literal_buffer_normalizer = literal_buffer_normalizer;
  lc.snapshot_stride = snapshot_stride;
  lc.c = c;
  return lc;
}

void ExperimentConfig::validate() const {
  if (!naive_pair()) {
    try {
      (void)learner_kind_from_string(learner);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("learner.kind: ") + e.what());
    }
  }
  LearnerConfig lc = learner_config();
  if (capacity && !lc.is_finite()) throw ConfigError("learner.capacity: only finite-buffer learners take a capacity");
  try {
    lc.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("learner: ") + e.what());
  }
  if (data.empty()) {
    try {
      generator.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    if (n < 2) throw ConfigError("n: must be at least 2");
    if (!seed) throw ConfigError("seed: required");
  } else if (repetitions != 1) {
    throw ConfigError("repetitions: a data file supports exactly one repetition");
  }
  if (!(c > 0.0 && c < 1.0)) throw ConfigError("c: must lie in (0, 1)");
  if (!(delta > 0.0 && delta <= 1.0)) throw ConfigError("delta: must lie in (0, 1]");
  if (epsilon && !(*epsilon > 0.0)) throw ConfigError("epsilon: must be positive");
  if (repetitions == 0) throw ConfigError("repetitions: must be positive");
  if (monte_carlo_m < 2) throw ConfigError("monte_carlo_m: must be at least 2");
  if (holdout_m < 2) throw ConfigError("holdout_m: must be at least 2");
  if (margin && !(*margin > 0.0)) throw ConfigError("margin: must be positive");
}

Json generator_to_json(const GeneratorSpec& s) {
  return {{"kind", to_string(s.kind)}, {"d", s.d},        {"R", s.R},
          {"balance", s.balance},      {"gamma", s.gamma}, {"flip_prob", s.flip_prob},
          {"max_offset", s.max_offset}, {"k", s.k},        {"spread", s.spread},
          {"seed", s.seed}};
}

GeneratorSpec generator_from_json(const Json& j) {
  Fields f(j, "generator");
  GeneratorSpec s;
  try {
    s.kind = generator_kind_from_string(f.text("kind", to_string(s.kind)));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("generator.kind: ") + e.what());
  }
  s.d = f.count("d", s.d);
  s.R = f.number("R", s.R);
  s.balance = f.number("balance", s.balance);
  s.gamma = f.number("gamma", s.gamma);
  s.flip_prob = f.number("flip_prob", s.flip_prob);
  s.max_offset = f.number("max_offset", s.max_offset);
  s.k = f.count("k", s.k);
  s.spread = f.number("spread", s.spread);
  s.seed = f.count("seed", s.seed);
  f.finish();
  return s;
}

ExperimentConfig parse_config(const Json& j) {
  Fields f(j, "");
  ExperimentConfig cfg;
  if (f.has("generator")) {
    cfg.generator = generator_from_json(f.raw("generator"));
  }
  cfg.n = f.count("n", cfg.n);
  if (f.has("learner")) {
    Fields l(f.raw("learner"), "learner");
    cfg.learner = l.text("kind", cfg.learner);
    if (l.has("R")) cfg.learner_R = l.number("R", 1.0);
    cfg.U = l.number("U", cfg.U);
    cfg.T = l.count("T", cfg.T);
    if (l.has("capacity")) cfg.capacity = l.count("capacity", 0);
    cfg.strategy = strategy_from_name(l.text("strategy", strategy_name(cfg.strategy)));
    cfg.literal_update_sign = l.flag("literal_update_sign", cfg.literal_update_sign);
    cfg.literal_buffer_normalizer = l.flag("literal_buffer_normalizer", cfg.literal_buffer_normalizer);
    cfg.snapshot_stride = l.count("snapshot_stride", cfg.snapshot_stride);
    l.finish();
  }
  cfg.c = f.number("c", cfg.c);
  cfg.delta = f.number("delta", cfg.delta);
  if (f.has("epsilon")) cfg.epsilon = f.number("epsilon", 0.1);
  cfg.repetitions = f.count("repetitions", cfg.repetitions);
  cfg.monte_carlo_m = f.count("monte_carlo_m", cfg.monte_carlo_m);
  cfg.holdout_m = f.count("holdout_m", cfg.holdout_m);
  if (f.has("margin")) cfg.margin = f.number("margin", 0.0);
  cfg.oracle_method = oracle_from_name(f.text("oracle", oracle_name(cfg.oracle_method)));
  cfg.output_dir = f.text("output_dir", cfg.output_dir);
  cfg.data = f.text("data", cfg.data);
  if (f.has("seed")) cfg.seed = f.count("seed", 0);
  cfg.threads = f.count("threads", cfg.threads);
  f.finish();

  if (!cfg.data.empty() && !cfg.seed) {
    // The stream's own generator seed stands in.
    const auto meta = meta_path_for(cfg.data);
    if (std::filesystem::exists(meta)) cfg.seed = read_generator_meta(meta).spec.seed;
  }
  cfg.validate();
  return cfg;
}

Json config_to_json(const ExperimentConfig& cfg) {
  Json learner = {{"kind", cfg.learner},
                  {"U", cfg.U},
                  {"T", cfg.T},
                  {"strategy", strategy_name(cfg.strategy)},
                  {"literal_update_sign", cfg.literal_update_sign},
                  {"literal_buffer_normalizer", cfg.literal_buffer_normalizer},
                  {"snapshot_stride", cfg.snapshot_stride}};
  if (cfg.learner_R) learner["R"] = *cfg.learner_R;
  if (cfg.capacity) learner["capacity"] = *cfg.capacity;
  Json gen = generator_to_json(cfg.generator);
  gen.erase("seed");
  Json j = {{"generator", gen},
            {"n", cfg.n},
            {"learner", learner},
            {"c", cfg.c},
            {"delta", cfg.delta},
            {"repetitions", cfg.repetitions},
            {"monte_carlo_m", cfg.monte_carlo_m},
            {"holdout_m", cfg.holdout_m},
            {"oracle", oracle_name(cfg.oracle_method)},
            {"output_dir", cfg.output_dir},
            {"data", cfg.data},
            {"threads", cfg.threads}};
  if (cfg.epsilon) j["epsilon"] = *cfg.epsilon;
  if (cfg.margin) j["margin"] = *cfg.margin;
  if (cfg.seed) j["seed"] = *cfg.seed;
  return j;
}

std::filesystem::path meta_path_for(const std::filesystem::path& csv) {
  std::filesystem::path p = csv;
  p += ".meta.json";
  return p;
}

void write_generator_meta(const GeneratorMeta& meta, const std::filesystem::path& path) {
  const Json j = {{"generator", generator_to_json(meta.spec)},
                  {"n", meta.n},
                  {"witness", vector_json(meta.witness)},
                  {"offset", meta.offset}};
  write_text_file(path, dump_json(j));
}

GeneratorMeta read_generator_meta(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw std::runtime_error("missing generator metadata " + path.string());
  }
  const Json j = read_json_file(path);
  Fields f(j, "meta");
  GeneratorMeta meta;
  meta.spec = generator_from_json(f.raw("generator"));
  meta.n = f.count("n", 0);
  meta.offset = f.number("offset", 0.0);
  const Json& w = f.raw("witness");
  if (!w.is_array()) throw ConfigError("meta.witness: expected an array");
  meta.witness.resize(static_cast<Eigen::Index>(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i) meta.witness[static_cast<Eigen::Index>(i)] = w[i].get<double>();
  f.finish();
  return meta;
}

RunTrace run_naive_pair(const LearnerConfig& cfg, std::span<const Example> stream) {
  const std::size_t n = stream.size();
  if (n < 2) throw std::invalid_argument("run_naive_pair: stream must contain at least 2 examples");
  const Eigen::Index d = stream.front().x.size();
  RunTrace trace(n, cfg.c, std::nullopt);
  LinearScorer h = LinearScorer::zero(d);
  trace.set_hypothesis(0, h);
  for (std::size_t t = 1; t <= n; ++t) {
    const Example& zt = stream[t - 1];
    if (zt.x.size() != d) throw DimensionError("run_naive_pair: inconsistent feature dimension");
    if (t % 2 == 0) {
      const Example& prev = stream[t - 2];
      RoundRecord& rec = trace.round(t);
      rec.history_size = 1;
      rec.loss = oam_pair_loss(h, zt, prev);
      rec.mistake = misranking(zt.y, prev.y, pairwise_score(h, zt.x, prev.x)) == 1;
      h = oam_step(h, zt, std::span<const Example>(&prev, 1));
    }
    trace.set_hypothesis(t, h);
  }
  return trace;
}

VerifyOutcome verify_bounds(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<RepetitionResult> results(cfg.repetitions);
  const std::size_t threads = cfg.threads == 0 ? worker_count() : cfg.threads;
  parallel_for(cfg.repetitions, threads, [&](std::size_t r) { results[r] = run_repetition(cfg, r); });

  VerifyOutcome out;
  Json reps = Json::array();
  for (RepetitionResult& res : results) {
    out.all_satisfied = out.all_satisfied && res.satisfied;
    reps.push_back(std::move(res.report));
  }
  out.report = {{"format", "polt-report"}, {"version", 1}, {"config", report_config(cfg)}};
  out.report["aggregate"] = aggregate(reps);
  out.report["repetitions"] = std::move(reps);
  out.report["all_bounds_satisfied"] = out.all_satisfied;
  return out;
}

Json merge_reports(const std::vector<Json>& reports) {
  if (reports.empty()) throw std::invalid_argument("merge_reports: no reports");
  Json reps = Json::array();
  Json configs = Json::array();
  bool all = true;
  for (const Json& r : reports) {
    if (!r.is_object() || r.value("format", "") != "polt-report" || !r.contains("repetitions")) {
      throw ConfigError("merge_reports: input is not a verify-bounds report");
    }
    configs.push_back(r.at("config"));
    for (const Json& rep : r.at("repetitions")) reps.push_back(rep);
    all = all && r.value("all_bounds_satisfied", false);
  }
  Json out = {{"format", "polt-report"}, {"version", 1}, {"sources", reports.size()}, {"configs", configs}};
  out["aggregate"] = aggregate(reps);
  out["repetitions"] = std::move(reps);
  out["all_bounds_satisfied"] = all;
  return out;
}

std::string plot_csv(const Json& report) {
  const Json& reps = report.at("repetitions");
  std::size_t n = 0;
  for (const Json& rep : reps) n = std::max<std::size_t>(n, rep.at("series").at("cumulative_loss").size());
  std::ostringstream os;
  os << "t,M_t,cumulative_loss,bound\n";
  const auto mean_at = [&](const char* column, std::size_t i) -> std::string {
    double sum = 0.0;
    std::size_t k = 0;
    for (const Json& rep : reps) {
      const Json& col = rep.at("series").at(column);
      if (i < col.size() && col[i].is_number()) {
        sum += col[i].get<double>();
        ++k;
      }
    }
    if (k == 0) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", sum / static_cast<double>(k));
    return buf;
  };
  for (std::size_t i = 0; i < n; ++i) {
    os << (i + 1) << ',' << mean_at("statistic", i) << ',' << mean_at("cumulative_loss", i) << ','
       << mean_at("bound", i) << '\n';
  }
  return os.str();
}

Json selection_to_json(const SelectionResult& result) {
  Json table = Json::array();
  for (const SelectionCandidate& c : result.table) {
    table.push_back({{"t", c.t}, {"risk", c.risk}, {"penalty", c.penalty}, {"total", c.total}});
  }
  return {{"chosen", result.chosen}, {"value", result.value}, {"delta", result.delta},
          {"c", result.c},           {"cn", result.cn},       {"table", std::move(table)}};
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  try {
    return Json::parse(is);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": invalid JSON: " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace polt
