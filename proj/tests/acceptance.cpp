// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include "polt/bounds.hpp"
#include "polt/datagen.hpp"
#include "polt/eval.hpp"
#include "polt/harness.hpp"
#include "polt/learners.hpp"
#include "polt/losses.hpp"
#include "polt/oracle.hpp"
#include "polt/selection.hpp"

#include "reference.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace polt;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

GeneratorSpec margin_spec(std::uint64_t seed, double flip) {
  GeneratorSpec s;
  s.kind = flip > 0.0 ? GeneratorKind::NoisyMargin : GeneratorKind::SeparableMargin;
  s.d = 5;
  s.R = 1.0;
  s.gamma = 0.2;
  s.flip_prob = flip;
  s.seed = seed;
  return s;
}

GeneratorSpec cluster_spec(std::uint64_t seed) {
  GeneratorSpec s;
  s.kind = GeneratorKind::GaussianClusters;
  s.d = 3;
  s.k = 3;
  s.spread = 0.1;
  s.seed = seed;
  return s;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

bool same_hypothesis(const Hypothesis& a, const Hypothesis& b) {
  if (a.index() != b.index()) return false;
  if (const auto* l = std::get_if<LinearScorer>(&a)) return l->w == std::get<LinearScorer>(b).w;
  return std::get<MetricMatrix>(a).a == std::get<MetricMatrix>(b).a;
}

// First round whose record or post-round hypothesis differs; 0 if none.
std::size_t first_divergence(const RunTrace& a, const RunTrace& b) {
  for (std::size_t t = 1; t <= a.n(); ++t) {
    const RoundRecord& x = a.round(t);
    const RoundRecord& y = b.round(t);
    if (x.statistic != y.statistic || x.loss != y.loss || x.mistake != y.mistake ||
        x.history_size != y.history_size || !same_hypothesis(a.hypothesis(t), b.hypothesis(t))) {
      return t;
    }
  }
  return 0;
}

Outcome separable_oam() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Dataset s = generate(margin_spec(seed, 0.0), 2000).data;
    const double M = run_online(LearnerConfig{}, s).cumulative_loss();
    worst = std::max(worst, M);
    if (!(M <= oam_mistake_bound(1.0, 0.2, 0.0)) || !(M <= 150.0)) o.pass = false;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!(secs < 60.0)) o.pass = false;
  o.detail = fmt("max M = %.4f <= 150, %.2f s", worst, secs);
  return o;
}

Outcome noisy_oam() {
  Outcome o;
  double worst_ratio = 0.0;
  for (std::uint64_t seed = 101; seed <= 120; ++seed) {
    const GeneratedData g = generate(margin_spec(seed, 0.05), 2000);
    const double M = run_online(LearnerConfig{}, g.data).cumulative_loss();
    const double m_star = comparator_pairwise_loss(g.data, g.witness, 0.2);
    const double bound = ref::oam_bound(1.0, 0.2, m_star);
    worst_ratio = std::max(worst_ratio, M / bound);
    if (!(M <= bound + 1e-9)) o.pass = false;
    if (!(M <= oam_mistake_bound(1.0, 0.2, m_star) + 1e-9)) o.pass = false;
  }
  o.detail = fmt("max M / bound = %.4f", worst_ratio);
  return o;
}

Outcome perceptron() {
  Outcome o;
  double worst_ratio = 0.0;
  LearnerConfig cfg;
  cfg.kind = LearnerKind::Perceptron;
  for (double flip : {0.0, 0.05}) {
    for (std::uint64_t seed = 201; seed <= 220; ++seed) {
      const GeneratedData g = generate(margin_spec(seed, flip), 2000);
      const double mistakes = static_cast<double>(run_online(cfg, g.data).mistakes());
      // The classification margin of a pairwise-margin-0.2 stream is 0.1.
      const double gamma = 0.1;
      const double d1 = perceptron_hinge_total(g.data, g.witness, gamma);
      const double bound = ref::perceptron_bound(1.0, gamma, d1);
      worst_ratio = std::max(worst_ratio, mistakes / bound);
      if (!(mistakes <= bound)) o.pass = false;
    }
  }
  o.detail = fmt("40 streams, max mistakes / bound = %.4f", worst_ratio);
  return o;
}

Outcome ogd_regret() {
  Outcome o;
  double worst = -1e300;
  double worst_slack = 0.0;
  for (bool finite : {false, true}) {
    LearnerConfig cfg;
    cfg.kind = finite ? LearnerKind::OgdRankFinite : LearnerKind::OgdRankInfinite;
    if (finite) cfg.capacity = 64;
    for (std::uint64_t seed = 301; seed <= 310; ++seed) {
      const Dataset s = generate(margin_spec(seed, 0.05), 1000).data;
      const RunTrace tr = run_online(cfg, s);
      OracleOptions opt;
      opt.seed = seed;
      const OracleResult oracle = batch_oracle(s, cfg, opt);
      const double reg = regret(tr, oracle.value);
      const double bound = ogd_regret_bound(1.0 / cfg.U, cfg.U, 1000);
      worst = std::max(worst, reg - bound);
      worst_slack = std::max(worst_slack, oracle.slack());
      if (!(oracle.slack() <= 1e-4)) o.pass = false;
      if (!(reg <= bound + oracle.slack())) o.pass = false;
      if (!(reg >= -1e-6)) o.pass = false;
    }
  }
  o.detail = fmt("max regret - sqrt(T) = %.3f, max oracle slack = %.2e", worst, worst_slack);
  return o;
}

Outcome metric_regret() {
  Outcome o;
  double worst = -1e300;
  double worst_slack = 0.0;
  double max_norm = 0.0;
  double min_eig = 1e300;
  LearnerConfig cfg;
  cfg.kind = LearnerKind::MetricOgd;
  cfg.U = 1.0;
  cfg.R = 2.0;  // bound on ||x_t - x_j|| for points in the unit ball
  for (std::uint64_t seed = 401; seed <= 410; ++seed) {
    const Dataset s = generate(cluster_spec(seed), 500).data;
    const RunTrace tr = run_online(cfg, s);
    OracleOptions opt;
    opt.seed = seed;
    const OracleResult oracle = batch_oracle(s, cfg, opt);
    const double reg = regret(tr, oracle.value);
    const double bound = ogd_regret_bound(1.0 / cfg.U, cfg.U, 500);
    worst = std::max(worst, reg - bound);
    worst_slack = std::max(worst_slack, oracle.slack());
    if (!(oracle.slack() <= 1e-4) || !(reg <= bound + oracle.slack())) o.pass = false;
    for (std::size_t i = 0; i <= tr.n(); ++i) {
      const Matrix& a = std::get<MetricMatrix>(tr.hypothesis(i)).a;
      Eigen::SelfAdjointEigenSolver<Matrix> eig(a, Eigen::EigenvaluesOnly);
      max_norm = std::max(max_norm, a.norm());
      min_eig = std::min(min_eig, eig.eigenvalues().minCoeff());
      if ((a - a.transpose()).norm() != 0.0) o.pass = false;
    }
  }
  if (!(max_norm <= 1.0 + 1e-9) || !(min_eig >= -1e-12)) o.pass = false;
  o.detail = fmt("max regret - sqrt(T) = %.3f, slack %.2e, max ||A||_F = %.12f", worst, worst_slack, max_norm) +
             fmt(", min eigenvalue %.3e", min_eig);
  return o;
}

Outcome buffer_equivalence() {
  Outcome o;
  const std::size_t n = 300;
  const std::size_t k = 40;
  int identical = 0;
  int checks = 0;
  for (auto [inf, fin] : {std::pair{LearnerKind::OamInfinite, LearnerKind::OamFinite},
                          std::pair{LearnerKind::OgdRankInfinite, LearnerKind::OgdRankFinite}}) {
    for (std::uint64_t seed = 501; seed <= 505; ++seed) {
      const Dataset s = generate(margin_spec(seed, 0.05), n).data;
      LearnerConfig a;
      a.kind = inf;
      const RunTrace ta = run_online(a, s);
      for (std::size_t cap : {n, n + 50, n - 1}) {
        LearnerConfig b = a;
        b.kind = fin;
        b.capacity = cap;
        ++checks;
        // Capacity n - 1 first evicts when z_n is inserted, after the last
        // round has been played, so no round sees a shortened buffer.
        if (first_divergence(ta, run_online(b, s)) == 0) {
          ++identical;
        } else {
          o.pass = false;
        }
      }
      // A smaller buffer evicts z_1 on inserting z_{k+1}; round k+2 is the
      // first to play against it.
      LearnerConfig b = a;
      b.kind = fin;
      b.capacity = k;
      if (first_divergence(ta, run_online(b, s)) != k + 2) o.pass = false;
    }
  }
  o.detail = fmt("%.0f/%.0f traces bit-identical", identical, checks) +
             fmt(", capacity %.0f diverges at round %.0f", static_cast<double>(k), static_cast<double>(k + 2));
  return o;
}

Outcome model_selection() {
  Outcome o;
  int ok = 0;
  const LossKind loss = LossKind::bounded_hinge();
  for (std::uint64_t r = 0; r < 50; ++r) {
    const GeneratorSpec spec = margin_spec(derive_seed(600, r), 0.05);
    const Generator gen(spec);
    const Dataset s = gen.sample(2000, spec.seed);
    const RunTrace tr = run_online(LearnerConfig{}, s);
    const SelectionResult sel = select_hypothesis(tr, s, loss, 0.1, 0.05);
    const double mn = aggregate_stat(tr, 0.1);
    const RiskEstimate risk = monte_carlo_risk(tr.hypothesis(sel.chosen), gen, 5000, loss, derive_seed(601, r));
    if (risk.estimate <= mn + 0.1) ++ok;
  }
  o.pass = ok >= 45;
  o.detail = fmt("%.0f/50 repetitions with R(h_hat) <= M^n + 0.1", ok);
  return o;
}

Outcome jensen() {
  Outcome o;
  int ok = 0;
  double worst = -1e300;
  const auto check = [&](const LearnerConfig& cfg, const Generator& gen, std::size_t n, std::size_t m,
                         std::uint64_t seed) {
    const Dataset s = gen.sample(n, seed);
    const RunTrace tr = run_online(cfg, s);
    const LossKind loss = cfg.loss();
    const Dataset mc = gen.sample(m, derive_seed(seed, 7));
    const StatWindow win = StatWindow::make(0.1, n);
    double sum = 0.0;
    double se_sum = 0.0;
    double count = 0.0;
    for (std::size_t t = win.first_candidate(); t <= win.last_candidate(); ++t) {
      const RiskEstimate e = risk_on_sample(tr.hypothesis(t), mc, loss);
      sum += e.estimate;
      se_sum += e.standard_error;
      count += 1.0;
    }
    const RiskEstimate avg = risk_on_sample(average_hypothesis(tr, 0.1), mc, loss);
    const double window = sum / count;
    const double combined = std::sqrt(avg.standard_error * avg.standard_error + std::pow(se_sum / count, 2));
    worst = std::max(worst, (avg.estimate - window) / combined);
    if (avg.estimate <= window + 2.0 * combined) ++ok;
  };
  LearnerConfig rank;
  rank.kind = LearnerKind::OgdRankInfinite;
  for (std::uint64_t seed = 701; seed <= 710; ++seed) check(rank, Generator(margin_spec(seed, 0.1)), 1000, 2000, seed);
  LearnerConfig metric;
  metric.kind = LearnerKind::MetricOgd;
  metric.R = 2.0;
  for (std::uint64_t seed = 711; seed <= 720; ++seed) check(metric, Generator(cluster_spec(seed)), 500, 600, seed);
  o.pass = ok == 20;
  o.detail = fmt("%.0f/20 runs, max (R(h_bar) - window mean) / SE = %.3f", ok, worst);
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  std::mt19937_64 rng(900);
  int mismatches = 0;
  for (int k = 0; k < 200; ++k) {
    const std::size_t m = 2 + rng() % 59;
    const auto s = ref::random_ranking_sample(rng, m, 3, k % 2 == 0);
    Vector w = ref::random_vector(rng, 3);
    if (k % 2 == 0) w = w.array().round();
    if (empirical_pairwise_risk(LinearScorer(w), s, LossKind::misranking()) !=
        ref::pairwise_risk(ref::Loss::Misranking, w, Matrix(), s, 1, 1)) {
      ++mismatches;
    }
    bool pos = false;
    bool neg = false;
    for (const auto& z : s) (z.y == 1 ? pos : neg) = true;
    if (pos && neg && auc(LinearScorer(w), s) != ref::auc(w, s)) ++mismatches;
  }
  double worst = 0.0;
  const auto rel = [&](double a, double b) { worst = std::max(worst, std::abs(a - b) / std::max(std::abs(b), 1e-300)); };
  for (int i = 0; i < 50; ++i) {
    const double R = 0.1 + 0.37 * i;
    const double g = 0.05 + 0.041 * ((i * 7) % 50);
    const double aux = 3.3 * ((i * 13) % 50);
    const double eta = 0.02 + 0.09 * ((i * 11) % 50);
    const std::size_t d = 1 + (i % 6);
    rel(*covering_number_bound(R, eta, d).value, ref::covering(R, eta, static_cast<double>(d)));
    rel(oam_mistake_bound(R, g, aux), ref::oam_bound(R, g, aux));
    rel(perceptron_mistake_bound(R, g, aux), ref::perceptron_bound(R, g, aux));
    const std::size_t T = 1 + 97 * i;
    rel(ogd_regret_bound(g, R, T), ref::regret_bound(g, R, static_cast<double>(T)));
    const std::size_t n = 100 + 37 * i;
    const double c = 0.05 + 0.01 * (i % 20);
    const double delta = 0.01 + 0.019 * i;
    const std::size_t x = 2 + (i * 17) % (n / 2);
    rel(confidence_penalty(x, n, c, delta),
        ref::penalty(static_cast<double>(x), static_cast<double>(n), static_cast<double>(ref::ceil_cn(c, n)), delta));
  }
  o.pass = mismatches == 0 && worst <= 1e-10;
  o.detail = fmt("%.0f exact-match failures over 200 instances, max calculator relative error %.2e", mismatches, worst);
  return o;
}

Outcome properties() {
  Outcome o;
  std::mt19937_64 rng(1000);
  int fails = 0;
  for (int k = 0; k < 1000; ++k) {
    const double U = 0.2 + 2.0 * std::uniform_real_distribution<double>(0, 1)(rng);
    const Matrix A = ref::random_symmetric(rng, 4, 1.5);
    const Matrix B = ref::random_symmetric(rng, 4, 1.5);
    const MetricMatrix pa = project_psd_ball(A, U);
    const MetricMatrix pb = project_psd_ball(B, U);
    fails += (project_psd_ball(pa.a, U).a - pa.a).norm() > 1e-10;
    fails += (pa.a - pb.a).norm() > (A - B).norm() + 1e-10;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(pa.a, Eigen::EigenvaluesOnly);
    fails += eig.eigenvalues().minCoeff() < -1e-12;
    fails += pa.a.norm() > U * (1.0 + 1e-12);
    const Vector v = ref::random_vector(rng, 5, 2.0);
    const Vector u = ref::random_vector(rng, 5, 2.0);
    fails += (project_ball(project_ball(v, U), U) - project_ball(v, U)).norm() > 1e-12;
    fails += (project_ball(v, U) - project_ball(u, U)).norm() > (v - u).norm() + 1e-12;
  }
  std::uniform_real_distribution<double> td(-4.0, 4.0);
  for (int k = 0; k < 10000; ++k) {
    const double s = static_cast<double>(static_cast<int>(rng() % 3) - 1);
    const double t1 = td(rng);
    const double t2 = td(rng);
    const double a = bounded_hinge(s, t1);
    fails += a < 0.0 || a > 1.0;
    fails += std::abs(a - bounded_hinge(s, t2)) > std::abs(t1 - t2) + 1e-12;
    const double q = clipped_square(s, t1);
    fails += q < 0.0 || q > 1.0;
    fails += std::abs(q - clipped_square(s, t2)) > 2.0 * std::abs(t1 - t2) + 1e-12;

    const Vector w1 = project_ball(ref::random_vector(rng, 3), 1.0);
    const Vector w2 = project_ball(ref::random_vector(rng, 3), 1.0);
    const Example za{project_ball(ref::random_vector(rng, 3), 1.0), 1};
    const Example zb{project_ball(ref::random_vector(rng, 3), 1.0), -1};
    const double l1 = normalized_hinge(LinearScorer(w1), za, zb, 1.0, 1.0);
    const double l2 = normalized_hinge(LinearScorer(w2), za, zb, 1.0, 1.0);
    fails += l1 < 0.0 || l1 > 1.0 + 1e-12;
    fails += std::abs(l1 - l2) > 0.4 * std::abs(w1.dot(za.x - zb.x) - w2.dot(za.x - zb.x)) + 1e-12;

    const Vector half = project_ball(ref::random_vector(rng, 3), 1.0);
    const Example ma{half, static_cast<int>(rng() % 2)};
    const Example mb{-half, static_cast<int>(rng() % 2)};
    const Matrix g = ref::random_symmetric(rng, 3);
    const MetricMatrix A1 = project_psd_ball(g * g.transpose(), 1.0);
    const MetricMatrix A2 = project_psd_ball(g.transpose() * g + Matrix::Identity(3, 3) * 0.1, 1.0);
    const double m1 = metric_hinge(A1, ma, mb, 2.0, 1.0);
    const double m2 = metric_hinge(A2, ma, mb, 2.0, 1.0);
    fails += m1 < 0.0 || m1 > 1.0 + 1e-12;
    fails += std::abs(m1 - m2) >
             (1.0 / 6.0) * std::abs(mahalanobis_sq(A1, ma.x, mb.x) - mahalanobis_sq(A2, ma.x, mb.x)) + 1e-12;
  }

  int replays = 0;
  for (const char* learner : {"oam-finite", "ogd-infinite", "metric-ogd"}) {
    Json j = {{"n", 300}, {"learner", {{"kind", learner}}}, {"repetitions", 2}, {"monte_carlo_m", 400},
              {"holdout_m", 300}, {"seed", 11}};
    if (std::string(learner) == "oam-finite") j["learner"]["capacity"] = 32;
    if (std::string(learner) == "metric-ogd") j["generator"] = {{"kind", "clusters"}, {"d", 3}};
    const std::string first = dump_json(verify_bounds(parse_config(j)).report);
    const std::string second = dump_json(verify_bounds(parse_config(j)).report);
    if (first == second) ++replays;
  }
  o.pass = fails == 0 && replays == 3;
  o.detail = fmt("%.0f property failures, %.0f/3 configs replay byte-identically", fails, replays);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"separable OAM mistake bound", separable_oam},
      {"noisy OAM mistake bound", noisy_oam},
      {"perceptron mistake bound", perceptron},
      {"projected-gradient ranking regret", ogd_regret},
      {"metric learning regret and feasibility", metric_regret},
      {"buffer equivalence", buffer_equivalence},
      {"model selection soundness", model_selection},
      {"averaged hypothesis vs window average", jensen},
      {"oracle equivalence and calculators", oracle_equivalence},
      {"property suites and determinism", properties},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2zu %s: %s [%.1f s]\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                out.detail.c_str(), secs);
    std::fflush(stdout);
    failed += out.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
