#include "polt/selection.hpp"

#include "polt/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polt {

StatWindow StatWindow::make(double c, std::size_t n) {
  StatWindow w;
  w.c = c;
  w.n = n;
  w.cn = std::max<std::size_t>(window_start(c, n), 1);
  return w;
}

double instant_stat(const Hypothesis& h, const Example& zt, std::span<const Example> prefix,
                    const LossKind& loss) {
  if (prefix.empty()) throw std::invalid_argument("instant_stat: empty prefix");
  double total = 0.0;
  for (const Example& zi : prefix) total += pair_loss(loss, h, zt, zi);
  return total / static_cast<double>(prefix.size());
}

double aggregate_stat(const RunTrace& trace, double c) {
  const StatWindow win = StatWindow::make(c, trace.n());
  if (win.empty()) throw std::invalid_argument("aggregate_stat: n <= c_n, window is empty");
  const std::size_t first = std::max<std::size_t>(win.cn, 2);
  if (first > win.n - 1) throw std::invalid_argument("aggregate_stat: window holds no defined statistic");
  double total = 0.0;
  for (std::size_t t = first; t <= win.n - 1; ++t) {
    const auto& s = trace.round(t).statistic;
    if (!s) throw std::invalid_argument("aggregate_stat: round " + std::to_string(t) + " has no statistic");
    total += *s;
  }
  return total / static_cast<double>(win.n - first);
}

namespace {

bool fast_path_applies(const Hypothesis& h, std::span<const Example> sample, const LossKind& loss) {
  if (!std::holds_alternative<LinearScorer>(h)) return false;
  if (loss.tag != LossTag::Misranking && loss.tag != LossTag::BoundedHinge &&
      loss.tag != LossTag::NormalizedHinge) {
    return false;
  }
  return std::all_of(sample.begin(), sample.end(), [](const Example& z) { return z.y == 1 || z.y == -1; });
}

PairSums sorted_sums(const LinearScorer& w, std::span<const Example> sample, const LossKind& loss) {
  std::vector<double> pos;
  std::vector<double> neg;
  for (const Example& z : sample) (z.y > 0 ? pos : neg).push_back(w.score(z.x));
  std::sort(neg.begin(), neg.end());

  std::vector<double> s1(neg.size() + 1, 0.0);
  std::vector<double> s2(neg.size() + 1, 0.0);
  for (std::size_t i = 0; i < neg.size(); ++i) {
    s1[i + 1] = s1[i] + neg[i];
    s2[i + 1] = s2[i] + neg[i] * neg[i];
  }
  const auto index_above = [&](double v) {  // first index with q > v
    return static_cast<std::size_t>(std::upper_bound(neg.begin(), neg.end(), v) - neg.begin());
  };
  const auto index_at_least = [&](double v) {  // first index with q >= v
    return static_cast<std::size_t>(std::lower_bound(neg.begin(), neg.end(), v) - neg.begin());
  };

  PairSums out;
  const double np = static_cast<double>(pos.size());
  const double nn = static_cast<double>(neg.size());
  const double m = np + nn;
  out.pairs = m * (m - 1.0) / 2.0;
  const std::size_t N = neg.size();

  switch (loss.tag) {
    case LossTag::Misranking: {
      double count = 0.0;
      for (double p : pos) count += static_cast<double>(N - index_above(p));
      out.sum = count;
      out.sum_sq = count;
      break;
    }
    case LossTag::BoundedHinge: {
      // Mixed pair with score gap d = p - q costs clamp(1 - d, 0, 1).
      for (double p : pos) {
        const std::size_t lo = index_above(p - 1.0);
        const std::size_t hi = std::max(lo, index_at_least(p));
        const double full = static_cast<double>(N - hi);
        const double cnt = static_cast<double>(hi - lo);
        const double a = 1.0 - p;
        const double q1 = s1[hi] - s1[lo];
        const double q2 = s2[hi] - s2[lo];
        out.sum += full + cnt * a + q1;
        out.sum_sq += full + cnt * a * a + 2.0 * a * q1 + q2;
      }
      break;
    }
    case LossTag::NormalizedHinge: {
      const double kappa = 1.0 / (1.0 + 4.0 * loss.R * loss.U);
      for (double p : pos) {
        const std::size_t lo = index_above(p - 0.5);
        const double cnt = static_cast<double>(N - lo);
        const double a = 1.0 - 2.0 * p;
        const double q1 = s1[N] - s1[lo];
        const double q2 = s2[N] - s2[lo];
        out.sum += kappa * (cnt * a + 2.0 * q1);
        out.sum_sq += kappa * kappa * (cnt * a * a + 4.0 * a * q1 + 4.0 * q2);
      }
      if (!loss.mask_equal_labels) {
        const double same = np * (np - 1.0) / 2.0 + nn * (nn - 1.0) / 2.0;
        out.sum += kappa * same;
        out.sum_sq += kappa * kappa * same;
      }
      break;
    }
    default: throw std::logic_error("sorted_sums: loss kind has no sorted path");
  }
  return out;
}

}  // namespace

PairSums pairwise_loss_sums(const Hypothesis& h, std::span<const Example> sample, const LossKind& loss) {
  if (sample.size() < 2) throw std::invalid_argument("pairwise risk needs at least 2 examples");
  if (fast_path_applies(h, sample, loss)) return sorted_sums(std::get<LinearScorer>(h), sample, loss);
  PairSums out;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    for (std::size_t k = i + 1; k < sample.size(); ++k) {
      const double l = pair_loss(loss, h, sample[i], sample[k]);
      out.sum += l;
      out.sum_sq += l * l;
    }
  }
  const double m = static_cast<double>(sample.size());
  out.pairs = m * (m - 1.0) / 2.0;
  return out;
}

double empirical_pairwise_risk(const Hypothesis& h, std::span<const Example> sample, const LossKind& loss) {
  return pairwise_loss_sums(h, sample, loss).mean();
}

double confidence_penalty(std::size_t x, std::size_t n, double c, double delta) {
  if (x < 2) throw std::invalid_argument("confidence_penalty: x must be at least 2");
  if (!(delta > 0.0) || delta > 1.0) throw std::invalid_argument("confidence_penalty: delta must lie in (0, 1]");
  const std::size_t cn = window_start(c, n);
  if (n <= cn) throw std::invalid_argument("confidence_penalty: n <= c_n");
  const double span = static_cast<double>(n - cn);
  const double log_term = std::log(2.0 * span * (span + 1.0) / delta);
  return std::sqrt(log_term / static_cast<double>(x - 1));
}

double delta_for_epsilon(std::size_t n, double c, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("delta_for_epsilon: epsilon must be positive");
  const std::size_t cn = window_start(c, n);
  if (n <= cn) throw std::invalid_argument("delta_for_epsilon: n <= c_n");
  const double span = static_cast<double>(n - cn);
  return 2.0 * (span + 1.0) * std::exp(-span * epsilon * epsilon / 64.0);
}

SelectionResult select_hypothesis(const RunTrace& trace, std::span<const Example> sample, const LossKind& loss,
                                  double c, double delta, std::size_t threads) {
  const std::size_t n = trace.n();
  if (sample.size() != n) throw std::invalid_argument("select_hypothesis: sample must be the traced stream");
  const StatWindow win = StatWindow::make(c, n);
  if (n < 3 || win.first_candidate() > win.last_candidate()) {
    throw std::invalid_argument("select_hypothesis: candidate window [c_n-1, n-2] is empty");
  }

  SelectionResult result;
  result.c = c;
  result.cn = win.cn;
  result.delta = delta;
  const std::size_t count = win.last_candidate() - win.first_candidate() + 1;
  result.table.resize(count);

  parallel_for(count, threads, [&](std::size_t k) {
    const std::size_t t = win.first_candidate() + k;
    SelectionCandidate& row = result.table[k];
    row.t = t;
    row.risk = empirical_pairwise_risk(trace.hypothesis(t), sample.subspan(t), loss);
    row.penalty = confidence_penalty(n - t, n, c, delta);
    row.total = row.risk + row.penalty;
  });

  std::size_t best = 0;
  for (std::size_t k = 1; k < count; ++k) {
    if (result.table[k].total < result.table[best].total) best = k;
  }
  result.chosen = result.table[best].t;
  result.value = result.table[best].total;
  return result;
}

Hypothesis average_hypothesis(const RunTrace& trace, double c) {
  const StatWindow win = StatWindow::make(c, trace.n());
  if (win.empty()) throw std::invalid_argument("average_hypothesis: window is empty");
  // Indices c_n - 1 .. n - 2, i.e. the hypotheses played on rounds c_n .. n-1.
  const std::size_t first = win.cn - 1;
  const std::size_t last = win.n - 2;
  const double count = static_cast<double>(last - first + 1);
  const Hypothesis& h0 = trace.hypothesis(first);
  if (const auto* w0 = std::get_if<LinearScorer>(&h0)) {
    Vector sum = Vector::Zero(w0->dim());
    for (std::size_t i = first; i <= last; ++i) {
      const auto* w = std::get_if<LinearScorer>(&trace.hypothesis(i));
      if (w == nullptr) throw std::invalid_argument("average_hypothesis: mixed hypothesis kinds");
      sum += w->w;
    }
    return LinearScorer(sum / count);
  }
  const auto& a0 = std::get<MetricMatrix>(h0);
  Matrix sum = Matrix::Zero(a0.dim(), a0.dim());
  for (std::size_t i = first; i <= last; ++i) {
    const auto* a = std::get_if<MetricMatrix>(&trace.hypothesis(i));
    if (a == nullptr) throw std::invalid_argument("average_hypothesis: mixed hypothesis kinds");
    sum += a->a;
  }
  return MetricMatrix(sum / count);
}

}  // namespace polt
