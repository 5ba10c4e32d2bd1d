#include "polt/eval.hpp"

#include "polt/buffers.hpp"
#include "polt/selection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace polt {

AucDetail auc_detail(const LinearScorer& scorer, std::span<const Example> data) {
  std::vector<double> neg;
  std::vector<double> pos;
  for (const Example& z : data) {
    if (z.y == 1) {
      pos.push_back(scorer.score(z.x));
    } else if (z.y == -1) {
      neg.push_back(scorer.score(z.x));
    } else {
      throw std::invalid_argument("auc: labels must be -1 or +1");
    }
  }
  if (pos.empty() || neg.empty()) throw std::invalid_argument("auc: data must contain both classes");
  std::sort(neg.begin(), neg.end());
  double concordant = 0.0;
  std::size_t ties = 0;
  for (double p : pos) {
    const auto lo = std::lower_bound(neg.begin(), neg.end(), p);
    const auto hi = std::upper_bound(lo, neg.end(), p);
    concordant += static_cast<double>(lo - neg.begin());
    ties += static_cast<std::size_t>(hi - lo);
  }
  AucDetail out;
  out.positives = pos.size();
  out.negatives = neg.size();
  out.tied_pairs = ties;
  const double mixed = static_cast<double>(pos.size()) * static_cast<double>(neg.size());
  out.auc = (concordant + 0.5 * static_cast<double>(ties)) / mixed;
  out.ties_as_correct = (concordant + static_cast<double>(ties)) / mixed;
  return out;
}

double auc(const LinearScorer& scorer, std::span<const Example> data) { return auc_detail(scorer, data).auc; }

RiskEstimate risk_on_sample(const Hypothesis& h, std::span<const Example> sample, const LossKind& loss) {
  const PairSums sums = pairwise_loss_sums(h, sample, loss);
  RiskEstimate out;
  out.m = sample.size();
  out.estimate = sums.mean();
  const double mean = out.estimate;
  const double var = sums.pairs > 1.0
                         ? std::max(0.0, (sums.sum_sq - sums.pairs * mean * mean) / (sums.pairs - 1.0))
                         : 0.0;
  out.standard_error = std::sqrt(var / sums.pairs);
  return out;
}

RiskEstimate monte_carlo_risk(const Hypothesis& h, const Generator& generator, std::size_t m, const LossKind& loss,
                              std::uint64_t seed) {
  if (m < 2) throw std::invalid_argument("monte_carlo_risk: m must be at least 2");
  const Dataset fresh = generator.sample(m, seed);
  return risk_on_sample(h, fresh, loss);
}

double comparator_pairwise_loss(std::span<const Example> stream, const Vector& u, double gamma,
                                std::optional<std::size_t> capacity) {
  HistoryBuffer buffer = capacity ? HistoryBuffer::fifo(*capacity) : HistoryBuffer::infinite();
  double total = 0.0;
  for (const Example& zt : stream) {
    const auto hist = buffer.contents();
    if (!hist.empty()) {
      double round = 0.0;
      for (const Example& zj : hist) {
        if (zt.y == zj.y) continue;
        round += std::max(gamma - static_cast<double>(zt.y) * u.dot(zt.x - zj.x), 0.0);
      }
      total += round / static_cast<double>(hist.size());
    }
    buffer.insert(zt);
  }
  return total;
}

double perceptron_hinge_total(std::span<const Example> stream, const Vector& u, double gamma) {
  double total = 0.0;
  for (const Example& z : stream) total += std::max(gamma - static_cast<double>(z.y) * u.dot(z.x), 0.0);
  return total;
}

double regret(const RunTrace& trace, double oracle_value) { return trace.cumulative_loss() - oracle_value; }

}  // namespace polt
