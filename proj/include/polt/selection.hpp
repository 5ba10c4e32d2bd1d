#ifndef POLT_SELECTION_HPP_
#define POLT_SELECTION_HPP_

#include "polt/core.hpp"
#include "polt/losses.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace polt {

/// Rounds c_n..n-1 over which the online statistic is averaged.
struct StatWindow {
  double c = 0.1;
  std::size_t n = 0;
  std::size_t cn = 0;

  static StatWindow make(double c, std::size_t n);
  bool empty() const { return n <= cn; }
  /// First hypothesis index that model selection considers (c_n - 1).
  std::size_t first_candidate() const { return cn - 1; }
  /// Last hypothesis index that model selection considers (n - 2).
  std::size_t last_candidate() const { return n - 2; }
};

/// Running sums of a pairwise loss over all unordered pairs of a sample.
struct PairSums {
  double sum = 0.0;
  double sum_sq = 0.0;
  double pairs = 0.0;

  double mean() const { return sum / pairs; }
};

/// Mean loss of h on (z_t, z_i) over the given prefix or buffer snapshot.
double instant_stat(const Hypothesis& h, const Example& zt, std::span<const Example> prefix,
                    const LossKind& loss);

/// Window mean of the recorded per-round statistics. Round 1 never carries
/// a statistic, so a window starting at round 1 starts at round 2 instead.
double aggregate_stat(const RunTrace& trace, double c);

/// Loss sums over every unordered pair of the sample. Linear scorers on +/-1
/// labels with the misranking, bounded-hinge or normalized-hinge loss go
/// through a sort-and-prefix-sum path in O(m log m); everything else is a
/// double loop.
PairSums pairwise_loss_sums(const Hypothesis& h, std::span<const Example> sample, const LossKind& loss);

/// U-statistic estimate of the pairwise risk: the mean loss over unordered
/// pairs. Every shipped loss is symmetric in its two examples, so each pair
/// is evaluated once.
double empirical_pairwise_risk(const Hypothesis& h, std::span<const Example> sample, const LossKind& loss);

/// sqrt( ln(2 (n - c_n)(n - c_n + 1) / delta) / (x - 1) ).
double confidence_penalty(std::size_t x, std::size_t n, double c, double delta);

/// delta = 2 (n - c_n + 1) exp(-(n - c_n) eps^2 / 64), the confidence level
/// that ties the penalty to a target deviation eps.
double delta_for_epsilon(std::size_t n, double c, double epsilon);

struct SelectionCandidate {
  std::size_t t = 0;
  double risk = 0.0;
  double penalty = 0.0;
  double total = 0.0;
};

struct SelectionResult {
  std::size_t chosen = 0;
  double value = 0.0;
  double delta = 0.0;
  double c = 0.0;
  std::size_t cn = 0;
  std::vector<SelectionCandidate> table;
};

/// Picks h_t, c_n - 1 <= t <= n - 2, minimizing the suffix risk on
/// z_{t+1}..z_n plus confidence_penalty(n - t). Ties go to the smallest t.
/// `sample` must be the stream the trace was produced from.
SelectionResult select_hypothesis(const RunTrace& trace, std::span<const Example> sample, const LossKind& loss,
                                  double c, double delta, std::size_t threads = 1);

/// Mean of h_{c_n - 1}, ..., h_{n - 2}.
Hypothesis average_hypothesis(const RunTrace& trace, double c);

}  // namespace polt

#endif  // POLT_SELECTION_HPP_
