#ifndef POLT_EVAL_HPP_
#define POLT_EVAL_HPP_

#include "polt/core.hpp"
#include "polt/datagen.hpp"
#include "polt/losses.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

namespace polt {

struct AucDetail {
  double auc = 0.0;              // ties earn half credit
  double ties_as_correct = 0.0;  // ties earn full credit, as the misranking loss treats them
  std::size_t tied_pairs = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

/// AUC with half credit for tied scores. Throws if `data` lacks either class.
double auc(const LinearScorer& scorer, std::span<const Example> data);
AucDetail auc_detail(const LinearScorer& scorer, std::span<const Example> data);

/// Point estimate of a pairwise risk. The standard error follows the
/// pair-level convention: sample standard deviation of the per-pair losses
/// over sqrt(number of pairs). Pairs sharing an example are correlated, so
/// this understates the true spread of the U-statistic.
struct RiskEstimate {
  double estimate = 0.0;
  std::size_t m = 0;
  double standard_error = 0.0;
};

/// Risk of h estimated on a given sample.
RiskEstimate risk_on_sample(const Hypothesis& h, std::span<const Example> sample, const LossKind& loss);

/// Draws m fresh examples from `generator` with `seed` and estimates the
/// risk of h on them.
RiskEstimate monte_carlo_risk(const Hypothesis& h, const Generator& generator, std::size_t m, const LossKind& loss,
                              std::uint64_t seed);

/// Cumulative average hinge loss of the unit comparator u at margin gamma,
///   sum_{t>=2} (1/|H_t|) sum_{j in H_t} 1{y_t != y_j} [gamma - <u, y_t (x_t - x_j)>]_+,
/// where H_t is the full prefix, or the FIFO buffer of the given capacity.
double comparator_pairwise_loss(std::span<const Example> stream, const Vector& u, double gamma,
                                std::optional<std::size_t> capacity = std::nullopt);

/// One-norm of the comparator hinge losses, sum_t [gamma - y_t <u, x_t>]_+.
double perceptron_hinge_total(std::span<const Example> stream, const Vector& u, double gamma);

/// Cumulative online loss of the trace minus the oracle value. Not clamped.
double regret(const RunTrace& trace, double oracle_value);

}  // namespace polt

#endif  // POLT_EVAL_HPP_
