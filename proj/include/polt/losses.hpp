#ifndef POLT_LOSSES_HPP_
#define POLT_LOSSES_HPP_

#include "polt/core.hpp"

#include <optional>
#include <string>

namespace polt {

enum class LossTag { Misranking, BoundedHinge, NormalizedHinge, SquaredPairwise, MetricHinge };

/// A pairwise loss together with its scale parameters. R bounds the feature
/// norm (for MetricHinge: the norm of a pairwise difference) and U bounds the
/// hypothesis norm; both are only meaningful for the normalized kinds.
struct LossKind {
  LossTag tag = LossTag::BoundedHinge;
  double R = 1.0;
  double U = 1.0;
  // NormalizedHinge only: report equal-label pairs as zero loss instead of
  // the constant 1/(1+4RU) the formula assigns them.
  bool mask_equal_labels = false;

  static LossKind misranking() { return {LossTag::Misranking}; }
  static LossKind bounded_hinge() { return {LossTag::BoundedHinge}; }
  static LossKind squared_pairwise() { return {LossTag::SquaredPairwise}; }
  static LossKind normalized_hinge(double R, double U, bool mask_equal_labels = false);
  static LossKind metric_hinge(double R, double U);

  bool needs_metric() const { return tag == LossTag::MetricHinge; }
  /// True for kinds that are convex in the hypothesis.
  bool convex() const { return tag == LossTag::NormalizedHinge || tag == LossTag::MetricHinge; }
};

std::string to_string(LossTag tag);
LossTag loss_tag_from_string(const std::string& name);

/// 1 iff the pair is ordered against its labels; equal labels and a zero
/// score difference count as correctly ranked.
int misranking(int y1, int y2, double score_diff);

/// min([1 - s t]_+, 1) for s != 0, and exactly 0 for s == 0.
double bounded_hinge(double s, double t);

/// min([1 - s t]^2, 1) for s != 0, 0 otherwise.
double clipped_square(double s, double t);

/// Bounded hinge on ((y_t - y_j)/2, f(x_t) - f(x_j)).
double oam_pair_loss(const LinearScorer& h, const Example& zt, const Example& zj);

/// [1 - w^T (x1 - x2)(y1 - y2)]_+ / (1 + 4RU).
double normalized_hinge(const LinearScorer& w, const Example& z1, const Example& z2, double R,
                        double U, bool mask_equal_labels = false);

/// [1 - y_tj (1 - <A, X_tj>)]_+ / (2 + U R^2) with y_tj = +1 for same-class
/// pairs and X_tj the outer product of x_t - x_j.
double metric_hinge(const MetricMatrix& A, const Example& zt, const Example& zj, double R, double U);

/// Lipschitz constant in the score-difference argument, on the domain the
/// shipped learners use. nullopt marks a loss that is not Lipschitz.
///
///  - BoundedHinge: 1, since s = (y1 - y2)/2 lies in {-1, 0, 1}.
///  - NormalizedHinge: 2/(1+4RU), from |y1 - y2| <= 2.
///  - MetricHinge: 1/(2+UR^2), with respect to <A, X>.
///  - SquaredPairwise: 2. The clip at 1 confines the quadratic to
///    |1 - st| < 1, where the slope is at most 2|s| <= 2, so no support
///    bound on the score is required.
///  - Misranking: a step function, not Lipschitz.
std::optional<double> lipschitz_constant(const LossKind& kind);

/// Evaluates ell(h, a, b) for any kind, dispatching on the hypothesis type.
double pair_loss(const LossKind& kind, const Hypothesis& h, const Example& a, const Example& b);

}  // namespace polt

#endif  // POLT_LOSSES_HPP_
