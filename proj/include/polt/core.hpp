#ifndef POLT_CORE_HPP_
#define POLT_CORE_HPP_

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace polt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised when two vectors (or a vector and a hypothesis) disagree on dimension.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One labeled instance. For ranking data y is -1 or +1; metric-learning
/// datasets carry an integer class id instead and pairwise agreement is
/// derived from equality of ids.
struct Example {
  Vector x;
  int y = 0;
};

using Dataset = std::vector<Example>;

/// Linear scoring function f(x) = <w, x>.
struct LinearScorer {
  Vector w;

  LinearScorer() = default;
  explicit LinearScorer(Vector weights) : w(std::move(weights)) {}
  static LinearScorer zero(Eigen::Index d) { return LinearScorer(Vector::Zero(d)); }

  Eigen::Index dim() const { return w.size(); }
  double score(const Vector& x) const;
};

/// Symmetric matrix parameterizing a Mahalanobis distance.
struct MetricMatrix {
  Matrix a;

  MetricMatrix() = default;
  explicit MetricMatrix(Matrix m) : a(std::move(m)) {}
  static MetricMatrix zero(Eigen::Index d) { return MetricMatrix(Matrix::Zero(d, d)); }

  Eigen::Index dim() const { return a.rows(); }
};

using Hypothesis = std::variant<LinearScorer, MetricMatrix>;

Eigen::Index hypothesis_dim(const Hypothesis& h);

/// c_n = ceil(c * n), guarded against the product landing a few ulps above
/// an integer (0.1 * 30 and friends).
std::size_t window_start(double c, std::size_t n);

/// <w, x1> - <w, x2>.
double pairwise_score(const LinearScorer& h, const Vector& x1, const Vector& x2);

/// Squared Mahalanobis distance (x1 - x2)^T A (x1 - x2). Tiny negative values
/// produced by rounding on a PSD matrix are clamped to zero.
double mahalanobis_sq(const MetricMatrix& m, const Vector& x1, const Vector& x2);

/// Per-round scalars recorded by an online run.
struct RoundRecord {
  // M_t (or its buffered analogue) computed with the pre-update hypothesis
  // against the pre-insert history. Undefined on round 1 and for the
  // perceptron.
  std::optional<double> statistic;
  // Contribution of this round to the cumulative online loss: f_t(h_{t-1})
  // for the pairwise learners, the mistake indicator for the perceptron.
  double loss = 0.0;
  bool mistake = false;
  std::size_t history_size = 0;
};

/// Record of one online run over a stream of n examples. Rounds are indexed
/// 1..n, hypotheses 0..n where hypotheses[t] is the state after round t, so
/// round t is played with hypotheses[t - 1].
class RunTrace {
 public:
  RunTrace() = default;
  RunTrace(std::size_t n, double c, std::optional<std::size_t> capacity);

  std::size_t n() const { return rounds_.size(); }
  double c() const { return c_; }
  const std::optional<std::size_t>& capacity() const { return capacity_; }

  const RoundRecord& round(std::size_t t) const;
  RoundRecord& round(std::size_t t);
  const std::vector<RoundRecord>& rounds() const { return rounds_; }

  bool has_hypothesis(std::size_t index) const;
  /// h_index in 0..n; throws if the snapshot was not retained.
  const Hypothesis& hypothesis(std::size_t index) const;
  /// The hypothesis played on round t, i.e. h_{t-1}.
  const Hypothesis& before_round(std::size_t t) const { return hypothesis(t - 1); }
  void set_hypothesis(std::size_t index, Hypothesis h);
  std::size_t stored_hypotheses() const;

  double cumulative_loss() const;
  std::size_t mistakes() const;

  std::size_t radius_violations = 0;

 private:
  double c_ = 0.1;
  std::optional<std::size_t> capacity_;
  std::vector<RoundRecord> rounds_;
  std::vector<std::optional<Hypothesis>> hypotheses_;
};

}  // namespace polt

#endif  // POLT_CORE_HPP_
