#ifndef POLT_LEARNERS_HPP_
#define POLT_LEARNERS_HPP_

#include "polt/buffers.hpp"
#include "polt/core.hpp"
#include "polt/losses.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>

namespace polt {

enum class LearnerKind { OamInfinite, OamFinite, OgdRankInfinite, OgdRankFinite, Perceptron, MetricOgd };

std::string to_string(LearnerKind kind);
LearnerKind learner_kind_from_string(const std::string& name);

struct LearnerConfig {
  LearnerKind kind = LearnerKind::OamInfinite;
  // Feature radius. For MetricOgd this bounds ||x_t - x_j|| rather than ||x||;
  // that is the quantity the 1/(2+UR^2) scaling controls.
  double R = 1.0;
  // Hypothesis radius (Euclidean ball for ranking, Frobenius ball for metric).
  double U = 1.0;
  // Horizon used for the learning rate; 0 means "length of the stream".
  std::size_t T = 0;
  // Buffer capacity, required for the finite kinds and rejected otherwise.
  std::optional<std::size_t> capacity;
  BufferStrategy finite_strategy = BufferStrategy::Fifo;
  std::uint64_t seed = 0;
  // Apply the projected-gradient ranking update with the minus sign exactly
  // as printed, which ascends the normalized hinge. Comparison only.
  bool literal_update_sign = false;
  // Finite-buffer projected-gradient ranking: normalize by t-1 instead of by
  // the buffer size. Comparison only.
  bool literal_buffer_normalizer = false;
  // Keep every k-th hypothesis plus the model-selection window [c_n-1, n-2];
  // 1 keeps everything.
  std::size_t snapshot_stride = 1;
  double c = 0.1;

  bool is_finite() const { return kind == LearnerKind::OamFinite || kind == LearnerKind::OgdRankFinite; }
  bool is_ranking() const { return kind != LearnerKind::MetricOgd; }
  bool is_pairwise() const { return kind != LearnerKind::Perceptron; }
  bool is_convex() const {
    return kind == LearnerKind::OgdRankInfinite || kind == LearnerKind::OgdRankFinite ||
           kind == LearnerKind::MetricOgd;
  }

  /// Learning rate U^2 / sqrt(T); requires T > 0.
  double eta() const;
  /// The loss the learner optimizes and reports M_t with.
  LossKind loss() const;
  HistoryBuffer make_buffer() const;
  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
};

/// One OAM round: w + (1/m) sum_j l_j y_t (x_t - x_j), with all l_j taken at
/// the incoming w. m defaults to |history|. Empty history leaves w unchanged.
LinearScorer oam_step(const LinearScorer& w, const Example& zt, std::span<const Example> history,
                      std::optional<std::size_t> normalizer = std::nullopt);

/// One projected subgradient step on the normalized-hinge round loss, over
/// the ball of radius cfg.U.
LinearScorer ogd_rank_step(const LinearScorer& w, const Example& zt, std::span<const Example> history,
                           const LearnerConfig& cfg, std::optional<std::size_t> normalizer = std::nullopt);

/// Classical perceptron. A zero margin counts as a mistake.
std::pair<LinearScorer, bool> perceptron_step(const LinearScorer& w, const Example& zt);

/// One projected subgradient step on the metric hinge round loss, over
/// {A PSD, ||A||_F <= cfg.U}.
MetricMatrix metric_ogd_step(const MetricMatrix& A, const Example& zt, std::span<const Example> history,
                             const LearnerConfig& cfg);

/// Euclidean projection onto the ball of radius U.
Vector project_ball(const Vector& w, double U);

/// Projection onto the PSD cone intersected with the Frobenius ball of
/// radius U: symmetrize, clip negative eigenvalues, then rescale into the
/// ball. For a ball centred at the origin the composition is the exact
/// projection onto the intersection.
MetricMatrix project_psd_ball(const Matrix& A, double U);

/// Drives the configured learner over the stream. Round t records M_t from
/// h_{t-1} against the history before z_t is inserted, then updates, then
/// inserts z_t.
RunTrace run_online(const LearnerConfig& cfg, std::span<const Example> stream);

}  // namespace polt

#endif  // POLT_LEARNERS_HPP_
