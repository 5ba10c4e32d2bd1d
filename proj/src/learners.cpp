#include "polt/learners.hpp"

#include <cmath>
#include <stdexcept>

namespace polt {

std::string to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::OamInfinite: return "oam-infinite";
    case LearnerKind::OamFinite: return "oam-finite";
    case LearnerKind::OgdRankInfinite: return "ogd-infinite";
    case LearnerKind::OgdRankFinite: return "ogd-finite";
    case LearnerKind::Perceptron: return "perceptron";
    case LearnerKind::MetricOgd: return "metric-ogd";
  }
  return "unknown";
}

LearnerKind learner_kind_from_string(const std::string& name) {
  for (LearnerKind k : {LearnerKind::OamInfinite, LearnerKind::OamFinite, LearnerKind::OgdRankInfinite,
                        LearnerKind::OgdRankFinite, LearnerKind::Perceptron, LearnerKind::MetricOgd}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown learner '" + name + "'");
}

double LearnerConfig::eta() const {
  if (T == 0) throw std::invalid_argument("LearnerConfig::eta: horizon T not set");
  return U * U / std::sqrt(static_cast<double>(T));
}

LossKind LearnerConfig::loss() const {
  switch (kind) {
    case LearnerKind::OamInfinite:
    case LearnerKind::OamFinite: return LossKind::bounded_hinge();
    case LearnerKind::OgdRankInfinite:
    case LearnerKind::OgdRankFinite: return LossKind::normalized_hinge(R, U);
    case LearnerKind::MetricOgd: return LossKind::metric_hinge(R, U);
    case LearnerKind::Perceptron: return LossKind::misranking();
  }
  throw std::logic_error("LearnerConfig::loss: unhandled kind");
}

HistoryBuffer LearnerConfig::make_buffer() const {
  if (!is_finite()) return HistoryBuffer::infinite();
  if (finite_strategy == BufferStrategy::Reservoir) return HistoryBuffer::reservoir(*capacity, seed);
  return HistoryBuffer::fifo(*capacity);
}

void LearnerConfig::validate() const {
  if (!(R > 0.0) || !(U > 0.0)) throw std::invalid_argument("learner: R and U must be positive");
  if (is_finite() && (!capacity || *capacity == 0)) {
    throw std::invalid_argument("learner " + to_string(kind) + ": a positive buffer capacity is required");
  }
  if (!is_finite() && capacity) {
    throw std::invalid_argument("learner " + to_string(kind) + ": buffer capacity only applies to finite kinds");
  }
  if (finite_strategy == BufferStrategy::Infinite) {
    throw std::invalid_argument("learner: finite strategy must be fifo or reservoir");
  }
  if (snapshot_stride == 0) throw std::invalid_argument("learner: snapshot stride must be >= 1");
  if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("learner: c must lie in (0, 1)");
}

LinearScorer oam_step(const LinearScorer& w, const Example& zt, std::span<const Example> history,
                      std::optional<std::size_t> normalizer) {
  if (history.empty()) return w;
  Vector sum = Vector::Zero(w.dim());
  for (const Example& zj : history) {
    const double l = oam_pair_loss(w, zt, zj);
    if (l != 0.0) sum.noalias() += l * (zt.x - zj.x);
  }
  const double m = static_cast<double>(normalizer.value_or(history.size()));
  return LinearScorer(w.w + (static_cast<double>(zt.y) / m) * sum);
}

LinearScorer ogd_rank_step(const LinearScorer& w, const Example& zt, std::span<const Example> history,
                           const LearnerConfig& cfg, std::optional<std::size_t> normalizer) {
  if (history.empty()) return w;
  Vector sum = Vector::Zero(w.dim());
  for (const Example& zj : history) {
    if (normalized_hinge(w, zt, zj, cfg.R, cfg.U) > 0.0) {
      sum.noalias() += static_cast<double>(zt.y - zj.y) * (zt.x - zj.x);
    }
  }
  const double m = static_cast<double>(normalizer.value_or(history.size()));
  // The subgradient of the round loss is -sum / ((1+4RU) m), so descent adds.
  const double step = cfg.eta() / ((1.0 + 4.0 * cfg.R * cfg.U) * m);
  const double sign = cfg.literal_update_sign ? -1.0 : 1.0;
  return LinearScorer(project_ball(w.w + (sign * step) * sum, cfg.U));
}

std::pair<LinearScorer, bool> perceptron_step(const LinearScorer& w, const Example& zt) {
  const bool mistake = static_cast<double>(zt.y) * w.score(zt.x) <= 0.0;
  if (!mistake) return {w, false};
  return {LinearScorer(w.w + static_cast<double>(zt.y) * zt.x), true};
}

MetricMatrix metric_ogd_step(const MetricMatrix& A, const Example& zt, std::span<const Example> history,
                             const LearnerConfig& cfg) {
  if (history.empty()) return A;
  const Eigen::Index d = A.dim();
  Matrix sum = Matrix::Zero(d, d);
  for (const Example& zj : history) {
    if (metric_hinge(A, zt, zj, cfg.R, cfg.U) > 0.0) {
      const Vector diff = zt.x - zj.x;
      const double agree = zt.y == zj.y ? 1.0 : -1.0;
      sum.noalias() += agree * (diff * diff.transpose());
    }
  }
  const double m = static_cast<double>(history.size());
  const double step = cfg.eta() / ((2.0 + cfg.U * cfg.R * cfg.R) * m);
  return project_psd_ball(A.a - step * sum, cfg.U);
}

Vector project_ball(const Vector& w, double U) {
  if (!(U > 0.0)) throw std::invalid_argument("project_ball: U must be positive");
  const double norm = w.norm();
  if (norm <= U) return w;
  return w * (U / norm);
}

MetricMatrix project_psd_ball(const Matrix& A, double U) {
  if (!(U > 0.0)) throw std::invalid_argument("project_psd_ball: U must be positive");
  if (A.rows() != A.cols()) throw DimensionError("project_psd_ball: matrix is not square");
  const Matrix sym = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success) throw std::runtime_error("project_psd_ball: eigendecomposition failed");
  const Vector clipped = eig.eigenvalues().cwiseMax(0.0);
  Matrix psd = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
  psd = (0.5 * (psd + psd.transpose())).eval();
  const double fro = psd.norm();
  if (fro > U) psd *= U / fro;
  return MetricMatrix(std::move(psd));
}

namespace {

bool keep_snapshot(const LearnerConfig& cfg, std::size_t index, std::size_t n, std::size_t cn) {
  if (cfg.snapshot_stride <= 1) return true;
  if (index == 0 || index == n || index % cfg.snapshot_stride == 0) return true;
  return cn >= 1 && index + 1 >= cn && index + 2 <= n;
}

double mean_loss(const LossKind& loss, const Hypothesis& h, const Example& zt, std::span<const Example> hist,
                 double& total) {
  total = 0.0;
  for (const Example& zj : hist) total += pair_loss(loss, h, zt, zj);
  return total / static_cast<double>(hist.size());
}

}  // namespace

RunTrace run_online(const LearnerConfig& config, std::span<const Example> stream) {
  config.validate();
  const std::size_t n = stream.size();
  if (n < 2) throw std::invalid_argument("run_online: stream must contain at least 2 examples");
  const Eigen::Index d = stream.front().x.size();
  for (const Example& z : stream) {
    if (z.x.size() != d) throw DimensionError("run_online: inconsistent feature dimension in stream");
  }

  LearnerConfig cfg = config;
  if (cfg.T == 0) cfg.T = n;
  const LossKind loss = cfg.loss();
  const std::size_t cn = window_start(cfg.c, n);

  RunTrace trace(n, cfg.c, cfg.capacity);
  HistoryBuffer buffer = cfg.make_buffer();

  Hypothesis h = cfg.kind == LearnerKind::MetricOgd ? Hypothesis(MetricMatrix::zero(d))
                                                    : Hypothesis(LinearScorer::zero(d));
  trace.set_hypothesis(0, h);

  // For the metric learner R bounds pairwise differences, so the per-point
  // check uses R/2.
  const double point_radius = cfg.kind == LearnerKind::MetricOgd ? 0.5 * cfg.R : cfg.R;

  for (std::size_t t = 1; t <= n; ++t) {
    const Example& zt = stream[t - 1];
    if (zt.x.norm() > point_radius * (1.0 + 1e-12)) ++trace.radius_violations;
    RoundRecord& rec = trace.round(t);

    if (cfg.kind == LearnerKind::Perceptron) {
      auto [next, mistake] = perceptron_step(std::get<LinearScorer>(h), zt);
      rec.mistake = mistake;
      rec.loss = mistake ? 1.0 : 0.0;
      h = std::move(next);
    } else {
      const std::span<const Example> hist = buffer.contents();
      rec.history_size = hist.size();
      if (!hist.empty()) {
        double total = 0.0;
        rec.statistic = mean_loss(loss, h, zt, hist, total);
        rec.loss = *rec.statistic;
        switch (cfg.kind) {
          case LearnerKind::OamInfinite:
          case LearnerKind::OamFinite:
            h = oam_step(std::get<LinearScorer>(h), zt, hist);
            break;
          case LearnerKind::OgdRankInfinite:
            h = ogd_rank_step(std::get<LinearScorer>(h), zt, hist, cfg);
            break;
          case LearnerKind::OgdRankFinite: {
            std::optional<std::size_t> norm;
            if (cfg.literal_buffer_normalizer) {
              norm = t - 1;
              rec.loss = total / static_cast<double>(t - 1);
            }
            h = ogd_rank_step(std::get<LinearScorer>(h), zt, hist, cfg, norm);
            break;
          }
          case LearnerKind::MetricOgd:
            h = metric_ogd_step(std::get<MetricMatrix>(h), zt, hist, cfg);
            break;
          case LearnerKind::Perceptron: break;
        }
      }
      buffer.insert(zt);
    }
    if (keep_snapshot(cfg, t, n, cn)) trace.set_hypothesis(t, h);
  }
  return trace;
}

}  // namespace polt
