#include "polt/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polt {

namespace {

void require_scales(double R, double U, const char* what) {
  if (!(R > 0.0) || !(U > 0.0)) {
    throw std::invalid_argument(std::string(what) + ": R and U must be positive");
  }
}

}  // namespace

LossKind LossKind::normalized_hinge(double R, double U, bool mask_equal_labels) {
  require_scales(R, U, "LossKind::normalized_hinge");
  return {LossTag::NormalizedHinge, R, U, mask_equal_labels};
}

LossKind LossKind::metric_hinge(double R, double U) {
  require_scales(R, U, "LossKind::metric_hinge");
  return {LossTag::MetricHinge, R, U, false};
}

std::string to_string(LossTag tag) {
  switch (tag) {
    case LossTag::Misranking: return "misranking";
    case LossTag::BoundedHinge: return "bounded-hinge";
    case LossTag::NormalizedHinge: return "normalized-hinge";
    case LossTag::SquaredPairwise: return "squared-pairwise";
    case LossTag::MetricHinge: return "metric-hinge";
  }
  return "unknown";
}

LossTag loss_tag_from_string(const std::string& name) {
  for (LossTag t : {LossTag::Misranking, LossTag::BoundedHinge, LossTag::NormalizedHinge,
                    LossTag::SquaredPairwise, LossTag::MetricHinge}) {
    if (to_string(t) == name) return t;
  }
  throw std::invalid_argument("unknown loss kind '" + name + "'");
}

int misranking(int y1, int y2, double score_diff) {
  return static_cast<double>(y1 - y2) * score_diff < 0.0 ? 1 : 0;
}

double bounded_hinge(double s, double t) {
  if (s == 0.0) return 0.0;
  return std::min(std::max(1.0 - s * t, 0.0), 1.0);
}

double clipped_square(double s, double t) {
  if (s == 0.0) return 0.0;
  const double q = 1.0 - s * t;
  return std::min(q * q, 1.0);
}

double oam_pair_loss(const LinearScorer& h, const Example& zt, const Example& zj) {
  const double s = 0.5 * static_cast<double>(zt.y - zj.y);
  return bounded_hinge(s, pairwise_score(h, zt.x, zj.x));
}

double normalized_hinge(const LinearScorer& w, const Example& z1, const Example& z2, double R,
                        double U, bool mask_equal_labels) {
  require_scales(R, U, "normalized_hinge");
  if (mask_equal_labels && z1.y == z2.y) return 0.0;
  const double margin = pairwise_score(w, z1.x, z2.x) * static_cast<double>(z1.y - z2.y);
  return std::max(1.0 - margin, 0.0) / (1.0 + 4.0 * R * U);
}

double metric_hinge(const MetricMatrix& A, const Example& zt, const Example& zj, double R, double U) {
  require_scales(R, U, "metric_hinge");
  const double agree = zt.y == zj.y ? 1.0 : -1.0;
  // <A, X_tj> is the squared distance under A; no clamping here so the loss
  // stays an affine-then-hinge function of A.
  if (A.a.rows() != zt.x.size() || zt.x.size() != zj.x.size()) {
    throw DimensionError("metric_hinge: dimension mismatch");
  }
  const Vector diff = zt.x - zj.x;
  const double inner = diff.dot(A.a * diff);
  return std::max(1.0 - agree * (1.0 - inner), 0.0) / (2.0 + U * R * R);
}

std::optional<double> lipschitz_constant(const LossKind& kind) {
  switch (kind.tag) {
    case LossTag::Misranking: return std::nullopt;
    case LossTag::BoundedHinge: return 1.0;
    case LossTag::NormalizedHinge: return 2.0 / (1.0 + 4.0 * kind.R * kind.U);
    case LossTag::SquaredPairwise: return 2.0;
    case LossTag::MetricHinge: return 1.0 / (2.0 + kind.U * kind.R * kind.R);
  }
  return std::nullopt;
}

double pair_loss(const LossKind& kind, const Hypothesis& h, const Example& a, const Example& b) {
  if (kind.needs_metric()) {
    const auto* m = std::get_if<MetricMatrix>(&h);
    if (m == nullptr) throw std::invalid_argument("pair_loss: metric-hinge needs a MetricMatrix");
    return metric_hinge(*m, a, b, kind.R, kind.U);
  }
  const auto* w = std::get_if<LinearScorer>(&h);
  if (w == nullptr) throw std::invalid_argument("pair_loss: " + to_string(kind.tag) + " needs a LinearScorer");
  switch (kind.tag) {
    case LossTag::Misranking: return misranking(a.y, b.y, pairwise_score(*w, a.x, b.x));
    case LossTag::BoundedHinge: return oam_pair_loss(*w, a, b);
    case LossTag::NormalizedHinge: return normalized_hinge(*w, a, b, kind.R, kind.U, kind.mask_equal_labels);
    case LossTag::SquaredPairwise:
      return clipped_square(0.5 * static_cast<double>(a.y - b.y), pairwise_score(*w, a.x, b.x));
    case LossTag::MetricHinge: break;
  }
  throw std::logic_error("pair_loss: unhandled loss kind");
}

}  // namespace polt
