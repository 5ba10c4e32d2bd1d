#include "polt/core.hpp"

#include <algorithm>
#include <cmath>

namespace polt {

namespace {

void require_dim(Eigen::Index expected, Eigen::Index got, const char* what) {
  if (expected != got) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(expected) +
                         " vs " + std::to_string(got) + ")");
  }
}

}  // namespace

double LinearScorer::score(const Vector& x) const {
  require_dim(w.size(), x.size(), "LinearScorer::score");
  return w.dot(x);
}

Eigen::Index hypothesis_dim(const Hypothesis& h) {
  return std::visit([](const auto& v) { return v.dim(); }, h);
}

std::size_t window_start(double c, std::size_t n) {
  if (!(c > 0.0) || !(c < 1.0)) throw std::invalid_argument("window fraction c must lie in (0, 1)");
  const double raw = c * static_cast<double>(n);
  const double nearest = std::round(raw);
  if (std::abs(raw - nearest) <= 1e-12 * std::max(1.0, raw)) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::ceil(raw));
}

double pairwise_score(const LinearScorer& h, const Vector& x1, const Vector& x2) {
  require_dim(h.w.size(), x1.size(), "pairwise_score");
  require_dim(h.w.size(), x2.size(), "pairwise_score");
  return h.w.dot(x1) - h.w.dot(x2);
}

double mahalanobis_sq(const MetricMatrix& m, const Vector& x1, const Vector& x2) {
  require_dim(m.a.rows(), x1.size(), "mahalanobis_sq");
  require_dim(m.a.rows(), x2.size(), "mahalanobis_sq");
  require_dim(m.a.rows(), m.a.cols(), "mahalanobis_sq");
  const Vector diff = x1 - x2;
  const double v = diff.dot(m.a * diff);
  return v < 0.0 && v > -1e-9 ? 0.0 : v;
}

RunTrace::RunTrace(std::size_t n, double c, std::optional<std::size_t> capacity)
    : c_(c), capacity_(capacity), rounds_(n), hypotheses_(n + 1) {}

const RoundRecord& RunTrace::round(std::size_t t) const {
  if (t < 1 || t > rounds_.size()) throw std::out_of_range("RunTrace::round: index out of range");
  return rounds_[t - 1];
}

RoundRecord& RunTrace::round(std::size_t t) {
  if (t < 1 || t > rounds_.size()) throw std::out_of_range("RunTrace::round: index out of range");
  return rounds_[t - 1];
}

bool RunTrace::has_hypothesis(std::size_t index) const {
  return index < hypotheses_.size() && hypotheses_[index].has_value();
}

const Hypothesis& RunTrace::hypothesis(std::size_t index) const {
  if (!has_hypothesis(index)) {
    throw std::out_of_range("RunTrace: hypothesis h_" + std::to_string(index) + " not stored");
  }
  return *hypotheses_[index];
}

void RunTrace::set_hypothesis(std::size_t index, Hypothesis h) {
  if (index >= hypotheses_.size()) throw std::out_of_range("RunTrace::set_hypothesis");
  hypotheses_[index] = std::move(h);
}

std::size_t RunTrace::stored_hypotheses() const {
  return static_cast<std::size_t>(
      std::count_if(hypotheses_.begin(), hypotheses_.end(), [](const auto& h) { return h.has_value(); }));
}

double RunTrace::cumulative_loss() const {
  double total = 0.0;
  for (const auto& r : rounds_) total += r.loss;
  return total;
}

std::size_t RunTrace::mistakes() const {
  return static_cast<std::size_t>(
      std::count_if(rounds_.begin(), rounds_.end(), [](const RoundRecord& r) { return r.mistake; }));
}

}  // namespace polt
