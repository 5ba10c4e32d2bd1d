// Independent reference computations for the tests. Written directly from
// the formulas, sharing no code with the library beyond the data types.
#ifndef POLT_TESTS_REFERENCE_HPP_
#define POLT_TESTS_REFERENCE_HPP_

#include "polt/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

namespace ref {

using polt::Example;
using polt::Matrix;
using polt::Vector;

inline double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double hinge(double v) { return v > 0.0 ? v : 0.0; }

inline double bounded_hinge(double s, double t) {
  if (s == 0.0) return 0.0;
  const double v = hinge(1.0 - s * t);
  return v < 1.0 ? v : 1.0;
}

inline double misranking(int y1, int y2, double diff) { return (y1 - y2) * diff < 0.0 ? 1.0 : 0.0; }

inline double normalized_hinge(const Vector& w, const Example& a, const Example& b, double R, double U) {
  return hinge(1.0 - dot(w, a.x - b.x) * (a.y - b.y)) / (1.0 + 4.0 * R * U);
}

inline double metric_hinge(const Matrix& A, const Example& a, const Example& b, double R, double U) {
  const Vector diff = a.x - b.x;
  double inner = 0.0;
  for (Eigen::Index i = 0; i < diff.size(); ++i)
    for (Eigen::Index j = 0; j < diff.size(); ++j) inner += A(i, j) * diff[i] * diff[j];
  const double y = a.y == b.y ? 1.0 : -1.0;
  return hinge(1.0 - y * (1.0 - inner)) / (2.0 + U * R * R);
}

enum class Loss { Misranking, BoundedHinge, NormalizedHinge, MetricHinge };

inline double pair(Loss loss, const Vector& w, const Matrix& A, const Example& a, const Example& b, double R,
                   double U) {
  switch (loss) {
    case Loss::Misranking: return misranking(a.y, b.y, dot(w, a.x) - dot(w, b.x));
    case Loss::BoundedHinge: return bounded_hinge(0.5 * (a.y - b.y), dot(w, a.x) - dot(w, b.x));
    case Loss::NormalizedHinge: return normalized_hinge(w, a, b, R, U);
    case Loss::MetricHinge: return metric_hinge(A, a, b, R, U);
  }
  return 0.0;
}

/// Mean over unordered pairs i < k.
inline double pairwise_risk(Loss loss, const Vector& w, const Matrix& A, const std::vector<Example>& s, double R,
                            double U) {
  double total = 0.0;
  double count = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t k = i + 1; k < s.size(); ++k) {
      total += pair(loss, w, A, s[i], s[k], R, U);
      count += 1.0;
    }
  }
  return total / count;
}

/// Double-loop AUC with half credit for ties.
inline double auc(const Vector& w, const std::vector<Example>& s) {
  double good = 0.0;
  double mixed = 0.0;
  for (const Example& p : s) {
    if (p.y != 1) continue;
    for (const Example& q : s) {
      if (q.y != -1) continue;
      const double a = dot(w, p.x);
      const double b = dot(w, q.x);
      good += a > b ? 1.0 : (a == b ? 0.5 : 0.0);
      mixed += 1.0;
    }
  }
  return good / mixed;
}

inline double covering(double R, double eta, double d) { return eta > R ? 1.0 : std::pow(2.0 * R / eta + 1.0, d); }

inline double oam_bound(double R, double g, double m) {
  const double x = (std::sqrt(4.0 * R * R + 2.0) + std::sqrt(g * m)) / g;
  return x * x;
}

inline double perceptron_bound(double R, double g, double d1) {
  const double x = (R + std::sqrt(g * d1)) / g;
  return x * x;
}

inline double regret_bound(double G, double D, double T) { return G * D * std::sqrt(T); }

inline std::size_t ceil_cn(double c, std::size_t n) {
  // Exact for the decimal c values the tests use: c = k/1000.
  const long long k = std::llround(c * 1000.0);
  const long long num = k * static_cast<long long>(n);
  return static_cast<std::size_t>((num + 999) / 1000);
}

inline double penalty(double x, double n, double cn, double delta) {
  return std::sqrt(std::log(2.0 * (n - cn) * (n - cn + 1.0) / delta) / (x - 1.0));
}

inline std::vector<Example> random_ranking_sample(std::mt19937_64& rng, std::size_t m, std::size_t d,
                                                  bool with_ties = false) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<int> level(-2, 2);
  std::vector<Example> out;
  for (std::size_t i = 0; i < m; ++i) {
    Example z;
    z.x = Vector(static_cast<Eigen::Index>(d));
    for (Eigen::Index j = 0; j < z.x.size(); ++j) z.x[j] = with_ties ? 0.25 * level(rng) : normal(rng) * 0.4;
    z.y = coin(rng) ? 1 : -1;
    out.push_back(z);
  }
  return out;
}

inline Vector random_vector(std::mt19937_64& rng, std::size_t d, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(static_cast<Eigen::Index>(d));
  for (Eigen::Index j = 0; j < v.size(); ++j) v[j] = normal(rng);
  return v;
}

inline Matrix random_symmetric(std::mt19937_64& rng, std::size_t d, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  const Eigen::Index n = static_cast<Eigen::Index>(d);
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) a(i, j) = a(j, i) = normal(rng);
  return a;
}

}  // namespace ref

#endif  // POLT_TESTS_REFERENCE_HPP_
