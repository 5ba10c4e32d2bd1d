#include "polt/bounds.hpp"

#include "polt/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace polt {

namespace {

LogValue from_log(double lv) {
  LogValue out;
  out.log_value = lv;
  if (lv < std::log(std::numeric_limits<double>::max())) out.value = std::exp(lv);
  return out;
}

// log(2 N + 1) and log(2 (N + 1)) for N = exp(log_n) >= 1.
double log_two_n_plus_one(double log_n) { return log_n + std::log(2.0 + std::exp(-log_n)); }
double log_two_n_plus_two(double log_n) { return std::log(2.0) + log_n + std::log1p(std::exp(-log_n)); }

TailBound finish(double log_raw, std::size_t n, double c, double epsilon) {
  TailBound out;
  out.log_raw = log_raw;
  out.value = log_raw >= 0.0 ? 1.0 : std::exp(log_raw);
  out.n_sufficient = static_cast<double>(n) > 2.0 / (epsilon * epsilon * c * c);
  return out;
}

void check_tail_inputs(std::size_t n, double c, double epsilon, std::size_t d) {
  if (n < 2) throw std::invalid_argument("risk tail: n must be at least 2");
  if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("risk tail: c must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw std::invalid_argument("risk tail: epsilon must be positive");
  if (d == 0) throw std::invalid_argument("risk tail: d must be positive");
}

double effective_buffer(std::size_t n, double c, std::size_t capacity) {
  const double round = std::floor(c * static_cast<double>(n));
  return std::min(std::max(round - 1.0, 0.0), static_cast<double>(capacity));
}

}  // namespace

LogValue covering_number_bound(double R, double eta, std::size_t d) {
  if (!(R > 0.0) || !(eta > 0.0)) throw std::invalid_argument("covering_number_bound: R and eta must be positive");
  if (d == 0) throw std::invalid_argument("covering_number_bound: d must be positive");
  if (eta > R) return from_log(0.0);
  return from_log(static_cast<double>(d) * std::log(2.0 * R / eta + 1.0));
}

double oam_mistake_bound(double R, double gamma, double m_star) {
  if (!(R > 0.0) || !(gamma > 0.0) || m_star < 0.0) {
    throw std::invalid_argument("oam_mistake_bound: need R, gamma > 0 and M* >= 0");
  }
  // Expanded square, divided by gamma twice: M* = 0 then gives 6/0.2/0.2 =
  // 150 exactly, where squaring gamma first or a sqrt round trip lands an
  // ulp below.
  const double a = 4.0 * R * R + 2.0;
  const double b = gamma * m_star;
  return (a + 2.0 * std::sqrt(a * b) + b) / gamma / gamma;
}

double perceptron_mistake_bound(double R, double gamma, double d1) {
  if (!(R > 0.0) || !(gamma > 0.0) || d1 < 0.0) {
    throw std::invalid_argument("perceptron_mistake_bound: need R, gamma > 0 and D1 >= 0");
  }
  const double b = gamma * d1;
  return (R * R + 2.0 * R * std::sqrt(b) + b) / gamma / gamma;
}

double ogd_regret_bound(double G, double D, std::size_t T) {
  if (!(G > 0.0) || !(D > 0.0) || T == 0) throw std::invalid_argument("ogd_regret_bound: need G, D > 0, T >= 1");
  return G * D * std::sqrt(static_cast<double>(T));
}

TailBound risk_bound_tail(const TailInputs& in, TailVariant variant) {
  check_tail_inputs(in.n, in.c, in.epsilon, in.d);
  if (!(in.lipschitz > 0.0)) throw std::invalid_argument("risk tail: Lipschitz constant must be positive");
  const double n = static_cast<double>(in.n);
  const double eps2 = in.epsilon * in.epsilon;

  double effective = in.c * n - 1.0;
  const bool buffered =
      variant == TailVariant::BufferedEnsembleAverage || variant == TailVariant::BufferedSelectedHypothesis;
  if (buffered) {
    if (!in.buffer_capacity) throw std::invalid_argument("risk tail: buffered variant needs a buffer capacity");
    effective = effective_buffer(in.n, in.c, *in.buffer_capacity) - 1.0;
  }

  double log_raw = 0.0;
  switch (variant) {
    case TailVariant::EnsembleAverage:
    case TailVariant::BufferedEnsembleAverage: {
      const double log_n = covering_number_bound(in.R, in.epsilon / (16.0 * in.lipschitz), in.d).log_value;
      log_raw = log_two_n_plus_one(log_n) - effective * eps2 / 64.0 + std::log(n);
      break;
    }
    case TailVariant::SelectedHypothesis: {
      const double log_n = covering_number_bound(in.R, in.epsilon / (32.0 * in.lipschitz), in.d).log_value;
      log_raw = log_two_n_plus_two(log_n) - effective * eps2 / 256.0 + 2.0 * std::log(n);
      break;
    }
    case TailVariant::BufferedSelectedHypothesis: {
      const double log_n = covering_number_bound(in.R, in.epsilon / (16.0 * in.lipschitz), in.d).log_value;
      log_raw = log_two_n_plus_two(log_n) - effective * eps2 / 256.0 + 2.0 * std::log(n);
      break;
    }
  }
  return finish(log_raw, in.n, in.c, in.epsilon);
}

RiskStatement oam_risk_statement(std::size_t n, double c, double epsilon, std::size_t d, double R, double gamma,
                                 double m_star, std::optional<std::size_t> buffer_capacity) {
  check_tail_inputs(n, c, epsilon, d);
  const double nd = static_cast<double>(n);
  const std::size_t cn = window_start(c, n);
  if (n <= cn) throw std::invalid_argument("oam_risk_statement: n <= c_n");

  RiskStatement out;
  out.risk_level = oam_mistake_bound(R, gamma, m_star) / static_cast<double>(n - cn) + epsilon;

  const double scale = buffer_capacity ? 32.0 : 128.0;
  const double log_cover =
      static_cast<double>(d) * std::log(scale * R * R * std::sqrt(5.0 * nd) / epsilon + 1.0);
  const double effective =
      buffer_capacity ? effective_buffer(n, c, *buffer_capacity) - 1.0 : c * nd - 1.0;
  const double log_raw =
      log_two_n_plus_two(log_cover) - effective * epsilon * epsilon / 256.0 + 2.0 * std::log(nd);
  out.tail = finish(log_raw, n, c, epsilon);
  return out;
}

RiskStatement ogd_risk_statement(std::size_t n, double c, double epsilon, std::size_t d, double R,
                                 double m_star) {
  check_tail_inputs(n, c, epsilon, d);
  const double nd = static_cast<double>(n);
  const std::size_t cn = window_start(c, n);
  if (n <= cn) throw std::invalid_argument("ogd_risk_statement: n <= c_n");

  RiskStatement out;
  out.risk_level = (m_star + std::sqrt(nd)) / static_cast<double>(n - cn) + epsilon;
  const double log_cover = static_cast<double>(d) * std::log(32.0 * R / epsilon + 1.0);
  const double log_raw = log_two_n_plus_one(log_cover) - (c * nd - 1.0) * epsilon * epsilon / 64.0 + std::log(nd);
  out.tail = finish(log_raw, n, c, epsilon);
  return out;
}

}  // namespace polt
