#ifndef POLT_BOUNDS_HPP_
#define POLT_BOUNDS_HPP_

#include <cstddef>
#include <optional>

namespace polt {

/// A quantity evaluated in natural-log space. `value` is exp(log_value)
/// when that is a finite double, nullopt otherwise.
struct LogValue {
  double log_value = 0.0;
  std::optional<double> value;
};

/// Covering number of the linear ball of radius R at scale eta in d
/// dimensions: 1 when eta > R, otherwise (2R/eta + 1)^d.
LogValue covering_number_bound(double R, double eta, std::size_t d);

/// ((sqrt(4R^2 + 2) + sqrt(gamma * M*)) / gamma)^2, the cumulative-loss
/// bound for OAM against a margin-gamma comparator with loss M*. The
/// finite-buffer learner satisfies the same expression with the buffered M*.
double oam_mistake_bound(double R, double gamma, double m_star);

/// ((R + sqrt(gamma * D1)) / gamma)^2.
double perceptron_mistake_bound(double R, double gamma, double d1);

/// G * D * sqrt(T).
double ogd_regret_bound(double G, double D, std::size_t T);

enum class TailVariant {
  EnsembleAverage,            // average risk of the ensemble vs M^n
  SelectedHypothesis,         // risk of the penalized-risk selection vs M^n
  BufferedEnsembleAverage,    // as EnsembleAverage, against M_B^n
  BufferedSelectedHypothesis  // as SelectedHypothesis, against M_B^n
};

struct TailInputs {
  std::size_t n = 0;
  double c = 0.1;
  double epsilon = 0.1;
  std::size_t d = 1;
  // Radius of the hypothesis class sup |<w, x>| <= R fed to the covering number.
  double R = 1.0;
  double lipschitz = 1.0;
  // Buffer capacity |B|, buffered variants only.
  std::optional<std::size_t> buffer_capacity;
};

struct TailBound {
  double log_raw = 0.0;  // natural log of the unclamped tail
  double value = 1.0;    // clamped to [0, 1]
  // Whether n exceeds 2 / (eps^2 c^2), the "n large enough" premise.
  bool n_sufficient = false;
};

/// Probability tails for the deviation of risk above the online statistic:
///   EnsembleAverage:            [2 N(eps/(16 Lip)) + 1] exp(-(cn-1) eps^2/64 + ln n)
///   SelectedHypothesis:       2 [N(eps/(32 Lip)) + 1] exp(-(cn-1) eps^2/256 + 2 ln n)
///   BufferedEnsembleAverage:    first line with (|B_cn| - 1) in place of (cn - 1)
///   BufferedSelectedHypothesis: 2 [N(eps/(16 Lip)) + 1] exp(-(|B_cn|-1) eps^2/256 + 2 ln n)
/// with |B_cn| = min(floor(cn) - 1, |B|).
TailBound risk_bound_tail(const TailInputs& in, TailVariant variant);

/// Risk level and tail for the penalized-risk OAM hypothesis:
/// Pr[R(w_hat) >= bound/(n - c_n) + eps] <= tail, where bound is
/// oam_mistake_bound and the tail uses the covering radius R^2 sqrt(5n)
/// implied by ||w_t|| <= sqrt(n (4R^2 + 2)). `buffered` switches to the
/// finite-buffer statement (the buffered M* and |B_cn|).
struct RiskStatement {
  double risk_level = 0.0;
  TailBound tail;
};
RiskStatement oam_risk_statement(std::size_t n, double c, double epsilon, std::size_t d, double R, double gamma,
                                 double m_star, std::optional<std::size_t> buffer_capacity = std::nullopt);

/// Risk level and tail for the averaged projected-gradient hypothesis (ranking
/// or metric): Pr[R(h_bar) >= (M* + sqrt(n))/(n - c_n) + eps] <=
/// [2 (32R/eps + 1)^d + 1] exp(-(cn - 1) eps^2/64 + ln n).
RiskStatement ogd_risk_statement(std::size_t n, double c, double epsilon, std::size_t d, double R,
                                 double m_star);

}  // namespace polt

#endif  // POLT_BOUNDS_HPP_
