#ifndef POLT_ORACLE_HPP_
#define POLT_ORACLE_HPP_

#include "polt/core.hpp"
#include "polt/learners.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace polt {

/// The hindsight objective sum_t f_t(h) of a convex pairwise learner,
/// flattened to F(theta) = constant + sum_p weight_p [offset_p - <dir_p, theta>]_+
/// over the learner's feasible set. Linear hypotheses map to theta = w;
/// symmetric matrices to their upper triangle with off-diagonals scaled by
/// sqrt(2), so that <., .> and ||.|| on theta are the Frobenius ones.
class PairObjective {
 public:
  enum class Domain { Ball, PsdBall };

  /// Replays the learner's buffer over the stream to collect every
  /// (round, history item) pair with its round weight.
  static PairObjective build(std::span<const Example> stream, const LearnerConfig& cfg);

  double value(const Vector& theta) const;
  /// A subgradient at theta (the active-set one).
  Vector subgradient(const Vector& theta) const;
  Vector project(const Vector& theta) const;
  bool feasible(const Vector& theta, double tol = 1e-12) const;
  /// Support function sup_{theta in K} <v, theta>.
  double support(const Vector& v) const;

  Vector flatten(const Hypothesis& h) const;
  Hypothesis unflatten(const Vector& theta) const;

  Domain domain() const { return domain_; }
  Eigen::Index param_dim() const { return param_dim_; }
  Eigen::Index feature_dim() const { return feature_dim_; }
  double radius() const { return U_; }
  double constant() const { return constant_; }
  std::size_t terms() const { return static_cast<std::size_t>(weights_.size()); }

 private:
  Domain domain_ = Domain::Ball;
  Eigen::Index feature_dim_ = 0;
  Eigen::Index param_dim_ = 0;
  double U_ = 1.0;
  double constant_ = 0.0;
  Matrix directions_;  // terms x param_dim
  Vector offsets_;
  Vector weights_;
};

enum class OracleMethod { Ellipsoid, ProjectedSubgradient };

struct OracleOptions {
  OracleMethod method = OracleMethod::Ellipsoid;
  // Caps per start. The subgradient default matches the usual 200k budget.
  std::size_t max_iterations = 0;  // 0 picks 20000 (ellipsoid) / 200000 (subgradient)
  // Ellipsoid: stop once best - certified lower bound <= gap_tolerance.
  double gap_tolerance = 1e-9;
  // Subgradient: stop when the best value improved by < stall_tolerance over
  // the last stall_window iterations.
  double stall_tolerance = 1e-8;
  std::size_t stall_window = 100;
  std::size_t restarts = 3;
  std::uint64_t seed = 0;
};

struct OracleStart {
  double value = 0.0;
  double lower_bound = 0.0;
  std::size_t iterations = 0;
};

struct OracleResult {
  Hypothesis hypothesis;
  double value = 0.0;
  // Certified lower bound on the infimum; -inf when the method offers none.
  double lower_bound = 0.0;
  // max - min of the per-restart optima.
  double restart_spread = 0.0;
  std::vector<OracleStart> starts;

  /// How far `value` may sit above the infimum: the larger of the certified
  /// gap (when available) and the restart disagreement.
  double slack() const;
};

/// Minimizes the hindsight objective. Restarts begin at the origin and at
/// seeded random feasible points; the reported optimum is the best of all.
OracleResult batch_oracle(std::span<const Example> stream, const LearnerConfig& cfg,
                          const OracleOptions& options = {});
OracleResult minimize_objective(const PairObjective& objective, const OracleOptions& options = {});

/// Grid search with successive refinement around the incumbent, for
/// parameter dimension <= 2; returns the best grid value found.
OracleResult grid_oracle(const PairObjective& objective, std::size_t points_per_axis = 201,
                         std::size_t refinements = 12);

}  // namespace polt

#endif  // POLT_ORACLE_HPP_
