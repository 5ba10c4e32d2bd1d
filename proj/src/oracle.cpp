#include "polt/oracle.hpp"

#include "polt/buffers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace polt {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

Eigen::Index symmetric_dim(Eigen::Index d) { return d * (d + 1) / 2; }

Vector flatten_symmetric(const Matrix& a) {
  const Eigen::Index d = a.rows();
  Vector out(symmetric_dim(d));
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    out[k++] = a(i, i);
    for (Eigen::Index j = i + 1; j < d; ++j) out[k++] = kSqrt2 * 0.5 * (a(i, j) + a(j, i));
  }
  return out;
}

Matrix unflatten_symmetric(const Vector& v, Eigen::Index d) {
  Matrix a(d, d);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    a(i, i) = v[k++];
    for (Eigen::Index j = i + 1; j < d; ++j) {
      a(i, j) = a(j, i) = v[k++] / kSqrt2;
    }
  }
  return a;
}

}  // namespace

PairObjective PairObjective::build(std::span<const Example> stream, const LearnerConfig& cfg) {
  cfg.validate();
  if (!cfg.is_convex()) {
    throw std::invalid_argument("batch_oracle: learner " + to_string(cfg.kind) + " does not use a convex loss");
  }
  if (stream.size() < 2) throw std::invalid_argument("batch_oracle: stream must contain at least 2 examples");

  PairObjective obj;
  obj.feature_dim_ = stream.front().x.size();
  obj.U_ = cfg.U;
  const bool metric = cfg.kind == LearnerKind::MetricOgd;
  obj.domain_ = metric ? Domain::PsdBall : Domain::Ball;
  obj.param_dim_ = metric ? symmetric_dim(obj.feature_dim_) : obj.feature_dim_;
  const double scale = metric ? 1.0 / (2.0 + cfg.U * cfg.R * cfg.R) : 1.0 / (1.0 + 4.0 * cfg.R * cfg.U);

  std::vector<double> dirs;
  std::vector<double> offs;
  std::vector<double> wts;
  HistoryBuffer buffer = cfg.make_buffer();
  for (std::size_t t = 1; t <= stream.size(); ++t) {
    const Example& zt = stream[t - 1];
    const auto hist = buffer.contents();
    if (!hist.empty()) {
      const bool literal = cfg.kind == LearnerKind::OgdRankFinite && cfg.literal_buffer_normalizer;
      const double m = static_cast<double>(literal ? t - 1 : hist.size());
      const double w = scale / m;
      for (const Example& zj : hist) {
        const Vector diff = zt.x - zj.x;
        if (metric) {
          const double agree = zt.y == zj.y ? 1.0 : -1.0;
          const Vector x = flatten_symmetric(diff * diff.transpose());
          for (Eigen::Index k = 0; k < x.size(); ++k) dirs.push_back(-agree * x[k]);
          offs.push_back(1.0 - agree);
          wts.push_back(w);
        } else if (zt.y == zj.y) {
          // [1 - 0]_+ : a constant term.
          obj.constant_ += w;
        } else {
          const double dy = static_cast<double>(zt.y - zj.y);
          for (Eigen::Index k = 0; k < diff.size(); ++k) dirs.push_back(dy * diff[k]);
          offs.push_back(1.0);
          wts.push_back(w);
        }
      }
    }
    buffer.insert(zt);
  }
  const Eigen::Index terms = static_cast<Eigen::Index>(wts.size());
  obj.directions_ = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      dirs.data(), terms, obj.param_dim_);
  obj.offsets_ = Eigen::Map<const Vector>(offs.data(), terms);
  obj.weights_ = Eigen::Map<const Vector>(wts.data(), terms);
  return obj;
}

double PairObjective::value(const Vector& theta) const {
  if (weights_.size() == 0) return constant_;
  const Vector margins = offsets_ - directions_ * theta;
  return constant_ + weights_.dot(margins.cwiseMax(0.0));
}

Vector PairObjective::subgradient(const Vector& theta) const {
  if (weights_.size() == 0) return Vector::Zero(param_dim_);
  const Vector margins = offsets_ - directions_ * theta;
  const Vector active = (margins.array() > 0.0).select(weights_, 0.0);
  return -(directions_.transpose() * active);
}

Vector PairObjective::project(const Vector& theta) const {
  if (domain_ == Domain::Ball) return project_ball(theta, U_);
  return flatten_symmetric(project_psd_ball(unflatten_symmetric(theta, feature_dim_), U_).a);
}

bool PairObjective::feasible(const Vector& theta, double tol) const {
  const double norm = theta.norm();
  if (norm > U_ * (1.0 + tol)) return false;
  if (domain_ == Domain::Ball) return true;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(unflatten_symmetric(theta, feature_dim_), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -tol * std::max(1.0, norm);
}

double PairObjective::support(const Vector& v) const {
  if (domain_ == Domain::Ball) return U_ * v.norm();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(unflatten_symmetric(v, feature_dim_), Eigen::EigenvaluesOnly);
  return U_ * eig.eigenvalues().cwiseMax(0.0).norm();
}

Vector PairObjective::flatten(const Hypothesis& h) const {
  if (domain_ == Domain::Ball) return std::get<LinearScorer>(h).w;
  return flatten_symmetric(std::get<MetricMatrix>(h).a);
}

Hypothesis PairObjective::unflatten(const Vector& theta) const {
  if (domain_ == Domain::Ball) return LinearScorer(theta);
  return MetricMatrix(unflatten_symmetric(theta, feature_dim_));
}

double OracleResult::slack() const {
  const double gap = std::isfinite(lower_bound) ? std::max(0.0, value - lower_bound) : 0.0;
  return std::max(gap, restart_spread);
}

namespace {

struct StartOutcome {
  Vector theta;
  double value = 0.0;
  double lower_bound = -std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
};

// Cutting direction at an infeasible centre: the normal of a violated
// constraint of K.
Vector feasibility_cut(const PairObjective& obj, const Vector& c) {
  if (obj.domain() == PairObjective::Domain::PsdBall) {
    const Eigen::Index d = obj.feature_dim();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(unflatten_symmetric(c, d));
    if (eig.eigenvalues()[0] < 0.0) {
      const Vector v = eig.eigenvectors().col(0);
      return -flatten_symmetric(v * v.transpose());
    }
  }
  return c / c.norm();
}

StartOutcome run_ellipsoid(const PairObjective& obj, const Vector& start, const OracleOptions& opt,
                           std::size_t cap) {
  const Eigen::Index p = obj.param_dim();
  const double pd = static_cast<double>(p);
  const double inf = std::numeric_limits<double>::infinity();
  Vector c = start;
  // A ball of radius 2U around any feasible point contains K.
  Matrix shape = Matrix::Identity(p, p) * (4.0 * obj.radius() * obj.radius());

  StartOutcome out;
  out.theta = obj.project(start);
  out.value = obj.value(out.theta);
  double lb = -inf;

  for (std::size_t k = 0; k < cap; ++k) {
    out.iterations = k + 1;
    Vector g;
    if (!obj.feasible(c)) {
      const Vector pc = obj.project(c);
      const double fp = obj.value(pc);
      if (fp < out.value) {
        out.value = fp;
        out.theta = pc;
      }
      g = feasibility_cut(obj, c);
    } else {
      const double f = obj.value(c);
      if (f < out.value) {
        // c may sit a rounding error outside K; keep the projected point.
        out.theta = obj.project(c);
        out.value = obj.value(out.theta);
      }
      g = obj.subgradient(c);
      const double gpg = g.dot(shape * g);
      if (!(gpg > 0.0)) {
        // Zero subgradient: c minimizes F.
        lb = f;
        break;
      }
      lb = std::max(lb, f - std::sqrt(gpg));
    }
    if (out.value - std::min(out.value, lb) <= opt.gap_tolerance * (1.0 + std::abs(out.value))) break;

    const Vector sg = shape * g;
    const double gpg = g.dot(sg);
    if (!(gpg > 0.0) || !std::isfinite(gpg)) break;
    const Vector b = sg / std::sqrt(gpg);
    if (p == 1) {
      c -= 0.5 * b;
      shape *= 0.25;
    } else {
      c -= b / (pd + 1.0);
      shape = (pd * pd / (pd * pd - 1.0)) * (shape - (2.0 / (pd + 1.0)) * (b * b.transpose()));
      shape = (0.5 * (shape + shape.transpose())).eval();
    }
  }
  out.lower_bound = std::min(out.value, lb);
  return out;
}

StartOutcome run_subgradient(const PairObjective& obj, const Vector& start, const OracleOptions& opt,
                             std::size_t cap) {
  StartOutcome out;
  Vector theta = obj.project(start);
  out.theta = theta;
  out.value = obj.value(theta);
  double lb = -std::numeric_limits<double>::infinity();
  const double step0 = obj.radius();
  std::vector<double> best_history;
  best_history.reserve(std::min<std::size_t>(cap, 1u << 20));
  for (std::size_t k = 1; k <= cap; ++k) {
    out.iterations = k;
    const double f = obj.value(theta);
    if (f < out.value) {
      out.value = f;
      out.theta = theta;
    }
    const Vector g = obj.subgradient(theta);
    // Linearization: F* >= F(theta) + min_{K} <g, . - theta>.
    lb = std::max(lb, f - g.dot(theta) - obj.support(-g));
    best_history.push_back(out.value);
    if (k > opt.stall_window &&
        best_history[k - 1 - opt.stall_window] - out.value < opt.stall_tolerance) {
      break;
    }
    const double gn = g.norm();
    if (gn == 0.0) {
      lb = f;
      break;
    }
    theta = obj.project(theta - (step0 / std::sqrt(static_cast<double>(k))) * (g / gn));
  }
  out.lower_bound = std::min(out.value, lb);
  return out;
}

}  // namespace

OracleResult minimize_objective(const PairObjective& objective, const OracleOptions& options) {
  const std::size_t cap = options.max_iterations != 0
                              ? options.max_iterations
                              : (options.method == OracleMethod::Ellipsoid ? 20000 : 200000);
  const std::size_t starts = std::max<std::size_t>(1, options.restarts);
  const Eigen::Index p = objective.param_dim();

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  OracleResult result;
  Vector best_theta;
  result.value = std::numeric_limits<double>::infinity();
  result.lower_bound = -std::numeric_limits<double>::infinity();
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < starts; ++s) {
    Vector start = Vector::Zero(p);
    if (s > 0) {
      for (Eigen::Index i = 0; i < p; ++i) start[i] = normal(rng);
      start *= objective.radius() * unif(rng) / std::max(start.norm(), 1e-300);
      start = objective.project(start);
    }
    const StartOutcome run = options.method == OracleMethod::Ellipsoid ? run_ellipsoid(objective, start, options, cap)
                                                                       : run_subgradient(objective, start, options, cap);
    result.starts.push_back({run.value, run.lower_bound, run.iterations});
    if (run.value < result.value) {
      result.value = run.value;
      best_theta = run.theta;
    }
    worst = std::max(worst, run.value);
    result.lower_bound = std::max(result.lower_bound, run.lower_bound);
  }
  result.lower_bound = std::min(result.lower_bound, result.value);
  result.restart_spread = worst - result.value;
  result.hypothesis = objective.unflatten(best_theta);
  return result;
}

OracleResult batch_oracle(std::span<const Example> stream, const LearnerConfig& cfg, const OracleOptions& options) {
  return minimize_objective(PairObjective::build(stream, cfg), options);
}

OracleResult grid_oracle(const PairObjective& objective, std::size_t points_per_axis, std::size_t refinements) {
  const Eigen::Index p = objective.param_dim();
  if (p > 2) throw std::invalid_argument("grid_oracle: parameter dimension must be <= 2");
  if (points_per_axis < 3) throw std::invalid_argument("grid_oracle: need at least 3 points per axis");
  Vector center = Vector::Zero(p);
  double half = objective.radius();
  Vector best = center;
  double best_val = objective.value(center);
  const double steps = static_cast<double>(points_per_axis - 1);
  for (std::size_t level = 0; level <= refinements; ++level) {
    const double h = 2.0 * half / steps;
    const std::size_t ny = p == 2 ? points_per_axis : 1;
    for (std::size_t i = 0; i < points_per_axis; ++i) {
      for (std::size_t j = 0; j < ny; ++j) {
        Vector theta = center;
        theta[0] += -half + h * static_cast<double>(i);
        if (p == 2) theta[1] += -half + h * static_cast<double>(j);
        if (!objective.feasible(theta, 0.0)) continue;
        const double v = objective.value(theta);
        if (v < best_val) {
          best_val = v;
          best = theta;
        }
      }
    }
    center = best;
    half = 2.0 * h;
  }
  OracleResult out;
  out.value = best_val;
  out.lower_bound = -std::numeric_limits<double>::infinity();
  out.hypothesis = objective.unflatten(best);
  out.starts.push_back({best_val, out.lower_bound, refinements + 1});
  return out;
}

}  // namespace polt
