#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>

#include "sag/objective.hpp"
#include "sag/optim/work.hpp"
#include "sag/step_schedule.hpp"

namespace sag {

struct SgOptions {
  /// Project onto the ball of this radius after every step.
  std::optional<double> project_radius;
  /// Maintain the running mean of the post-step iterates.
  bool average = false;
};

struct SgState {
  DenseVector x;
  DenseVector x_prev;
  DenseVector x_avg;
  std::uint64_t k = 0;
  double last_alpha = 0.0;
  Work work;

  static SgState init(DenseVector x0) {
    SgState s;
    s.x_prev = x0;
    s.x_avg = x0;
    s.x = std::move(x0);
    return s;
  }
};

/// One stochastic gradient step x <- x - alpha_k f_i'(x), with optional
/// norm-ball projection and iterate averaging. The caller draws i.
template <FiniteSumProblem P>
void sg_step(SgState& s, const P& f, const StepSchedule& schedule, std::size_t i, const SgOptions& opts = {}) {
  const double alpha = schedule.at(s.k + 1, s.work.effective_passes(f.n()));
  DenseVector g;
  f.component_gradient(i, s.x, g);
  ++s.work.component_gradients;
  s.x_prev = s.x;
  s.x -= alpha * g;
  if (opts.project_radius) {
    const double r = *opts.project_radius;
    const double norm = s.x.norm();
    if (norm > r) s.x *= r / norm;
  }
  ++s.k;
  s.last_alpha = alpha;
  if (opts.average) s.x_avg += (s.x - s.x_avg) / static_cast<double>(s.k);
}

/// Radius of a ball guaranteed to contain x*: g(x*) <= g(0) and
/// g(x) >= (lambda/2)|x|^2 give |x*|^2 <= 2 g(0) / lambda.
inline double pegasos_radius(const Objective& f) {
  if (!(f.lambda() > 0.0)) throw ConfigError("pegasos projection requires lambda > 0");
  const DenseVector zero = DenseVector::Zero(static_cast<Eigen::Index>(f.dim()));
  return std::sqrt(2.0 * f.value(zero) / f.lambda());
}

struct MomentumState {
  DenseVector x;
  DenseVector x_prev;
  std::uint64_t k = 0;
  Work work;

  static MomentumState init(DenseVector x0) {
    MomentumState s;
    s.x_prev = x0;
    s.x = std::move(x0);
    return s;
  }
};

/// x+ = x - alpha f_i'(x) + beta (x - x_prev)
template <FiniteSumProblem P>
void momentum_step(MomentumState& s, const P& f, double alpha, double beta, std::size_t i) {
  if (!(beta >= 0.0 && beta < 1.0)) throw std::invalid_argument("momentum must lie in [0, 1)");
  DenseVector g;
  f.component_gradient(i, s.x, g);
  ++s.work.component_gradients;
  DenseVector next = s.x - alpha * g;
  if (beta != 0.0) next += beta * (s.x - s.x_prev);
  s.x_prev = std::move(s.x);
  s.x = std::move(next);
  ++s.k;
}

/// Steps along the running mean of every gradient seen so far.
struct GradAvgState {
  DenseVector x;
  DenseVector x_prev;
  DenseVector sum;
  std::uint64_t k = 0;
  Work work;

  static GradAvgState init(DenseVector x0) {
    GradAvgState s;
    s.sum = DenseVector::Zero(x0.size());
    s.x_prev = x0;
    s.x = std::move(x0);
    return s;
  }
};

template <FiniteSumProblem P>
void grad_avg_step(GradAvgState& s, const P& f, double alpha, std::size_t i) {
  DenseVector g;
  f.component_gradient(i, s.x, g);
  ++s.work.component_gradients;
  ++s.k;
  s.sum += g;
  s.x_prev = s.x;
  s.x -= (alpha / static_cast<double>(s.k)) * s.sum;
}

}  // namespace sag
