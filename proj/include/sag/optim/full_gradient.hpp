#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include "sag/objective.hpp"
#include "sag/optim/work.hpp"

namespace sag {

struct FgState {
  DenseVector x;
  DenseVector x_prev;
  std::uint64_t k = 0;
  Work work;

  static FgState init(DenseVector x0) {
    FgState s;
    s.x_prev = x0;
    s.x = std::move(x0);
    return s;
  }
};

/// x <- x - alpha g'(x)
template <FiniteSumProblem P>
void fg_step(FgState& s, const P& f, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("step size must be positive");
  DenseVector g;
  f.gradient(s.x, g);
  ++s.work.full_gradients;
  s.x_prev = s.x;
  s.x -= alpha * g;
  ++s.k;
}

/// Nesterov's accelerated full gradient with the convex-case t-sequence:
/// a gradient step from the extrapolated point v, then v is pushed along
/// the last displacement with weight (t - 1) / t+.
struct AfgState {
  DenseVector x;
  DenseVector x_prev;
  DenseVector v;
  double t = 1.0;
  std::uint64_t k = 0;
  Work work;

  static AfgState init(DenseVector x0) {
    AfgState s;
    s.v = x0;
    s.x_prev = x0;
    s.x = std::move(x0);
    return s;
  }
};

template <FiniteSumProblem P>
void afg_step(AfgState& s, const P& f, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("step size must be positive");
  DenseVector g;
  f.gradient(s.v, g);
  ++s.work.full_gradients;
  DenseVector x_next = s.v - alpha * g;
  const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * s.t * s.t));
  s.v = x_next + ((s.t - 1.0) / t_next) * (x_next - s.x);
  s.x_prev = std::move(s.x);
  s.x = std::move(x_next);
  s.t = t_next;
  ++s.k;
}

/// Full gradient with a backtracking Lipschitz estimate: L doubles until
/// g(x - g'/L) <= g(x) - |g'|^2 / (2L). The estimate never decreases.
struct FgLineSearchState {
  DenseVector x;
  DenseVector x_prev;
  double lipschitz = 1.0;
  double last_alpha = 1.0;
  std::uint64_t k = 0;
  Work work;
  // value and gradient at x, carried over from the accepted trial
  bool have_eval = false;
  BatchEval eval{0.0, {}};

  static FgLineSearchState init(DenseVector x0, double L0 = 1.0) {
    FgLineSearchState s;
    s.x_prev = x0;
    s.x = std::move(x0);
    s.lipschitz = L0;
    return s;
  }
};

template <FiniteSumProblem P>
void fg_linesearch_step(FgLineSearchState& s, const P& f) {
  if (!s.have_eval) {
    s.eval = batch_eval(f, s.x);
    ++s.work.full_gradients;
    s.have_eval = true;
  }
  const double gsq = s.eval.gradient.squaredNorm();
  for (;;) {
    DenseVector trial = s.x - s.eval.gradient / s.lipschitz;
    BatchEval next = batch_eval(f, trial);
    ++s.work.full_gradients;
    const double bound = s.eval.value - gsq / (2.0 * s.lipschitz);
    const bool within_precision = std::abs(next.value - bound) <= 1e-12 * (1.0 + std::abs(s.eval.value));
    if (next.value <= bound || within_precision || !std::isfinite(s.eval.value)) {
      s.last_alpha = 1.0 / s.lipschitz;
      s.x_prev = std::move(s.x);
      s.x = std::move(trial);
      s.eval = std::move(next);
      break;
    }
    s.lipschitz *= 2.0;
    if (s.lipschitz > 1e15) throw DivergenceError("line search diverged");
  }
  ++s.k;
}

}  // namespace sag
