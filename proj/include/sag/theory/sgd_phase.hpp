#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>

#include "sag/objective.hpp"
#include "sag/optim/sag.hpp"
#include "sag/random.hpp"
#include "sag/theory/bounds.hpp"

namespace sag {

/// Stochastic gradient with gamma_k = 1/(2L + mu k/2), reporting the
/// average of the pre-step iterates x~0..x~{k-1} after every step k.
/// The observer receives (k, average, current iterate).
template <FiniteSumProblem P, class Observer>
void sgd_averaged_run(const P& f, const ProblemConstants& c, const DenseVector& x0, std::uint64_t steps, Rng& rng,
                      Observer&& observe) {
  if (!(c.mu > 0.0)) throw std::invalid_argument("averaged stochastic gradient needs mu > 0");
  if (!(c.L > 0.0)) throw std::invalid_argument("L must be positive");
  DenseVector x = x0;
  DenseVector sum = DenseVector::Zero(x0.size());
  DenseVector g;
  for (std::uint64_t k = 1; k <= steps; ++k) {
    sum += x;
    const std::size_t i = uniform_index(rng, f.n());
    f.component_gradient(i, x, g);
    x -= sgd_phase_step(k, c.L, c.mu) * g;
    observe(k, DenseVector(sum / static_cast<double>(k)), x);
  }
}

/// One pass (n steps) of averaged stochastic gradient from x0; returns
/// (1/n) sum_{i<n} x~i. For n = 1 this is x0 itself.
template <FiniteSumProblem P>
DenseVector sgd_init_phase(const P& f, const ProblemConstants& c, const DenseVector& x0, Rng& rng) {
  DenseVector avg = x0;
  sgd_averaged_run(f, c, x0, f.n(), rng, [&](std::uint64_t, const DenseVector& a, const DenseVector&) { avg = a; });
  return avg;
}

template <FiniteSumProblem P>
DenseVector sgd_init_phase(const P& f, const ProblemConstants& c, const DenseVector& x0, std::uint64_t seed) {
  Rng rng(seed);
  return sgd_init_phase(f, c, x0, rng);
}

/// The large-step protocol: one averaged stochastic gradient pass, then
/// basic SAG with alpha = 1/(2n mu) started from the average with all
/// memories zero. Iterations are counted from the start of the stochastic
/// phase, so the observer sees (k, x^k) for k = n, n+1, ..., total.
template <FiniteSumProblem P, class Observer>
void large_step_protocol(const P& f, const ProblemConstants& c, const DenseVector& x0, std::uint64_t total, Rng& rng,
                         Observer&& observe) {
  const std::uint64_t n = f.n();
  if (total < n) throw std::invalid_argument("protocol length must cover the stochastic pass");
  SagBasicState s = SagBasicState::init(sgd_init_phase(f, c, x0, rng), f.n());
  const double alpha = large_step_size(f.n(), c.mu);
  observe(n, std::as_const(s.x));
  for (std::uint64_t k = n + 1; k <= total; ++k) {
    sag_step_basic(s, f, alpha, uniform_index(rng, f.n()));
    observe(k, std::as_const(s.x));
  }
}

}  // namespace sag
