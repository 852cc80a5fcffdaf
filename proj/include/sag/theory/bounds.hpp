#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "sag/objective.hpp"

namespace sag {

/// Inputs shared by the convergence bounds.
struct TheoryParams {
  std::size_t n = 1;
  double L = 1.0;
  double mu = 0.0;
  double alpha = 0.0;
  /// |x0 - x*|^2
  double dist0_sq = 0.0;
  /// (1/n) sum_i |f_i'(x*)|^2
  double sigma_sq = 0.0;
  /// g(x0) - g(x*)
  double g_gap0 = 0.0;
};

class BoundHypothesisError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline void validate(const TheoryParams& t) {
  if (t.n == 0) throw std::invalid_argument("n must be positive");
  if (!(t.L > 0.0)) throw std::invalid_argument("L must be positive");
  if (!(t.dist0_sq >= 0.0)) throw std::invalid_argument("initial distance must be nonnegative");
  if (!(t.sigma_sq >= 0.0)) throw std::invalid_argument("gradient variance must be nonnegative");
}

/// Average squared norm of the component gradients at x*; zero when every
/// component shares the minimizer.
template <FiniteSumProblem P>
double sigma_sq_at_optimum(const P& f, const DenseVector& x_star) {
  double s = 0.0;
  DenseVector g;
  for (std::size_t i = 0; i < f.n(); ++i) {
    f.component_gradient(i, x_star, g);
    s += g.squaredNorm();
  }
  return s / static_cast<double>(f.n());
}

template <FiniteSumProblem P>
TheoryParams theory_params(const P& f, const ProblemConstants& c, const DenseVector& x0, const DenseVector& x_star,
                           double g_star) {
  TheoryParams t;
  t.n = f.n();
  t.L = c.L;
  t.mu = c.mu;
  t.dist0_sq = (x0 - x_star).squaredNorm();
  t.sigma_sq = sigma_sq_at_optimum(f, x_star);
  t.g_gap0 = f.value(x0) - g_star;
  return t;
}

inline double small_step_size(std::size_t n, double L) { return 1.0 / (2.0 * static_cast<double>(n) * L); }
inline double large_step_size(std::size_t n, double mu) { return 1.0 / (2.0 * static_cast<double>(n) * mu); }

/// SAG with alpha = 1/(2nL) and zero-initialized memory:
///   E|x^k - x*|^2 <= (1 - mu/(8Ln))^k [3|x0 - x*|^2 + 9 sigma^2/(4L^2)].
inline double small_step_bound(const TheoryParams& t, std::uint64_t k) {
  validate(t);
  if (!(t.mu > 0.0)) throw BoundHypothesisError("small-step bound requires mu > 0");
  const double n = static_cast<double>(t.n);
  const double rate = 1.0 - t.mu / (8.0 * t.L * n);
  return std::pow(rate, static_cast<double>(k)) * (3.0 * t.dist0_sq + 9.0 * t.sigma_sq / (4.0 * t.L * t.L));
}

/// True when n >= 8 L / mu, the regime of the large-step bound.
inline bool large_step_regime(std::size_t n, double L, double mu) {
  return mu > 0.0 && static_cast<double>(n) * mu >= 8.0 * L;
}

/// Constant of the large-step bound:
///   C = (16L/3n)|x0 - x*|^2 + (4 sigma^2/(3 n mu)) (8 log(1 + mu n/(4L)) + 1).
inline double large_step_constant(const TheoryParams& t) {
  validate(t);
  if (!large_step_regime(t.n, t.L, t.mu)) throw BoundHypothesisError("large-step bound requires n >= 8 L / mu");
  const double n = static_cast<double>(t.n);
  return 16.0 * t.L / (3.0 * n) * t.dist0_sq +
         4.0 * t.sigma_sq / (3.0 * n * t.mu) * (8.0 * std::log1p(t.mu * n / (4.0 * t.L)) + 1.0);
}

/// SAG with alpha = 1/(2n mu) after one averaged stochastic gradient pass,
/// memory reset to zero: E[g(x^k) - g*] <= C (1 - 1/(8n))^k for k >= n,
/// counting the n stochastic gradient steps in k.
inline double large_step_bound(const TheoryParams& t, std::uint64_t k) {
  const double c = large_step_constant(t);
  const double n = static_cast<double>(t.n);
  return c * std::pow(1.0 - 1.0 / (8.0 * n), static_cast<double>(k));
}

/// Averaged stochastic gradient with gamma_k = 1/(2L + mu k/2):
///   E g(mean(x~0..x~{k-1})) - g* <= (2L/k)|x0 - x*|^2 + (4 sigma^2/(k mu)) log(1 + mu k/(4L)).
inline double sgd_average_bound(const TheoryParams& t, std::uint64_t k) {
  validate(t);
  if (k == 0) throw std::invalid_argument("averaged bound needs k >= 1");
  if (!(t.mu > 0.0)) throw BoundHypothesisError("averaged bound requires mu > 0");
  const double kk = static_cast<double>(k);
  return 2.0 * t.L / kk * t.dist0_sq + 4.0 * t.sigma_sq / (kk * t.mu) * std::log1p(t.mu * kk / (4.0 * t.L));
}

/// gamma_k = 1/(2L + (mu/2) k), k >= 1
inline double sgd_phase_step(std::uint64_t k, double L, double mu) {
  return 1.0 / (2.0 * L + 0.5 * mu * static_cast<double>(k));
}

}  // namespace sag
