#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include "sag/objective.hpp"
#include "sag/random.hpp"
#include "sag/theory/bounds.hpp"

namespace sag {

/// Joint state of basic SAG: column i of y is the memory of component i.
struct Theta {
  Eigen::MatrixXd y;
  DenseVector x;

  std::size_t n() const { return static_cast<std::size_t>(y.cols()); }
  std::size_t p() const { return static_cast<std::size_t>(x.size()); }
};

/// The fixed point (f_1'(x*), ..., f_n'(x*), x*) together with g(x*).
struct LyapunovCenter {
  Theta theta;
  double value = 0.0;
};

template <FiniteSumProblem P>
LyapunovCenter lyapunov_center(const P& f, const DenseVector& x_star) {
  LyapunovCenter c;
  c.theta.x = x_star;
  c.theta.y.resize(x_star.size(), static_cast<Eigen::Index>(f.n()));
  DenseVector g;
  for (std::size_t i = 0; i < f.n(); ++i) {
    f.component_gradient(i, x_star, g);
    c.theta.y.col(static_cast<Eigen::Index>(i)) = g;
  }
  c.value = f.value(x_star);
  return c;
}

enum class LyapunovVariant { small_step, large_step };

/// Q(theta) = [2 g(x + (alpha/n) sum y) - 2 g* if function_term]
///          + (theta - theta*)' [A b; b' c] (theta - theta*)
/// with A = a_I I + a_e e e', b = b_e e, c = c I, e the stacked identity.
struct LyapunovSpec {
  LyapunovVariant variant = LyapunovVariant::small_step;
  std::size_t n = 1;
  double alpha = 0.0;
  double delta = 0.0;
  double a_identity = 0.0;
  double a_sum = 0.0;
  double b_sum = 0.0;
  double c = 0.0;
  double eta = 0.0;
  double nu = 0.0;
  bool function_term = false;

  /// alpha = 1/(2nL), delta = mu/(8nL).
  static LyapunovSpec small_step(std::size_t n, double L, double mu) {
    if (n == 0) throw std::invalid_argument("n must be positive");
    if (!(L > 0.0) || !(mu > 0.0)) throw std::invalid_argument("L and mu must be positive");
    const double nn = static_cast<double>(n);
    LyapunovSpec s;
    s.variant = LyapunovVariant::small_step;
    s.n = n;
    s.alpha = small_step_size(n, L);
    s.delta = mu / (8.0 * nn * L);
    s.a_identity = 3.0 * nn * s.alpha * s.alpha;
    s.a_sum = s.alpha * s.alpha / nn * (1.0 / nn - 2.0);
    s.b_sum = -s.alpha * (1.0 - 1.0 / nn);
    s.c = 1.0;
    return s;
  }

  /// alpha = 1/(2n mu), eta = 2, nu = 1/(2n), delta = 1/(8n); needs n mu >= 8L.
  static LyapunovSpec large_step(std::size_t n, double L, double mu) {
    if (n == 0) throw std::invalid_argument("n must be positive");
    if (!(L > 0.0)) throw std::invalid_argument("L must be positive");
    if (!large_step_regime(n, L, mu)) throw BoundHypothesisError("large-step Lyapunov function requires n >= 8 L / mu");
    const double nn = static_cast<double>(n);
    LyapunovSpec s;
    s.variant = LyapunovVariant::large_step;
    s.n = n;
    s.alpha = large_step_size(n, mu);
    s.eta = 2.0;
    s.nu = 1.0 / (2.0 * nn);
    s.delta = 1.0 / (8.0 * nn);
    s.a_identity = s.eta * s.alpha / nn;
    s.a_sum = s.alpha / nn * (1.0 - 2.0 * s.nu);
    s.b_sum = -s.nu;
    s.c = 0.0;
    s.function_term = true;
    return s;
  }
};

namespace detail {

inline void check_shapes(const LyapunovSpec& spec, const Theta& t, const LyapunovCenter& star) {
  if (t.n() != spec.n || star.theta.n() != spec.n) throw std::invalid_argument("state has the wrong number of memories");
  if (t.p() != star.theta.p() || static_cast<std::size_t>(t.y.rows()) != t.p())
    throw std::invalid_argument("state has the wrong dimension");
}

inline double quadratic_part(const LyapunovSpec& spec, const Eigen::MatrixXd& u, const DenseVector& v) {
  const DenseVector sum_u = u.rowwise().sum();
  return spec.a_identity * u.squaredNorm() + spec.a_sum * sum_u.squaredNorm() + 2.0 * spec.b_sum * sum_u.dot(v) +
         spec.c * v.squaredNorm();
}

}  // namespace detail

/// Quadratic form alone, (theta - theta*)' P (theta - theta*).
inline double lyapunov_quadratic(const LyapunovSpec& spec, const Theta& t, const LyapunovCenter& star) {
  detail::check_shapes(spec, t, star);
  return detail::quadratic_part(spec, t.y - star.theta.y, t.x - star.theta.x);
}

template <FiniteSumProblem P>
double lyapunov_q(const LyapunovSpec& spec, const P& f, const Theta& t, const LyapunovCenter& star) {
  double q = lyapunov_quadratic(spec, t, star);
  if (spec.function_term) {
    const DenseVector shifted = t.x + (spec.alpha / static_cast<double>(spec.n)) * t.y.rowwise().sum();
    q += 2.0 * f.value(shifted) - 2.0 * star.value;
  }
  return q;
}

/// State after one basic SAG step that samples component i.
template <FiniteSumProblem P>
Theta sag_successor(const P& f, const Theta& t, double alpha, std::size_t i) {
  Theta next = t;
  DenseVector g;
  f.component_gradient(i, t.x, g);
  next.y.col(static_cast<Eigen::Index>(i)) = g;
  next.x = t.x - (alpha / static_cast<double>(t.n())) * next.y.rowwise().sum();
  return next;
}

/// Conditional expectation of the quadratic form after one step, in closed
/// form. With u_i = y_i - f_i'(x*), w_i = f_i'(x) - f_i'(x*), v = x - x*,
/// the step acts through
///   S = s_I I + s_e e e',  s_I = a_I,  s_e = a_e - 2(alpha/n) b_e + (alpha/n)^2 c,
///   r = b_e - (alpha/n) c,
/// and the expectation over the sampled index is a sum of six terms.
template <FiniteSumProblem P>
double expected_next_quadratic(const LyapunovSpec& spec, const P& f, const Theta& t, const LyapunovCenter& star) {
  detail::check_shapes(spec, t, star);
  const double n = static_cast<double>(spec.n);
  const double an = spec.alpha / n;
  const double s_i = spec.a_identity;
  const double s_e = spec.a_sum - 2.0 * an * spec.b_sum + an * an * spec.c;
  const double r = spec.b_sum - an * spec.c;

  const Eigen::MatrixXd u = t.y - star.theta.y;
  Eigen::MatrixXd w(u.rows(), u.cols());
  DenseVector g;
  for (std::size_t i = 0; i < spec.n; ++i) {
    f.component_gradient(i, t.x, g);
    w.col(static_cast<Eigen::Index>(i)) = g - star.theta.y.col(static_cast<Eigen::Index>(i));
  }
  const DenseVector v = t.x - star.theta.x;
  const DenseVector sum_u = u.rowwise().sum();
  const DenseVector sum_w = w.rowwise().sum();
  const double uu = u.squaredNorm();
  const double ww = w.squaredNorm();
  const double uw = (u.array() * w.array()).sum();

  const double t1 = (1.0 - 2.0 / n) * (s_i * uu + s_e * sum_u.squaredNorm()) + (s_i + s_e) / n * uu;
  const double t2 = (s_i + s_e) / n * ww;
  const double t3 = 2.0 / n * s_e * (sum_u.dot(sum_w) - uw);
  const double t4 = 2.0 * (1.0 - 1.0 / n) * r * sum_u.dot(v);
  const double t5 = 2.0 / n * r * sum_w.dot(v);
  const double t6 = spec.c * v.squaredNorm();
  return t1 + t2 + t3 + t4 + t5 + t6;
}

inline constexpr std::size_t max_enumeration_n = 32;

/// Exact expectation of `value(successor)` over the n equally likely indices.
template <FiniteSumProblem P, class Value>
double enumerate_next(const P& f, const Theta& t, double alpha, Value&& value) {
  if (t.n() > max_enumeration_n) throw std::invalid_argument("enumeration is limited to n <= 32");
  double s = 0.0;
  for (std::size_t i = 0; i < t.n(); ++i) s += value(sag_successor(f, t, alpha, i));
  return s / static_cast<double>(t.n());
}

template <FiniteSumProblem P>
double enumerated_next_quadratic(const LyapunovSpec& spec, const P& f, const Theta& t, const LyapunovCenter& star) {
  detail::check_shapes(spec, t, star);
  return enumerate_next(f, t, spec.alpha, [&](const Theta& s) { return lyapunov_quadratic(spec, s, star); });
}

/// Monte Carlo estimate of E[Q(successor)] for n beyond the enumeration cap.
template <FiniteSumProblem P>
double sampled_next_q(const LyapunovSpec& spec, const P& f, const Theta& t, const LyapunovCenter& star,
                      std::size_t samples, Rng& rng) {
  if (samples == 0) throw std::invalid_argument("need at least one sample");
  double s = 0.0;
  for (std::size_t k = 0; k < samples; ++k)
    s += lyapunov_q(spec, f, sag_successor(f, t, spec.alpha, uniform_index(rng, t.n())), star);
  return s / static_cast<double>(samples);
}

struct InequalityCheck {
  double lhs;
  double rhs;
  bool holds;
};

/// E[Q(theta^k) | theta^{k-1} = t] <= (1 - delta) Q(t), with the expectation
/// computed by enumerating every sampled index.
template <FiniteSumProblem P>
InequalityCheck contraction_check(const LyapunovSpec& spec, const P& f, const Theta& t, const LyapunovCenter& star) {
  detail::check_shapes(spec, t, star);
  const double lhs = enumerate_next(f, t, spec.alpha, [&](const Theta& s) { return lyapunov_q(spec, f, s, star); });
  const double rhs = (1.0 - spec.delta) * lyapunov_q(spec, f, t, star);
  return {lhs, rhs, lhs <= rhs + 1e-10 * (1.0 + std::abs(rhs))};
}

/// Lower bounds that turn the Lyapunov contraction into rates:
/// small step Q >= |x - x*|^2 / 3, large step Q >= (6/7)(g(x) - g*).
template <FiniteSumProblem P>
InequalityCheck domination_check(const LyapunovSpec& spec, const P& f, const Theta& t, const LyapunovCenter& star,
                                 double slack) {
  const double q = lyapunov_q(spec, f, t, star);
  const double floor = spec.variant == LyapunovVariant::small_step ? (t.x - star.theta.x).squaredNorm() / 3.0
                                                                    : 6.0 / 7.0 * (f.value(t.x) - star.value);
  return {q, floor, q >= floor - slack};
}

}  // namespace sag
