#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sag/objective.hpp"
#include "sag/optim/work.hpp"
#include "sag/step_schedule.hpp"

namespace sag {

// ---------------------------------------------------------------------------
// Basic SAG: dense memory of full component gradients, averaged over n.

struct SagBasicState {
  DenseVector x;
  DenseVector x_prev;
  /// Running sum of the memory columns.
  DenseVector d;
  /// Column i holds the last gradient of component i (zero until visited).
  Eigen::MatrixXd y;
  std::vector<char> seen;
  std::size_t m = 0;
  std::uint64_t k = 0;
  Work work;

  static SagBasicState init(DenseVector x0, std::size_t n) {
    if (n == 0) throw std::invalid_argument("need at least one component");
    SagBasicState s;
    s.d = DenseVector::Zero(x0.size());
    s.y = Eigen::MatrixXd::Zero(x0.size(), static_cast<Eigen::Index>(n));
    s.seen.assign(n, 0);
    s.x_prev = x0;
    s.x = std::move(x0);
    return s;
  }
};

template <FiniteSumProblem P>
void sag_step_basic(SagBasicState& s, const P& f, double alpha, std::size_t i) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("step size must be nonnegative");
  if (i >= f.n()) throw std::out_of_range("component index out of range");
  const auto col = static_cast<Eigen::Index>(i);
  DenseVector g;
  f.component_gradient(i, s.x, g);
  ++s.work.component_gradients;
  if (!s.seen[i]) {
    s.seen[i] = 1;
    ++s.m;
  }
  s.d -= s.y.col(col);
  s.y.col(col) = g;
  s.d += s.y.col(col);
  s.x_prev = s.x;
  s.x -= (alpha / static_cast<double>(f.n())) * s.d;
  ++s.k;
}

// ---------------------------------------------------------------------------
// Modified SAG for linear models: the memory keeps only loss gradients
// l_i'(a_i'x) a_i (stored as the scalar l_i'), the sum is divided by the
// number m of components seen so far, and the regularizer enters exactly
// through the factor (1 - alpha lambda):
//   x <- (1 - alpha lambda) x - (alpha / m) d.

struct SagOptions {
  /// Defer coordinate updates until a coordinate is read.
  bool lazy = false;
  /// Step 1/(L_k + lambda) with L_k estimated by doubling.
  bool line_search = false;
  double L0 = 1.0;
};

struct SagState {
  DenseVector x;
  /// Previous iterate; maintained only without lazy updates.
  DenseVector x_prev;
  DenseVector d;
  /// Loss derivative l_i'(a_i'x) at the last visit of component i.
  std::vector<double> y;
  std::vector<char> seen;
  std::size_t m = 0;
  std::uint64_t k = 0;
  /// Next component for the cyclic variant.
  std::size_t cursor = 0;
  /// Lipschitz estimate for the loss part of a component.
  double lipschitz = 1.0;
  double last_alpha = 0.0;
  bool lazy = false;
  bool line_search = false;
  Work work;

  // Lazy bookkeeping. pi is the product of the factors (1 - alpha_t lambda)
  // since the last renormalization, acc the sum of (alpha_t / m_t) / pi_t.
  // Coordinate j is current as of the step at which (pi, acc) equalled
  // (snap_pi[j], snap_acc[j]); d_j has not changed since.
  double pi = 1.0;
  double acc = 0.0;
  std::vector<double> snap_pi;
  std::vector<double> snap_acc;

  static SagState init(const Objective& f, DenseVector x0, const SagOptions& opts = {}) {
    if (static_cast<std::size_t>(x0.size()) != f.dim()) throw std::invalid_argument("iterate dimension mismatch");
    if (!(opts.L0 > 0.0)) throw ConfigError("line search needs L0 > 0");
    SagState s;
    s.d = DenseVector::Zero(x0.size());
    s.y.assign(f.n(), 0.0);
    s.seen.assign(f.n(), 0);
    s.lipschitz = opts.L0;
    s.lazy = opts.lazy;
    s.line_search = opts.line_search;
    if (s.lazy) {
      s.snap_pi.assign(f.dim(), 1.0);
      s.snap_acc.assign(f.dim(), 0.0);
    } else {
      s.x_prev = x0;
    }
    s.x = std::move(x0);
    return s;
  }

  /// Memory of component i as a sparse loss gradient.
  SparseVector memory(const Objective& f, std::size_t i) const { return f.example(i).features.scaled(y[i]); }
};

/// Brings coordinate j of a lazy iterate up to date. Over the skipped steps
/// d_j is constant, so the recursion x <- c_t x - w_t d_j unrolls to
///   x_j <- x_j pi / pi_j - d_j pi (acc - acc_j).
inline void jit_catchup(SagState& s, std::size_t j) {
  if (!s.lazy) return;
  const double sp = s.snap_pi[j];
  const double sa = s.snap_acc[j];
  if (sp == s.pi && sa == s.acc) return;
  s.x[static_cast<Eigen::Index>(j)] =
      s.x[static_cast<Eigen::Index>(j)] * (s.pi / sp) - s.d[static_cast<Eigen::Index>(j)] * s.pi * (s.acc - sa);
  s.snap_pi[j] = s.pi;
  s.snap_acc[j] = s.acc;
}

inline void jit_catchup(SagState& s, const SparseVector& coords) {
  if (!s.lazy) return;
  for (const auto& e : coords.entries()) jit_catchup(s, e.index);
}

/// Brings every coordinate up to date and restarts the scalar products.
inline void jit_sync(SagState& s) {
  if (!s.lazy) return;
  for (std::size_t j = 0; j < s.snap_pi.size(); ++j) jit_catchup(s, j);
  s.pi = 1.0;
  s.acc = 0.0;
  std::fill(s.snap_pi.begin(), s.snap_pi.end(), 1.0);
  std::fill(s.snap_acc.begin(), s.snap_acc.end(), 0.0);
}

/// The iterate with all deferred updates applied.
inline const DenseVector& current_iterate(SagState& s) {
  jit_sync(s);
  return s.x;
}

/// Doubles L while the Lipschitz inequality instantiated at the step
/// x+ = x - g/L fails:
///   f(x+) - f(x) <= g'(x+ - x) + (L/2)|x+ - x|^2 = -|g|^2 / (2L).
/// Failures smaller than 1e-12 (1 + |f(x)|) are treated as rounding.
/// `value_after(L)` returns f(x - g/L).
template <class ValueAfter>
double lipschitz_doubling(double L, double fx, double gsq, ValueAfter&& value_after) {
  if (!(L > 0.0)) throw std::invalid_argument("Lipschitz estimate must be positive");
  const double guard = 1e-12 * (1.0 + std::abs(fx));
  for (;;) {
    const double lhs = value_after(L) - fx;
    const double rhs = -gsq / (2.0 * L);
    if (!(lhs > rhs) || lhs - rhs <= guard) return L;
    L *= 2.0;
    if (L > 1e15) throw DivergenceError("line search diverged");
  }
}

namespace detail {

inline void modified_update(SagState& s, const Objective& f, std::optional<double> step, std::size_t i) {
  const auto& ex = f.example(i);
  const auto& a = ex.features;
  const double lambda = f.lambda();

  jit_catchup(s, a);
  const double z = a.dot(s.x);
  const double g = f.loss_derivative(i, z);
  ++s.work.component_gradients;

  double alpha;
  if (step) {
    alpha = *step;
  } else {
    const double asq = a.squared_norm();
    const double fx = f.loss_value(i, z);
    s.lipschitz = lipschitz_doubling(s.lipschitz, fx, g * g * asq, [&](double L) {
      ++s.work.component_values;
      return f.loss_value(i, z - g * asq / L);
    });
    alpha = 1.0 / (s.lipschitz + lambda);
  }
  if (!(alpha >= 0.0)) throw std::invalid_argument("step size must be nonnegative");
  if (!(alpha * lambda < 1.0)) throw ConfigError("step size too large for exact regularizer step");

  a.add_to(s.d, -s.y[i]);
  s.y[i] = g;
  a.add_to(s.d, g);
  if (!s.seen[i]) {
    s.seen[i] = 1;
    ++s.m;
  }

  const double c = 1.0 - alpha * lambda;
  const double w = alpha / static_cast<double>(s.m);
  if (s.lazy) {
    s.pi *= c;
    s.acc += w / s.pi;
    if (s.pi < 1e-100) jit_sync(s);
  } else {
    s.x_prev = s.x;
    s.x = c * s.x - w * s.d;
  }
  s.last_alpha = alpha;
  ++s.k;
}

}  // namespace detail

inline void sag_step_modified(SagState& s, const Objective& f, double alpha, std::size_t i) {
  detail::modified_update(s, f, alpha, i);
}

/// Modified step with alpha = 1/(L_k + lambda), L_k the doubled estimate
/// of the loss curvature along a_i.
inline void sag_step_linesearch(SagState& s, const Objective& f, std::size_t i) {
  detail::modified_update(s, f, std::nullopt, i);
}

/// Incremental aggregated gradient: the modified update with cyclic i.
inline void iag_step(SagState& s, const Objective& f, double alpha) {
  const std::size_t i = s.cursor;
  detail::modified_update(s, f, alpha, i);
  s.cursor = (i + 1) % f.n();
}

inline void iag_step_linesearch(SagState& s, const Objective& f) {
  const std::size_t i = s.cursor;
  detail::modified_update(s, f, std::nullopt, i);
  s.cursor = (i + 1) % f.n();
}

/// |x^k - x^{k-1}| / alpha
inline double termination_metric(const DenseVector& x, const DenseVector& x_prev, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("step size must be positive");
  return (x - x_prev).norm() / alpha;
}

inline double termination_metric(const SagBasicState& s, double alpha) {
  if (s.k == 0) throw std::logic_error("termination metric needs at least one step");
  return termination_metric(s.x, s.x_prev, alpha);
}

inline double termination_metric(const SagState& s, double alpha) {
  if (s.k == 0) throw std::logic_error("termination metric needs at least one step");
  if (s.lazy) throw std::logic_error("lazy state does not keep the previous iterate");
  return termination_metric(s.x, s.x_prev, alpha);
}

/// Exact sum of the stored loss gradients, for checking the running sum.
inline DenseVector memory_sum(const SagState& s, const Objective& f) {
  DenseVector out = DenseVector::Zero(s.d.size());
  for (std::size_t i = 0; i < f.n(); ++i)
    if (s.y[i] != 0.0) f.example(i).features.add_to(out, s.y[i]);
  return out;
}

inline DenseVector memory_sum(const SagBasicState& s) { return s.y.rowwise().sum(); }

}  // namespace sag
