#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>

#include "sag/objective.hpp"
#include "sag/optim/work.hpp"

namespace sag {

struct ReferenceSolution {
  DenseVector x;
  double value;
  double gradient_norm;
  /// Effective passes spent (gradients, values and Hessian-vector products
  /// each count as one).
  double passes;
};

struct ReferenceOptions {
  double tol = 1e-12;
  double max_passes = 1e7;
  std::optional<DenseVector> x0;
};

class ReferenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

// Conjugate gradients on H d = -g, stopped at relative residual `forcing`
// or after 2 dim iterations.
template <FiniteSumProblem P>
DenseVector newton_direction(const P& f, const DenseVector& x, const DenseVector& g, double forcing,
                             std::uint64_t& hv_count) {
  DenseVector d = DenseVector::Zero(g.size());
  DenseVector r = -g;
  DenseVector q = r;
  DenseVector hq;
  double rr = r.squaredNorm();
  const double stop = forcing * forcing * rr;
  const Eigen::Index max_iter = 2 * g.size() + 10;
  for (Eigen::Index it = 0; it < max_iter && rr > stop; ++it) {
    f.hessian_vector(x, q, hq);
    ++hv_count;
    const double curv = q.dot(hq);
    if (!(curv > 0.0)) break;
    const double a = rr / curv;
    d += a * q;
    r -= a * hq;
    const double rr_next = r.squaredNorm();
    q = r + (rr_next / rr) * q;
    rr = rr_next;
  }
  if (d.squaredNorm() == 0.0) d = -g;
  return d;
}

}  // namespace detail

/// High-accuracy minimizer of g by damped Newton with conjugate-gradient
/// inner solves, stopped once |g'(x)| <= tol. Starting at a point that
/// already meets the tolerance returns it unchanged.
template <FiniteSumProblem P>
ReferenceSolution reference_solution(const P& f, const ReferenceOptions& opts = {}) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const auto p = static_cast<Eigen::Index>(f.dim());
  DenseVector x = opts.x0 ? *opts.x0 : DenseVector::Zero(p);
  if (x.size() != p) throw std::invalid_argument("starting point has the wrong dimension");

  std::uint64_t full = 0, hv = 0;
  auto spent = [&] { return static_cast<double>(full + hv); };
  DenseVector g;
  f.gradient(x, g);
  double fx = f.value(x);
  full += 2;
  double gnorm = g.norm();

  while (gnorm > opts.tol) {
    if (spent() > opts.max_passes) throw ReferenceError("reference solution did not converge within the pass budget");
    if (!std::isfinite(fx) || !std::isfinite(gnorm)) throw ReferenceError("reference solution hit a non-finite value");
    const double forcing = std::min(0.5, std::sqrt(gnorm));
    const DenseVector d = detail::newton_direction(f, x, g, forcing, hv);
    const double slope = g.dot(d);
    const double slack = 1e-14 * (1.0 + std::abs(fx));

    double t = 1.0;
    DenseVector trial, g_trial;
    double f_trial = 0.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 60; ++halvings) {
      trial = x + t * d;
      f_trial = f.value(trial);
      ++full;
      if (f_trial <= fx + 1e-4 * t * slope + slack) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      trial = x + d;
      f_trial = f.value(trial);
      ++full;
    }
    f.gradient(trial, g_trial);
    ++full;
    const double gnorm_trial = g_trial.norm();
    // Near the optimum, value differences fall below rounding; the gradient
    // norm still certifies progress.
    if (!accepted && !(gnorm_trial < gnorm)) throw ReferenceError("reference solution stalled above tolerance");
    x = std::move(trial);
    fx = f_trial;
    g = std::move(g_trial);
    gnorm = gnorm_trial;
  }
  return {std::move(x), fx, gnorm, spent()};
}

}  // namespace sag
