#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "sag/parallel.hpp"
#include "sag/objective.hpp"
#include "sag/optim/sag.hpp"
#include "sag/random.hpp"
#include "sag/synthetic.hpp"
#include "sag/theory/bounds.hpp"
#include "sag/theory/lyapunov.hpp"
#include "sag/theory/reference.hpp"
#include "sag/theory/sgd_phase.hpp"

namespace sag {

/// Outcome of an empirical check: `violations` out of `checked`
/// comparisons failed. `worst` is the largest observed lhs/rhs ratio (or
/// normalized excess) across the sweep.
struct SweepReport {
  std::string name;
  std::size_t checked = 0;
  std::size_t violations = 0;
  double worst = 0.0;
  std::string detail;

  bool passed() const { return violations == 0 && checked > 0; }
};

/// Everything the bound checks need about one instance.
struct BoundInstance {
  Objective f;
  ProblemConstants constants;
  DenseVector x_star;
  double g_star;
  TheoryParams params;
};

inline BoundInstance make_bound_instance(Objective f, const DenseVector& x0) {
  const ProblemConstants c = lipschitz_constant(f);
  ReferenceOptions opts;
  const auto sol = reference_solution(f, opts);
  TheoryParams t = theory_params(f, c, x0, sol.x, sol.value);
  return {std::move(f), c, sol.x, sol.value, t};
}

/// Dense synthetic logistic regression with n = 100, p = 10, lambda = 0.1.
inline BoundInstance small_step_instance() {
  SyntheticSpec s;
  s.n = 100;
  s.p = 10;
  s.seed = 0;
  return make_bound_instance(Objective(share(make_synthetic(s)), Loss::logistic, 0.1), DenseVector::Zero(10));
}

/// Synthetic logistic regression in the large-step regime: lambda is set
/// so that 200 components sit exactly at n mu / L = 8, then 400 components
/// are drawn, giving n mu / L = 16.
inline BoundInstance large_step_instance() {
  SyntheticSpec s;
  s.n = 400;
  s.p = 10;
  s.seed = 0;
  auto data = share(make_synthetic(s));
  const double loss_L = loss::max_curvature(Loss::logistic) * data->max_squared_norm();
  const double lambda = 8.0 * loss_L / (200.0 - 8.0);
  return make_bound_instance(Objective(data, Loss::logistic, lambda), DenseVector::Zero(10));
}

namespace detail {

// Sums per-seed series in seed order so the result does not depend on
// thread scheduling.
template <class PerSeed>
std::vector<double> seed_mean(std::size_t seeds, std::size_t length, PerSeed&& per_seed) {
  std::vector<std::vector<double>> series(seeds);
  parallel_for(seeds, [&](std::size_t s) { series[s] = per_seed(static_cast<std::uint64_t>(s)); });
  std::vector<double> mean(length, 0.0);
  for (const auto& v : series)
    for (std::size_t k = 0; k < length; ++k) mean[k] += v.at(k);
  for (double& m : mean) m /= static_cast<double>(seeds);
  return mean;
}

inline void tally(SweepReport& r, double lhs, double rhs) {
  ++r.checked;
  if (!(lhs <= rhs)) ++r.violations;
  if (rhs > 0.0) r.worst = std::max(r.worst, lhs / rhs);
}

}  // namespace detail

/// Basic SAG with alpha = 1/(2nL) from x0 = 0: mean |x^k - x*|^2 over seeds
/// against the small-step bound at every whole pass k = 0..passes.
inline SweepReport small_step_sweep(const BoundInstance& inst, std::size_t seeds, std::size_t passes) {
  const std::size_t n = inst.f.n();
  const double alpha = small_step_size(n, inst.constants.L);
  const auto mean = detail::seed_mean(seeds, passes + 1, [&](std::uint64_t seed) {
    std::vector<double> d(passes + 1);
    Rng rng(seed);
    SagBasicState s = SagBasicState::init(DenseVector::Zero(static_cast<Eigen::Index>(inst.f.dim())), n);
    d[0] = (s.x - inst.x_star).squaredNorm();
    for (std::size_t pass = 1; pass <= passes; ++pass) {
      for (std::size_t i = 0; i < n; ++i) sag_step_basic(s, inst.f, alpha, uniform_index(rng, n));
      d[pass] = (s.x - inst.x_star).squaredNorm();
    }
    return d;
  });
  SweepReport r{"small-step distance bound", 0, 0, 0.0, ""};
  for (std::size_t pass = 0; pass <= passes; ++pass)
    detail::tally(r, mean[pass], small_step_bound(inst.params, pass * n));
  std::ostringstream msg;
  msg << seeds << " seeds, passes 0.." << passes << ", final mean " << mean.back() << " vs bound "
      << small_step_bound(inst.params, passes * n);
  r.detail = msg.str();
  return r;
}

/// One averaged stochastic gradient pass, then basic SAG with
/// alpha = 1/(2n mu) and zero memory: mean g(x^k) - g* over seeds against
/// the large-step bound at every iteration k = n..multiple*n.
inline SweepReport large_step_sweep(const BoundInstance& inst, std::size_t seeds, std::size_t multiple) {
  const std::size_t n = inst.f.n();
  const std::size_t total = multiple * n;
  const DenseVector x0 = DenseVector::Zero(static_cast<Eigen::Index>(inst.f.dim()));
  const auto mean = detail::seed_mean(seeds, total - n + 1, [&](std::uint64_t seed) {
    std::vector<double> gap(total - n + 1);
    Rng rng(seed);
    large_step_protocol(inst.f, inst.constants, x0, total, rng, [&](std::uint64_t k, const DenseVector& x) {
      gap[k - n] = inst.f.value(x) - inst.g_star;
    });
    return gap;
  });
  SweepReport r{"large-step function bound", 0, 0, 0.0, ""};
  for (std::size_t k = n; k <= total; ++k) detail::tally(r, mean[k - n], large_step_bound(inst.params, k));
  std::ostringstream msg;
  msg << seeds << " seeds, k = " << n << ".." << total << ", n mu / L = "
      << static_cast<double>(n) * inst.constants.mu / inst.constants.L << ", final mean " << mean.back() << " vs bound "
      << large_step_bound(inst.params, total);
  r.detail = msg.str();
  return r;
}

/// Averaged stochastic gradient with gamma_k = 1/(2L + mu k/2) from x0 = 0:
/// mean g(average) - g* over seeds at each requested k.
inline SweepReport sgd_average_sweep(const BoundInstance& inst, std::size_t seeds, const std::vector<std::uint64_t>& ks) {
  if (ks.empty()) throw std::invalid_argument("need at least one k");
  const std::uint64_t last = *std::max_element(ks.begin(), ks.end());
  const DenseVector x0 = DenseVector::Zero(static_cast<Eigen::Index>(inst.f.dim()));
  const auto mean = detail::seed_mean(seeds, ks.size(), [&](std::uint64_t seed) {
    std::vector<double> gap(ks.size());
    Rng rng(seed);
    sgd_averaged_run(inst.f, inst.constants, x0, last, rng, [&](std::uint64_t k, const DenseVector& avg, const DenseVector&) {
      for (std::size_t j = 0; j < ks.size(); ++j)
        if (ks[j] == k) gap[j] = inst.f.value(avg) - inst.g_star;
    });
    return gap;
  });
  SweepReport r{"averaged stochastic gradient bound", 0, 0, 0.0, ""};
  std::ostringstream msg;
  msg << seeds << " seeds;";
  for (std::size_t j = 0; j < ks.size(); ++j) {
    const double bound = sgd_average_bound(inst.params, ks[j]);
    detail::tally(r, mean[j], bound);
    msg << " k=" << ks[j] << ": " << mean[j] << " <= " << bound << ";";
  }
  r.detail = msg.str();
  return r;
}

// ---------------------------------------------------------------------------
// Lyapunov sweeps over random instances and random states.

namespace detail {

inline double relative_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

inline Objective random_instance(std::size_t n, std::size_t p, std::uint64_t seed) {
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  SyntheticSpec s;
  s.n = n;
  s.p = p;
  s.seed = seed;
  s.loss = seed % 2 == 0 ? Loss::logistic : Loss::squared;
  const double lambda = 0.05 + uniform_unit(rng);
  return Objective(share(make_synthetic(s)), s.loss, lambda);
}

inline QuadraticCenters random_centers(std::size_t n, std::size_t p, std::uint64_t seed) {
  Rng rng(seed ^ 0x5851f42d4c957f2dULL);
  Eigen::MatrixXd c(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < c.size(); ++j) c.data()[j] = 4.0 * uniform_unit(rng) - 2.0;
  return QuadraticCenters(std::move(c), 0.1 + 5.0 * uniform_unit(rng));
}

inline Theta perturbed(const Theta& center, Rng& rng) {
  const double scale = 0.1 + 3.0 * uniform_unit(rng);
  Theta t = center;
  for (Eigen::Index j = 0; j < t.y.size(); ++j) t.y.data()[j] += scale * (2.0 * uniform_unit(rng) - 1.0);
  for (Eigen::Index j = 0; j < t.x.size(); ++j) t.x[j] += scale * (2.0 * uniform_unit(rng) - 1.0);
  return t;
}

}  // namespace detail

/// Random (instance, state) pairs with n in {2, 4, 8} and p in {1, 2, 4}.
/// Every case checks the small-step contraction; every third case uses
/// equal-curvature quadratics, for which n = 8 meets n mu / L >= 8 and the
/// large-step contraction is checked too.
inline SweepReport contraction_sweep(std::size_t cases) {
  SweepReport r{"Lyapunov one-step contraction", 0, 0, 0.0, ""};
  std::size_t large = 0;
  for (std::uint64_t c = 0; c < cases; ++c) {
    const std::size_t n = std::size_t{2} << (c % 3);
    const std::size_t p = std::size_t{1} << ((c / 3) % 3);
    Rng rng(c);
    auto check = [&](const auto& f, const ProblemConstants& k, const DenseVector& x_star) {
      const auto center = lyapunov_center(f, x_star);
      const Theta t = detail::perturbed(center.theta, rng);
      const auto small = contraction_check(LyapunovSpec::small_step(n, k.L, k.mu), f, t, center);
      ++r.checked;
      if (!small.holds) ++r.violations;
      if (small.rhs > 0.0) r.worst = std::max(r.worst, small.lhs / small.rhs);
      if (large_step_regime(n, k.L, k.mu)) {
        const auto big = contraction_check(LyapunovSpec::large_step(n, k.L, k.mu), f, t, center);
        ++r.checked;
        ++large;
        if (!big.holds) ++r.violations;
        if (big.rhs > 0.0) r.worst = std::max(r.worst, big.lhs / big.rhs);
      }
    };
    if (c % 3 == 2) {
      const QuadraticCenters f = detail::random_centers(n, p, c);
      check(f, f.constants(), f.minimizer());
    } else {
      const Objective f = detail::random_instance(n, p, c);
      check(f, lipschitz_constant(f), reference_solution(f).x);
    }
  }
  std::ostringstream msg;
  msg << cases << " states, " << large << " large-step checks, worst lhs/rhs " << r.worst;
  r.detail = msg.str();
  return r;
}

/// Closed-form conditional expectation of the quadratic part against exact
/// enumeration of the sampled index.
inline SweepReport lemma_sweep(std::size_t cases) {
  SweepReport r{"conditional expectation closed form", 0, 0, 0.0, ""};
  for (std::uint64_t c = 0; c < cases; ++c) {
    const std::size_t n = 1 + c % 8;
    const std::size_t p = 1 + (c / 8) % 4;
    Rng rng(c + 7919);
    const Objective f = detail::random_instance(n, p, c + 1000);
    const auto k = lipschitz_constant(f);
    const auto center = lyapunov_center(f, reference_solution(f).x);
    const Theta t = detail::perturbed(center.theta, rng);
    const auto spec = c % 2 == 0 || !large_step_regime(n, k.L, k.mu) ? LyapunovSpec::small_step(n, k.L, k.mu)
                                                                     : LyapunovSpec::large_step(n, k.L, k.mu);
    const double gap = detail::relative_gap(expected_next_quadratic(spec, f, t, center),
                                            enumerated_next_quadratic(spec, f, t, center));
    ++r.checked;
    if (!(gap < 1e-10)) ++r.violations;
    r.worst = std::max(r.worst, gap);
  }
  std::ostringstream msg;
  msg << cases << " cases, worst relative gap " << r.worst;
  r.detail = msg.str();
  return r;
}

/// Q_small >= |x - x*|^2 / 3 for n >= 2, and Q_large >= (6/7)(g(x) - g*)
/// when n mu / L >= 8, each on `cases` random states.
inline SweepReport domination_sweep(std::size_t cases) {
  SweepReport r{"Lyapunov domination", 0, 0, 0.0, ""};
  auto tally = [&](const InequalityCheck& c) {
    ++r.checked;
    if (!c.holds) ++r.violations;
    if (c.rhs > 0.0) r.worst = std::max(r.worst, c.rhs / c.lhs);
  };
  for (std::uint64_t c = 0; c < cases; ++c) {
    const std::size_t n = 2 + c % 7;
    const std::size_t p = 1 + (c / 7) % 4;
    Rng rng(c + 31);
    const Objective f = detail::random_instance(n, p, c + 2000);
    const auto k = lipschitz_constant(f);
    const auto center = lyapunov_center(f, reference_solution(f).x);
    tally(domination_check(LyapunovSpec::small_step(n, k.L, k.mu), f, detail::perturbed(center.theta, rng), center,
                           1e-10));
  }
  for (std::uint64_t c = 0; c < cases; ++c) {
    Rng rng(c + 77);
    const std::size_t p = 1 + c % 4;
    if (c % 2 == 0) {
      const QuadraticCenters f = detail::random_centers(8 + c % 9, p, c + 3000);
      const auto k = f.constants();
      const auto center = lyapunov_center(f, f.minimizer());
      tally(domination_check(LyapunovSpec::large_step(f.n(), k.L, k.mu), f, detail::perturbed(center.theta, rng),
                             center, 1e-10));
    } else {
      // logistic with enough regularization that n mu / L >= 8
      SyntheticSpec s;
      s.n = 32;
      s.p = p;
      s.seed = c + 4000;
      auto data = share(make_synthetic(s));
      const double loss_L = loss::max_curvature(Loss::logistic) * data->max_squared_norm();
      const Objective f(data, Loss::logistic, loss_L * (0.5 + uniform_unit(rng)));
      const auto k = lipschitz_constant(f);
      const auto center = lyapunov_center(f, reference_solution(f).x);
      tally(domination_check(LyapunovSpec::large_step(f.n(), k.L, k.mu), f, detail::perturbed(center.theta, rng), center,
                             1e-10));
    }
  }
  std::ostringstream msg;
  msg << cases << " small-step and " << cases << " large-step states, worst floor/Q " << r.worst;
  r.detail = msg.str();
  return r;
}

}  // namespace sag
