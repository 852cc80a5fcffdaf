#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sag/objective.hpp"
#include "sag/optim/full_gradient.hpp"
#include "sag/optim/sag.hpp"
#include "sag/optim/stochastic.hpp"
#include "sag/optim/work.hpp"
#include "sag/random.hpp"
#include "sag/step_schedule.hpp"

namespace sag {

enum class Method {
  fg,
  afg,
  sg,
  pegasos,
  asg,
  momentum,
  grad_avg,
  sag_basic,
  sag,
  iag,
};

inline const char* to_string(Method m) {
  switch (m) {
    case Method::fg: return "fg";
    case Method::afg: return "afg";
    case Method::sg: return "sg";
    case Method::pegasos: return "pegasos";
    case Method::asg: return "asg";
    case Method::momentum: return "momentum";
    case Method::grad_avg: return "gradavg";
    case Method::sag_basic: return "sag-basic";
    case Method::sag: return "sag";
    case Method::iag: return "iag";
  }
  return "?";
}

inline Method parse_method(std::string_view s) {
  for (Method m : {Method::fg, Method::afg, Method::sg, Method::pegasos, Method::asg, Method::momentum,
                   Method::grad_avg, Method::sag_basic, Method::sag, Method::iag})
    if (s == to_string(m)) return m;
  throw ConfigError("unknown method '" + std::string(s) + "'");
}

/// True for methods that touch one component per iteration.
inline bool is_incremental(Method m) { return m != Method::fg && m != Method::afg; }

struct RunConfig {
  Method method = Method::sag;
  StepSchedule schedule = StepSchedule::constant(1.0);
  std::uint64_t passes = 10;
  std::uint64_t seed = 0;
  /// Momentum weight for Method::momentum.
  double beta = 0.0;
  /// Deferred coordinate updates for sag/iag; defaults to on for sparse data.
  std::optional<bool> lazy;
  /// Starting point; zero when unset.
  std::optional<DenseVector> x0;
};

struct Checkpoint {
  std::uint64_t pass;
  DenseVector x;
};

struct RunTrace {
  /// Iterate at every integer effective pass 0..passes, or up to the pass at
  /// which the run diverged.
  std::vector<Checkpoint> checkpoints;
  Work work;
  bool diverged = false;
  std::string divergence_reason;
};

inline void validate(const RunConfig& cfg, const Objective& f) {
  using K = StepSchedule::Kind;
  const K kind = cfg.schedule.kind();
  switch (cfg.method) {
    case Method::fg:
      if (kind != K::constant && kind != K::line_search) throw ConfigError("fg takes a constant or line-search step");
      break;
    case Method::afg:
    case Method::momentum:
    case Method::grad_avg:
    case Method::sag_basic:
      if (kind != K::constant) throw ConfigError(std::string(to_string(cfg.method)) + " takes a constant step");
      break;
    case Method::sag:
    case Method::iag:
      if (kind != K::constant && kind != K::line_search)
        throw ConfigError(std::string(to_string(cfg.method)) + " takes a constant or line-search step");
      break;
    case Method::pegasos:
      if (!(f.lambda() > 0.0)) throw ConfigError("pegasos requires lambda > 0");
      if (kind != K::pegasos) throw ConfigError("pegasos takes a pegasos step schedule");
      break;
    case Method::sg:
    case Method::asg:
      if (kind == K::line_search) throw ConfigError("stochastic gradient has no line search");
      break;
  }
  if (kind == K::pegasos && !(cfg.schedule.mu() > 0.0)) throw ConfigError("pegasos schedule requires mu > 0");
  if (!(cfg.beta >= 0.0 && cfg.beta < 1.0)) throw ConfigError("momentum must lie in [0, 1)");
  if (cfg.x0 && static_cast<std::size_t>(cfg.x0->size()) != f.dim())
    throw ConfigError("starting point has the wrong dimension");
}

namespace detail {

// Drives `step` until passes * n evaluation units are spent, recording the
// iterate whenever another whole pass has been completed.
template <class Step, class Iterate>
RunTrace drive(const Objective& f, std::uint64_t passes, Step&& step, Iterate&& iterate, const Work& work) {
  RunTrace trace;
  const std::uint64_t n = f.n();
  const std::uint64_t target = passes * n;
  std::uint64_t next = 0;
  auto record = [&] {
    const DenseVector& x = iterate();
    while (next <= passes && work.units(n) >= next * n) {
      trace.checkpoints.push_back({next, x});
      ++next;
    }
    if (!all_finite(x)) {
      trace.diverged = true;
      trace.divergence_reason = "non-finite iterate";
    }
  };
  record();
  try {
    while (!trace.diverged && work.units(n) < target) {
      step();
      if (work.units(n) >= next * n) record();
    }
  } catch (const DivergenceError& e) {
    trace.diverged = true;
    trace.divergence_reason = e.what();
    if (next <= passes)
      trace.checkpoints.push_back(
          {next, DenseVector::Constant(static_cast<Eigen::Index>(f.dim()), std::numeric_limits<double>::quiet_NaN())});
  }
  trace.work = work;
  return trace;
}

}  // namespace detail

/// Runs one method for the configured number of effective passes. The
/// driver owns the sampling stream; indices are drawn uniformly with
/// replacement from a generator seeded with cfg.seed.
inline RunTrace run_optimizer(const RunConfig& cfg, const Objective& f) {
  validate(cfg, f);
  const auto p = static_cast<Eigen::Index>(f.dim());
  DenseVector x0 = cfg.x0 ? *cfg.x0 : DenseVector::Zero(p);
  Rng rng(cfg.seed);
  const std::size_t n = f.n();
  const StepSchedule& sched = cfg.schedule;
  using K = StepSchedule::Kind;

  switch (cfg.method) {
    case Method::fg: {
      if (sched.kind() == K::line_search) {
        auto s = FgLineSearchState::init(std::move(x0), sched.parameter());
        return detail::drive(
            f, cfg.passes, [&] { fg_linesearch_step(s, f); }, [&]() -> const DenseVector& { return s.x; }, s.work);
      }
      auto s = FgState::init(std::move(x0));
      const double alpha = sched.parameter();
      return detail::drive(
          f, cfg.passes, [&] { fg_step(s, f, alpha); }, [&]() -> const DenseVector& { return s.x; }, s.work);
    }
    case Method::afg: {
      auto s = AfgState::init(std::move(x0));
      const double alpha = sched.parameter();
      return detail::drive(
          f, cfg.passes, [&] { afg_step(s, f, alpha); }, [&]() -> const DenseVector& { return s.x; }, s.work);
    }
    case Method::sg:
    case Method::pegasos:
    case Method::asg: {
      auto s = SgState::init(std::move(x0));
      SgOptions opts;
      if (cfg.method == Method::pegasos) opts.project_radius = pegasos_radius(f);
      opts.average = cfg.method == Method::asg;
      return detail::drive(
          f, cfg.passes, [&] { sg_step(s, f, sched, uniform_index(rng, n), opts); },
          [&]() -> const DenseVector& { return opts.average ? s.x_avg : s.x; }, s.work);
    }
    case Method::momentum: {
      auto s = MomentumState::init(std::move(x0));
      const double alpha = sched.parameter();
      return detail::drive(
          f, cfg.passes, [&] { momentum_step(s, f, alpha, cfg.beta, uniform_index(rng, n)); },
          [&]() -> const DenseVector& { return s.x; }, s.work);
    }
    case Method::grad_avg: {
      auto s = GradAvgState::init(std::move(x0));
      const double alpha = sched.parameter();
      return detail::drive(
          f, cfg.passes, [&] { grad_avg_step(s, f, alpha, uniform_index(rng, n)); },
          [&]() -> const DenseVector& { return s.x; }, s.work);
    }
    case Method::sag_basic: {
      auto s = SagBasicState::init(std::move(x0), n);
      const double alpha = sched.parameter();
      return detail::drive(
          f, cfg.passes, [&] { sag_step_basic(s, f, alpha, uniform_index(rng, n)); },
          [&]() -> const DenseVector& { return s.x; }, s.work);
    }
    case Method::sag:
    case Method::iag: {
      SagOptions opts;
      opts.lazy = cfg.lazy.value_or(f.data().density() < 0.5);
      opts.line_search = sched.kind() == K::line_search;
      if (opts.line_search) opts.L0 = sched.parameter();
      auto s = SagState::init(f, std::move(x0), opts);
      const double alpha = opts.line_search ? 0.0 : sched.parameter();
      const bool cyclic = cfg.method == Method::iag;
      auto step = [&] {
        if (cyclic) {
          if (opts.line_search) iag_step_linesearch(s, f);
          else iag_step(s, f, alpha);
        } else {
          const std::size_t i = uniform_index(rng, n);
          if (opts.line_search) sag_step_linesearch(s, f, i);
          else sag_step_modified(s, f, alpha, i);
        }
      };
      return detail::drive(f, cfg.passes, step, [&]() -> const DenseVector& { return current_iterate(s); }, s.work);
    }
  }
  throw ConfigError("unhandled method");
}

}  // namespace sag
