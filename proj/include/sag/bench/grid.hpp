#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "sag/bench/experiment.hpp"
#include "sag/parallel.hpp"

namespace sag {

enum class GridKind { powers10, powers2 };

inline GridKind parse_grid(const std::string& s) {
  if (s == "powers10") return GridKind::powers10;
  if (s == "powers2") return GridKind::powers2;
  throw ConfigError("unknown grid '" + s + "'");
}

/// base * r^e for e = lo..hi, r = 10 or 2, in increasing order.
inline std::vector<double> grid_steps(GridKind kind, double base, int lo, int hi) {
  if (!(base > 0.0) || !std::isfinite(base)) throw ConfigError("grid base must be positive");
  if (lo > hi) throw ConfigError("empty grid");
  const double r = kind == GridKind::powers10 ? 10.0 : 2.0;
  std::vector<double> out;
  for (int e = lo; e <= hi; ++e) out.push_back(base * std::pow(r, e));
  return out;
}

inline std::vector<double> default_grid(GridKind kind, double base) {
  return kind == GridKind::powers10 ? grid_steps(kind, base, -6, 6) : grid_steps(kind, base, -20, 20);
}

/// Schedule that a grid candidate `step` stands for: the multiplier of the
/// pegasos rule, alpha0 of the power rule, or the constant step otherwise.
inline StepSchedule candidate_schedule(Method m, double step, const ProblemConstants& c) {
  switch (m) {
    case Method::pegasos: return StepSchedule::pegasos(c.mu, step);
    case Method::asg: return StepSchedule::power(step);
    default: return StepSchedule::constant(step);
  }
}

struct GridResult {
  std::size_t best_index = 0;
  double best_step = 0.0;
  std::vector<double> steps;
  std::vector<std::vector<MetricsRow>> traces;
};

/// Picks the step with the lowest final training objective. Divergent runs
/// rank last and ties go to the smaller step; a grid where every candidate
/// diverges is an error.
inline std::size_t select_best(const std::vector<double>& steps, const std::vector<std::vector<MetricsRow>>& traces) {
  if (steps.empty() || steps.size() != traces.size()) throw ConfigError("grid needs one trace per candidate");
  std::vector<std::size_t> order(steps.size());
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](std::size_t i) { return traces[i].back().train_obj; };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const bool da = diverged(traces[a]), db = diverged(traces[b]);
    if (da != db) return db;
    if (!da && key(a) != key(b)) return key(a) < key(b);
    return steps[a] < steps[b];
  });
  if (diverged(traces[order.front()])) throw DivergenceError("every step size in the grid diverged");
  return order.front();
}

inline GridResult grid_search_step(const RunConfig& base, const BenchProblem& prob, std::vector<double> steps) {
  if (steps.empty()) throw ConfigError("empty grid");
  GridResult r;
  r.steps = std::move(steps);
  r.traces.resize(r.steps.size());
  RunConfig probe = base;
  probe.schedule = candidate_schedule(base.method, r.steps.front(), prob.constants);
  validate(probe, prob.train);
  parallel_for(r.steps.size(), [&](std::size_t i) {
    RunConfig cfg = base;
    cfg.schedule = candidate_schedule(base.method, r.steps[i], prob.constants);
    try {
      r.traces[i] = run_experiment(cfg, prob, format_real(r.steps[i]));
    } catch (const ConfigError&) {
      // a step too large for the exact regularizer update
      r.traces[i].clear();
    }
  });
  r.best_index = select_best(r.steps, r.traces);
  r.best_step = r.steps[r.best_index];
  return r;
}

}  // namespace sag
