#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "sag/bench/metrics.hpp"
#include "sag/libsvm.hpp"
#include "sag/objective.hpp"
#include "sag/optim/run.hpp"
#include "sag/preprocess.hpp"
#include "sag/synthetic.hpp"
#include "sag/theory/reference.hpp"

namespace sag {

/// Reference minimizers keyed by (dataset content hash, lambda, loss).
class ReferenceCache {
 public:
  std::shared_ptr<const ReferenceSolution> get(const Objective& f) {
    const Key key{f.data().content_hash(), f.lambda(), f.loss()};
    {
      std::lock_guard lock(mutex_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    auto sol = std::make_shared<const ReferenceSolution>(reference_solution(f));
    std::lock_guard lock(mutex_);
    return cache_.emplace(key, std::move(sol)).first->second;
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return cache_.size();
  }

 private:
  using Key = std::tuple<std::uint64_t, double, Loss>;
  mutable std::mutex mutex_;
  std::map<Key, std::shared_ptr<const ReferenceSolution>> cache_;
};

/// Training objective, optional held-out objective, constants and g*.
struct BenchProblem {
  Objective train;
  std::optional<Objective> test;
  ProblemConstants constants;
  std::shared_ptr<const ReferenceSolution> reference;
};

inline BenchProblem make_problem(Objective train, std::optional<Objective> test, ReferenceCache& cache) {
  BenchProblem p{train, std::move(test), lipschitz_constant(train), nullptr};
  p.reference = cache.get(p.train);
  return p;
}

struct ProblemSpec {
  /// LIBSVM file, split in half into train/test and standardized with
  /// training statistics plus a bias feature.
  std::optional<std::string> path;
  /// Planted-model data; used when no path is given.
  SyntheticSpec synthetic;
  Loss loss = Loss::logistic;
  /// Defaults to 1/n for the training half.
  std::optional<double> lambda;
  std::uint64_t split_seed = 0;
};

/// Parses "n,p,density,seed".
inline SyntheticSpec parse_synthetic(const std::string& s) {
  std::vector<std::string> f;
  std::size_t start = 0;
  for (std::size_t pos; (pos = s.find(',', start)) != std::string::npos; start = pos + 1) f.push_back(s.substr(start, pos - start));
  f.push_back(s.substr(start));
  if (f.size() != 4) throw ConfigError("synthetic data is n,p,density,seed");
  SyntheticSpec spec;
  try {
    std::size_t used = 0;
    spec.n = std::stoull(f[0], &used);
    if (used != f[0].size()) throw ConfigError("bad n");
    spec.p = std::stoull(f[1], &used);
    if (used != f[1].size()) throw ConfigError("bad p");
    spec.density = std::stod(f[2], &used);
    if (used != f[2].size()) throw ConfigError("bad density");
    spec.seed = std::stoull(f[3], &used);
    if (used != f[3].size()) throw ConfigError("bad seed");
  } catch (const std::logic_error&) {
    throw ConfigError("synthetic data is n,p,density,seed");
  }
  if (spec.n == 0 || spec.p == 0 || !(spec.density > 0.0 && spec.density <= 1.0))
    throw ConfigError("synthetic data needs n, p >= 1 and density in (0, 1]");
  return spec;
}

inline BenchProblem load_problem(const ProblemSpec& spec, ReferenceCache& cache) {
  DatasetPtr train, test;
  if (spec.path) {
    std::ifstream in(*spec.path);
    if (!in) throw DataError("cannot open " + *spec.path);
    ParseOptions opts;
    opts.labels = spec.loss == Loss::logistic ? LabelPolicy::binary : LabelPolicy::real;
    const Dataset all = parse_libsvm(in, opts);
    const Split halves = split_half(all, spec.split_seed);
    const auto scaler = FeatureScaler::fit(halves.train, Standardize::automatic);
    train = share(scaler.transform(halves.train));
    test = share(scaler.transform(halves.test));
  } else {
    SyntheticSpec s = spec.synthetic;
    s.loss = spec.loss;
    auto pair = make_synthetic_pair(s);
    train = share(std::move(pair.train));
    test = share(std::move(pair.test));
  }
  const double lambda = spec.lambda.value_or(1.0 / static_cast<double>(train->n()));
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be nonnegative");
  return make_problem(Objective(train, spec.loss, lambda), Objective(test, spec.loss, lambda), cache);
}

/// Step rules accepted on the command line: a number or const:A, 1/L,
/// 2/(L+nmu), 1/(2nL), 1/(2nmu), ls[:L0], pegasos[:scale], power:A0.
struct StepRule {
  enum class Kind { constant, inv_L, two_over_L_nmu, small_step, large_step, line_search, pegasos, power };
  Kind kind = Kind::constant;
  double value = 1.0;
  std::string text;
};

inline StepRule parse_step_rule(const std::string& text) {
  auto number = [&](std::string_view s) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || !(v > 0.0) || !std::isfinite(v))
      throw ConfigError("bad step rule '" + text + "'");
    return v;
  };
  using K = StepRule::Kind;
  const std::string_view t = text;
  auto with_arg = [&](std::string_view prefix, K kind, std::optional<double> fallback) -> std::optional<StepRule> {
    if (t == prefix && fallback) return StepRule{kind, *fallback, text};
    if (t.size() > prefix.size() + 1 && t.substr(0, prefix.size()) == prefix && t[prefix.size()] == ':')
      return StepRule{kind, number(t.substr(prefix.size() + 1)), text};
    return std::nullopt;
  };
  if (t == "1/L") return {K::inv_L, 1.0, text};
  if (t == "2/(L+nmu)") return {K::two_over_L_nmu, 1.0, text};
  if (t == "1/(2nL)") return {K::small_step, 1.0, text};
  if (t == "1/(2nmu)") return {K::large_step, 1.0, text};
  if (auto r = with_arg("const", K::constant, std::nullopt)) return *r;
  if (auto r = with_arg("ls", K::line_search, 1.0)) return *r;
  if (auto r = with_arg("pegasos", K::pegasos, 1.0)) return *r;
  if (auto r = with_arg("power", K::power, std::nullopt)) return *r;
  return {K::constant, number(t), text};
}

inline StepSchedule resolve(const StepRule& rule, const ProblemConstants& c, std::size_t n) {
  const double nn = static_cast<double>(n);
  using K = StepRule::Kind;
  switch (rule.kind) {
    case K::constant: return StepSchedule::constant(rule.value);
    case K::inv_L: return StepSchedule::constant(1.0 / c.L);
    case K::two_over_L_nmu: return StepSchedule::constant(2.0 / (c.L + nn * c.mu));
    case K::small_step: return StepSchedule::constant(1.0 / (2.0 * nn * c.L));
    case K::large_step:
      if (!(c.mu > 0.0)) throw ConfigError("1/(2nmu) needs mu > 0");
      return StepSchedule::constant(1.0 / (2.0 * nn * c.mu));
    case K::line_search: return StepSchedule::line_search(rule.value);
    case K::pegasos: return StepSchedule::pegasos(c.mu, rule.value);
    case K::power: return StepSchedule::power(rule.value);
  }
  throw ConfigError("unhandled step rule");
}

/// One row per integer effective pass; a run that diverges ends with a
/// row whose objectives are non-finite. Without a held-out objective the
/// test columns are NaN.
inline std::vector<MetricsRow> run_experiment(const RunConfig& cfg, const BenchProblem& prob, const std::string& step_label) {
  const RunTrace trace = run_optimizer(cfg, prob.train);
  const double g_star = prob.reference->value;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<MetricsRow> rows;
  rows.reserve(trace.checkpoints.size() + 1);
  for (const auto& cp : trace.checkpoints) {
    MetricsRow r;
    r.method = to_string(cfg.method);
    r.step = step_label;
    r.seed = cfg.seed;
    r.effective_pass = static_cast<double>(cp.pass);
    const bool finite = all_finite(cp.x);
    r.train_obj = finite ? prob.train.value(cp.x) : nan;
    r.train_gap = r.train_obj - g_star;
    if (prob.test && finite) {
      r.test_obj = prob.test->value(cp.x);
      r.test_error = test_error(prob.test->data(), cp.x);
    } else {
      r.test_obj = r.test_error = nan;
    }
    rows.push_back(std::move(r));
  }
  if (trace.diverged && (rows.empty() || std::isfinite(rows.back().train_obj))) {
    MetricsRow r;
    r.method = to_string(cfg.method);
    r.step = step_label;
    r.seed = cfg.seed;
    r.effective_pass = rows.empty() ? 0.0 : rows.back().effective_pass + 1.0;
    r.train_obj = r.train_gap = r.test_obj = r.test_error = nan;
    rows.push_back(std::move(r));
  }
  return rows;
}

inline bool diverged(const std::vector<MetricsRow>& rows) {
  return rows.empty() || !std::isfinite(rows.back().train_obj);
}

}  // namespace sag
