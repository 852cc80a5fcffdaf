#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "sag/data.hpp"
#include "sag/loss.hpp"
#include "sag/random.hpp"

namespace sag {

/// Planted-model generator. Each feature is nonzero with probability
/// `density` and then uniform on [-1, 1]; labels come from a planted weight
/// vector (Bernoulli of the logistic link, or linear plus Gaussian noise).
struct SyntheticSpec {
  std::size_t n = 100;
  std::size_t p = 10;
  double density = 1.0;
  std::uint64_t seed = 0;
  Loss loss = Loss::logistic;
  /// Scales the planted margins; larger means cleaner labels.
  double signal = 1.0;
  /// Standard deviation of the additive noise for regression targets.
  double noise = 0.1;
};

struct SyntheticData {
  Dataset train;
  Dataset test;
  DenseVector planted;
};

namespace detail {

inline double standard_normal(Rng& rng) {
  const double u1 = 1.0 - uniform_unit(rng);
  const double u2 = uniform_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline Dataset draw_examples(const SyntheticSpec& spec, const DenseVector& w, std::size_t count, Rng& rng) {
  std::vector<Example> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<SparseEntry> entries;
    for (std::size_t j = 0; j < spec.p; ++j) {
      if (spec.density < 1.0 && uniform_unit(rng) >= spec.density) continue;
      const double v = 2.0 * uniform_unit(rng) - 1.0;
      if (v != 0.0) entries.push_back({j, v});
    }
    SparseVector a(std::move(entries), spec.p);
    const double z = a.dot(w);
    double label;
    if (spec.loss == Loss::logistic) {
      label = uniform_unit(rng) < 1.0 / (1.0 + std::exp(-z)) ? 1.0 : -1.0;
    } else {
      label = z + spec.noise * standard_normal(rng);
    }
    out.push_back({std::move(a), label});
  }
  return Dataset(std::move(out), spec.p);
}

}  // namespace detail

/// Draws n training and n test examples from the same planted model.
inline SyntheticData make_synthetic_pair(const SyntheticSpec& spec) {
  if (spec.n == 0 || spec.p == 0) throw DataError("synthetic dataset needs n, p >= 1");
  if (!(spec.density > 0.0 && spec.density <= 1.0)) throw DataError("synthetic density must be in (0, 1]");
  Rng rng(spec.seed);
  const double expected_nnz = std::max(1.0, spec.density * static_cast<double>(spec.p));
  // uniform[-1,1] entries have variance 1/3
  const double scale = spec.signal * std::sqrt(3.0 / expected_nnz);
  DenseVector w(static_cast<Eigen::Index>(spec.p));
  for (Eigen::Index j = 0; j < w.size(); ++j) w[j] = scale * detail::standard_normal(rng);
  Dataset train = detail::draw_examples(spec, w, spec.n, rng);
  Dataset test = detail::draw_examples(spec, w, spec.n, rng);
  return {std::move(train), std::move(test), std::move(w)};
}

inline Dataset make_synthetic(const SyntheticSpec& spec) { return make_synthetic_pair(spec).train; }

}  // namespace sag
