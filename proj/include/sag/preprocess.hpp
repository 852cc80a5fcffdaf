#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "sag/data.hpp"
#include "sag/random.hpp"

namespace sag {

enum class Standardize {
  /// Standardize only when more than half of the feature matrix is nonzero.
  automatic,
  always,
  never,
};

/// Column statistics fitted on one dataset and applied to others, so the
/// test half is transformed with training-set means and deviations.
class FeatureScaler {
 public:
  static FeatureScaler fit(const Dataset& data, Standardize mode) {
    FeatureScaler s;
    s.p_ = data.p();
    s.active_ = mode == Standardize::always ||
                (mode == Standardize::automatic && data.density() > 0.5);
    if (!s.active_) return s;

    const auto p = static_cast<Eigen::Index>(data.p());
    const double n = static_cast<double>(data.n());
    DenseVector sum = DenseVector::Zero(p);
    for (const auto& ex : data.examples()) ex.features.add_to(sum, 1.0);
    s.mean_ = sum / n;
    DenseVector sq = DenseVector::Zero(p);
    for (const auto& ex : data.examples()) {
      DenseVector dx = ex.features.to_dense() - s.mean_;
      sq += dx.cwiseProduct(dx);
    }
    s.stddev_ = (sq / n).cwiseSqrt();
    return s;
  }

  bool active() const { return active_; }
  const DenseVector& mean() const { return mean_; }
  const DenseVector& stddev() const { return stddev_; }

  /// Standardizes (when active) and appends a constant-1 bias coordinate.
  Dataset transform(const Dataset& data) const {
    if (data.p() != p_) throw DataError("scaler fitted on a different dimension");
    const std::size_t p_out = p_ + 1;
    std::vector<Example> out;
    out.reserve(data.n());
    for (const auto& ex : data.examples()) {
      std::vector<SparseEntry> entries;
      if (active_) {
        const DenseVector v = ex.features.to_dense();
        for (std::size_t j = 0; j < p_; ++j) {
          const auto jj = static_cast<Eigen::Index>(j);
          // zero-variance columns map to zero
          const double z = stddev_[jj] > 0.0 ? (v[jj] - mean_[jj]) / stddev_[jj] : 0.0;
          if (z != 0.0) entries.push_back({j, z});
        }
      } else {
        entries = ex.features.entries();
      }
      entries.push_back({p_, 1.0});
      out.push_back({SparseVector(std::move(entries), p_out), ex.label});
    }
    return Dataset(std::move(out), p_out);
  }

 private:
  std::size_t p_ = 0;
  bool active_ = false;
  DenseVector mean_;
  DenseVector stddev_;
};

inline Dataset standardize_and_bias(const Dataset& data, Standardize mode = Standardize::automatic) {
  return FeatureScaler::fit(data, mode).transform(data);
}

struct Split {
  Dataset train;
  Dataset test;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded random halving of {0..n-1}: train receives ceil(n/2) indices, both
/// halves sorted ascending.
inline SplitIndices split_half_indices(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw DataError("split_half needs at least two examples");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t k = n - 1; k > 0; --k) std::swap(perm[k], perm[uniform_index(rng, k + 1)]);

  const auto n_train = static_cast<std::ptrdiff_t>((n + 1) / 2);
  SplitIndices out{{perm.begin(), perm.begin() + n_train}, {perm.begin() + n_train, perm.end()}};
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

inline Split split_half(const Dataset& data, std::uint64_t seed) {
  const auto idx = split_half_indices(data.n(), seed);
  auto gather = [&](const std::vector<std::size_t>& rows) {
    std::vector<Example> ex;
    ex.reserve(rows.size());
    for (auto i : rows) ex.push_back(data[i]);
    return Dataset(std::move(ex), data.p());
  };
  return {gather(idx.train), gather(idx.test)};
}

}  // namespace sag
