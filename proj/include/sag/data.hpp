#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace sag {

using DenseVector = Eigen::VectorXd;

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One stored coordinate of a sparse vector. `index` is zero-based; the LIBSVM
/// text format is one-based and the parser/serializer convert between them.
struct SparseEntry {
  std::size_t index;
  double value;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Sparse feature vector with strictly increasing indices and no stored zeros.
class SparseVector {
 public:
  SparseVector() = default;

  SparseVector(std::vector<SparseEntry> entries, std::size_t dim)
      : entries_(std::move(entries)), dim_(dim) {
    for (std::size_t k = 0; k < entries_.size(); ++k) {
      const auto& e = entries_[k];
      if (e.index >= dim_)
        throw DataError("sparse index " + std::to_string(e.index) +
                        " out of range for dimension " + std::to_string(dim_));
      if (k > 0 && entries_[k - 1].index >= e.index)
        throw DataError("sparse indices must be strictly increasing");
      if (!std::isfinite(e.value)) throw DataError("non-finite sparse value");
    }
    std::erase_if(entries_, [](const SparseEntry& e) { return e.value == 0.0; });
  }

  static SparseVector from_dense(const DenseVector& v) {
    std::vector<SparseEntry> entries;
    for (Eigen::Index j = 0; j < v.size(); ++j)
      if (v[j] != 0.0) entries.push_back({static_cast<std::size_t>(j), v[j]});
    return SparseVector(std::move(entries), static_cast<std::size_t>(v.size()));
  }

  const std::vector<SparseEntry>& entries() const { return entries_; }
  std::size_t dim() const { return dim_; }
  std::size_t nnz() const { return entries_.size(); }

  double dot(const DenseVector& x) const {
    double s = 0.0;
    for (const auto& e : entries_) s += e.value * x[static_cast<Eigen::Index>(e.index)];
    return s;
  }

  double squared_norm() const {
    double s = 0.0;
    for (const auto& e : entries_) s += e.value * e.value;
    return s;
  }

  /// out += scale * this
  void add_to(DenseVector& out, double scale) const {
    for (const auto& e : entries_) out[static_cast<Eigen::Index>(e.index)] += scale * e.value;
  }

  DenseVector to_dense() const {
    DenseVector v = DenseVector::Zero(static_cast<Eigen::Index>(dim_));
    add_to(v, 1.0);
    return v;
  }

  SparseVector scaled(double s) const {
    std::vector<SparseEntry> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back({e.index, s * e.value});
    return SparseVector(std::move(out), dim_);
  }

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  std::vector<SparseEntry> entries_;
  std::size_t dim_ = 0;
};

struct Example {
  SparseVector features;
  double label = 0.0;

  friend bool operator==(const Example&, const Example&) = default;
};

/// Immutable labeled dataset; every example has dimension p.
class Dataset {
 public:
  Dataset(std::vector<Example> examples, std::size_t p)
      : examples_(std::move(examples)), p_(p) {
    if (examples_.empty()) throw DataError("empty dataset");
    if (p_ == 0) throw DataError("dataset dimension must be positive");
    for (const auto& ex : examples_) {
      if (ex.features.dim() != p_)
        throw DataError("example dimension " + std::to_string(ex.features.dim()) +
                        " does not match dataset dimension " + std::to_string(p_));
      if (!std::isfinite(ex.label)) throw DataError("non-finite label");
    }
  }

  std::size_t n() const { return examples_.size(); }
  std::size_t p() const { return p_; }
  const Example& operator[](std::size_t i) const { return examples_[i]; }
  const std::vector<Example>& examples() const { return examples_; }

  std::size_t nnz() const {
    std::size_t s = 0;
    for (const auto& ex : examples_) s += ex.features.nnz();
    return s;
  }

  double density() const {
    return static_cast<double>(nnz()) / (static_cast<double>(n()) * static_cast<double>(p_));
  }

  double max_squared_norm() const {
    double m = 0.0;
    for (const auto& ex : examples_) m = std::max(m, ex.features.squared_norm());
    return m;
  }

  bool binary_labels() const {
    return std::all_of(examples_.begin(), examples_.end(),
                       [](const Example& ex) { return ex.label == 1.0 || ex.label == -1.0; });
  }

  /// FNV-1a over dimensions, labels and entries; used to key cached solutions.
  std::uint64_t content_hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const void* data, std::size_t len) {
      const auto* bytes = static_cast<const unsigned char*>(data);
      for (std::size_t k = 0; k < len; ++k) {
        h ^= bytes[k];
        h *= 1099511628211ULL;
      }
    };
    const std::uint64_t dims[2] = {n(), p_};
    mix(dims, sizeof dims);
    for (const auto& ex : examples_) {
      mix(&ex.label, sizeof ex.label);
      const std::uint64_t nz = ex.features.nnz();
      mix(&nz, sizeof nz);
      for (const auto& e : ex.features.entries()) {
        const std::uint64_t idx = e.index;
        mix(&idx, sizeof idx);
        mix(&e.value, sizeof e.value);
      }
    }
    return h;
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<Example> examples_;
  std::size_t p_;
};

using DatasetPtr = std::shared_ptr<const Dataset>;

inline DatasetPtr share(Dataset d) { return std::make_shared<const Dataset>(std::move(d)); }

}  // namespace sag
