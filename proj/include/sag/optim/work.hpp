#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>

#include "sag/data.hpp"

namespace sag {

/// Evaluation counters. One component gradient costs 1/n of an effective
/// pass; a full gradient or full objective value costs a whole pass.
struct Work {
  std::uint64_t component_gradients = 0;
  std::uint64_t component_values = 0;
  std::uint64_t full_gradients = 0;
  std::uint64_t full_values = 0;

  /// Cost in component-evaluation units (n units per effective pass).
  std::uint64_t units(std::size_t n) const {
    return component_gradients + component_values + n * (full_gradients + full_values);
  }
  double effective_passes(std::size_t n) const {
    return static_cast<double>(units(n)) / static_cast<double>(n);
  }
};

/// An iteration left the region where it can make progress.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline bool all_finite(const DenseVector& x) { return x.allFinite(); }

}  // namespace sag
