#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sag {

enum class Loss { logistic, squared };

inline const char* to_string(Loss loss) { return loss == Loss::logistic ? "logistic" : "squared"; }

inline Loss parse_loss(std::string_view s) {
  if (s == "logistic") return Loss::logistic;
  if (s == "squared") return Loss::squared;
  throw std::invalid_argument("unknown loss '" + std::string(s) + "'");
}

/// Scalar losses of a linear prediction z = a'x against label b.
namespace loss {

/// log(1 + exp(-b z)), branching on the sign of the margin to avoid overflow.
inline double logistic_value(double z, double b) {
  const double m = b * z;
  return m > 0.0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
}

/// d/dz log(1 + exp(-b z)) = -b / (1 + exp(b z))
inline double logistic_derivative(double z, double b) {
  const double m = b * z;
  if (m > 0.0) {
    const double e = std::exp(-m);
    return -b * e / (1.0 + e);
  }
  return -b / (1.0 + std::exp(m));
}

inline double logistic_curvature(double z, double b) {
  const double m = b * z;
  const double e = std::exp(-std::abs(m));
  return e / ((1.0 + e) * (1.0 + e));
}

inline double value(Loss l, double z, double b) {
  if (l == Loss::logistic) return logistic_value(z, b);
  const double r = z - b;
  return 0.5 * r * r;
}

inline double derivative(Loss l, double z, double b) {
  return l == Loss::logistic ? logistic_derivative(z, b) : z - b;
}

inline double curvature(Loss l, double z, double b) {
  return l == Loss::logistic ? logistic_curvature(z, b) : 1.0;
}

/// Upper bound on the second derivative over all z.
inline double max_curvature(Loss l) { return l == Loss::logistic ? 0.25 : 1.0; }

}  // namespace loss
}  // namespace sag
