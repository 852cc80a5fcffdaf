#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace sag {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Step-size rule alpha_k for iteration k >= 1.
class StepSchedule {
 public:
  enum class Kind {
    constant,
    /// scale / (mu k)
    pegasos,
    /// alpha0 / max(1, passes)^(2/3), passes counted before the step
    power,
    /// 1 / L_k with L_k estimated by doubling from L0
    line_search,
  };

  static StepSchedule constant(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("constant step must be positive and finite");
    return {Kind::constant, alpha, 0.0};
  }
  static StepSchedule pegasos(double mu, double scale = 1.0) {
    if (!(mu > 0.0)) throw ConfigError("pegasos schedule requires mu > 0");
    if (!(scale > 0.0)) throw ConfigError("pegasos scale must be positive");
    return {Kind::pegasos, scale, mu};
  }
  static StepSchedule power(double alpha0) {
    if (!(alpha0 > 0.0)) throw ConfigError("power schedule needs alpha0 > 0");
    return {Kind::power, alpha0, 0.0};
  }
  static StepSchedule line_search(double L0 = 1.0) {
    if (!(L0 > 0.0)) throw ConfigError("line search needs L0 > 0");
    return {Kind::line_search, L0, 0.0};
  }

  Kind kind() const { return kind_; }
  /// alpha, the pegasos multiplier, alpha0 or L0 depending on the kind.
  double parameter() const { return param_; }
  double mu() const { return mu_; }

  double at(std::uint64_t k, double passes_done) const {
    switch (kind_) {
      case Kind::constant:
        return param_;
      case Kind::pegasos:
        return param_ / (mu_ * static_cast<double>(std::max<std::uint64_t>(k, 1)));
      case Kind::power:
        return param_ / std::pow(std::max(1.0, passes_done), 2.0 / 3.0);
      case Kind::line_search:
        throw ConfigError("line-search steps come from the optimizer state");
    }
    return param_;
  }

  std::string describe() const {
    char buf[64];
    switch (kind_) {
      case Kind::constant:
        std::snprintf(buf, sizeof buf, "const:%.6g", param_);
        break;
      case Kind::pegasos:
        std::snprintf(buf, sizeof buf, "pegasos:%.6g", param_);
        break;
      case Kind::power:
        std::snprintf(buf, sizeof buf, "power:%.6g", param_);
        break;
      case Kind::line_search:
        std::snprintf(buf, sizeof buf, "ls:%.6g", param_);
        break;
    }
    return buf;
  }

 private:
  StepSchedule(Kind k, double p, double mu) : kind_(k), param_(p), mu_(mu) {}

  Kind kind_;
  double param_;
  double mu_;
};

}  // namespace sag
