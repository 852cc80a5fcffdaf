#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sag/data.hpp"

namespace sag {

struct MetricsRow {
  std::string method;
  std::string step;
  std::uint64_t seed = 0;
  double effective_pass = 0.0;
  double train_obj = 0.0;
  double train_gap = 0.0;
  double test_obj = 0.0;
  double test_error = 0.0;
};

/// Field-wise equality that treats two NaNs as equal, so rows recording a
/// divergence compare equal after a round trip.
inline bool same_row(const MetricsRow& a, const MetricsRow& b) {
  auto eq = [](double u, double v) { return u == v || (std::isnan(u) && std::isnan(v)); };
  return a.method == b.method && a.step == b.step && a.seed == b.seed && eq(a.effective_pass, b.effective_pass) &&
         eq(a.train_obj, b.train_obj) && eq(a.train_gap, b.train_gap) && eq(a.test_obj, b.test_obj) &&
         eq(a.test_error, b.test_error);
}

/// Fraction of examples whose prediction sign(a'x) disagrees with the sign
/// of the label; a zero prediction always counts as an error.
inline double test_error(const Dataset& data, const DenseVector& x) {
  std::size_t wrong = 0;
  for (const auto& ex : data.examples()) {
    const double z = ex.features.dot(x);
    if (!(z * ex.label > 0.0)) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(data.n());
}

inline constexpr const char* csv_header = "method,step,seed,effective_pass,train_obj,train_gap,test_obj,test_error";

inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void emit_csv(const std::vector<MetricsRow>& rows, std::ostream& out) {
  out << csv_header << '\n';
  for (const auto& r : rows) {
    if (r.method.find(',') != std::string::npos || r.step.find(',') != std::string::npos)
      throw std::invalid_argument("CSV fields may not contain commas");
    out << r.method << ',' << r.step << ',' << r.seed << ',' << format_real(r.effective_pass) << ','
        << format_real(r.train_obj) << ',' << format_real(r.train_gap) << ',' << format_real(r.test_obj) << ','
        << format_real(r.test_error) << '\n';
  }
}

inline std::string emit_csv(const std::vector<MetricsRow>& rows) {
  std::ostringstream out;
  emit_csv(rows, out);
  return out.str();
}

inline std::vector<MetricsRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != csv_header) throw std::runtime_error("missing metrics CSV header");
  std::vector<MetricsRow> rows;
  auto real = [](const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0') throw std::runtime_error("bad number '" + s + "' in metrics CSV");
    return v;
  };
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (f.size() != 8) throw std::runtime_error("metrics CSV row has " + std::to_string(f.size()) + " fields");
    MetricsRow r;
    r.method = f[0];
    r.step = f[1];
    r.seed = std::stoull(f[2]);
    r.effective_pass = real(f[3]);
    r.train_obj = real(f[4]);
    r.train_gap = real(f[5]);
    r.test_obj = real(f[6]);
    r.test_error = real(f[7]);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::vector<MetricsRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in);
}

}  // namespace sag
