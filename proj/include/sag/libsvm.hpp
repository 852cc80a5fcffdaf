#pragma once

#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "sag/data.hpp"

namespace sag {

class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class LabelPolicy {
  /// Labels must be +1/-1; a 0 label is read as -1.
  binary,
  /// Any finite label is kept (regression targets).
  real,
};

struct ParseOptions {
  /// Explicit feature dimension; defaults to the largest index seen.
  std::optional<std::size_t> dim;
  LabelPolicy labels = LabelPolicy::binary;
};

namespace detail {

inline double parse_real(std::string_view tok, std::size_t line, const char* what) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty())
    throw ParseError(line, std::string("malformed ") + what + " '" + std::string(tok) + "'");
  if (!std::isfinite(v)) throw ParseError(line, std::string("non-finite ") + what);
  return v;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t k = 0;
  while (k < s.size()) {
    while (k < s.size() && (s[k] == ' ' || s[k] == '\t')) ++k;
    const std::size_t start = k;
    while (k < s.size() && s[k] != ' ' && s[k] != '\t') ++k;
    if (k > start) out.push_back(s.substr(start, k - start));
  }
  return out;
}

}  // namespace detail

/// Reads `<label> <idx>:<val> ...` lines with strictly increasing one-based
/// indices. Blank lines and lines starting with '#' are skipped.
inline Dataset parse_libsvm(std::istream& in, const ParseOptions& opts = {}) {
  struct Row {
    std::vector<SparseEntry> entries;
    double label;
  };
  std::vector<Row> rows;
  std::size_t max_index = 0;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto tokens = detail::split_ws(line);
    if (tokens.empty() || tokens.front().front() == '#') continue;

    double label = detail::parse_real(tokens.front(), line_no, "label");
    if (opts.labels == LabelPolicy::binary) {
      if (label == 0.0) label = -1.0;
      if (label != 1.0 && label != -1.0)
        throw ParseError(line_no, "classification label must be -1, 0 or +1");
    }

    Row row{{}, label};
    std::size_t prev = 0;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const auto tok = tokens[t];
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos || colon == 0)
        throw ParseError(line_no, "malformed feature token '" + std::string(tok) + "'");
      std::size_t idx = 0;
      const auto idx_tok = tok.substr(0, colon);
      const auto [ptr, ec] = std::from_chars(idx_tok.data(), idx_tok.data() + idx_tok.size(), idx);
      if (ec != std::errc() || ptr != idx_tok.data() + idx_tok.size() || idx == 0)
        throw ParseError(line_no, "malformed feature index '" + std::string(idx_tok) + "'");
      if (idx <= prev) throw ParseError(line_no, "feature indices not strictly increasing");
      prev = idx;
      const double v = detail::parse_real(tok.substr(colon + 1), line_no, "feature value");
      if (v != 0.0) row.entries.push_back({idx - 1, v});
      max_index = std::max(max_index, idx);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("empty dataset");

  std::size_t p = max_index;
  if (opts.dim) {
    if (*opts.dim < max_index)
      throw DataError("feature index " + std::to_string(max_index) +
                      " exceeds declared dimension " + std::to_string(*opts.dim));
    p = *opts.dim;
  }
  if (p == 0) p = 1;

  std::vector<Example> examples;
  examples.reserve(rows.size());
  for (auto& r : rows) examples.push_back({SparseVector(std::move(r.entries), p), r.label});
  return Dataset(std::move(examples), p);
}

inline Dataset parse_libsvm(std::string_view text, const ParseOptions& opts = {}) {
  std::istringstream in{std::string(text)};
  return parse_libsvm(in, opts);
}

/// Writes values with 17 significant digits so that parsing the output
/// reproduces the dataset exactly.
inline void write_libsvm(std::ostream& out, const Dataset& data) {
  char buf[64];
  auto put = [&](double v) {
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    out.write(buf, res.ptr - buf);
  };
  for (const auto& ex : data.examples()) {
    put(ex.label);
    for (const auto& e : ex.features.entries()) {
      out << ' ' << (e.index + 1) << ':';
      put(e.value);
    }
    out << '\n';
  }
}

inline std::string to_libsvm(const Dataset& data) {
  std::ostringstream out;
  write_libsvm(out, data);
  return out.str();
}

}  // namespace sag
