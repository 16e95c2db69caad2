#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "tomokit/errors.hpp"

namespace tomokit {

namespace detail {

inline double parse_double(std::string_view s, const char* what) {
  std::string buf(s);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(buf, &used);
  } catch (const std::exception&) {
    throw ParseError(std::string(what) + ": not a number: '" + buf + "'");
  }
  if (used != buf.size()) throw ParseError(std::string(what) + ": trailing characters in '" + buf + "'");
  return v;
}

inline long parse_integer(std::string_view s, const char* what) {
  long v = 0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw ParseError(std::string(what) + ": not an integer: '" + std::string(s) + "'");
  return v;
}

}  // namespace detail

// Equispaced nodes lo, ..., hi (both ends included).
struct UniformGrid {
  double lo = -6.0;
  double hi = 6.0;
  int nodes = 121;

  double step() const { return nodes > 1 ? (hi - lo) / (nodes - 1) : 0.0; }
  double at(int i) const { return nodes > 1 ? lo + (hi - lo) * i / (nodes - 1) : lo; }

  std::vector<double> values() const {
    std::vector<double> v(static_cast<std::size_t>(nodes));
    for (int i = 0; i < nodes; ++i) v[static_cast<std::size_t>(i)] = at(i);
    return v;
  }

  void check(const char* what = "grid") const {
    if (nodes < 1) throw DomainError(std::string(what) + ": need at least one node");
    if (!std::isfinite(lo) || !std::isfinite(hi) || (nodes > 1 && !(hi > lo)))
      throw DomainError(std::string(what) + ": need finite bounds with max > min");
  }

  static UniformGrid symmetric(double half_width, int nodes) { return {-half_width, half_width, nodes}; }

  // "min:max:count"
  static UniformGrid parse(std::string_view text) {
    const auto a = text.find(':');
    const auto b = a == std::string_view::npos ? a : text.find(':', a + 1);
    if (a == std::string_view::npos || b == std::string_view::npos)
      throw ParseError("grid must look like min:max:count, got '" + std::string(text) + "'");
    UniformGrid g{detail::parse_double(text.substr(0, a), "grid min"),
                  detail::parse_double(text.substr(a + 1, b - a - 1), "grid max"),
                  static_cast<int>(detail::parse_integer(text.substr(b + 1), "grid count"))};
    try {
      g.check();
    } catch (const DomainError& e) {
      throw ParseError(std::string("'") + std::string(text) + "': " + e.what());
    }
    return g;
  }
};

// Trapezoid weights for an equispaced grid.
inline std::vector<double> trapezoid_weights(const UniformGrid& g) {
  std::vector<double> w(static_cast<std::size_t>(g.nodes), g.step());
  if (g.nodes > 1) {
    w.front() *= 0.5;
    w.back() *= 0.5;
  }
  return w;
}

}  // namespace tomokit
