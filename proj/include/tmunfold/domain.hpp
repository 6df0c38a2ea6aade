#pragma once

// Rectangular parameter boxes with optional per-coordinate periodicity.
// These stand in for base charts, links and regular charts alike.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tmunfold/error.hpp"
#include "tmunfold/expr.hpp"

namespace tmunfold {

using Point = std::vector<double>;

struct Coord {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
  bool periodic = false;
  /// Period of the ambient circle. For a full periodic coordinate this is
  /// upper - lower; a sub-arc of a circle keeps the parent period.
  double period = 0.0;

  double length() const { return upper - lower; }

  /// Representative of x in [lower, lower + period) for periodic coordinates.
  double reduce(double x) const {
    if (!periodic) return x;
    double y = std::fmod(x - lower, period);
    if (y < 0) y += period;
    if (y >= period) y = 0.0;
    return lower + y;
  }

  double distance(double a, double b) const {
    const double d = std::abs(a - b);
    if (!periodic) return d;
    const double m = std::fmod(d, period);
    return std::min(m, period - m);
  }

  bool contains(double x, double tol = 0.0) const {
    if (!periodic) return x >= lower - tol && x <= upper + tol;
    if (length() >= period - tol) return true;
    double off = std::fmod(x - lower, period);
    if (off < 0) off += period;
    return off <= length() + tol || off >= period - tol;
  }
};

class Domain {
 public:
  Domain() = default;
  explicit Domain(std::vector<Coord> coords) : coords_(std::move(coords)) { check(); }

  std::size_t dim() const noexcept { return coords_.size(); }
  const std::vector<Coord>& coords() const noexcept { return coords_; }
  const Coord& operator[](std::size_t i) const { return coords_[i]; }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    out.reserve(coords_.size());
    for (const auto& c : coords_) out.push_back(c.name);
    return out;
  }

  std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t i = 0; i < coords_.size(); ++i)
      if (coords_[i].name == name) return i;
    return std::nullopt;
  }

  bool contains(const Point& p, double tol = 1e-12) const {
    if (p.size() != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i)
      if (!coords_[i].contains(p[i], tol)) return false;
    return true;
  }

  Point reduce(Point p) const {
    for (std::size_t i = 0; i < dim() && i < p.size(); ++i) p[i] = coords_[i].reduce(p[i]);
    return p;
  }

  /// Max-norm distance with circular distance on periodic coordinates.
  double distance(const Point& a, const Point& b) const {
    double d = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) d = std::max(d, coords_[i].distance(a[i], b[i]));
    return d;
  }

  /// Concatenation of coordinate lists.
  Domain product(const Domain& other) const {
    std::vector<Coord> c = coords_;
    c.insert(c.end(), other.coords_.begin(), other.coords_.end());
    return Domain(std::move(c));
  }

  /// Coordinate-wise intersection. Coordinates are matched by name; `box`
  /// may constrain a subset. Returns nullopt when empty.
  std::optional<Domain> intersect(const Domain& box) const {
    std::vector<Coord> out = coords_;
    for (const auto& b : box.coords_) {
      auto idx = index_of(b.name);
      if (!idx) continue;
      Coord& c = out[*idx];
      if (c.periodic && c.length() >= c.period - 1e-12) {
        c.lower = b.lower;
        c.upper = b.upper;
      } else if (c.periodic) {
        // Sub-arc of a circle: shift b into c's window before clipping.
        const double lo = c.lower + std::fmod(std::fmod(b.lower - c.lower, c.period) + c.period,
                                              c.period);
        const double hi = lo + (b.upper - b.lower);
        c.lower = std::max(c.lower, lo);
        c.upper = std::min(c.upper, hi);
      } else {
        c.lower = std::max(c.lower, b.lower);
        c.upper = std::min(c.upper, b.upper);
      }
      if (!(c.lower < c.upper)) return std::nullopt;
    }
    return Domain(std::move(out));
  }

 private:
  void check() {
    std::set<std::string> seen;
    for (auto& c : coords_) {
      if (!(c.lower < c.upper))
        throw ConfigError("coordinate '" + c.name + "' needs lower < upper");
      if (!seen.insert(c.name).second) throw ConfigError("duplicate coordinate '" + c.name + "'");
      if (c.periodic && !(c.period > 0.0)) c.period = c.upper - c.lower;
    }
  }

  std::vector<Coord> coords_;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline double constant_expr(std::string_view text) {
  return eval(parse_expr(text), Env{});
}

}  // namespace detail

/// Parses "name in [lo, hi] periodic; other in (a, b)". Bounds are constant
/// expressions; bracket style is accepted but not significant. An empty or
/// blank string is the 0-dimensional domain.
inline Domain parse_domain(std::string_view text) {
  std::vector<Coord> coords;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(';', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string part = detail::trim(text.substr(start, end - start));
    start = end + 1;
    if (part.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto in_pos = part.find(" in ");
    if (in_pos == std::string::npos)
      throw ConfigError("coordinate spec '" + part + "' must look like 'x in [a, b]'");
    Coord c;
    c.name = detail::trim(std::string_view(part).substr(0, in_pos));
    std::string rest = detail::trim(std::string_view(part).substr(in_pos + 4));
    const auto open = rest.find_first_of("[(");
    const auto close = rest.find_last_of("])");
    const auto comma = rest.find(',', open == std::string::npos ? 0 : open);
    if (open != 0 || close == std::string::npos || comma == std::string::npos || comma > close)
      throw ConfigError("malformed interval in '" + part + "'");
    c.lower = detail::constant_expr(std::string_view(rest).substr(1, comma - 1));
    c.upper = detail::constant_expr(std::string_view(rest).substr(comma + 1, close - comma - 1));
    const std::string flags = detail::trim(std::string_view(rest).substr(close + 1));
    if (flags == "periodic")
      c.periodic = true;
    else if (!flags.empty())
      throw ConfigError("unknown coordinate flag '" + flags + "'");
    if (c.periodic) c.period = c.upper - c.lower;
    coords.push_back(std::move(c));
    if (end == text.size()) break;
  }
  return Domain(std::move(coords));
}

/// Sub-box of `parent` described by `text`; periodic flags and periods are
/// inherited from the parent coordinate of the same name.
inline Domain parse_subdomain(std::string_view text, const Domain& parent) {
  Domain raw = parse_domain(text);
  std::vector<Coord> out;
  for (const auto& c : raw.coords()) {
    auto idx = parent.index_of(c.name);
    if (!idx) throw ConfigError("coordinate '" + c.name + "' is not a coordinate of the parent");
    Coord k = c;
    k.periodic = parent[*idx].periodic;
    k.period = parent[*idx].period;
    out.push_back(k);
  }
  // Unconstrained coordinates default to the parent's extent.
  std::vector<Coord> ordered;
  for (const auto& pc : parent.coords()) {
    auto it = std::find_if(out.begin(), out.end(), [&](const Coord& k) { return k.name == pc.name; });
    ordered.push_back(it == out.end() ? pc : *it);
  }
  return Domain(std::move(ordered));
}

}  // namespace tmunfold
