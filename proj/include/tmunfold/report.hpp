#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tmunfold/domain.hpp"

namespace tmunfold {

enum class Status { pass, fail, proxy };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::pass:
      return "pass";
    case Status::fail:
      return "fail";
    case Status::proxy:
      return "proxy";
  }
  return "?";
}

struct Check {
  std::string name;
  std::string anchor;
  Status status = Status::pass;
  double residual = 0.0;
  /// Coordinates of the worst sample; filled on failure.
  Point witness;
  std::string note;
};

/// Ordered collection of checks. Merging is concatenation, so partial
/// reports built by independent sweeps combine in any order.
class Report {
 public:
  void add(Check c) { checks_.push_back(std::move(c)); }

  void merge(const Report& other) {
    checks_.insert(checks_.end(), other.checks_.begin(), other.checks_.end());
  }

  /// Prefixes every check name, e.g. with the id of the object it covers.
  Report& prefix(const std::string& p) {
    for (auto& c : checks_) c.name = p + c.name;
    return *this;
  }

  const std::vector<Check>& checks() const noexcept { return checks_; }
  bool empty() const noexcept { return checks_.empty(); }

  /// Proxy entries never fail the aggregate but never count as plain passes.
  bool passed() const {
    return std::none_of(checks_.begin(), checks_.end(),
                        [](const Check& c) { return c.status == Status::fail; });
  }

  const Check* find(const std::string& name) const {
    for (const auto& c : checks_)
      if (c.name == name) return &c;
    return nullptr;
  }

  /// Entries sorted by name; output never depends on evaluation order.
  std::vector<Check> canonical() const {
    std::vector<Check> out = checks_;
    std::stable_sort(out.begin(), out.end(),
                     [](const Check& a, const Check& b) { return a.name < b.name; });
    return out;
  }

 private:
  std::vector<Check> checks_;
};

/// Accumulates per-sample residuals into one Check.
class Tracker {
 public:
  enum class Mode {
    at_most,   // residual must stay <= tol
    at_least,  // residual must stay >= tol (e.g. |det J|)
  };

  Tracker(std::string name, std::string anchor, double tol, Mode mode = Mode::at_most)
      : name_(std::move(name)), anchor_(std::move(anchor)), tol_(tol), mode_(mode) {
    worst_ = mode == Mode::at_most ? 0.0 : std::numeric_limits<double>::infinity();
  }

  void observe(double residual, const Point& at) {
    ++count_;
    const bool worse = mode_ == Mode::at_most ? !(residual <= worst_) : !(residual >= worst_);
    if (worse || std::isnan(residual)) {
      worst_ = residual;
      witness_ = at;
    }
  }

  void fail_with(const std::string& note, const Point& at) {
    hard_fail_ = true;
    if (note_.empty()) note_ = note;
    if (witness_.empty()) witness_ = at;
  }

  void set_note(std::string n) { note_ = std::move(n); }
  std::size_t count() const noexcept { return count_; }
  double worst() const noexcept { return worst_; }

  Check finish(Status ok_status = Status::pass) const {
    Check c;
    c.name = name_;
    c.anchor = anchor_;
    double r = worst_;
    if (count_ == 0) r = 0.0;
    c.residual = r;
    bool ok = !hard_fail_;
    if (count_ > 0) ok = ok && (mode_ == Mode::at_most ? r <= tol_ : r >= tol_);
    c.status = ok ? ok_status : Status::fail;
    if (!ok) c.witness = witness_;
    c.note = note_;
    if (count_ == 0 && c.note.empty()) c.note = "vacuous: no samples";
    return c;
  }

 private:
  std::string name_, anchor_;
  double tol_;
  Mode mode_;
  double worst_;
  Point witness_;
  std::size_t count_ = 0;
  bool hard_fail_ = false;
  std::string note_;
};

namespace detail {

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline nlohmann::ordered_json json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const Report& r) {
  nlohmann::ordered_json j;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.canonical()) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["anchor"] = c.anchor;
    e["status"] = to_string(c.status);
    e["residual"] = detail::json_number(c.residual);
    e["witness"] = nlohmann::ordered_json::array();
    for (double w : c.witness) e["witness"].push_back(detail::json_number(w));
    if (!c.note.empty()) e["note"] = c.note;
    j["checks"].push_back(std::move(e));
  }
  j["verdict"] = r.passed() ? "pass" : "fail";
  return j;
}

inline void write_text(const Report& r, std::ostream& os) {
  for (const auto& c : r.canonical()) {
    std::string status = to_string(c.status);
    for (auto& ch : status) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    os << status << "  " << c.name << "  residual=" << detail::format_double(c.residual) << "  ["
       << c.anchor << "]";
    if (!c.witness.empty()) {
      os << "  at=(";
      for (std::size_t i = 0; i < c.witness.size(); ++i)
        os << (i ? ", " : "") << detail::format_double(c.witness[i]);
      os << ")";
    }
    if (!c.note.empty()) os << "  " << c.note;
    if (c.status == Status::proxy) os << "  (warning: proxy check, not a proof)";
    os << '\n';
  }
  os << "verdict: " << (r.passed() ? "pass" : "fail") << '\n';
}

inline void write_json(const Report& r, std::ostream& os) { os << to_json(r).dump(2) << '\n'; }

}  // namespace tmunfold
