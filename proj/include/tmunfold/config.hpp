#pragma once

// Configuration files: a small TOML-like format.
//
//   # comment
//   [space.cone]
//   link = "l in [0, 2*pi) periodic"
//   [cocycle.a.b]
//   g = ["l + u"]
//
// Values are quoted strings, numbers, true/false, or single-line lists of
// those. Keys may contain dots (overlaps.b, to_tube.alpha).

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tmunfold/candidate.hpp"
#include "tmunfold/collar.hpp"
#include "tmunfold/tm_lifting.hpp"

namespace tmunfold {

struct Params {
  std::size_t samples = 1000;
  double tol = 1e-6;
  double fd_tol = kDefaultFdTol;
  double fd_step = kDefaultStepHigher;
  std::uint64_t seed = 42;

  void check() const {
    if (samples < 1) throw ConfigError("samples must be >= 1");
    if (!(tol > 0.0)) throw ConfigError("tol must be > 0");
    if (!(fd_tol > 0.0)) throw ConfigError("fd_tol must be > 0");
    if (!(fd_step > 0.0)) throw ConfigError("fd_step must be > 0");
  }
};

struct Config {
  Params params;
  std::vector<SpaceSpec> spaces;
  std::vector<TMMorphism> morphisms;
  std::vector<CandidateUnfolding> candidates;
  std::vector<Collar> collars;

  const SpaceSpec* space(const std::string& id) const {
    for (const auto& s : spaces)
      if (s.id == id) return &s;
    return nullptr;
  }
  const TMMorphism* morphism(const std::string& id) const {
    for (const auto& m : morphisms)
      if (m.id == id) return &m;
    return nullptr;
  }
  const CandidateUnfolding* candidate(const std::string& id) const {
    for (const auto& c : candidates)
      if (c.id == id) return &c;
    return nullptr;
  }
  const Collar* collar(const std::string& id) const {
    for (const auto& c : collars)
      if (c.id == id) return &c;
    return nullptr;
  }
};

namespace config_detail {

struct Value {
  bool list = false;
  bool quoted = false;  // scalars only
  std::vector<std::string> items;
  std::vector<bool> item_quoted;
  std::size_t line = 0;
};

struct Section {
  std::string name;
  std::size_t line = 0;
  std::vector<std::pair<std::string, Value>> keys;

  const Value* get(const std::string& k) const {
    for (const auto& [key, v] : keys)
      if (key == k) return &v;
    return nullptr;
  }
};

inline std::string where(std::size_t line) { return "line " + std::to_string(line); }

/// Reads one scalar token starting at `i`; advances past it.
inline std::string scalar(const std::string& s, std::size_t& i, bool& quoted, std::size_t line) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  if (i < s.size() && s[i] == '"') {
    quoted = true;
    std::string out;
    for (++i; i < s.size() && s[i] != '"'; ++i) {
      if (s[i] == '\\' && i + 1 < s.size()) ++i;
      out += s[i];
    }
    if (i >= s.size()) throw SchemaError(where(line) + ": unterminated string");
    ++i;
    return out;
  }
  quoted = false;
  const std::size_t b = i;
  while (i < s.size() && s[i] != ',' && s[i] != ']' && s[i] != '#') ++i;
  return detail::trim(std::string_view(s).substr(b, i - b));
}

inline Value parse_value(const std::string& text, std::size_t line) {
  Value v;
  v.line = line;
  std::size_t i = 0;
  while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
  if (i < text.size() && text[i] == '[') {
    v.list = true;
    ++i;
    for (;;) {
      while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
      if (i >= text.size()) throw SchemaError(where(line) + ": unterminated list");
      if (text[i] == ']') {
        ++i;
        break;
      }
      bool q = false;
      std::string item = scalar(text, i, q, line);
      if (!q && item.empty()) throw SchemaError(where(line) + ": empty list item");
      v.items.push_back(std::move(item));
      v.item_quoted.push_back(q);
      while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
      if (i < text.size() && text[i] == ',') ++i;
    }
  } else {
    bool q = false;
    v.items.push_back(scalar(text, i, q, line));
    v.item_quoted.push_back(q);
    v.quoted = q;
    if (!q && v.items.back().empty()) throw SchemaError(where(line) + ": missing value");
  }
  while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
  if (i < text.size() && text[i] != '#') throw SchemaError(where(line) + ": trailing characters after value");
  return v;
}

inline std::vector<Section> parse_sections(std::istream& in) {
  std::vector<Section> out;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const std::string t = detail::trim(raw);
    if (t.empty() || t[0] == '#') continue;
    if (t[0] == '[') {
      const auto close = t.find(']');
      if (close == std::string::npos) throw SchemaError(where(line) + ": malformed section header");
      Section s;
      s.name = detail::trim(std::string_view(t).substr(1, close - 1));
      s.line = line;
      if (s.name.empty()) throw SchemaError(where(line) + ": empty section name");
      for (const auto& prev : out)
        if (prev.name == s.name) throw SchemaError(where(line) + ": duplicate section [" + s.name + "]");
      out.push_back(std::move(s));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw SchemaError(where(line) + ": expected key = value");
    if (out.empty()) throw SchemaError(where(line) + ": key outside any section");
    const std::string key = detail::trim(std::string_view(t).substr(0, eq));
    if (key.empty()) throw SchemaError(where(line) + ": empty key");
    for (char c : key)
      if (c >= 'A' && c <= 'Z') throw SchemaError(where(line) + ": keys are lowercase ('" + key + "')");
    if (out.back().get(key)) throw SchemaError(where(line) + ": duplicate key '" + key + "'");
    out.back().keys.emplace_back(key, parse_value(t.substr(eq + 1), line));
  }
  return out;
}

/// Typed access to one section with required/optional fields.
class Reader {
 public:
  Reader(const Section& s, std::string what) : s_(s), what_(std::move(what)) {}

  const std::string& what() const { return what_; }

  bool has(const std::string& k) const { return s_.get(k) != nullptr; }

  std::string string(const std::string& k) const {
    const Value& v = need(k);
    if (v.list) throw SchemaError(what_ + ": field '" + k + "' must be a string");
    return v.items[0];
  }

  std::string string_or(const std::string& k, const std::string& def) const {
    return has(k) ? string(k) : def;
  }

  double number(const std::string& k) const {
    const Value& v = need(k);
    if (v.list || v.quoted) throw SchemaError(what_ + ": field '" + k + "' must be a number");
    return to_number(v.items[0], k);
  }

  std::optional<double> number_opt(const std::string& k) const {
    if (!has(k)) return std::nullopt;
    return number(k);
  }

  /// A list of strings; a bare string counts as a one-element list.
  std::vector<std::string> strings(const std::string& k) const {
    const Value& v = need(k);
    return v.items;
  }

  std::vector<Expr> exprs(const std::string& k) const {
    std::vector<Expr> out;
    for (const auto& s : strings(k)) out.push_back(parse_expr(s));
    return out;
  }

  /// Keys of the form `prefix.<name>`, in file order.
  std::vector<std::string> suffixes(const std::string& prefix) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : s_.keys)
      if (k.size() > prefix.size() + 1 && k.compare(0, prefix.size() + 1, prefix + ".") == 0)
        out.push_back(k.substr(prefix.size() + 1));
    return out;
  }

  /// Rejects keys outside `allowed` (prefix entries end in '.').
  void only(std::initializer_list<const char*> allowed) const {
    for (const auto& [k, v] : s_.keys) {
      bool ok = false;
      for (const char* a : allowed) {
        const std::string_view av(a);
        if (!av.empty() && av.back() == '.' ? k.compare(0, av.size(), av) == 0 : k == av) ok = true;
      }
      if (!ok) throw SchemaError(what_ + ": unknown field '" + k + "' (" + where(v.line) + ")");
    }
  }

  const Value& need(const std::string& k) const {
    const Value* v = s_.get(k);
    if (!v) throw SchemaError(what_ + ": missing field '" + k + "'");
    return *v;
  }

 private:
  double to_number(const std::string& text, const std::string& k) const {
    try {
      std::size_t used = 0;
      const double d = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return d;
    } catch (const std::exception&) {
      throw SchemaError(what_ + ": field '" + k + "' is not a number: '" + text + "'");
    }
  }

  const Section& s_;
  std::string what_;
};

inline std::vector<std::string> split_dots(const std::string& name) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const auto dot = name.find('.', start);
    parts.push_back(name.substr(start, dot == std::string::npos ? std::string::npos : dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return parts;
}

inline SmoothMapExpr make_map(Domain in, Domain out, std::vector<Expr> exprs, const std::string& what) {
  SmoothMapExpr m{std::move(in), std::move(out), std::move(exprs)};
  m.check_variables(what);
  return m;
}

inline void check_vars(const std::vector<Expr>& exprs, const std::vector<std::string>& names,
                       const std::string& what) {
  for (const auto& e : exprs)
    for (const auto& v : e.free_variables())
      if (std::find(names.begin(), names.end(), v) == names.end())
        throw ConfigError(what + ": expression '" + to_string(e) + "' uses unknown variable '" + v + "'");
}

}  // namespace config_detail

/// Parses and cross-references a configuration. Throws SchemaError,
/// SyntaxError (expressions) and ReferenceError (dangling ids).
inline Config parse_config(std::istream& in) {
  using namespace config_detail;
  const auto sections = parse_sections(in);
  Config cfg;

  auto of_kind = [&](const std::string& kind) {
    std::vector<std::pair<std::vector<std::string>, const Section*>> out;
    for (const auto& s : sections) {
      auto parts = split_dots(s.name);
      if (parts[0] == kind) out.emplace_back(std::move(parts), &s);
    }
    return out;
  };
  for (const auto& s : sections) {
    const std::string kind = split_dots(s.name)[0];
    static const std::vector<std::string> kinds{"params", "space", "chart", "cocycle", "regular",
                                                "morphism", "candidate", "collar"};
    if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end())
      throw SchemaError(where(s.line) + ": unknown section [" + s.name + "]");
  }

  for (const auto& [parts, sec] : of_kind("params")) {
    if (parts.size() != 1) throw SchemaError("unknown section [" + sec->name + "]");
    Reader r(*sec, "params");
    r.only({"samples", "tol", "fd_tol", "fd_step", "seed"});
    if (auto v = r.number_opt("samples")) {
      if (*v < 1 || *v != std::floor(*v)) throw SchemaError("params: samples must be a positive integer");
      cfg.params.samples = static_cast<std::size_t>(*v);
    }
    if (auto v = r.number_opt("tol")) cfg.params.tol = *v;
    if (auto v = r.number_opt("fd_tol")) cfg.params.fd_tol = *v;
    if (auto v = r.number_opt("fd_step")) cfg.params.fd_step = *v;
    if (auto v = r.number_opt("seed")) {
      if (*v < 0 || *v != std::floor(*v)) throw SchemaError("params: seed must be a non-negative integer");
      cfg.params.seed = static_cast<std::uint64_t>(*v);
    }
  }
  try {
    cfg.params.check();
  } catch (const ConfigError& e) {
    throw SchemaError(std::string("params: ") + e.what());
  }

  // Spaces.
  for (const auto& [parts, sec] : of_kind("space")) {
    if (parts.size() != 2) throw SchemaError("section [" + sec->name + "] must be [space.<id>]");
    Reader r(*sec, "space '" + parts[1] + "'");
    r.only({"name", "stratum", "link", "radius", "singular"});
    SpaceSpec s;
    s.id = parts[1];
    s.name = r.string_or("name", s.id);
    s.stratum = parse_domain(r.string_or("stratum", ""));
    s.link = parse_domain(r.string_or("link", ""));
    if (auto v = r.number_opt("radius")) {
      if (!(*v > 0.0)) throw SchemaError(r.what() + ": radius must be > 0");
      s.radius = *v;
    }
    if (cfg.space(s.id)) throw SchemaError("duplicate space '" + s.id + "'");
    for (const auto& n : s.tube_names())
      if (n == kHeight) throw SchemaError(r.what() + ": coordinate name 't' is reserved");
    if (s.stratum.index_of(kRadius) || s.link.index_of(kRadius))
      throw SchemaError(r.what() + ": coordinate name 'r' is reserved");
    cfg.spaces.push_back(std::move(s));
  }

  auto space_ref = [&](const Reader& r, const std::string& key) -> SpaceSpec& {
    const std::string id = r.string(key);
    for (auto& s : cfg.spaces)
      if (s.id == id) return s;
    throw ReferenceError(id, r.what());
  };
  auto chart_owner = [&](const std::string& chart) -> SpaceSpec* {
    for (auto& s : cfg.spaces)
      if (s.tube_chart(chart)) return &s;
    return nullptr;
  };

  // Tube charts (ids are global across spaces).
  std::vector<std::pair<std::string, std::map<std::string, std::vector<std::string>>>> pending_overlaps;
  for (const auto& [parts, sec] : of_kind("chart")) {
    if (parts.size() != 2) throw SchemaError("section [" + sec->name + "] must be [chart.<id>]");
    Reader r(*sec, "chart '" + parts[1] + "'");
    r.only({"space", "base", "overlaps."});
    SpaceSpec& s = space_ref(r, "space");
    if (chart_owner(parts[1])) throw SchemaError("duplicate chart '" + parts[1] + "'");
    TubeChart c;
    c.id = parts[1];
    c.base = r.has("base") ? parse_subdomain(r.string("base"), s.stratum) : s.stratum;
    std::map<std::string, std::vector<std::string>> ov;
    for (const auto& other : r.suffixes("overlaps")) ov[other] = r.strings("overlaps." + other);
    s.charts.push_back(std::move(c));
    pending_overlaps.emplace_back(parts[1], std::move(ov));
  }
  for (const auto& [id, ov] : pending_overlaps) {
    SpaceSpec* s = chart_owner(id);
    for (const auto& [other, boxes] : ov) {
      if (s->tube_chart(other) == nullptr) throw ReferenceError(other, "overlaps of chart '" + id + "'");
      for (const auto& b : boxes) {
        TubeChart* c = nullptr;
        for (auto& ch : s->charts)
          if (ch.id == id) c = &ch;
        c->overlaps[other].push_back(parse_subdomain(b, s->stratum));
      }
    }
  }

  // Cocycles.
  for (const auto& [parts, sec] : of_kind("cocycle")) {
    if (parts.size() != 3) throw SchemaError("section [" + sec->name + "] must be [cocycle.<a>.<b>]");
    Reader r(*sec, "cocycle '" + parts[1] + "." + parts[2] + "'");
    r.only({"g", "g_inv", "overlap"});
    SpaceSpec* s = chart_owner(parts[1]);
    if (!s) throw ReferenceError(parts[1], r.what());
    if (!s->tube_chart(parts[2])) throw ReferenceError(parts[2], r.what());
    if (r.has("overlap")) {
      for (auto& ch : s->charts)
        if (ch.id == parts[1])
          for (const auto& b : r.strings("overlap")) ch.overlaps[parts[2]].push_back(parse_subdomain(b, s->stratum));
    } else if (parts[1] != parts[2] && s->overlap_boxes(parts[1], parts[2]).empty()) {
      throw SchemaError(r.what() + ": no overlap declared between '" + parts[1] + "' and '" + parts[2] + "'");
    }
    const Domain ul = s->stratum.product(s->link);
    Cocycle k;
    k.from = parts[1];
    k.to = parts[2];
    k.g = make_map(ul, s->link, r.exprs("g"), r.what() + " g");
    k.g_inv = make_map(ul, s->link, r.exprs("g_inv"), r.what() + " g_inv");
    s->cocycles.push_back(std::move(k));
  }

  // Regular charts.
  for (const auto& [parts, sec] : of_kind("regular")) {
    if (parts.size() != 2) throw SchemaError("section [" + sec->name + "] must be [regular.<id>]");
    Reader r(*sec, "regular chart '" + parts[1] + "'");
    r.only({"space", "domain", "to_tube.", "from_tube.", "overlap."});
    SpaceSpec& s = space_ref(r, "space");
    RegularChart v;
    v.id = parts[1];
    v.domain = parse_domain(r.string("domain"));
    for (const auto& n : v.domain.names())
      if (n == kRadius || n == kHeight) throw SchemaError(r.what() + ": coordinate names 'r' and 't' are reserved");
    for (const auto& tube : r.suffixes("to_tube")) {
      if (!s.tube_chart(tube)) throw ReferenceError(tube, r.what());
      Transition t;
      t.tube = tube;
      t.to_tube = r.exprs("to_tube." + tube);
      if (!r.has("from_tube." + tube)) throw SchemaError(r.what() + ": missing field 'from_tube." + tube + "'");
      t.from_tube = r.exprs("from_tube." + tube);
      if (t.to_tube.size() != s.stratum.dim() + s.link.dim() + 1)
        throw SchemaError(r.what() + ": to_tube." + tube + " needs (u..., l..., r) components");
      if (t.from_tube.size() != v.domain.dim())
        throw SchemaError(r.what() + ": from_tube." + tube + " needs one component per chart coordinate");
      check_vars(t.to_tube, v.domain.names(), r.what());
      check_vars(t.from_tube, s.tube_names(), r.what());
      if (r.has("overlap." + tube)) t.overlap = parse_subdomain(r.string("overlap." + tube), v.domain);
      v.transitions.push_back(std::move(t));
    }
    for (const auto& tube : r.suffixes("from_tube"))
      if (!r.has("to_tube." + tube)) throw SchemaError(r.what() + ": missing field 'to_tube." + tube + "'");
    for (const auto& tube : r.suffixes("overlap"))
      if (!r.has("to_tube." + tube)) throw SchemaError(r.what() + ": overlap." + tube + " without a transition");
    s.regular.push_back(std::move(v));
  }

  for (auto& s : cfg.spaces) {
    s.singular = !s.charts.empty();
    s.check_references();
  }

  // Morphisms.
  auto build_piece = [&](const Reader& r, const SpaceSpec& src, const SpaceSpec& tgt, const std::string& id) {
    MorphismPiece p;
    if (r.has("chart")) {
      p.chart = r.string("chart");
    } else if (src.charts.size() == 1) {
      p.chart = src.charts[0].id;
    } else {
      throw SchemaError(r.what() + ": missing field 'chart'");
    }
    if (r.has("target_chart")) {
      p.target_chart = r.string("target_chart");
    } else if (tgt.charts.size() == 1) {
      p.target_chart = tgt.charts[0].id;
    } else {
      throw SchemaError(r.what() + ": missing field 'target_chart'");
    }
    const TubeChart* c = src.tube_chart(p.chart);
    if (!c) throw ReferenceError(p.chart, r.what());
    if (!tgt.tube_chart(p.target_chart)) throw ReferenceError(p.target_chart, r.what());
    p.f.id = id;
    p.f.base = c->base;
    p.f.link = src.link;
    p.f.target_base = tgt.stratum;
    p.f.target_link = tgt.link;
    if (tgt.stratum.dim() > 0 || r.has("a1")) p.f.a1 = r.exprs("a1");
    if (tgt.link.dim() > 0 || r.has("a2")) p.f.a2 = r.exprs("a2");
    const auto a3 = r.exprs("a3");
    if (a3.size() != 1) throw SchemaError(r.what() + ": field 'a3' needs exactly one expression");
    p.f.a3 = a3[0];
    try {
      p.f.check_dims();
    } catch (const ConfigError& e) {
      throw SchemaError(e.what());
    }
    std::vector<Expr> all = p.f.a1;
    all.insert(all.end(), p.f.a2.begin(), p.f.a2.end());
    all.push_back(p.f.a3);
    check_vars(all, p.f.input_names(), r.what());
    return p;
  };

  for (const auto& [parts, sec] : of_kind("morphism")) {
    if (parts.size() != 2) continue;  // pieces are read with their parent
    Reader r(*sec, "morphism '" + parts[1] + "'");
    r.only({"source", "target", "inverse", "chart", "target_chart", "a1", "a2", "a3", "regular.", "regular_target."});
    TMMorphism m;
    m.id = parts[1];
    const SpaceSpec& src = space_ref(r, "source");
    const SpaceSpec& tgt = space_ref(r, "target");
    m.source = src.id;
    m.target = tgt.id;
    m.inverse = r.string_or("inverse", "");
    bool has_piece_sections = false;
    for (const auto& [pp, ps] : of_kind("morphism")) {
      if (pp.size() == 4 && pp[1] == m.id && pp[2] == "piece") {
        has_piece_sections = true;
        Reader pr(*ps, "morphism '" + m.id + "' piece '" + pp[3] + "'");
        pr.only({"chart", "target_chart", "a1", "a2", "a3"});
        m.pieces.push_back(build_piece(pr, src, tgt, m.id + "." + pp[3]));
      } else if (pp.size() != 2 && pp[1] == m.id) {
        throw SchemaError("section [" + ps->name + "] must be [morphism.<id>.piece.<name>]");
      }
    }
    if (!has_piece_sections && src.singular) m.pieces.push_back(build_piece(r, src, tgt, m.id));
    for (std::size_t i = 0; i < m.pieces.size(); ++i)
      for (std::size_t j = i + 1; j < m.pieces.size(); ++j)
        if (m.pieces[i].chart == m.pieces[j].chart)
          throw SchemaError(r.what() + ": two pieces on chart '" + m.pieces[i].chart + "'");
    for (const auto& v : r.suffixes("regular")) {
      const RegularChart* rc = src.regular_chart(v);
      if (!rc) throw ReferenceError(v, r.what());
      std::string tv = r.string_or("regular_target." + v, v);
      if (!r.has("regular_target." + v) && tgt.regular.size() == 1) tv = tgt.regular[0].id;
      const RegularChart* tc = tgt.regular_chart(tv);
      if (!tc) throw ReferenceError(tv, r.what());
      m.regular.push_back(RegularMap{v, tv, make_map(rc->domain, tc->domain, r.exprs("regular." + v), r.what())});
    }
    for (const auto& v : r.suffixes("regular_target"))
      if (!r.has("regular." + v)) throw SchemaError(r.what() + ": regular_target." + v + " without a map");
    cfg.morphisms.push_back(std::move(m));
  }
  for (const auto& m : cfg.morphisms)
    if (!m.inverse.empty()) {
      const TMMorphism* inv = cfg.morphism(m.inverse);
      if (!inv) throw ReferenceError(m.inverse, "morphism '" + m.id + "'");
      if (inv->source != m.target || inv->target != m.source)
        throw SchemaError("morphism '" + m.id + "': inverse '" + m.inverse + "' goes the wrong way");
    }

  // Candidate unfoldings.
  for (const auto& [parts, sec] : of_kind("candidate")) {
    if (parts.size() != 2) throw SchemaError("section [" + sec->name + "] must be [candidate.<id>]");
    Reader r(*sec, "candidate '" + parts[1] + "'");
    r.only({"target", "chart", "source", "map", "sheets", "tube_fraction"});
    const SpaceSpec& tgt = space_ref(r, "target");
    CandidateUnfolding c;
    c.id = parts[1];
    c.target = tgt.id;
    c.chart = r.has("chart") ? r.string("chart") : (tgt.charts.empty() ? "" : tgt.charts[0].id);
    if (!tgt.tube_chart(c.chart)) throw ReferenceError(c.chart, r.what());
    c.source = parse_domain(r.string("source"));
    c.map = r.exprs("map");
    check_vars(c.map, c.source.names(), r.what());
    if (auto v = r.number_opt("sheets")) c.sheets = static_cast<std::size_t>(*v);
    if (auto v = r.number_opt("tube_fraction")) c.tube_fraction = *v;
    cfg.candidates.push_back(std::move(c));
  }

  // Collars.
  for (const auto& [parts, sec] : of_kind("collar")) {
    if (parts.size() != 2) throw SchemaError("section [" + sec->name + "] must be [collar.<id>]");
    Reader r(*sec, "collar '" + parts[1] + "'");
    r.only({"space", "map"});
    const SpaceSpec& s = space_ref(r, "space");
    Collar c{parts[1], s.id, r.exprs("map")};
    check_vars(c.map, s.tube_names(), r.what());
    cfg.collars.push_back(std::move(c));
  }
  return cfg;
}

inline Config parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path + "'");
  return parse_config(in);
}

}  // namespace tmunfold
