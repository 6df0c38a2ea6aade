#pragma once

// Simple spaces of depth <= 1: one singular stratum S with link L, a tube
// atlas whose transitions act on the link only, and regular charts glued
// to the tube through explicit transition maps.

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "tmunfold/domain.hpp"
#include "tmunfold/error.hpp"
#include "tmunfold/expr.hpp"
#include "tmunfold/report.hpp"
#include "tmunfold/sampling.hpp"

namespace tmunfold {

/// Name of the cone radius variable in every (u, l, r) expression.
inline constexpr const char* kRadius = "r";
/// Name of the signed unfolded coordinate in every (u, l, t) expression.
inline constexpr const char* kHeight = "t";

/// Radii at or below this are the cone vertex.
inline constexpr double kVertexTol = 1e-14;

inline Env make_env(const std::vector<std::string>& names, const Point& values) {
  Env env;
  for (std::size_t i = 0; i < names.size(); ++i) env.set(names[i], values[i]);
  return env;
}

inline Point eval_all(const std::vector<Expr>& exprs, const Env& env) {
  Point out;
  out.reserve(exprs.size());
  for (const auto& e : exprs) out.push_back(eval(e, env));
  return out;
}

/// Point [l, r] of the open cone c(L).
struct ConePoint {
  Point link;
  double r = 0.0;

  bool is_vertex() const { return r <= kVertexTol; }
};

/// Distance on c(L): all vertex representatives coincide.
inline double cone_distance(const Domain& link, const ConePoint& a, const ConePoint& b) {
  const double dr = std::abs(a.r - b.r);
  if (a.is_vertex() && b.is_vertex()) return dr;
  return std::max(dr, link.distance(a.link, b.link));
}

/// Vector-valued map written in the expression language.
struct SmoothMapExpr {
  Domain input;
  Domain output;
  std::vector<Expr> exprs;

  Point operator()(const Point& x) const {
    return output.reduce(eval_all(exprs, make_env(input.names(), x)));
  }

  /// Checks every free variable is an input coordinate.
  void check_variables(const std::string& what) const {
    const auto names = input.names();
    for (const auto& e : exprs)
      for (const auto& v : e.free_variables())
        if (std::find(names.begin(), names.end(), v) == names.end())
          throw ConfigError(what + ": expression '" + to_string(e) + "' uses unknown variable '" +
                            v + "'");
    if (exprs.size() != output.dim())
      throw ConfigError(what + ": expected " + std::to_string(output.dim()) + " expressions, got " +
                        std::to_string(exprs.size()));
  }
};

/// Link transition g_{from,to}(u): L -> L on the overlap of two tube charts.
struct Cocycle {
  std::string from;
  std::string to;
  SmoothMapExpr g;      // (u, l) -> l
  SmoothMapExpr g_inv;  // (u, l) -> l
};

/// Bundle chart (U, alpha). Base coordinates are stratum coordinates.
struct TubeChart {
  std::string id;
  Domain base;
  /// Declared overlap boxes (in stratum coordinates) keyed by the other chart.
  std::map<std::string, std::vector<Domain>> overlaps;
};

/// Gluing of a regular chart V onto one tube chart.
struct Transition {
  std::string tube;
  /// Region of V where the transition applies; nullopt means all of V.
  std::optional<Domain> overlap;
  std::vector<Expr> to_tube;    // V -> (u..., l..., r)
  std::vector<Expr> from_tube;  // (u..., l..., r) -> V
};

struct RegularChart {
  std::string id;
  Domain domain;
  std::vector<Transition> transitions;

  const Transition* transition_to(const std::string& tube) const {
    for (const auto& t : transitions)
      if (t.tube == tube) return &t;
    return nullptr;
  }
};

struct TubePoint {
  std::string chart;
  Point u;
  ConePoint cone;
};

struct RegularPoint {
  std::string chart;
  Point x;
};

using SpacePoint = std::variant<TubePoint, RegularPoint>;

inline const std::string& chart_of(const SpacePoint& p) {
  return std::visit([](const auto& q) -> const std::string& { return q.chart; }, p);
}

/// A simple space with (at most) one singular stratum and its tube.
class SpaceSpec {
 public:
  std::string id;
  std::string name;
  Domain stratum;
  Domain link;
  /// False for a manifold (empty singular part): no tube charts.
  bool singular = true;
  /// Sampling extent of the cone radius inside the tube.
  double radius = 1.0;
  std::vector<TubeChart> charts;
  std::vector<Cocycle> cocycles;
  std::vector<RegularChart> regular;

  const TubeChart* tube_chart(const std::string& cid) const {
    for (const auto& c : charts)
      if (c.id == cid) return &c;
    return nullptr;
  }

  const RegularChart* regular_chart(const std::string& cid) const {
    for (const auto& c : regular)
      if (c.id == cid) return &c;
    return nullptr;
  }

  const Cocycle* cocycle(const std::string& from, const std::string& to) const {
    for (const auto& c : cocycles)
      if (c.from == from && c.to == to) return &c;
    return nullptr;
  }

  /// Coordinate names in (u..., l...) order.
  std::vector<std::string> base_link_names() const {
    auto n = stratum.names();
    auto l = link.names();
    n.insert(n.end(), l.begin(), l.end());
    return n;
  }

  /// Coordinate names in (u..., l..., r) order.
  std::vector<std::string> tube_names() const {
    auto n = base_link_names();
    n.push_back(kRadius);
    return n;
  }

  Domain radial_domain(double rmax) const {
    return Domain({Coord{kRadius, 0.0, rmax, false, 0.0}});
  }

  /// Overlap boxes between two tube charts; a chart overlaps itself on its base.
  std::vector<Domain> overlap_boxes(const std::string& a, const std::string& b) const {
    const TubeChart* ca = tube_chart(a);
    const TubeChart* cb = tube_chart(b);
    if (!ca || !cb) return {};
    if (a == b) return {ca->base};
    if (auto it = ca->overlaps.find(b); it != ca->overlaps.end()) return it->second;
    if (auto it = cb->overlaps.find(a); it != cb->overlaps.end()) return it->second;
    return {};
  }

  bool in_overlap(const std::string& a, const std::string& b, const Point& u, double tol = 1e-12) const {
    for (const auto& box : overlap_boxes(a, b))
      if (box.contains(u, tol)) return true;
    return false;
  }

  /// g_{a,b}(u)(l), or nullopt when u is outside the overlap. Falls back to
  /// the inverse of g_{b,a} when only that direction is declared.
  std::optional<Point> link_transition(const std::string& a, const std::string& b, const Point& u,
                                       const Point& l) const {
    if (a == b) return l;
    if (!in_overlap(a, b, u)) return std::nullopt;
    Point ul = u;
    ul.insert(ul.end(), l.begin(), l.end());
    if (const Cocycle* c = cocycle(a, b)) return c->g(ul);
    if (const Cocycle* c = cocycle(b, a)) return c->g_inv(ul);
    return std::nullopt;
  }

  /// Throws ConfigError when an id referenced by the atlas is missing.
  void check_references() const {
    for (const auto& c : cocycles) {
      if (!tube_chart(c.from)) throw ReferenceError(c.from, "cocycle " + c.from + "." + c.to);
      if (!tube_chart(c.to)) throw ReferenceError(c.to, "cocycle " + c.from + "." + c.to);
    }
    for (const auto& ch : charts)
      for (const auto& [other, boxes] : ch.overlaps)
        if (!tube_chart(other)) throw ReferenceError(other, "overlaps of chart " + ch.id);
    for (const auto& v : regular)
      for (const auto& t : v.transitions)
        if (!tube_chart(t.tube)) throw ReferenceError(t.tube, "regular chart " + v.id);
  }
};

// ---------------------------------------------------------------------------
// Moving points between charts

inline std::optional<TubePoint> tube_in_chart(const SpaceSpec& s, const TubePoint& p,
                                              const std::string& target) {
  if (p.chart == target) return p;
  auto l = s.link_transition(p.chart, target, p.u, p.cone.link);
  if (!l) return std::nullopt;
  return TubePoint{target, p.u, ConePoint{*l, p.cone.r}};
}

inline std::optional<TubePoint> regular_to_tube(const SpaceSpec& s, const RegularPoint& p,
                                                const std::string& tube) {
  const RegularChart* v = s.regular_chart(p.chart);
  if (!v) return std::nullopt;
  const Transition* tr = v->transition_to(tube);
  if (!tr) return std::nullopt;
  if (tr->overlap && !tr->overlap->contains(p.x)) return std::nullopt;
  Point ulr;
  try {
    ulr = eval_all(tr->to_tube, make_env(v->domain.names(), p.x));
  } catch (const DomainEvalError&) {
    return std::nullopt;
  }
  const std::size_t nu = s.stratum.dim(), nl = s.link.dim();
  TubePoint q;
  q.chart = tube;
  q.u = s.stratum.reduce(Point(ulr.begin(), ulr.begin() + static_cast<long>(nu)));
  q.cone.link = s.link.reduce(Point(ulr.begin() + static_cast<long>(nu), ulr.begin() + static_cast<long>(nu + nl)));
  q.cone.r = ulr[nu + nl];
  if (!(q.cone.r > 0.0)) return std::nullopt;
  return q;
}

inline std::optional<RegularPoint> tube_to_regular(const SpaceSpec& s, const TubePoint& p,
                                                   const std::string& vid) {
  if (p.cone.is_vertex()) return std::nullopt;
  const RegularChart* v = s.regular_chart(vid);
  if (!v) return std::nullopt;
  const Transition* tr = v->transition_to(p.chart);
  if (!tr) return std::nullopt;
  Point ulr = p.u;
  ulr.insert(ulr.end(), p.cone.link.begin(), p.cone.link.end());
  ulr.push_back(p.cone.r);
  Point x;
  try {
    x = v->domain.reduce(eval_all(tr->from_tube, make_env(s.tube_names(), ulr)));
  } catch (const DomainEvalError&) {
    return std::nullopt;
  }
  if (tr->overlap && !tr->overlap->contains(x)) return std::nullopt;
  if (!tr->overlap && !v->domain.contains(x)) return std::nullopt;
  return RegularPoint{vid, std::move(x)};
}

/// Every chart representation of `p` reachable by transition hops. The
/// atlas is small, so breadth-first closure is exact.
inline std::vector<SpacePoint> representations(const SpaceSpec& s, const SpacePoint& p) {
  std::vector<SpacePoint> out{p};
  std::deque<SpacePoint> queue{p};
  auto seen = [&out](const std::string& chart, bool tube) {
    return std::any_of(out.begin(), out.end(), [&](const SpacePoint& q) {
      return chart_of(q) == chart && std::holds_alternative<TubePoint>(q) == tube;
    });
  };
  while (!queue.empty()) {
    SpacePoint cur = queue.front();
    queue.pop_front();
    if (const auto* tp = std::get_if<TubePoint>(&cur)) {
      for (const auto& c : s.charts) {
        if (seen(c.id, true)) continue;
        if (auto q = tube_in_chart(s, *tp, c.id)) {
          out.emplace_back(*q);
          queue.emplace_back(*q);
        }
      }
      for (const auto& v : s.regular) {
        if (seen(v.id, false)) continue;
        if (auto q = tube_to_regular(s, *tp, v.id)) {
          out.emplace_back(*q);
          queue.emplace_back(*q);
        }
      }
    } else {
      const auto& rp = std::get<RegularPoint>(cur);
      const RegularChart* v = s.regular_chart(rp.chart);
      if (!v) continue;
      for (const auto& tr : v->transitions) {
        if (seen(tr.tube, true)) continue;
        if (auto q = regular_to_tube(s, rp, tr.tube)) {
          out.emplace_back(*q);
          queue.emplace_back(*q);
        }
      }
    }
  }
  return out;
}

inline double same_chart_distance(const SpaceSpec& s, const SpacePoint& a, const SpacePoint& b) {
  if (const auto* ta = std::get_if<TubePoint>(&a)) {
    const auto& tb = std::get<TubePoint>(b);
    return std::max(s.stratum.distance(ta->u, tb.u), cone_distance(s.link, ta->cone, tb.cone));
  }
  const auto& ra = std::get<RegularPoint>(a);
  const auto& rb = std::get<RegularPoint>(b);
  const RegularChart* v = s.regular_chart(ra.chart);
  return v ? v->domain.distance(ra.x, rb.x) : std::numeric_limits<double>::infinity();
}

/// Distance between two points of X measured in q's chart. Infinite when p
/// has no representation there.
inline double distance(const SpaceSpec& s, const SpacePoint& p, const SpacePoint& q) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& rep : representations(s, p)) {
    if (chart_of(rep) != chart_of(q) || rep.index() != q.index()) continue;
    best = std::min(best, same_chart_distance(s, rep, q));
  }
  return best;
}

inline bool in_chart_domain(const SpaceSpec& s, const SpacePoint& p) {
  if (const auto* t = std::get_if<TubePoint>(&p)) {
    const TubeChart* c = s.tube_chart(t->chart);
    return c && c->base.contains(t->u) && s.link.contains(t->cone.link) && t->cone.r >= 0.0;
  }
  const auto& r = std::get<RegularPoint>(p);
  const RegularChart* v = s.regular_chart(r.chart);
  return v && v->domain.contains(r.x);
}

// ---------------------------------------------------------------------------
// Radium and radium stretching

/// Cone radius of p. Regular points are moved into the tube when a
/// transition applies.
inline double radium(const SpaceSpec& s, const SpacePoint& p) {
  if (const auto* t = std::get_if<TubePoint>(&p)) return t->cone.r;
  for (const auto& rep : representations(s, p))
    if (const auto* t = std::get_if<TubePoint>(&rep)) return t->cone.r;
  throw NotInTube("point in regular chart '" + chart_of(p) + "' has no tube representation");
}

inline TubePoint as_tube_point(const SpaceSpec& s, const SpacePoint& p) {
  if (const auto* t = std::get_if<TubePoint>(&p)) return *t;
  for (const auto& rep : representations(s, p))
    if (const auto* t = std::get_if<TubePoint>(&rep)) return *t;
  throw NotInTube("point in regular chart '" + chart_of(p) + "' has no tube representation");
}

/// (u, [l, r]) -> (u, [l, lambda r]).
inline TubePoint stretch(const SpaceSpec& s, double lambda, const SpacePoint& p) {
  if (!(lambda > 0.0)) throw Error("stretch factor must be positive");
  TubePoint t = as_tube_point(s, p);
  t.cone.r *= lambda;
  return t;
}

// ---------------------------------------------------------------------------
// Numerical helpers shared by the checks

/// Central-difference Jacobian of a map R^n -> R^m.
template <class F>
Eigen::MatrixXd fd_jacobian(const F& f, const Point& x, double h, std::size_t m,
                            const std::vector<int>& side = {}) {
  Eigen::MatrixXd J(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(x.size()));
  for (std::size_t j = 0; j < x.size(); ++j) {
    const int sd = side.empty() ? 0 : side[j];
    Point xp = x, xm = x;
    Point fp, fm;
    double scale;
    if (sd == 0) {
      xp[j] += h;
      xm[j] -= h;
      fp = f(xp);
      fm = f(xm);
      scale = 2 * h;
    } else {
      // second-order one-sided difference toward `sd`
      Point x1 = x, x2 = x;
      x1[j] += sd * h;
      x2[j] += sd * 2 * h;
      const Point f0 = f(x), f1 = f(x1), f2 = f(x2);
      for (std::size_t i = 0; i < m; ++i)
        J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            sd * (-1.5 * f0[i] + 2.0 * f1[i] - 0.5 * f2[i]) / h;
      continue;
    }
    for (std::size_t i = 0; i < m; ++i)
      J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (fp[i] - fm[i]) / scale;
  }
  return J;
}

/// Signed difference a - b, wrapped into (-P/2, P/2] on periodic coordinates.
inline double wrapped_difference(const Coord& c, double a, double b) {
  double d = a - b;
  if (c.periodic) {
    d = std::fmod(d, c.period);
    if (d > c.period / 2) d -= c.period;
    if (d <= -c.period / 2) d += c.period;
  }
  return d;
}

/// Points on the faces of `d`: grid points with one non-periodic coordinate
/// pushed to within `eps` of a face. These approach the closure of the box.
inline std::vector<Point> face_points(const Domain& d, const Sampler& sampler, double eps = 1e-9) {
  std::vector<Point> out;
  const auto base = sampler.grid(d, std::max<std::size_t>(sampler.samples() / 8, 8));
  for (std::size_t k = 0; k < d.dim(); ++k) {
    if (d[k].periodic) continue;
    for (const auto& p : base) {
      Point lo = p, hi = p;
      lo[k] = d[k].lower + eps * d[k].length();
      hi[k] = d[k].upper - eps * d[k].length();
      out.push_back(lo);
      out.push_back(hi);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Validation

/// Cocycle checks over the tube atlas: identity, inverse pairs, triple
/// overlaps, the g/g_inv witness and local-diffeomorphism Jacobians.
inline Report validate_cocycles(const SpaceSpec& s, const Sampler& sampler, double tol,
                                double jacobian_tol = -1.0) {
  if (sampler.samples() < 1) throw Error("validate_cocycles: samples must be >= 1");
  s.check_references();
  if (jacobian_tol < 0) jacobian_tol = tol;
  Report rep;
  const std::size_t nu = s.stratum.dim(), nl = s.link.dim();
  const char* anchor = "tube.cocycle";

  auto split = [&](const Point& ul) {
    return std::pair<Point, Point>{Point(ul.begin(), ul.begin() + static_cast<long>(nu)),
                                   Point(ul.begin() + static_cast<long>(nu), ul.end())};
  };

  for (const auto& c : s.cocycles) {
    const std::string key = "cocycle." + c.from + "." + c.to;
    Tracker inv(key + ".inverse", anchor, tol);
    Tracker jac(key + ".jacobian", anchor, jacobian_tol, Tracker::Mode::at_least);
    Tracker ident(key + ".identity", anchor, tol);
    Tracker radium_free(key + ".radium_independent", anchor, 0.0);

    for (const auto* m : {&c.g, &c.g_inv})
      for (const auto& e : m->exprs) {
        const auto vars = e.free_variables();
        if (vars.count(kRadius) || vars.count(kHeight))
          radium_free.fail_with("expression '" + to_string(e) + "' depends on the radius", {});
      }
    radium_free.observe(0.0, {});

    std::vector<Point> pts;
    for (const auto& box : s.overlap_boxes(c.from, c.to)) {
      Domain ul = box.product(s.link);
      auto sets = sampler.sets(ul, stream_id(key));
      pts.insert(pts.end(), sets.grid.begin(), sets.grid.end());
      pts.insert(pts.end(), sets.random.begin(), sets.random.end());
      auto faces = face_points(ul, sampler);
      pts.insert(pts.end(), faces.begin(), faces.end());
    }
    for (const auto& ul : pts) {
      auto [u, l] = split(ul);
      try {
        Point gl = c.g(ul);
        Point ugl = u;
        ugl.insert(ugl.end(), gl.begin(), gl.end());
        const double r1 = s.link.distance(c.g_inv(ugl), l);
        Point gil = c.g_inv(ul);
        Point ugil = u;
        ugil.insert(ugil.end(), gil.begin(), gil.end());
        const double r2 = s.link.distance(c.g(ugil), l);
        inv.observe(std::max(r1, r2), ul);
        if (c.from == c.to) ident.observe(s.link.distance(gl, l), ul);

        double det = 1.0;
        if (nl > 0) {
          auto f = [&](const Point& lv) {
            Point x = u;
            x.insert(x.end(), lv.begin(), lv.end());
            Point y = eval_all(c.g.exprs, make_env(c.g.input.names(), x));
            return y;
          };
          det = std::abs(fd_jacobian(f, l, 1e-6, nl).determinant());
        }
        jac.observe(det, ul);
      } catch (const Error& e) {
        inv.fail_with(std::string("evaluation failed: ") + e.what(), ul);
      }
    }
    rep.add(inv.finish());
    rep.add(jac.finish());
    rep.add(radium_free.finish());
    if (c.from == c.to) rep.add(ident.finish());

    if (const Cocycle* back = s.cocycle(c.to, c.from); back && c.from < c.to) {
      Tracker pair(key + ".pair", anchor, tol);
      for (const auto& ul : pts) {
        auto [u, l] = split(ul);
        try {
          Point gl = c.g(ul);
          Point ugl = u;
          ugl.insert(ugl.end(), gl.begin(), gl.end());
          pair.observe(s.link.distance(back->g(ugl), l), ul);
        } catch (const Error& e) {
          pair.fail_with(std::string("evaluation failed: ") + e.what(), ul);
        }
      }
      rep.add(pair.finish());
    }
  }

  // g_bc o g_ab = g_ac on triple overlaps.
  for (const auto& a : s.charts)
    for (const auto& b : s.charts)
      for (const auto& cc : s.charts) {
        if (!(a.id < b.id && b.id < cc.id)) continue;
        std::vector<Domain> triple;
        for (const auto& ab : s.overlap_boxes(a.id, b.id))
          for (const auto& bc : s.overlap_boxes(b.id, cc.id))
            for (const auto& ac : s.overlap_boxes(a.id, cc.id))
              if (auto x = ab.intersect(bc))
                if (auto y = x->intersect(ac)) triple.push_back(*y);
        if (triple.empty()) continue;
        const std::string tkey = "cocycle." + a.id + "." + b.id + "." + cc.id + ".triple";
        Tracker tr(tkey, anchor, tol);
        for (const auto& box : triple) {
          Domain ul = box.product(s.link);
          auto sets = sampler.sets(ul, stream_id(tkey));
          for (const auto* set : {&sets.grid, &sets.random})
            for (const auto& p : *set) {
              auto [u, l] = split(p);
              auto lab = s.link_transition(a.id, b.id, u, l);
              auto lac = s.link_transition(a.id, cc.id, u, l);
              if (!lab || !lac) continue;
              auto labc = s.link_transition(b.id, cc.id, u, *lab);
              if (!labc) continue;
              tr.observe(s.link.distance(*labc, *lac), p);
            }
        }
        rep.add(tr.finish());
      }

  if (rep.empty()) {
    Check c;
    c.name = "cocycle.atlas";
    c.anchor = anchor;
    c.note = "no overlaps: all cocycle identities hold vacuously";
    rep.add(c);
  }
  return rep;
}

/// Regular-chart transitions must be mutually inverse on their overlaps.
inline Report validate_transitions(const SpaceSpec& s, const Sampler& sampler, double tol) {
  Report rep;
  for (const auto& v : s.regular)
    for (const auto& tr : v.transitions) {
      const std::string key = "regular." + v.id + "." + tr.tube;
      Tracker fwd(key + ".inverse_from_regular", "regular.transition", tol);
      Tracker bwd(key + ".inverse_from_tube", "regular.transition", tol);
      const Domain& box = tr.overlap ? *tr.overlap : v.domain;
      auto sets = sampler.sets(box, stream_id(key));
      for (const auto* set : {&sets.grid, &sets.random})
        for (const auto& x : *set) {
          auto t = regular_to_tube(s, RegularPoint{v.id, x}, tr.tube);
          if (!t) {
            fwd.fail_with("transition to tube undefined", x);
            continue;
          }
          auto back = tube_to_regular(s, *t, v.id);
          if (!back) {
            fwd.fail_with("transition back to regular chart undefined", x);
            continue;
          }
          fwd.observe(v.domain.distance(back->x, x), x);
        }
      const TubeChart* tc = s.tube_chart(tr.tube);
      Domain ulr = tc->base.product(s.link).product(s.radial_domain(s.radius));
      auto tsets = sampler.sets(ulr, stream_id(key + "#tube"));
      const std::size_t nu = s.stratum.dim(), nl = s.link.dim();
      for (const auto* set : {&tsets.grid, &tsets.random})
        for (const auto& p : *set) {
          TubePoint tp{tr.tube, Point(p.begin(), p.begin() + static_cast<long>(nu)),
                       ConePoint{Point(p.begin() + static_cast<long>(nu), p.begin() + static_cast<long>(nu + nl)), p.back()}};
          auto x = tube_to_regular(s, tp, v.id);
          if (!x) continue;  // outside the declared overlap
          auto back = regular_to_tube(s, *x, tr.tube);
          if (!back) {
            bwd.fail_with("transition to tube undefined", p);
            continue;
          }
          bwd.observe(same_chart_distance(s, SpacePoint(*back), SpacePoint(tp)), p);
        }
      rep.add(fwd.finish());
      rep.add(bwd.finish());
    }
  return rep;
}

/// Radium is chart independent, and stretching is an action of (R+, x).
inline Report validate_radium(const SpaceSpec& s, const Sampler& sampler, double tol) {
  Report rep;
  if (!s.singular) return rep;
  Tracker inv("tube.radium_invariance", "tube.radium", 1e-12);
  Tracker act("tube.stretch_action", "tube.radium", tol);
  Tracker unit("tube.stretch_unit", "tube.radium", 0.0);
  Tracker vertex("tube.stretch_fixes_stratum", "tube.radium", 0.0);
  const std::size_t nu = s.stratum.dim(), nl = s.link.dim();
  for (const auto& c : s.charts) {
    Domain ulr = c.base.product(s.link).product(s.radial_domain(s.radius));
    auto sets = sampler.sets(ulr, stream_id("radium." + c.id));
    for (const auto* set : {&sets.grid, &sets.random})
      for (const auto& p : *set) {
        TubePoint tp{c.id, Point(p.begin(), p.begin() + static_cast<long>(nu)),
                     ConePoint{Point(p.begin() + static_cast<long>(nu), p.begin() + static_cast<long>(nu + nl)), p.back()}};
        for (const auto& rp : representations(s, tp)) {
          try {
            inv.observe(std::abs(radium(s, rp) - tp.cone.r), p);
          } catch (const NotInTube&) {
          }
        }
        const double lam = 0.5 + p.back(), mu = 1.75;
        const TubePoint a = stretch(s, lam, stretch(s, mu, tp));
        const TubePoint b = stretch(s, lam * mu, tp);
        act.observe(std::abs(a.cone.r - b.cone.r) / std::max(1.0, b.cone.r), p);
        unit.observe(same_chart_distance(s, stretch(s, 1.0, tp), tp), p);
        TubePoint v = tp;
        v.cone.r = 0.0;
        vertex.observe(same_chart_distance(s, stretch(s, lam, v), v), p);
      }
  }
  rep.add(inv.finish());
  rep.add(act.finish());
  rep.add(unit.finish());
  rep.add(vertex.finish());
  return rep;
}

}  // namespace tmunfold
