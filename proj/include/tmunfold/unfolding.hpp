#pragma once

// Primary unfolding of a simple space: the unfolded tube (disjoint union of
// U x L x R glued by the cocycles, which never touch t) together with two
// copies R+ and R- of the regular part glued on t > 0 and t < 0.
//
// Nothing is meshed. A point of the unfolding is a chart-tagged coordinate
// tuple, and the gluing lives entirely in `representations`.

#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tmunfold/space.hpp"

namespace tmunfold {

/// (chart, u, l, t) in the unfolded tube.
struct TubeLift {
  std::string chart;
  Point u;
  Point l;
  double t = 0.0;
};

/// Point x of regular chart V in bubble +1 or -1.
struct RegularLift {
  int bubble = 1;
  std::string chart;
  Point x;
};

using UnfoldedPoint = std::variant<TubeLift, RegularLift>;

inline const std::string& chart_of(const UnfoldedPoint& p) {
  return std::visit([](const auto& q) -> const std::string& { return q.chart; }, p);
}

/// Bubble of a point: sign(t) for tube lifts (0 on the hypersurface).
inline int bubble_of(const UnfoldedPoint& p) {
  if (const auto* t = std::get_if<TubeLift>(&p)) return t->t > 0 ? 1 : (t->t < 0 ? -1 : 0);
  return std::get<RegularLift>(p).bubble;
}

/// c(u, l, t) = (u, [l, |t|]).
inline std::pair<Point, ConePoint> canonical_chart_unfold(const Point& u, const Point& l, double t) {
  return {u, ConePoint{l, std::abs(t)}};
}

class UnfoldingModel;
UnfoldingModel build_primary_unfolding(SpaceSpec spec, const Sampler& sampler, double tol);

class UnfoldingModel {
 public:
  const SpaceSpec& space() const noexcept { return spec_; }

  /// Bubble labels of the regular preimage: always {+1, -1}.
  static constexpr std::array<int, 2> bubbles() { return {1, -1}; }

  /// The unfolding map. Tube lifts go through c, regular lifts forget the bubble.
  SpacePoint project(const UnfoldedPoint& p) const {
    if (const auto* t = std::get_if<TubeLift>(&p)) {
      const TubeChart* c = spec_.tube_chart(t->chart);
      if (!c) throw OutOfDomain("unknown tube chart '" + t->chart + "'");
      if (!c->base.contains(t->u, 1e-9) || !spec_.link.contains(t->l, 1e-9))
        throw OutOfDomain("point outside tube chart '" + t->chart + "'");
      auto [u, cone] = canonical_chart_unfold(t->u, spec_.link.reduce(t->l), t->t);
      return TubePoint{t->chart, std::move(u), std::move(cone)};
    }
    const auto& r = std::get<RegularLift>(p);
    const RegularChart* v = spec_.regular_chart(r.chart);
    if (!v) throw OutOfDomain("unknown regular chart '" + r.chart + "'");
    if (r.bubble != 1 && r.bubble != -1) throw OutOfDomain("bubble label must be +1 or -1");
    return RegularPoint{r.chart, v->domain.reduce(r.x)};
  }

  /// True when p lies in the coordinate box of its chart (t is unbounded).
  bool contains(const UnfoldedPoint& p, double tol = 1e-9) const {
    if (const auto* t = std::get_if<TubeLift>(&p)) {
      const TubeChart* c = spec_.tube_chart(t->chart);
      return c && c->base.contains(t->u, tol) && spec_.link.contains(t->l, tol);
    }
    const auto& r = std::get<RegularLift>(p);
    const RegularChart* v = spec_.regular_chart(r.chart);
    return v && v->domain.contains(r.x, tol);
  }

  /// Projection of the unfolded tube onto the stratum.
  static const Point& tau_tilde(const TubeLift& p) { return p.u; }

  /// All chart representations of p: cocycle hops keep t, regular
  /// transitions exchange t = bubble * r.
  std::vector<UnfoldedPoint> representations(const UnfoldedPoint& p) const {
    std::vector<UnfoldedPoint> out{p};
    std::deque<UnfoldedPoint> queue{p};
    auto seen = [&out](const std::string& chart, std::size_t kind) {
      for (const auto& q : out)
        if (q.index() == kind && chart_of(q) == chart) return true;
      return false;
    };
    while (!queue.empty()) {
      UnfoldedPoint cur = queue.front();
      queue.pop_front();
      if (const auto* t = std::get_if<TubeLift>(&cur)) {
        for (const auto& c : spec_.charts) {
          if (seen(c.id, 0)) continue;
          auto l = spec_.link_transition(t->chart, c.id, t->u, t->l);
          if (!l) continue;
          UnfoldedPoint q = TubeLift{c.id, t->u, *l, t->t};
          out.push_back(q);
          queue.push_back(q);
        }
        if (t->t == 0.0) continue;
        const TubePoint tp{t->chart, t->u, ConePoint{t->l, std::abs(t->t)}};
        for (const auto& v : spec_.regular) {
          if (seen(v.id, 1)) continue;
          auto x = tube_to_regular(spec_, tp, v.id);
          if (!x) continue;
          UnfoldedPoint q = RegularLift{t->t > 0 ? 1 : -1, v.id, x->x};
          out.push_back(q);
          queue.push_back(q);
        }
      } else {
        const auto& r = std::get<RegularLift>(cur);
        const RegularChart* v = spec_.regular_chart(r.chart);
        if (!v) continue;
        for (const auto& tr : v->transitions) {
          if (seen(tr.tube, 0)) continue;
          auto tp = regular_to_tube(spec_, RegularPoint{r.chart, r.x}, tr.tube);
          if (!tp) continue;
          UnfoldedPoint q = TubeLift{tr.tube, tp->u, tp->cone.link, r.bubble * tp->cone.r};
          out.push_back(q);
          queue.push_back(q);
        }
      }
    }
    return out;
  }

  /// Coordinate distance of two points given in the same chart.
  double same_chart_distance(const UnfoldedPoint& a, const UnfoldedPoint& b) const {
    if (a.index() != b.index() || chart_of(a) != chart_of(b))
      return std::numeric_limits<double>::infinity();
    if (const auto* ta = std::get_if<TubeLift>(&a)) {
      const auto& tb = std::get<TubeLift>(b);
      return std::max({spec_.stratum.distance(ta->u, tb.u), spec_.link.distance(ta->l, tb.l),
                       std::abs(ta->t - tb.t)});
    }
    const auto& ra = std::get<RegularLift>(a);
    const auto& rb = std::get<RegularLift>(b);
    if (ra.bubble != rb.bubble) return std::numeric_limits<double>::infinity();
    const RegularChart* v = spec_.regular_chart(ra.chart);
    return v ? v->domain.distance(ra.x, rb.x) : std::numeric_limits<double>::infinity();
  }

  /// Distance between p and q measured in q's chart.
  double distance(const UnfoldedPoint& p, const UnfoldedPoint& q) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& rep : representations(p)) best = std::min(best, same_chart_distance(rep, q));
    return best;
  }

  bool equivalent(const UnfoldedPoint& p, const UnfoldedPoint& q, double tol) const {
    return distance(p, q) <= tol || distance(q, p) <= tol;
  }

  /// Preimage of x as a list of pairwise inequivalent representatives.
  /// Over the stratum the fiber is the link, sampled at `samples` points.
  std::vector<UnfoldedPoint> fiber(const SpacePoint& x, std::size_t samples, double tol = 1e-9) const {
    if (!in_chart_domain(spec_, x)) throw OutOfDomain("point outside its chart '" + chart_of(x) + "'");
    std::vector<UnfoldedPoint> candidates;
    const auto reps = tmunfold::representations(spec_, x);
    const TubePoint* vertex = nullptr;
    for (const auto& rp : reps)
      if (const auto* t = std::get_if<TubePoint>(&rp); t && t->cone.is_vertex()) {
        vertex = t;
        break;
      }
    if (vertex) {
      for (const auto& l : Sampler::grid_per_axis(spec_.link, link_axis_count(samples)))
        candidates.emplace_back(TubeLift{vertex->chart, vertex->u, l, 0.0});
    } else {
      for (const auto& rp : reps) {
        if (const auto* t = std::get_if<TubePoint>(&rp)) {
          candidates.emplace_back(TubeLift{t->chart, t->u, t->cone.link, t->cone.r});
          candidates.emplace_back(TubeLift{t->chart, t->u, t->cone.link, -t->cone.r});
        } else {
          const auto& r = std::get<RegularPoint>(rp);
          candidates.emplace_back(RegularLift{1, r.chart, r.x});
          candidates.emplace_back(RegularLift{-1, r.chart, r.x});
        }
      }
    }
    std::vector<UnfoldedPoint> classes;
    for (const auto& c : candidates) {
      bool fresh = true;
      for (const auto& k : classes)
        if (equivalent(c, k, tol)) {
          fresh = false;
          break;
        }
      if (fresh) classes.push_back(c);
    }
    return classes;
  }

 private:
  friend UnfoldingModel build_primary_unfolding(SpaceSpec spec, const Sampler& sampler, double tol);
  friend class UnfoldingBuilder;
  explicit UnfoldingModel(SpaceSpec spec) : spec_(std::move(spec)) {}

  std::size_t link_axis_count(std::size_t samples) const {
    if (spec_.link.dim() == 0) return 1;
    return std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(samples),
                                                          1.0 / static_cast<double>(spec_.link.dim())))));
  }

  SpaceSpec spec_;
};

/// Builds the primary unfolding after validating the atlas. Throws
/// ValidationError when a cocycle or transition check fails.
inline UnfoldingModel build_primary_unfolding(SpaceSpec spec, const Sampler& sampler, double tol) {
  Report gate = validate_cocycles(spec, sampler, tol);
  gate.merge(validate_transitions(spec, sampler, tol));
  if (!gate.passed()) {
    std::string failed;
    for (const auto& c : gate.checks())
      if (c.status == Status::fail) failed += (failed.empty() ? "" : ", ") + c.name;
    throw ValidationError("space '" + spec.id + "' failed validation: " + failed);
  }
  return UnfoldingModel(std::move(spec));
}

inline UnfoldingModel build_primary_unfolding(SpaceSpec spec) {
  return build_primary_unfolding(std::move(spec), Sampler(256, 42), 1e-6);
}

// ---------------------------------------------------------------------------
// Sampling helpers

namespace detail {

inline TubeLift tube_lift_from(const SpaceSpec& s, const std::string& chart, const Point& ult) {
  const std::size_t nu = s.stratum.dim(), nl = s.link.dim();
  return TubeLift{chart, Point(ult.begin(), ult.begin() + static_cast<long>(nu)),
                  Point(ult.begin() + static_cast<long>(nu), ult.begin() + static_cast<long>(nu + nl)),
                  ult[nu + nl]};
}

inline TubePoint tube_point_from(const SpaceSpec& s, const std::string& chart, const Point& ulr) {
  const std::size_t nu = s.stratum.dim(), nl = s.link.dim();
  return TubePoint{chart, Point(ulr.begin(), ulr.begin() + static_cast<long>(nu)),
                   ConePoint{Point(ulr.begin() + static_cast<long>(nu), ulr.begin() + static_cast<long>(nu + nl)),
                             ulr[nu + nl]}};
}

inline Domain height_domain(double rmax) {
  return Domain({Coord{kHeight, -rmax, rmax, false, 0.0}});
}

inline Point flatten(const TubeLift& p) {
  Point x = p.u;
  x.insert(x.end(), p.l.begin(), p.l.end());
  x.push_back(p.t);
  return x;
}

inline Point flatten(const UnfoldedPoint& p) {
  if (const auto* t = std::get_if<TubeLift>(&p)) return flatten(*t);
  const auto& r = std::get<RegularLift>(p);
  Point x{static_cast<double>(r.bubble)};
  x.insert(x.end(), r.x.begin(), r.x.end());
  return x;
}

inline Point flatten(const SpacePoint& p) {
  if (const auto* t = std::get_if<TubePoint>(&p)) {
    Point x = t->u;
    x.insert(x.end(), t->cone.link.begin(), t->cone.link.end());
    x.push_back(t->cone.r);
    return x;
  }
  return std::get<RegularPoint>(p).x;
}

/// Sampled points of X away from the stratum, in every chart.
inline std::vector<SpacePoint> regular_samples(const SpaceSpec& s, const Sampler& sampler,
                                               const std::string& key) {
  std::vector<SpacePoint> out;
  for (const auto& c : s.charts) {
    Domain ulr = c.base.product(s.link).product(s.radial_domain(s.radius));
    auto sets = sampler.sets(ulr, stream_id(key + c.id));
    for (const auto* set : {&sets.grid, &sets.random})
      for (const auto& p : *set) out.emplace_back(tube_point_from(s, c.id, p));
  }
  for (const auto& v : s.regular) {
    auto sets = sampler.sets(v.domain, stream_id(key + v.id));
    for (const auto* set : {&sets.grid, &sets.random})
      for (const auto& x : *set) out.emplace_back(RegularPoint{v.id, x});
  }
  return out;
}

/// Sampled tube lifts over t in [-radius, radius], plus the t = 0 slice.
inline std::vector<TubeLift> tube_lift_samples(const SpaceSpec& s, const Sampler& sampler,
                                               const std::string& key) {
  std::vector<TubeLift> out;
  for (const auto& c : s.charts) {
    Domain ult = c.base.product(s.link).product(height_domain(s.radius));
    auto sets = sampler.sets(ult, stream_id(key + c.id));
    for (const auto* set : {&sets.grid, &sets.random})
      for (const auto& p : *set) out.push_back(tube_lift_from(s, c.id, p));
    for (const auto& ul : sampler.grid(c.base.product(s.link), std::max<std::size_t>(sampler.samples() / 4, 4))) {
      Point p = ul;
      p.push_back(0.0);
      out.push_back(tube_lift_from(s, c.id, p));
    }
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Axiom verification

/// Unfolding axioms for a model: trivial double covering over R, the
/// unfolded-chart square, the hypersurface over S, bubble invariance and a
/// bounded-preimage properness proxy.
inline Report verify_unfolding_axioms(const UnfoldingModel& model, const Sampler& sampler, double tol,
                                      std::size_t hypersurface_samples = 8) {
  const SpaceSpec& s = model.space();
  Report rep;

  // Covering: every sampled regular point has exactly two preimages.
  {
    Tracker cov("unfold.covering", "unfolding.covering", 0.0);
    cov.set_note("fiber cardinality 2 expected");
    for (const auto& x : detail::regular_samples(s, sampler, "covering")) {
      const auto fib = model.fiber(x, hypersurface_samples, tol);
      cov.observe(std::abs(static_cast<double>(fib.size()) - 2.0), detail::flatten(x));
      bool saw_plus = false, saw_minus = false;
      for (const auto& f : fib) {
        saw_plus |= bubble_of(f) == 1;
        saw_minus |= bubble_of(f) == -1;
      }
      if (!(saw_plus && saw_minus)) cov.fail_with("fiber misses a bubble", detail::flatten(x));
    }
    rep.add(cov.finish());
  }

  if (!s.singular) return rep;

  const auto lifts = detail::tube_lift_samples(s, sampler, "square");

  // L o alpha~ = alpha o c, compared in every chart the point reaches.
  {
    Tracker sq("unfold.chart_square", "unfolding.chart", tol);
    Tracker compat("unfold.projection_compat", "unfolding.projection", tol);
    Tracker tau("unfold.tube_projection", "unfolding.tube", 0.0);
    Tracker bub("unfold.bubble_invariance", "unfolding.bubbles", 0.0);
    for (const auto& p : lifts) {
      const Point at = detail::flatten(p);
      auto [u, cone] = canonical_chart_unfold(p.u, p.l, p.t);
      const SpacePoint rhs = TubePoint{p.chart, u, cone};
      const SpacePoint lhs = model.project(p);
      sq.observe(same_chart_distance(s, lhs, rhs), at);
      const int sign = bubble_of(p);
      for (const auto& q : model.representations(p)) {
        const SpacePoint pq = model.project(q);
        const double d = distance(s, rhs, pq);
        sq.observe(d, at);
        compat.observe(distance(s, lhs, pq), at);
        if (const auto* tq = std::get_if<TubeLift>(&q))
          tau.observe(s.stratum.distance(UnfoldingModel::tau_tilde(*tq), p.u), at);
        bub.observe(bubble_of(q) == sign ? 0.0 : 1.0, at);
      }
    }
    rep.add(sq.finish());
    rep.add(compat.finish());
    rep.add(tau.finish());
    rep.add(bub.finish());
  }

  // Preimage of S is the slice t = 0 carrying a copy of the link.
  {
    Tracker hyp("unfold.hypersurface", "unfolding.hypersurface", tol);
    std::size_t expected = 1;
    if (s.link.dim() > 0) {
      const std::size_t n = static_cast<std::size_t>(std::llround(
          std::pow(static_cast<double>(hypersurface_samples), 1.0 / static_cast<double>(s.link.dim()))));
      expected = 1;
      for (std::size_t k = 0; k < s.link.dim(); ++k) expected *= std::max<std::size_t>(n, 1);
    }
    for (const auto& c : s.charts) {
      for (const auto& u : sampler.grid(c.base, std::max<std::size_t>(sampler.samples() / 16, 4))) {
        const SpacePoint x = TubePoint{c.id, u, ConePoint{Point(s.link.dim(), 0.0), 0.0}};
        Point at = u;
        at.push_back(0.0);
        const auto fib = model.fiber(x, hypersurface_samples, tol);
        if (fib.size() != expected)
          hyp.fail_with("fiber over the stratum has " + std::to_string(fib.size()) +
                            " classes, expected " + std::to_string(expected),
                        at);
        for (const auto& f : fib) {
          const auto& tl = std::get<TubeLift>(f);
          hyp.observe(std::max(std::abs(tl.t), radium(s, model.project(f))), at);
        }
      }
    }
    rep.add(hyp.finish());
  }

  // Properness proxy: preimages of compact radial shells stay in |t| within the shell.
  {
    Tracker prop("unfold.properness", "unfolding.properness", tol);
    prop.set_note("bounded-preimage proxy on sampled compact shells");
    const double a = 0.25 * s.radius, b = 0.75 * s.radius;
    for (const auto& x : detail::regular_samples(s, sampler, "proper")) {
      double r;
      try {
        r = radium(s, x);
      } catch (const NotInTube&) {
        continue;
      }
      if (r < a || r > b) continue;
      for (const auto& f : model.fiber(x, hypersurface_samples, tol))
        for (const auto& q : model.representations(f))
          if (const auto* t = std::get_if<TubeLift>(&q)) {
            const double excess = std::max({0.0, a - std::abs(t->t), std::abs(t->t) - b});
            prop.observe(excess, detail::flatten(x));
          }
    }
    rep.add(prop.finish(Status::proxy));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Restriction to open boxes

/// Open subset A of X given as per-chart coordinate boxes.
struct Restriction {
  std::map<std::string, Domain> tube;     // boxes in stratum coordinates
  std::map<std::string, Domain> regular;  // boxes in regular-chart coordinates
  std::optional<double> max_radius;
};

/// The restriction covering every chart of the space.
inline Restriction full_restriction(const SpaceSpec& s) {
  Restriction a;
  for (const auto& c : s.charts) a.tube.emplace(c.id, c.base);
  for (const auto& v : s.regular) a.regular.emplace(v.id, v.domain);
  return a;
}

/// Unfolding over A: chart domains are intersected with A and charts
/// outside A are dropped.
inline UnfoldingModel restrict(const UnfoldingModel& model, const Restriction& a,
                               const Sampler& sampler = Sampler(256, 42), double tol = 1e-6) {
  SpaceSpec s = model.space();
  std::vector<TubeChart> charts;
  for (auto c : s.charts) {
    auto it = a.tube.find(c.id);
    if (it == a.tube.end()) continue;
    auto base = c.base.intersect(it->second);
    if (!base) continue;
    c.base = *base;
    charts.push_back(std::move(c));
  }
  for (auto& c : charts) {
    std::map<std::string, std::vector<Domain>> kept;
    for (const auto& [other, boxes] : c.overlaps) {
      auto it = std::find_if(charts.begin(), charts.end(), [&](const TubeChart& k) { return k.id == other; });
      if (it == charts.end()) continue;
      for (const auto& box : boxes)
        if (auto x = box.intersect(c.base))
          if (auto y = x->intersect(it->base)) kept[other].push_back(*y);
    }
    c.overlaps = std::move(kept);
  }
  std::vector<Cocycle> cocycles;
  for (const auto& k : s.cocycles) {
    auto has = [&](const std::string& id) {
      return std::any_of(charts.begin(), charts.end(), [&](const TubeChart& c) { return c.id == id; });
    };
    if (has(k.from) && has(k.to)) cocycles.push_back(k);
  }
  std::vector<RegularChart> regular;
  for (auto v : s.regular) {
    auto it = a.regular.find(v.id);
    if (it == a.regular.end()) continue;
    auto dom = v.domain.intersect(it->second);
    if (!dom) continue;
    v.domain = *dom;
    std::vector<Transition> trs;
    for (auto tr : v.transitions) {
      if (std::none_of(charts.begin(), charts.end(), [&](const TubeChart& c) { return c.id == tr.tube; }))
        continue;
      if (tr.overlap) {
        auto ov = tr.overlap->intersect(v.domain);
        if (!ov) continue;
        tr.overlap = *ov;
      } else {
        tr.overlap = v.domain;
      }
      trs.push_back(std::move(tr));
    }
    v.transitions = std::move(trs);
    regular.push_back(std::move(v));
  }
  if (charts.empty() && regular.empty()) throw EmptyRestriction("restriction misses every chart");
  s.charts = std::move(charts);
  s.cocycles = std::move(cocycles);
  s.regular = std::move(regular);
  if (a.max_radius) s.radius = std::min(s.radius, *a.max_radius);
  if (s.charts.empty()) s.singular = false;
  return build_primary_unfolding(std::move(s), sampler, tol);
}

// ---------------------------------------------------------------------------
// Point-cloud export

/// Writes sampled points of the unfolding with their projections as CSV:
/// `chart,bubble,<source coords>,<projected coords>`, LF endings, 17
/// significant digits.
inline void export_pointcloud(const UnfoldingModel& model, const Sampler& sampler, std::ostream& os) {
  const SpaceSpec& s = model.space();
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::vector<std::string> header{"chart", "bubble"};
  std::vector<std::pair<std::string, Point>> rows;  // chart, values after bubble

  if (s.singular && !s.charts.empty()) {
    for (const auto& n : s.stratum.names()) header.push_back(n);
    for (const auto& n : s.link.names()) header.push_back(n);
    header.push_back(kHeight);
    for (const auto& n : s.stratum.names()) header.push_back("x_" + n);
    for (const auto& n : s.link.names()) header.push_back("x_" + n);
    header.push_back(std::string("x_") + kRadius);
    std::vector<std::vector<Point>> per_chart;
    for (const auto& c : s.charts)
      per_chart.push_back(sampler.random(c.base.product(s.link).product(detail::height_domain(s.radius)),
                                         stream_id("export" + c.id)));
    for (std::size_t i = 0; i < sampler.samples(); ++i) {
      const std::size_t k = i % s.charts.size();
      const TubeLift p = detail::tube_lift_from(s, s.charts[k].id, per_chart[k][i]);
      Point vals{static_cast<double>(bubble_of(UnfoldedPoint(p)))};
      for (double v : detail::flatten(p)) vals.push_back(v);
      for (double v : detail::flatten(model.project(p))) vals.push_back(v);
      rows.emplace_back(p.chart, std::move(vals));
    }
  } else if (!s.regular.empty()) {
    const RegularChart& v = s.regular.front();
    for (const auto& n : v.domain.names()) header.push_back(n);
    for (const auto& n : v.domain.names()) header.push_back("x_" + n);
    const auto pts = sampler.random(v.domain, stream_id("export" + v.id));
    for (std::size_t i = 0; i < sampler.samples(); ++i) {
      const RegularLift p{i % 2 == 0 ? 1 : -1, v.id, pts[i]};
      Point vals{static_cast<double>(p.bubble)};
      for (double x : p.x) vals.push_back(x);
      for (double x : detail::flatten(model.project(p))) vals.push_back(x);
      rows.emplace_back(p.chart, std::move(vals));
    }
  }

  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& [chart, vals] : rows) {
    os << chart;
    for (std::size_t i = 0; i < vals.size(); ++i)
      os << ',' << (i == 0 ? std::to_string(static_cast<int>(vals[i])) : num(vals[i]));
    os << '\n';
  }
}

inline void export_pointcloud(const UnfoldingModel& model, const Sampler& sampler, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  export_pointcloud(model, sampler, os);
  if (!os) throw IoError("write to '" + path + "' failed");
}

}  // namespace tmunfold
