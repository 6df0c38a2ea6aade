#pragma once

// Recovering a tube from an unfolding and a collar of the hypersurface.
//
// With a collar Gamma of L^-1(S) inside the closure of the + bubble, the
// recovered charts are alpha^(u,[l,r]) = L(Gamma(u,l,r)) and the retraction
// sends L(Gamma(z,r)) to L(z).

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tmunfold/unfolding.hpp"

namespace tmunfold {

struct Collar {
  std::string id;
  std::string space;
  /// (u..., l..., r) -> (u..., l..., t) in every tube chart.
  std::vector<Expr> map;
};

namespace detail {

struct CollarMap {
  const SpaceSpec* s;
  const Collar* c;

  Point raw(const Point& ulr) const { return eval_all(c->map, make_env(s->tube_names(), ulr)); }

  Point residual(const Point& x, const Point& y) const {
    Point f = raw(x);
    const std::size_t nu = s->stratum.dim(), nl = s->link.dim();
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (i < nu)
        f[i] = wrapped_difference(s->stratum[i], f[i], y[i]);
      else if (i < nu + nl)
        f[i] = wrapped_difference(s->link[i - nu], f[i], y[i]);
      else
        f[i] -= y[i];
    }
    return f;
  }

  /// Solves Gamma(x) = y by Newton from x = y.
  std::optional<Point> invert(const Point& y, int max_iter = 60, double tol = 1e-13) const {
    Point x = y;
    for (int it = 0; it < max_iter; ++it) {
      const Point r = residual(x, y);
      double rn = 0.0;
      for (double v : r) rn = std::max(rn, std::abs(v));
      if (!std::isfinite(rn)) return std::nullopt;
      if (rn < tol) return x;
      const Eigen::MatrixXd J = fd_jacobian([&](const Point& z) { return raw(z); }, x, 1e-7, x.size());
      Eigen::VectorXd rv(static_cast<Eigen::Index>(r.size()));
      for (std::size_t i = 0; i < r.size(); ++i) rv(static_cast<Eigen::Index>(i)) = r[i];
      const Eigen::VectorXd step = J.colPivHouseholderQr().solve(rv);
      if (!step.allFinite()) return std::nullopt;
      for (std::size_t i = 0; i < x.size(); ++i) x[i] -= step(static_cast<Eigen::Index>(i));
    }
    return std::nullopt;
  }
};

}  // namespace detail

/// Builds tau and the charts alpha^ from the collar and checks them: the
/// collar fixes the hypersurface (else CollarError), tau is the identity on
/// S and a retraction on sampled tube points, and recovered transitions have
/// the form (u, [h(u)(l), rho(r)]) with h radium-independent and matching
/// the cocycle.
inline Report tube_from_unfolding(const UnfoldingModel& model, const Collar& collar, const Sampler& sampler,
                                  double tol) {
  const SpaceSpec& s = model.space();
  if (!s.singular || s.charts.empty()) throw CollarError("space '" + s.id + "' has no stratum to collar");
  const std::size_t nu = s.stratum.dim(), nl = s.link.dim();
  if (collar.map.size() != nu + nl + 1)
    throw ConfigError("collar '" + collar.id + "': map needs " + std::to_string(nu + nl + 1) + " components");
  const detail::CollarMap G{&s, &collar};
  auto split = [&](const std::string& chart, const Point& ult) { return detail::tube_lift_from(s, chart, ult); };
  auto alpha_hat = [&](const std::string& chart, const Point& ulr) { return model.project(split(chart, G.raw(ulr))); };

  // Gamma(m, 0) = m.
  for (const auto& c : s.charts)
    for (const auto& ul : sampler.grid(c.base.product(s.link))) {
      Point m = ul;
      m.push_back(0.0);
      const TubeLift a = split(c.id, m);
      const TubeLift b = split(c.id, G.raw(m));
      const double d = model.same_chart_distance(a, b);
      if (!(d <= tol))
        throw CollarError("collar '" + collar.id + "' moves hypersurface point by " + detail::format_double(d) +
                          " in chart '" + c.id + "'");
    }

  Report rep;
  Tracker section("tube.tau_section", "collar.section", tol);
  Tracker retract("tube.tau_projection", "collar.retraction", tol);
  Tracker bubble("collar.bubble", "collar.section", 0.0);
  for (const auto& c : s.charts) {
    const Domain ul = c.base.product(s.link);
    for (const auto& z : sampler.grid(ul, std::max<std::size_t>(sampler.samples() / 4, 8))) {
      Point m = z;
      m.push_back(0.0);
      const SpacePoint y = alpha_hat(c.id, m);
      section.observe(same_chart_distance(s, y, TubePoint{c.id, Point(z.begin(), z.begin() + static_cast<long>(nu)),
                                                          ConePoint{Point(nl, 0.0), 0.0}}),
                      m);
    }
    const Domain ulr = ul.product(s.radial_domain(s.radius));
    auto sets = sampler.sets(ulr, stream_id("collar" + c.id));
    for (const auto* set : {&sets.grid, &sets.random})
      for (const auto& x : *set) {
        const Point g = G.raw(x);
        bubble.observe(std::max(0.0, -g.back()), x);
        // tau(alpha^(u,[l,r])) recovered by inverting Gamma from the image.
        const auto inv = G.invert(g);
        if (!inv) {
          retract.fail_with("collar not invertible by Newton", x);
          continue;
        }
        retract.observe(s.stratum.distance(Point(inv->begin(), inv->begin() + static_cast<long>(nu)),
                                           Point(x.begin(), x.begin() + static_cast<long>(nu))),
                        x);
      }
  }
  rep.add(section.finish());
  rep.add(retract.finish());
  rep.add(bubble.finish());

  // Recovered transitions alpha^_b^-1 o alpha^_a on overlaps (a chart
  // overlaps itself, giving the identity).
  Tracker base("tube.transition_form.base", "collar.transition_form", tol);
  Tracker link("tube.transition_form.link_radium_independent", "collar.transition_form", tol);
  Tracker radial("tube.transition_form.radial_only", "collar.transition_form", tol);
  Tracker cocycle("tube.transition_form.cocycle", "collar.transition_form", tol);
  for (const auto& a : s.charts)
    for (const auto& b : s.charts) {
      for (const auto& box : s.overlap_boxes(a.id, b.id)) {
        const Domain ul = box.product(s.link);
        const auto pts = sampler.grid(ul, std::max<std::size_t>(sampler.samples() / 8, 8));
        const std::vector<double> radii{0.2 * s.radius, 0.45 * s.radius, 0.7 * s.radius};
        std::vector<std::vector<Point>> trans(pts.size());  // per point, per radius: (u*, l*, rho*)
        for (std::size_t i = 0; i < pts.size(); ++i)
          for (double r : radii) {
            Point x = pts[i];
            x.push_back(r);
            const Point at = x;
            const SpacePoint y = alpha_hat(a.id, x);
            const auto yb = tube_in_chart(s, std::get<TubePoint>(y), b.id);
            if (!yb) {
              base.fail_with("recovered point leaves the overlap", at);
              trans[i].push_back({});
              continue;
            }
            Point target = yb->u;
            target.insert(target.end(), yb->cone.link.begin(), yb->cone.link.end());
            target.push_back(yb->cone.r);
            const auto inv = G.invert(target);
            if (!inv) {
              base.fail_with("collar not invertible by Newton", at);
              trans[i].push_back({});
              continue;
            }
            trans[i].push_back(*inv);
            const Point u(x.begin(), x.begin() + static_cast<long>(nu));
            const Point ustar(inv->begin(), inv->begin() + static_cast<long>(nu));
            base.observe(s.stratum.distance(u, ustar), at);
            if (auto gl = s.link_transition(a.id, b.id, u, Point(x.begin() + static_cast<long>(nu), x.end() - 1)))
              cocycle.observe(s.link.distance(*gl, Point(inv->begin() + static_cast<long>(nu), inv->end() - 1)), at);
          }
        for (std::size_t i = 0; i < pts.size(); ++i)
          for (std::size_t k = 0; k < radii.size(); ++k) {
            if (trans[i][k].empty() || trans[0][k].empty() || trans[i][0].empty()) continue;
            Point at = pts[i];
            at.push_back(radii[k]);
            const Point lk(trans[i][k].begin() + static_cast<long>(nu), trans[i][k].end() - 1);
            const Point l0(trans[i][0].begin() + static_cast<long>(nu), trans[i][0].end() - 1);
            link.observe(s.link.distance(lk, l0), at);
            radial.observe(std::abs(trans[i][k].back() - trans[0][k].back()), at);
          }
      }
    }
  rep.add(base.finish());
  rep.add(link.finish());
  rep.add(radial.finish());
  rep.add(cocycle.finish());
  return rep;
}

}  // namespace tmunfold
