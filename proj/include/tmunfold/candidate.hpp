#pragma once

// Verification of a user-supplied unfolding M -> X, given as a closed-form
// map from a source manifold into one tube chart of X.
//
// Only local properties are checked: fiber cardinality over sampled regular
// points, nondegeneracy of the would-be unfolded chart, and the preimage of
// the stratum. Global diffeomorphism is out of reach.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tmunfold/unfolding.hpp"

namespace tmunfold {

struct CandidateUnfolding {
  std::string id;
  std::string target;  // space id
  std::string chart;   // tube chart of the target
  Domain source;
  /// source -> (u..., l..., r)
  std::vector<Expr> map;
  /// Fiber cardinality over regular points; 2 for a primary unfolding.
  std::size_t sheets = 2;
  /// The chart check only looks at points whose image has r below this
  /// fraction of the tube radius, keeping stencils inside the tube.
  double tube_fraction = 0.9;
};

namespace detail {

/// Signed height: the argument of the outermost abs of the r-component,
/// else the r-component itself.
inline Expr signed_height(const Expr& r) { return r.op() == Op::abs ? r.lhs() : r; }

struct CandidateMaps {
  std::vector<Expr> unfolded;  // (u..., l..., h)
  std::vector<std::string> names;
  const Domain* out_base;
  const Domain* out_link;

  Point raw(const Point& x) const { return eval_all(unfolded, make_env(names, x)); }

  /// Residual F(x) - y, wrapped on periodic link coordinates.
  Point residual(const Point& x, const Point& y) const {
    Point f = raw(x);
    const std::size_t nu = out_base->dim();
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (i >= nu && i < nu + out_link->dim())
        f[i] = wrapped_difference((*out_link)[i - nu], f[i], y[i]);
      else
        f[i] -= y[i];
    }
    return f;
  }

  double out_distance(const Point& a, const Point& b) const {
    double d = 0.0;
    const std::size_t nu = out_base->dim();
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double di = (i >= nu && i < nu + out_link->dim()) ? (*out_link)[i - nu].distance(a[i], b[i])
                                                               : std::abs(a[i] - b[i]);
      d = std::max(d, di);
    }
    return d;
  }
};

/// Newton solve of F(x) = y from `x`. Returns the root if it converged
/// inside the source domain.
inline std::optional<Point> newton(const CandidateMaps& F, const Domain& src, Point x, const Point& y,
                                   int max_iter = 60, double tol = 1e-12) {
  for (int it = 0; it < max_iter; ++it) {
    const Point r = F.residual(x, y);
    double rn = 0.0;
    for (double v : r) rn = std::max(rn, std::abs(v));
    if (!std::isfinite(rn)) return std::nullopt;
    if (rn < tol) {
      x = src.reduce(x);
      if (!src.contains(x, 1e-9)) return std::nullopt;
      return x;
    }
    const Eigen::MatrixXd J = fd_jacobian([&](const Point& z) { return F.raw(z); }, x, 1e-7, x.size());
    Eigen::VectorXd rv(static_cast<Eigen::Index>(r.size()));
    for (std::size_t i = 0; i < r.size(); ++i) rv(static_cast<Eigen::Index>(i)) = r[i];
    const Eigen::VectorXd step = J.colPivHouseholderQr().solve(rv);
    if (!step.allFinite()) return std::nullopt;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= step(static_cast<Eigen::Index>(i));
    x = src.reduce(x);
    // Far outside a non-periodic face: give up rather than wander.
    if (!src.contains(x, 0.5)) return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace detail

/// Covering, unfolded-chart and hypersurface checks for a candidate.
inline Report verify_candidate(const CandidateUnfolding& cand, const SpaceSpec& target, const Sampler& sampler,
                               double tol) {
  const TubeChart* chart = target.tube_chart(cand.chart);
  if (!chart) throw ReferenceError(cand.chart, "candidate " + cand.id);
  const std::size_t n = cand.source.dim();
  const std::size_t nu = target.stratum.dim(), nl = target.link.dim();
  if (cand.map.size() != nu + nl + 1)
    throw ConfigError("candidate '" + cand.id + "': map needs " + std::to_string(nu + nl + 1) +
                      " components (u..., l..., r)");
  if (n != nu + nl + 1)
    throw ConfigError("candidate '" + cand.id + "': source dimension " + std::to_string(n) +
                      " differs from the unfolded tube dimension " + std::to_string(nu + nl + 1));

  detail::CandidateMaps F{cand.map, cand.source.names(), &target.stratum, &target.link};
  F.unfolded.back() = detail::signed_height(cand.map.back());
  const Expr r_expr = cand.map.back();
  const auto names = cand.source.names();
  auto r_of = [&](const Point& x) { return eval(r_expr, make_env(names, x)); };

  Report rep;

  // Covering: preimages of sampled regular tube points, found by Newton
  // from the nearest seeds of a source grid.
  {
    Tracker cov("candidate.covering", "unfolding.covering", 0.0);
    cov.set_note("fiber cardinality " + std::to_string(cand.sheets) + " expected");
    const std::size_t per_axis = std::max<std::size_t>(
        8, static_cast<std::size_t>(std::llround(std::pow(4096.0, 1.0 / static_cast<double>(n)))));
    const auto seeds = Sampler::grid_per_axis(cand.source, per_axis);
    std::vector<Point> seed_out;
    seed_out.reserve(seeds.size());
    for (const auto& s : seeds) seed_out.push_back(F.raw(s));

    const Domain ulr = chart->base.product(target.link).product(target.radial_domain(target.radius));
    auto sets = sampler.sets(ulr, stream_id("candidate" + cand.id));
    for (const auto* set : {&sets.grid, &sets.random})
      for (const auto& y : *set) {
        std::vector<Point> roots;
        for (double sign : {1.0, -1.0}) {
          Point ys = y;
          ys.back() *= sign;
          std::vector<std::pair<double, std::size_t>> near;
          for (std::size_t k = 0; k < seeds.size(); ++k) near.emplace_back(F.out_distance(seed_out[k], ys), k);
          const std::size_t keep = std::min<std::size_t>(16, near.size());
          std::partial_sort(near.begin(), near.begin() + static_cast<long>(keep), near.end());
          for (std::size_t k = 0; k < keep; ++k) {
            auto x = detail::newton(F, cand.source, seeds[near[k].second], ys);
            if (!x) continue;
            const bool dup = std::any_of(roots.begin(), roots.end(),
                                         [&](const Point& q) { return cand.source.distance(q, *x) < 1e-6; });
            if (!dup) roots.push_back(*x);
          }
        }
        cov.observe(std::abs(static_cast<double>(roots.size()) - static_cast<double>(cand.sheets)), y);
      }
    rep.add(cov.finish());
  }

  // Preimage of the stratum: project seeds onto h = 0 along grad h.
  std::vector<Point> slice;
  {
    Tracker hyp("candidate.hypersurface", "unfolding.hypersurface", tol);
    const Expr& h = F.unfolded.back();
    for (const auto& x0 : sampler.grid(cand.source)) {
      Point x = x0;
      if (std::abs(eval(h, make_env(names, x))) > 0.25 * target.radius) continue;
      bool ok = false;
      for (int it = 0; it < 200; ++it) {
        const double hv = eval(h, make_env(names, x));
        if (std::abs(hv) < 1e-16) {
          ok = true;
          break;
        }
        const Eigen::MatrixXd g =
            fd_jacobian([&](const Point& z) { return Point{eval(h, make_env(names, z))}; }, x, 1e-7, 1);
        const double g2 = g.squaredNorm();
        if (!(g2 > 0.0)) {
          ok = std::abs(hv) <= tol;
          break;
        }
        for (std::size_t i = 0; i < n; ++i) x[i] -= hv * g(0, static_cast<Eigen::Index>(i)) / g2;
        x = cand.source.reduce(x);
      }
      if (!ok || !cand.source.contains(x, 1e-9)) continue;
      hyp.observe(std::abs(r_of(x)), x);
      slice.push_back(x);
    }
    if (slice.empty()) hyp.fail_with("no source point maps onto the stratum", {});
    hyp.set_note(std::to_string(slice.size()) + " slice points");
    rep.add(hyp.finish());
  }

  // Unfolded chart: the would-be inverse (u, l, h) must be a local
  // diffeomorphism on the preimage of the tube, slice included.
  {
    Tracker jac("candidate.unfolded_chart", "unfolding.chart", tol, Tracker::Mode::at_least);
    jac.set_note("local checks only");
    std::vector<Point> pts = sampler.grid(cand.source);
    for (auto& p : sampler.random(cand.source, stream_id("candjac" + cand.id))) pts.push_back(std::move(p));
    pts.insert(pts.end(), slice.begin(), slice.end());
    for (const auto& x : pts) {
      if (std::abs(r_of(x)) >= cand.tube_fraction * target.radius) continue;
      const Eigen::MatrixXd J = fd_jacobian([&](const Point& z) { return F.raw(z); }, x, 1e-6, n);
      jac.observe(std::abs(J.determinant()), x);
    }
    rep.add(jac.finish());
  }
  return rep;
}

}  // namespace tmunfold
