#pragma once

// Global lifts of Thom-Mather morphisms, diffeomorphism checks and
// uniqueness of the primary unfolding.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tmunfold/lifting.hpp"

namespace tmunfold {

/// One chart-wise pem piece of a Thom-Mather morphism.
struct MorphismPiece {
  std::string chart;         // source tube chart
  std::string target_chart;  // target tube chart
  PemMorphism f;
};

/// Regular-part map V -> V'.
struct RegularMap {
  std::string chart;
  std::string target_chart;
  SmoothMapExpr map;
};

struct TMMorphism {
  std::string id;
  std::string source;  // space ids
  std::string target;
  std::vector<MorphismPiece> pieces;
  std::vector<RegularMap> regular;
  std::string inverse;  // id of the inverse morphism, if declared

  const MorphismPiece* piece_for(const std::string& chart) const {
    for (const auto& p : pieces)
      if (p.chart == chart) return &p;
    return nullptr;
  }

  const RegularMap* regular_for(const std::string& chart) const {
    for (const auto& r : regular)
      if (r.chart == chart) return &r;
    return nullptr;
  }
};

/// Psi on a point of X, evaluated in the first chart where a piece applies.
inline SpacePoint apply_tm(const TMMorphism& psi, const SpaceSpec& src, const SpacePoint& x) {
  for (const auto& rep : representations(src, x)) {
    if (const auto* t = std::get_if<TubePoint>(&rep)) {
      if (const MorphismPiece* p = psi.piece_for(t->chart)) {
        auto [u, c] = p->f(t->u, t->cone);
        return TubePoint{p->target_chart, std::move(u), std::move(c)};
      }
    } else {
      const auto& r = std::get<RegularPoint>(rep);
      if (const RegularMap* m = psi.regular_for(r.chart)) return RegularPoint{m->target_chart, m->map(r.x)};
    }
  }
  throw OutOfDomain("morphism '" + psi.id + "' is not defined at a point of chart '" + chart_of(x) + "'");
}

/// Global lift Psi~ assembled from chart-wise lifts and the regular map.
class LiftedTM {
 public:
  LiftedTM(TMMorphism psi, Perm sigma, std::vector<LiftedMap> lifts, UnfoldingModel source,
           UnfoldingModel target)
      : psi_(std::move(psi)),
        sigma_(sigma),
        lifts_(std::move(lifts)),
        source_(std::move(source)),
        target_(std::move(target)) {}

  const TMMorphism& morphism() const noexcept { return psi_; }
  Perm sigma() const noexcept { return sigma_; }
  const std::vector<LiftedMap>& lifts() const noexcept { return lifts_; }
  const UnfoldingModel& source() const noexcept { return source_; }
  const UnfoldingModel& target() const noexcept { return target_; }

  UnfoldedPoint operator()(const UnfoldedPoint& p) const {
    for (const auto& rep : source_.representations(p)) {
      if (const auto* t = std::get_if<TubeLift>(&rep)) {
        if (auto i = piece_index(t->chart))
          return lifts_[*i](psi_.pieces[*i].target_chart, t->u, t->l, t->t);
      } else {
        const auto& r = std::get<RegularLift>(rep);
        if (const RegularMap* m = psi_.regular_for(r.chart))
          return RegularLift{permute_bubble(sigma_, r.bubble), m->target_chart, m->map(r.x)};
      }
    }
    throw OutOfDomain("lift of '" + psi_.id + "' is not defined at a point of chart '" + chart_of(p) + "'");
  }

  /// Chart-local coordinates of Psi~ without periodic reduction, for
  /// Jacobians. Nullopt when p's own chart carries no piece.
  std::optional<Point> local_raw(const UnfoldedPoint& p) const {
    if (const auto* t = std::get_if<TubeLift>(&p)) {
      auto i = piece_index(t->chart);
      if (!i) return std::nullopt;
      return lifts_[*i].raw(detail::flatten(*t));
    }
    const auto& r = std::get<RegularLift>(p);
    const RegularMap* m = psi_.regular_for(r.chart);
    if (!m) return std::nullopt;
    return eval_all(m->map.exprs, make_env(m->map.input.names(), r.x));
  }

 private:
  std::optional<std::size_t> piece_index(const std::string& chart) const {
    for (std::size_t i = 0; i < psi_.pieces.size(); ++i)
      if (psi_.pieces[i].chart == chart) return i;
    return std::nullopt;
  }

  TMMorphism psi_;
  Perm sigma_;
  std::vector<LiftedMap> lifts_;
  UnfoldingModel source_;
  UnfoldingModel target_;
};

namespace detail {

/// Sampled unfolded points: tube lifts over [-radius, radius] (including
/// t = 0) and regular lifts in both bubbles.
inline std::vector<UnfoldedPoint> unfolded_samples(const UnfoldingModel& m, const Sampler& sampler,
                                                   const std::string& key) {
  const SpaceSpec& s = m.space();
  std::vector<UnfoldedPoint> out;
  if (s.singular)
    for (auto& p : tube_lift_samples(s, sampler, key)) out.emplace_back(std::move(p));
  for (const auto& v : s.regular) {
    auto sets = sampler.sets(v.domain, stream_id(key + v.id));
    for (const auto* set : {&sets.grid, &sets.random})
      for (const auto& x : *set)
        for (int b : UnfoldingModel::bubbles()) out.emplace_back(RegularLift{b, v.id, x});
  }
  return out;
}

inline SmoothMapExpr identity_link_map(const Domain& base, const Domain& link) {
  SmoothMapExpr m{base.product(link), link, {}};
  for (const auto& n : link.names()) m.exprs.push_back(Expr::variable(n));
  return m;
}

/// g_{a,b} as a map (u, l) -> l, using g_inv of (b, a) when needed.
inline std::optional<SmoothMapExpr> cocycle_map(const SpaceSpec& s, const std::string& a, const std::string& b) {
  if (a == b) return identity_link_map(s.stratum, s.link);
  if (const Cocycle* c = s.cocycle(a, b)) return c->g;
  if (const Cocycle* c = s.cocycle(b, a)) return c->g_inv;
  return std::nullopt;
}

}  // namespace detail

/// Parity check of every piece on grid and random (u, l) samples. Each piece
/// gets a `lift.parity.<chart>` entry; failures carry the witness (u, l, 0).
inline std::vector<LiftCheck> check_pieces(const TMMorphism& psi, const SpaceSpec& src, const Sampler& sampler,
                                           double fd_tol, double fd_step, Report& rep) {
  std::vector<LiftCheck> out;
  for (const auto& piece : psi.pieces) {
    const TubeChart* c = src.tube_chart(piece.chart);
    if (!c) throw ReferenceError(piece.chart, "morphism " + psi.id);
    const Domain ul = c->base.product(src.link);
    auto pts = sampler.grid(ul, std::max<std::size_t>(sampler.samples() / 4, 8));
    for (auto& p : sampler.random(ul, stream_id("parity" + psi.id + piece.chart))) pts.push_back(std::move(p));
    LiftCheck lc = check_liftable(piece.f, pts, fd_tol, fd_step);
    Check ch;
    ch.name = "lift.parity." + piece.chart;
    ch.anchor = "lifting.parity";
    if (lc.kind) {
      ch.status = Status::pass;
      ch.note = std::string("kind ") + to_string(*lc.kind);
    } else {
      const Rejection& r = *lc.rejection;
      ch.status = Status::fail;
      ch.residual = std::abs(r.residual);
      ch.witness = r.point;
      ch.note = r.component + ": " + r.reason + " (jump " + detail::format_double(r.residual) + ")";
    }
    rep.add(ch);
    out.push_back(std::move(lc));
  }
  return out;
}

struct LiftResult {
  std::optional<LiftedTM> lifted;
  Report report;
};

/// Lifts Psi between two primary unfoldings. Pieces must pass the parity
/// rule and the cocycle-commutation equations on every chart overlap.
/// Throws NotLiftable (naming the chart or chart pair) and InconsistentLift.
inline LiftResult lift_tm_morphism(const TMMorphism& psi, const UnfoldingModel& src, const UnfoldingModel& tgt,
                                   Perm sigma, const Sampler& sampler, double tol,
                                   double fd_tol = kDefaultFdTol, double fd_step = kDefaultStepHigher) {
  const SpaceSpec& S = src.space();
  const SpaceSpec& T = tgt.space();
  LiftResult res;
  Report& rep = res.report;
  for (const auto& p : psi.pieces)
    if (!T.tube_chart(p.target_chart)) throw ReferenceError(p.target_chart, "morphism " + psi.id);
  for (const auto& m : psi.regular) {
    if (!S.regular_chart(m.chart)) throw ReferenceError(m.chart, "morphism " + psi.id);
    if (!T.regular_chart(m.target_chart)) throw ReferenceError(m.target_chart, "morphism " + psi.id);
  }

  const auto checks = check_pieces(psi, S, sampler, fd_tol, fd_step, rep);
  for (std::size_t i = 0; i < checks.size(); ++i)
    if (!checks[i].kind) {
      const Rejection& r = *checks[i].rejection;
      throw NotLiftable(psi.pieces[i].chart + "->" + psi.pieces[i].target_chart,
                        "piece " + psi.pieces[i].chart + "->" + psi.pieces[i].target_chart + " of '" + psi.id +
                            "' is not liftable: " + r.component + ": " + r.reason);
    }

  // Chart-overlap agreement through the cocycle-commutation equations.
  for (std::size_t i = 0; i < psi.pieces.size(); ++i)
    for (std::size_t j = i + 1; j < psi.pieces.size(); ++j) {
      const auto& P = psi.pieces[i];
      const auto& Q = psi.pieces[j];
      const auto boxes = S.overlap_boxes(P.chart, Q.chart);
      if (boxes.empty()) continue;
      auto g = detail::cocycle_map(S, P.chart, Q.chart);
      auto gp = detail::cocycle_map(T, P.target_chart, Q.target_chart);
      const std::string pair = P.chart + "/" + Q.chart;
      if (!g || !gp) throw NotLiftable(pair, "no cocycle relates the images of " + pair);
      std::vector<Point> pts;
      for (const auto& box : boxes) {
        const Domain d = box.product(S.link).product(Domain({Coord{kRadius, 0.0, S.radius, false, 0.0}}));
        auto sets = sampler.sets(d, stream_id("compat" + pair));
        for (const auto* set : {&sets.grid, &sets.random})
          for (const auto& p : *set)
            if (p.back() > 0.0) pts.push_back(p);
      }
      Report c = check_cocycle_compat(P.f, Q.f, *g, *gp, pts, tol);
      c.prefix("lift." + P.chart + "." + Q.chart + ".");
      const bool ok = c.passed();
      rep.merge(c);
      if (!ok) throw NotLiftable(pair, "pieces on " + pair + " of '" + psi.id + "' violate cocycle commutation");
    }

  std::vector<LiftedMap> lifts;
  for (std::size_t i = 0; i < psi.pieces.size(); ++i) lifts.push_back(lift_morphism(psi.pieces[i].f, checks[i], sigma));
  LiftedTM lifted(psi, sigma, std::move(lifts), src, tgt);

  Tracker square("lift.square", "lifting.global", tol);
  Tracker well("lift.well_defined", "lifting.global", tol);
  std::size_t outside = 0;
  for (const auto& p : detail::unfolded_samples(src, sampler, "lift" + psi.id)) {
    const Point at = detail::flatten(p);
    try {
      const UnfoldedPoint q = lifted(p);
      // Charts are bounded boxes; images beyond them cannot be compared.
      if (!tgt.contains(q)) {
        ++outside;
        continue;
      }
      const SpacePoint lhs = tgt.project(q);
      const SpacePoint rhs = apply_tm(psi, S, src.project(p));
      square.observe(distance(T, rhs, lhs), at);
      for (const auto& rp : src.representations(p)) well.observe(tgt.distance(lifted(rp), q), at);
    } catch (const OutOfDomain& e) {
      square.fail_with(e.what(), at);
    }
  }
  if (outside > 0) {
    const std::string note = std::to_string(outside) + " samples skipped: image outside the target charts";
    square.set_note(note);
    well.set_note(note);
  }
  rep.add(square.finish());
  const Check w = well.finish();
  rep.add(w);
  if (w.status == Status::fail)
    throw InconsistentLift("lift of '" + psi.id + "' differs across equivalent points by " +
                           detail::format_double(w.residual));
  res.lifted.emplace(std::move(lifted));
  return res;
}

/// Minimum |det J| of Psi~ over sampled unfolded points, in chart
/// coordinates. Stencils at t = 0 are one-sided from t > 0.
inline Check jacobian_check(const LiftedTM& f, const Sampler& sampler, double threshold, double fd_step,
                            const std::string& name = "lift.jacobian") {
  Tracker tr(name, "lifting.diffeomorphism", threshold, Tracker::Mode::at_least);
  for (const auto& p : detail::unfolded_samples(f.source(), sampler, "jac" + f.morphism().id)) {
    const auto y0 = f.local_raw(p);
    if (!y0) continue;
    const Point x = std::holds_alternative<TubeLift>(p) ? detail::flatten(p) : std::get<RegularLift>(p).x;
    if (y0->size() != x.size()) {
      tr.fail_with("dimension changes; no Jacobian determinant", x);
      continue;
    }
    std::vector<int> side(x.size(), 0);
    if (const auto* t = std::get_if<TubeLift>(&p); t && t->t == 0.0) side.back() = 1;
    auto F = [&](const Point& z) -> Point {
      if (const auto* t = std::get_if<TubeLift>(&p)) {
        return *f.local_raw(detail::tube_lift_from(f.source().space(), t->chart, z));
      }
      RegularLift q = std::get<RegularLift>(p);
      q.x = z;
      return *f.local_raw(q);
    };
    const Eigen::MatrixXd J = fd_jacobian(F, x, fd_step, x.size(), side);
    tr.observe(std::abs(J.determinant()), detail::flatten(p));
  }
  return tr.finish();
}

/// Phi~ o Psi~ = id and Psi~ o Phi~ = id on samples, plus nondegenerate
/// Jacobians of both. Symmetric in its two arguments.
inline Report verify_diffeomorphism(const LiftedTM& psi, const LiftedTM& phi, const Sampler& sampler, double tol,
                                    double fd_step = kDefaultStepHigher) {
  Report rep;
  auto composite = [&](const LiftedTM& first, const LiftedTM& second, const std::string& name) {
    Tracker tr(name, "lifting.diffeomorphism", tol);
    const UnfoldingModel& m = first.source();
    std::size_t outside = 0;
    for (const auto& p : detail::unfolded_samples(m, sampler, "diffeo" + first.morphism().id)) {
      const Point at = detail::flatten(p);
      try {
        const UnfoldedPoint q = first(p);
        if (!second.source().contains(q)) {
          ++outside;
          continue;
        }
        tr.observe(m.distance(second(q), p), at);
      } catch (const Error& e) {
        tr.fail_with(e.what(), at);
      }
    }
    if (outside > 0) tr.set_note(std::to_string(outside) + " samples skipped: image outside the target charts");
    return tr.finish();
  };
  // Name by space so swapping the arguments permutes nothing but order.
  rep.add(composite(psi, phi, "diffeo.inverse." + psi.source().space().id));
  rep.add(composite(phi, psi, "diffeo.inverse." + phi.source().space().id));
  Check ja = jacobian_check(psi, sampler, tol, fd_step, "diffeo.jacobian");
  Check jb = jacobian_check(phi, sampler, tol, fd_step, "diffeo.jacobian");
  if (ja.status == Status::fail) rep.add(ja);
  else if (jb.status == Status::fail) rep.add(jb);
  else rep.add(jb.residual < ja.residual ? jb : ja);
  return rep;
}

struct UniquenessResult {
  Report report;
  std::vector<Perm> passing;         // sigma for iota, inverse lifted with the identity
  std::vector<Perm> matched_passing; // sigma for iota, inverse lifted with sigma^-1
  double composite_residual = std::numeric_limits<double>::infinity();
};

/// Lifts iota : X_A -> X_B with each bubble permutation and its inverse with
/// the identity labeling, and verifies the diffeomorphism. Passes iff some
/// permutation passes.
inline UniquenessResult uniqueness_check(const UnfoldingModel& a, const UnfoldingModel& b, const TMMorphism& iota,
                                         const TMMorphism& iota_inv, const Sampler& sampler, double tol,
                                         double fd_tol = kDefaultFdTol, double fd_step = kDefaultStepHigher) {
  UniquenessResult out;
  const LiftResult inv = lift_tm_morphism(iota_inv, b, a, Perm::identity, sampler, tol, fd_tol, fd_step);
  std::string passing_names, matched_names, rejected;
  for (Perm sigma : {Perm::identity, Perm::swap}) {
    const LiftResult fwd = lift_tm_morphism(iota, a, b, sigma, sampler, tol, fd_tol, fd_step);
    Report r = verify_diffeomorphism(*fwd.lifted, *inv.lifted, sampler, tol, fd_step);
    if (r.passed()) {
      out.passing.push_back(sigma);
      passing_names += std::string(passing_names.empty() ? "" : ", ") + to_string(sigma);
      double worst = 0.0;
      for (const auto& c : r.checks())
        if (c.name.rfind("diffeo.inverse.", 0) == 0) worst = std::max(worst, c.residual);
      out.composite_residual = std::min(out.composite_residual, worst);
      Report lifted = fwd.report;
      out.report.merge(lifted.prefix(std::string("uniqueness.") + to_string(sigma) + ".forward."));
      out.report.merge(r.prefix(std::string("uniqueness.") + to_string(sigma) + "."));
    } else {
      std::string failed;
      for (const auto& c : r.checks())
        if (c.status == Status::fail) failed += (failed.empty() ? "" : ", ") + c.name;
      rejected += std::string(rejected.empty() ? "" : "; ") + to_string(sigma) + " (" + failed + ")";
    }
    const LiftResult inv_matched = lift_tm_morphism(iota_inv, b, a, sigma, sampler, tol, fd_tol, fd_step);
    if (verify_diffeomorphism(*fwd.lifted, *inv_matched.lifted, sampler, tol, fd_step).passed()) {
      out.matched_passing.push_back(sigma);
      matched_names += std::string(matched_names.empty() ? "" : ", ") + to_string(sigma);
    }
  }
  Report inv_rep = inv.report;
  out.report.merge(inv_rep.prefix("uniqueness.inverse."));

  Check c;
  c.name = "uniqueness.permutations";
  c.anchor = "lifting.uniqueness";
  c.residual = static_cast<double>(out.passing.size());
  c.status = out.passing.empty() ? Status::fail : Status::pass;
  c.note = "passing: " + (passing_names.empty() ? std::string("none") : passing_names) +
           "; rejected: " + (rejected.empty() ? std::string("none") : rejected) +
           "; matched-inverse pairing passes: " + (matched_names.empty() ? std::string("none") : matched_names);
  out.report.add(c);
  return out;
}

}  // namespace tmunfold
