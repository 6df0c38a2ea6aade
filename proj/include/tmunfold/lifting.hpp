#pragma once

// Lifting morphisms across primary unfoldings.
//
// A pem morphism f(u,[l,r]) = (a1, [a2, a3]) lifts when a1, a2 extend evenly
// and a3 extends oddly (or evenly, vanishing at r = 0). Parity is certified
// up to third order with one-sided stencils at r = 0.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "tmunfold/unfolding.hpp"

namespace tmunfold {

/// Default tolerance for FD-based smoothness checks.
inline constexpr double kDefaultFdTol = 1e-4;

/// f(u,[l,r]) = (a1, [a2, a3]) between U x c(L) and U' x c(L').
struct PemMorphism {
  std::string id;
  Domain base;          // U
  Domain link;          // L
  Domain target_base;   // U'
  Domain target_link;   // L'
  std::vector<Expr> a1;
  std::vector<Expr> a2;
  Expr a3 = Expr::number(0.0);

  std::vector<std::string> input_names() const {
    auto n = base.names();
    for (const auto& l : link.names()) n.push_back(l);
    n.push_back(kRadius);
    return n;
  }

  /// Mismatched component counts are configuration errors.
  void check_dims() const {
    if (a1.size() != target_base.dim())
      throw ConfigError("morphism '" + id + "': a1 has " + std::to_string(a1.size()) +
                        " components, target stratum has dimension " + std::to_string(target_base.dim()));
    if (a2.size() != target_link.dim())
      throw ConfigError("morphism '" + id + "': a2 has " + std::to_string(a2.size()) +
                        " components, target link has dimension " + std::to_string(target_link.dim()));
  }

  /// (u', l', r') before any periodic reduction.
  Point raw(const Point& u, const Point& l, double r) const {
    Point in = u;
    in.insert(in.end(), l.begin(), l.end());
    in.push_back(r);
    const Env env = make_env(input_names(), in);
    Point out = eval_all(a1, env);
    for (double v : eval_all(a2, env)) out.push_back(v);
    out.push_back(eval(a3, env));
    return out;
  }

  std::pair<Point, ConePoint> operator()(const Point& u, const ConePoint& c) const {
    const Point v = raw(u, c.link, c.r);
    const std::size_t nu = target_base.dim(), nl = target_link.dim();
    Point u2(v.begin(), v.begin() + static_cast<long>(nu));
    Point l2(v.begin() + static_cast<long>(nu), v.begin() + static_cast<long>(nu + nl));
    return {target_base.reduce(u2), ConePoint{target_link.reduce(l2), v.back()}};
  }
};

enum class LiftKind { OddA3, EvenA3Zero };

inline const char* to_string(LiftKind k) { return k == LiftKind::OddA3 ? "OddA3" : "EvenA3Zero"; }

/// Bubble permutation. Primary unfoldings have two bubbles.
enum class Perm { identity, swap };

inline const char* to_string(Perm p) { return p == Perm::identity ? "identity" : "swap"; }
inline int permute_bubble(Perm p, int bubble) { return p == Perm::swap ? -bubble : bubble; }

/// Why a pem morphism does not lift: the failing component, where, and by how much.
struct Rejection {
  std::string component;  // e.g. "a2[0]"
  Point point;            // (u, l, r) with r = 0
  double residual = 0.0;
  std::string reason;
};

struct LiftCheck {
  std::optional<LiftKind> kind;
  std::optional<Rejection> rejection;
  bool liftable() const { return kind.has_value(); }
};

namespace detail {

inline Expr even_extension(const Expr& e) {
  return substitute(e, kRadius, Expr::unary(Op::abs, Expr::variable(kHeight)));
}

inline Expr odd_extension(const Expr& e) {
  return Expr::binary(Op::mul, Expr::unary(Op::sign, Expr::variable(kHeight)), even_extension(e));
}

/// Jump of the order-k one-sided t-derivatives of `ext` at t = 0.
inline double one_sided_jump(const Expr& ext, const Env& at_zero, int order, double h) {
  return diff_fd(ext, kHeight, at_zero, order, Side::right, h) -
         diff_fd(ext, kHeight, at_zero, order, Side::left, h);
}

}  // namespace detail

/// Classifies f by the parity rule at sampled (u, l, 0). The tolerance is
/// scaled by the local magnitude of each component.
inline LiftCheck check_liftable(const PemMorphism& f, const std::vector<Point>& base_link_points,
                                double tol = kDefaultFdTol, double fd_step = kDefaultStepHigher) {
  f.check_dims();
  const auto names = f.input_names();
  auto env_at = [&](const Point& ul) {
    Point in = ul;
    in.push_back(0.0);
    Env env = make_env(names, in);
    env.set(kHeight, 0.0);
    return env;
  };
  auto witness = [](const Point& ul) {
    Point w = ul;
    w.push_back(0.0);
    return w;
  };

  LiftCheck out;
  // a1 and a2 need smooth even extensions: odd-order jumps vanish.
  std::vector<std::pair<std::string, Expr>> even_parts;
  for (std::size_t i = 0; i < f.a1.size(); ++i) even_parts.emplace_back("a1[" + std::to_string(i) + "]", f.a1[i]);
  for (std::size_t i = 0; i < f.a2.size(); ++i) even_parts.emplace_back("a2[" + std::to_string(i) + "]", f.a2[i]);
  for (const auto& [label, e] : even_parts) {
    const Expr ext = detail::even_extension(e);
    for (const auto& ul : base_link_points) {
      const Env env = env_at(ul);
      const double scale = std::max(1.0, std::abs(eval(ext, env)));
      for (int order : {1, 3}) {
        const double jump = detail::one_sided_jump(ext, env, order, fd_step);
        if (!(std::abs(jump) <= tol * scale)) {
          out.rejection = Rejection{label, witness(ul), jump,
                                    "one-sided order-" + std::to_string(order) +
                                        " r-derivatives of the even extension differ"};
          return out;
        }
      }
    }
  }

  // a3: odd extension smooth, or even extension smooth with a3(u,l,0) = 0.
  const Expr odd = detail::odd_extension(f.a3);
  const Expr even = detail::even_extension(f.a3);
  bool odd_ok = true, even_ok = true;
  Rejection odd_fail, even_fail;
  for (const auto& ul : base_link_points) {
    const Env env = env_at(ul);
    const double value = eval(f.a3, env);
    const double scale = std::max(1.0, std::abs(value));
    if (odd_ok) {
      if (!(std::abs(value) <= tol)) {
        odd_ok = false;
        odd_fail = {"a3", witness(ul), value, "a3(u,l,0) != 0"};
      } else {
        const double jump = detail::one_sided_jump(odd, env, 2, fd_step);
        if (!(std::abs(jump) <= tol * scale)) {
          odd_ok = false;
          odd_fail = {"a3", witness(ul), jump, "odd extension has an order-2 jump"};
        }
      }
    }
    if (even_ok) {
      if (!(std::abs(value) <= tol)) {
        even_ok = false;
        even_fail = {"a3", witness(ul), value, "a3(u,l,0) != 0"};
      } else {
        for (int order : {1, 3}) {
          const double jump = detail::one_sided_jump(even, env, order, fd_step);
          if (!(std::abs(jump) <= tol * scale)) {
            even_ok = false;
            even_fail = {"a3", witness(ul), jump,
                         "even extension has an order-" + std::to_string(order) + " jump"};
            break;
          }
        }
      }
    }
    if (!odd_ok && !even_ok) break;
  }
  if (odd_ok)
    out.kind = LiftKind::OddA3;
  else if (even_ok)
    out.kind = LiftKind::EvenA3Zero;
  else
    out.rejection = odd_fail;
  return out;
}

/// Lift of a pem morphism to U x L x R.
struct LiftedMap {
  PemMorphism f;
  LiftKind kind = LiftKind::OddA3;
  Perm sigma = Perm::identity;
  std::vector<Expr> a1;  // over (u, l, t)
  std::vector<Expr> a2;
  Expr a3 = Expr::number(0.0);

  std::vector<std::string> input_names() const {
    auto n = f.base.names();
    for (const auto& l : f.link.names()) n.push_back(l);
    n.push_back(kHeight);
    return n;
  }

  /// (u', l', t') without periodic reduction.
  Point raw(const Point& ult) const {
    const Env env = make_env(input_names(), ult);
    Point out = eval_all(a1, env);
    for (double v : eval_all(a2, env)) out.push_back(v);
    out.push_back(eval(a3, env));
    return out;
  }

  TubeLift operator()(const std::string& target_chart, const Point& u, const Point& l, double t) const {
    Point in = u;
    in.insert(in.end(), l.begin(), l.end());
    in.push_back(t);
    const Point v = raw(in);
    const std::size_t nu = f.target_base.dim(), nl = f.target_link.dim();
    return TubeLift{target_chart, f.target_base.reduce(Point(v.begin(), v.begin() + static_cast<long>(nu))),
                    f.target_link.reduce(Point(v.begin() + static_cast<long>(nu),
                                               v.begin() + static_cast<long>(nu + nl))),
                    v.back()};
  }
};

/// Builds the lift by the parity rule; a swap composes with t -> -t.
inline LiftedMap lift_morphism(const PemMorphism& f, const LiftCheck& check, Perm sigma = Perm::identity) {
  if (!check.kind) {
    const auto& r = *check.rejection;
    throw NotLiftable(f.id, "morphism '" + f.id + "' is not liftable: " + r.component + ": " + r.reason);
  }
  LiftedMap m;
  m.f = f;
  m.kind = *check.kind;
  m.sigma = sigma;
  for (const auto& e : f.a1) m.a1.push_back(detail::even_extension(e));
  for (const auto& e : f.a2) m.a2.push_back(detail::even_extension(e));
  m.a3 = m.kind == LiftKind::OddA3 ? detail::odd_extension(f.a3) : detail::even_extension(f.a3);
  if (sigma == Perm::swap) m.a3 = Expr::unary(Op::neg, m.a3);
  return m;
}

/// c' o f~ = f o c on sampled (u, l, t).
inline Check verify_lift_square(const LiftedMap& m, const std::vector<Point>& ult_points, double tol,
                                const std::string& name = "lift.square") {
  Tracker tr(name, "lifting.local", tol);
  const std::size_t nu = m.f.base.dim(), nl = m.f.link.dim();
  for (const auto& p : ult_points) {
    const Point u(p.begin(), p.begin() + static_cast<long>(nu));
    const Point l(p.begin() + static_cast<long>(nu), p.begin() + static_cast<long>(nu + nl));
    const double t = p.back();
    const TubeLift lifted = m("", u, l, t);
    auto [u1, c1] = canonical_chart_unfold(lifted.u, lifted.l, lifted.t);
    auto [u0, c0] = canonical_chart_unfold(u, l, t);
    auto [u2, c2] = m.f(u0, c0);
    tr.observe(std::max(m.f.target_base.distance(u1, u2), cone_distance(m.f.target_link, c1, c2)), p);
  }
  return tr.finish();
}

// ---------------------------------------------------------------------------
// Cocycle compatibility

/// Three-equation form of f' o phi = phi' o f, where phi = (u,[g(u)(l),r])
/// on the source and phi' = (u,[g'(u)(l),r]) on the target. `points` are
/// (u, l, r) with r > 0. The equation verdict and the direct verdict must
/// agree at every point.
inline Report check_cocycle_compat(const PemMorphism& f, const PemMorphism& fp, const SmoothMapExpr& g,
                                   const SmoothMapExpr& gp, const std::vector<Point>& points, double tol,
                                   double agreement_tol = 1e-8) {
  f.check_dims();
  fp.check_dims();
  if (f.base.dim() != fp.base.dim() || f.link.dim() != fp.link.dim() ||
      f.target_base.dim() != fp.target_base.dim() || f.target_link.dim() != fp.target_link.dim())
    throw ConfigError("morphisms '" + f.id + "' and '" + fp.id + "' have mismatched pem dimensions");
  if (g.input.dim() != f.base.dim() + f.link.dim() || g.output.dim() != f.link.dim() ||
      gp.input.dim() != f.target_base.dim() + f.target_link.dim() || gp.output.dim() != f.target_link.dim())
    throw ConfigError("cocycle dimensions do not match morphisms '" + f.id + "' and '" + fp.id + "'");

  const Domain& ub = f.target_base;
  const Domain& lb = f.target_link;
  const std::size_t nu = f.base.dim(), nl = f.link.dim();
  Tracker e1("compat.e1", "lifting.cocycle_commutation", tol);
  Tracker e2("compat.e2", "lifting.cocycle_commutation", tol);
  Tracker e3("compat.e3", "lifting.cocycle_commutation", tol);
  Tracker direct("compat.direct", "lifting.cocycle_commutation", tol);
  Tracker agree("compat.agreement", "lifting.cocycle_commutation", agreement_tol);
  for (const auto& p : points) {
    const Point u(p.begin(), p.begin() + static_cast<long>(nu));
    const Point l(p.begin() + static_cast<long>(nu), p.begin() + static_cast<long>(nu + nl));
    const double r = p.back();
    Point ul = u;
    ul.insert(ul.end(), l.begin(), l.end());
    const Point gl = g(ul);

    const Point a = f.raw(u, l, r);    // f(u,l,r)
    const Point b = fp.raw(u, gl, r);  // f'(u, g(u) l, r)
    const Point a1(a.begin(), a.begin() + static_cast<long>(ub.dim()));
    const Point a2(a.begin() + static_cast<long>(ub.dim()), a.end() - 1);
    const Point b1(b.begin(), b.begin() + static_cast<long>(ub.dim()));
    const Point b2(b.begin() + static_cast<long>(ub.dim()), b.end() - 1);

    Point a1a2 = a1;
    a1a2.insert(a1a2.end(), a2.begin(), a2.end());
    const Point ga2 = gp(a1a2);  // g'(a1)(a2)

    const double r1 = ub.distance(a1, b1);
    const double r2 = lb.distance(ga2, b2);
    const double r3 = std::abs(a.back() - b.back());
    e1.observe(r1, p);
    e2.observe(r2, p);
    e3.observe(r3, p);

    // Direct composition: f'(phi(x)) against phi'(f(x)) as cone points.
    auto [fu, fc] = fp(u, ConePoint{gl, r});
    const auto fx = f(u, ConePoint{l, r});
    Point fx_ul = fx.first;
    fx_ul.insert(fx_ul.end(), fx.second.link.begin(), fx.second.link.end());
    const ConePoint phic{gp(fx_ul), fx.second.r};
    const double d = std::max(ub.distance(fu, fx.first), cone_distance(lb, fc, phic));
    direct.observe(d, p);

    const double eqs = std::max({r1, r2, r3});
    const bool verdict_eq = eqs <= tol, verdict_direct = d <= tol;
    agree.observe(verdict_eq == verdict_direct ? std::abs(eqs - d) : std::numeric_limits<double>::infinity(), p);
  }
  Report rep;
  for (auto* t : {&e1, &e2, &e3, &direct, &agree}) rep.add(t->finish());
  return rep;
}

}  // namespace tmunfold
