// Acceptance run: one line per criterion, exit 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "tmunfold/tmunfold.hpp"

using namespace tmunfold;

namespace {

const std::string kDir = TMUNFOLD_CONFIG_DIR;

Config load(const std::string& f) { return load_config(kDir + "/" + f); }

int failures = 0;

void line(int n, bool ok, const std::string& what) {
  std::printf("[%s] %2d  %s\n", ok ? "PASS" : "FAIL", n, what.c_str());
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const Check& need(const Report& r, const std::string& name) {
  static const Check missing{"missing", "", Status::fail, std::numeric_limits<double>::infinity(), {}, ""};
  const Check* c = r.find(name);
  return c ? *c : missing;
}

// 1. cone on S^1: fibers, chart square, runtime.
void cone_s1() {
  const auto t0 = std::chrono::steady_clock::now();
  const Config cfg = load("cone_s1.conf");
  const UnfoldingModel m = build_primary_unfolding(cfg.spaces.at(0), Sampler(1000, 42), 1e-9);
  const Sampler s(1000, 42);
  std::size_t bad_fibers = 0;
  for (const auto& x : s.random(m.space().regular.at(0).domain, 1))
    if (m.fiber(RegularPoint{"v", x}, 8).size() != 2) ++bad_fibers;
  double sq = 0.0;
  const double two_pi = 2 * std::numbers::pi;
  for (const auto& p : s.grid(parse_domain("l in [0, 2*pi); t in [-1, 1]"))) {
    const auto x = std::get<TubePoint>(m.project(TubeLift{"alpha", {}, {p[0]}, p[1]}));
    // alpha o c by hand: (l mod 2pi, |t|)
    double l = std::fmod(p[0], two_pi);
    if (l < 0) l += two_pi;
    sq = std::max({sq, std::abs(x.cone.link[0] - l), std::abs(x.cone.r - std::abs(p[1]))});
  }
  const double secs = seconds_since(t0);
  line(1, bad_fibers == 0 && sq < 1e-9 && secs < 5.0,
       fmt("cone_s1: fiber != 2 at %.0f of 1000 regular points; square residual %.3g (< 1e-9); %.2f s (< 5 s)",
           double(bad_fibers), sq, secs));
}

// 2. double of the interval.
void interval_double() {
  const UnfoldingModel m = build_primary_unfolding(load("interval_double.conf").spaces.at(0), Sampler(1000, 42), 1e-12);
  std::size_t bad = 0;
  for (const auto& x : Sampler(1000, 42).random(parse_domain("x in [0, 1]")))
    if (m.fiber(RegularPoint{"x", x}, 8, 1e-12).size() != 2) ++bad;
  const std::size_t boundary = m.fiber(TubePoint{"origin", {}, ConePoint{{}, 0.0}}, 8, 1e-12).size();
  const Report r = verify_unfolding_axioms(m, Sampler(1000, 42), 1e-12);
  const double res = std::max(need(r, "unfold.chart_square").residual, need(r, "unfold.projection_compat").residual);
  line(2, bad == 0 && boundary == 1 && res < 1e-12 && r.passed(),
       fmt("interval_double: interior fiber != 2 at %.0f of 1000; boundary fiber %.0f (= 1); residual %.3g (< 1e-12)",
           double(bad), double(boundary), res));
}

// 3. torus candidate.
void torus() {
  const Config cfg = load("torus_rp2.conf");
  const CandidateUnfolding& c = *cfg.candidate("torus");
  const Report r = verify_candidate(c, *cfg.space(c.target), Sampler(1000, 42), 1e-6);
  const Check& cov = need(r, "candidate.covering");
  const Check& jac = need(r, "candidate.unfolded_chart");
  const Check& hyp = need(r, "candidate.hypersurface");
  line(3, r.passed() && cov.residual == 0.0,
       fmt("torus_rp2: max |fiber - 2| = %.0f at 1000 samples; min unfolded-chart |det| %.3g; hypersurface "
           "residual %.3g (<= 1e-6)",
           cov.residual, jac.residual, hyp.residual));
}

// 4. cocycle-induced morphisms lift with kind OddA3.
void cocycles() {
  const SpaceSpec s = load("rotation_tube.conf").spaces.at(0);
  bool ok = !s.cocycles.empty();
  double worst = 0.0;
  std::size_t n = 0;
  for (const auto& k : s.cocycles)
    for (const auto* g : {&k.g, &k.g_inv}) {
      for (const auto& box : s.overlap_boxes(k.from, k.to)) {
        PemMorphism f;
        f.id = "g";
        f.base = f.target_base = box;
        f.link = f.target_link = s.link;
        f.a1 = {Expr::variable("u")};
        f.a2 = g->exprs;
        f.a3 = Expr::variable(kRadius);
        const Sampler smp(1000, 42);
        const LiftCheck chk = check_liftable(f, smp.grid(box.product(s.link)));
        ok = ok && chk.kind == LiftKind::OddA3;
        if (!chk.liftable()) continue;
        const Check sq = verify_lift_square(lift_morphism(f, chk),
                                            smp.grid(box.product(s.link).product(parse_domain("t in [-1, 1]"))), 1e-9);
        worst = std::max(worst, sq.residual);
        ok = ok && sq.residual < 1e-9;
        ++n;
      }
    }
  line(4, ok && n > 0, fmt("rotation_tube: %.0f cocycle-induced morphisms, all OddA3; square residual %.3g (< 1e-9)",
                           double(n), worst));
}

// 5. a2 = l + r rejected with a jump of 2 at r = 0.
void rejection() {
  const Config cfg = load("bad_morphism.conf");
  Report rep;
  const auto checks = check_pieces(*cfg.morphism("bad"), *cfg.space("cone"), Sampler(1000, 42), kDefaultFdTol,
                                   kDefaultStepHigher, rep);
  bool ok = checks.size() == 1 && !checks[0].liftable();
  double jump = 0.0, at_r = -1.0;
  std::string comp;
  if (ok) {
    const Rejection& r = *checks[0].rejection;
    jump = std::abs(r.residual);
    at_r = r.point.back();
    comp = r.component;
    ok = std::abs(jump - 2.0) <= 1e-3 && at_r == 0.0 && comp == "a2[0]";
  }
  line(5, ok, "bad_morphism: rejected at " + comp + fmt(" with one-sided jump %.6f (2 +- 1e-3) at r = %.3g", jump, at_r));
}

// 6. equation verdicts agree with the direct composition.
void verdict_agreement() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  std::bernoulli_distribution perturb(0.3);
  const Domain base = parse_domain("u in [0, 4]");
  const Domain link = parse_domain("l in [0, 2*pi) periodic");
  const auto pts = Sampler(40, 42).random(base.product(link).product(parse_domain("r in [0.01, 1]")));
  std::size_t disagree = 0, failing = 0;
  for (int i = 0; i < 1000; ++i) {
    // f: a2 = l + h(u); g = g' = rotation by k u; f' from the equations, sometimes perturbed
    char h[80], g[64], hp[96];
    std::snprintf(h, sizeof h, "%.9f*sin(u) + %.9f*u", c(rng), c(rng));
    std::snprintf(g, sizeof g, "l + %.9f*u", 1.0 + c(rng));
    const double eps = perturb(rng) ? 0.05 * c(rng) : 0.0;
    std::snprintf(hp, sizeof hp, "%s + %.9f", h, eps);
    PemMorphism f;
    f.id = "f";
    f.base = f.target_base = base;
    f.link = f.target_link = link;
    f.a1 = {Expr::variable("u")};
    f.a2 = {parse_expr(std::string("l + ") + h)};
    f.a3 = Expr::variable(kRadius);
    PemMorphism fp = f;
    fp.id = "fp";
    fp.a2 = {parse_expr(std::string("l + ") + hp)};
    const SmoothMapExpr gm{base.product(link), link, {parse_expr(g)}};
    const Report r = check_cocycle_compat(f, fp, gm, gm, pts, 1e-9, 1e-8);
    if (need(r, "compat.agreement").status != Status::pass) ++disagree;
    if (!r.passed()) ++failing;
  }
  line(6, disagree == 0,
       fmt("rotation family: %.0f fixtures x %.0f points; %.0f verdict disagreements (= 0); %.0f fixtures "
           "correctly failing",
           1000.0, double(pts.size()), double(disagree), double(failing)));
}

// 7. stretching by 2 lifts globally.
void stretch() {
  const Config cfg = load("cone_stretch.conf");
  const UnfoldingModel m = build_primary_unfolding(cfg.spaces.at(0));
  const Sampler s(1000, 42);
  bool ok = true;
  double sq = std::numeric_limits<double>::infinity(), det = 0.0;
  try {
    const LiftResult r = lift_tm_morphism(*cfg.morphism("stretch2"), m, m, Perm::identity, s, 1e-9);
    sq = need(r.report, "lift.square").residual;
    const Check j = jacobian_check(*r.lifted, s, 0.5, kDefaultStepHigher);
    det = j.residual;
    ok = r.report.passed() && sq < 1e-9 && j.status == Status::pass && det >= 0.5;
  } catch (const Error& e) {
    ok = false;
  }
  line(7, ok, fmt("stretch2: square residual %.3g (< 1e-9); min |det J| %.6g (>= 0.5) incl. t = 0", sq, det));
}

// 8. uniqueness on the gauge-changed presentation.
void uniqueness() {
  const auto t0 = std::chrono::steady_clock::now();
  const Config cfg = load("gauge.conf");
  const Sampler s(1000, 42);
  const UnfoldingModel a = build_primary_unfolding(*cfg.space("first"), s, 1e-9);
  const UnfoldingModel b = build_primary_unfolding(*cfg.space("second"), s, 1e-9);
  const UniquenessResult u = uniqueness_check(a, b, *cfg.morphism("iota"), *cfg.morphism("iota_inv"), s, 1e-9);
  const double secs = seconds_since(t0);
  line(8, u.passing.size() == 1 && u.composite_residual < 1e-8 && secs < 30.0,
       fmt("gauge: %.0f passing permutation (= 1); composite residual %.3g (< 1e-8) at 1000 samples; %.2f s (< 30 s)",
           double(u.passing.size()), u.composite_residual, secs));
}

// 9. tube recovery from collars.
void collars() {
  const Config cfg = load("collars.conf");
  const Sampler s(1000, 42);
  const UnfoldingModel m = build_primary_unfolding(*cfg.space("rot"), s, 1e-9);
  const Report canon = tube_from_unfolding(m, *cfg.collar("canonical"), s, 1e-6);
  const double tau = std::max(need(canon, "tube.tau_section").residual, need(canon, "tube.tau_projection").residual);
  const Report rep = tube_from_unfolding(m, *cfg.collar("reparam"), s, 1e-6);
  double form = 0.0;
  for (const char* n : {"tube.transition_form.base", "tube.transition_form.link_radium_independent",
                        "tube.transition_form.radial_only", "tube.transition_form.cocycle"})
    form = std::max(form, need(rep, n).residual);
  line(9, canon.passed() && tau == 0.0 && rep.passed() && form < 1e-6,
       fmt("collars: canonical tau residual %.3g (= 0); reparametrized transition-form residual %.3g (< 1e-6)", tau,
           form));
}

// 10. byte-identical reports and exports.
void determinism() {
  std::size_t runs = 0, mismatches = 0;
  for (const char* f : {"cone_s1.conf", "interval_double.conf", "torus_rp2.conf", "rotation_tube.conf",
                        "bad_morphism.conf", "cone_stretch.conf", "gauge.conf", "collars.conf"})
    for (const auto& cmd : commands()) {
      Flags flags;
      flags.seed = 11;
      flags.samples = 200;
      flags.format = cmd == "export" ? Format::text : Format::json;
      std::ostringstream a, b, ea, eb;
      run_file(cmd, kDir + "/" + f, flags, a, ea);
      run_file(cmd, kDir + "/" + f, flags, b, eb);
      ++runs;
      if (a.str() != b.str()) ++mismatches;
    }
  line(10, mismatches == 0,
       fmt("determinism: %.0f command/fixture pairs run twice (json reports, csv exports); %.0f byte mismatches (= 0)",
           double(runs), double(mismatches)));
}

}  // namespace

int main() {
  const std::pair<int, void (*)()> criteria[] = {{1, cone_s1},   {2, interval_double}, {3, torus},
                                                 {4, cocycles},  {5, rejection},       {6, verdict_agreement},
                                                 {7, stretch},   {8, uniqueness},      {9, collars},
                                                 {10, determinism}};
  for (const auto& [n, fn] : criteria) {
    try {
      fn();
    } catch (const std::exception& e) {
      line(n, false, std::string("error: ") + e.what());
    }
  }
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
