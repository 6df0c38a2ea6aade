#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "tmunfold/config.hpp"

using namespace tmunfold;

namespace {

Config load(const std::string& name) { return load_config(std::string(TMUNFOLD_CONFIG_DIR) + "/" + name); }

UnfoldingModel model(const std::string& file) {
  return build_primary_unfolding(load(file).spaces.at(0), Sampler(256, 42), 1e-9);
}

// Oracle for the cone on S^1: L(l, t) = [l mod 2pi, |t|], written from scratch.
std::pair<double, double> cone_oracle(double l, double t) {
  const double two_pi = 2 * std::numbers::pi;
  double m = std::fmod(l, two_pi);
  if (m < 0) m += two_pi;
  return {m, t < 0 ? -t : t};
}

}  // namespace

TEST(ChartUnfold, Example) {
  auto [u, c] = canonical_chart_unfold({1.5}, {0.2}, -2.0);
  EXPECT_EQ(u, Point{1.5});
  EXPECT_EQ(c.link, Point{0.2});
  EXPECT_EQ(c.r, 2.0);
}

TEST(Project, Example) {
  const UnfoldingModel m = model("rotation_tube.conf");
  const auto x = std::get<TubePoint>(m.project(TubeLift{"a", {1.0}, {0.3}, -0.5}));
  EXPECT_EQ(x.chart, "a");
  EXPECT_EQ(x.cone.r, 0.5);
  EXPECT_THROW(m.project(TubeLift{"zz", {1.0}, {0.3}, 0.1}), OutOfDomain);
  EXPECT_THROW(m.project(TubeLift{"a", {5.0}, {0.3}, 0.1}), OutOfDomain);
}

TEST(Project, ConeMatchesOracle) {
  const UnfoldingModel m = model("cone_s1.conf");
  const Domain lt = parse_domain("l in [0, 2*pi); t in [-1, 1]");
  for (const auto& p : Sampler(1000, 42).grid(lt)) {
    const auto x = std::get<TubePoint>(m.project(TubeLift{"alpha", {}, {p[0]}, p[1]}));
    const auto [l, r] = cone_oracle(p[0], p[1]);
    EXPECT_LT(std::abs(x.cone.link[0] - l), 1e-12);
    EXPECT_EQ(x.cone.r, r);
  }
}

TEST(Fiber, ConeRegularPointHasTwoClasses) {
  const UnfoldingModel m = model("cone_s1.conf");
  const auto f = m.fiber(RegularPoint{"v", {1.0, std::log(0.4)}}, 8);
  ASSERT_EQ(f.size(), 2u);
  EXPECT_NE(bubble_of(f[0]), bubble_of(f[1]));
  const auto t = m.fiber(TubePoint{"alpha", {}, ConePoint{{2.0}, 0.4}}, 8);
  ASSERT_EQ(t.size(), 2u);
}

TEST(Fiber, ConeVertexIsTheLink) {
  const UnfoldingModel m = model("cone_s1.conf");
  const auto f = m.fiber(TubePoint{"alpha", {}, ConePoint{{0.0}, 0.0}}, 16);
  EXPECT_EQ(f.size(), 16u);
  for (const auto& p : f) EXPECT_EQ(std::get<TubeLift>(p).t, 0.0);
}

TEST(Fiber, IntervalDouble) {
  const UnfoldingModel m = model("interval_double.conf");
  for (double x : {0.05, 0.3, 0.49, 0.51, 0.8, 0.99}) EXPECT_EQ(m.fiber(RegularPoint{"x", {x}}, 8).size(), 2u) << x;
  EXPECT_EQ(m.fiber(TubePoint{"origin", {}, ConePoint{{}, 0.0}}, 8).size(), 1u);
  EXPECT_THROW(m.fiber(RegularPoint{"x", {1.5}}, 8), OutOfDomain);
}

TEST(Fiber, TwoChartStratumPointCountsLink) {
  const UnfoldingModel m = model("rotation_tube.conf");
  // u = 3.5 lies in both charts; the cocycle identifies link copies.
  EXPECT_EQ(m.fiber(TubePoint{"a", {3.5}, ConePoint{{0.0}, 0.0}}, 12).size(), 12u);
  EXPECT_EQ(m.fiber(TubePoint{"a", {3.5}, ConePoint{{0.0}, 0.3}}, 12).size(), 2u);
}

TEST(Equivalent, CocycleHopKeepsT) {
  const UnfoldingModel m = model("rotation_tube.conf");
  const TubeLift p{"a", {3.5}, {1.0}, 0.4};
  const TubeLift q{"b", {3.5}, {1.0 + 3.5}, 0.4};
  EXPECT_TRUE(m.equivalent(p, q, 1e-12));
  EXPECT_FALSE(m.equivalent(p, TubeLift{"a", {3.5}, {1.0}, -0.4}, 1e-6));
  EXPECT_LT(distance(m.space(), m.project(p), m.project(q)), 1e-9);
}

TEST(Equivalent, RegularBubbleExchangesT) {
  const UnfoldingModel m = model("cone_s1.conf");
  const TubeLift p{"alpha", {}, {1.0}, -0.25};
  EXPECT_TRUE(m.equivalent(p, RegularLift{-1, "v", {1.0, std::log(0.25)}}, 1e-12));
  EXPECT_FALSE(m.equivalent(p, RegularLift{1, "v", {1.0, std::log(0.25)}}, 1e-6));
}

// No sampled relation ever crosses bubbles.
TEST(Equivalent, BubbleInvarianceProperty) {
  const UnfoldingModel m = model("rotation_tube.conf");
  const Domain box = parse_domain("u in [0, 4]; l in [0, 2*pi); t in [-1, 1]");
  for (const auto& x : Sampler(500, 9).random(box)) {
    const TubeLift p{"a", {x[0]}, {x[1]}, x[2]};
    for (const auto& q : m.representations(p)) {
      EXPECT_EQ(bubble_of(q), bubble_of(p));
      EXPECT_LT(distance(m.space(), m.project(p), m.project(q)), 1e-9);
      EXPECT_EQ(UnfoldingModel::tau_tilde(std::get<TubeLift>(q)), p.u);
    }
  }
}

TEST(Axioms, AllFixturesPass) {
  for (const char* f : {"cone_s1.conf", "interval_double.conf", "rotation_tube.conf", "gauge.conf"}) {
    for (const auto& s : load(f).spaces) {
      const UnfoldingModel m = build_primary_unfolding(s, Sampler(400, 42), 1e-9);
      const Report r = verify_unfolding_axioms(m, Sampler(400, 42), 1e-9);
      EXPECT_TRUE(r.passed()) << f;
      ASSERT_NE(r.find("unfold.covering"), nullptr);
      EXPECT_EQ(r.find("unfold.covering")->residual, 0.0);
      if (s.singular) {
        EXPECT_LT(r.find("unfold.chart_square")->residual, 1e-9);
        EXPECT_EQ(r.find("unfold.properness")->status, Status::proxy);
      }
    }
  }
}

TEST(Build, RejectsBrokenCocycle) {
  SpaceSpec s = load("rotation_tube.conf").spaces.at(0);
  s.cocycles[0].g_inv.exprs[0] = parse_expr("l - u + 0.1");
  EXPECT_THROW(build_primary_unfolding(s), ValidationError);
}

TEST(Restrict, HalfTubeKeepsFibers) {
  const UnfoldingModel m = model("rotation_tube.conf");
  Restriction a = full_restriction(m.space());
  a.tube.at("a") = parse_domain("u in [1, 3.8]");
  a.tube.erase("b");
  a.max_radius = 0.5;
  const UnfoldingModel r = restrict(m, a);
  EXPECT_TRUE(verify_unfolding_axioms(r, Sampler(300, 1), 1e-9).passed());
  for (const auto& x : Sampler(200, 4).random(parse_domain("u in [1, 3.8]; l in [0, 2*pi); r in [0, 0.5]"))) {
    const TubePoint p{"a", {x[0]}, ConePoint{{x[1]}, x[2]}};
    EXPECT_EQ(r.fiber(p, 8).size(), m.fiber(p, 8).size());
  }
  Restriction none;
  EXPECT_THROW(restrict(m, none), EmptyRestriction);
}

TEST(Export, HeaderAndDigits) {
  const UnfoldingModel m = model("cone_s1.conf");
  std::ostringstream a, b;
  export_pointcloud(m, Sampler(20, 7), a);
  export_pointcloud(m, Sampler(20, 7), b);
  EXPECT_EQ(a.str(), b.str());
  std::istringstream in(a.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "chart,bubble,l,t,x_l,x_r");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 5);
  }
  EXPECT_EQ(rows, 20u);
  EXPECT_EQ(a.str().find('\r'), std::string::npos);
}
