#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "tmunfold/config.hpp"

using namespace tmunfold;

namespace {

Config load(const std::string& name) { return load_config(std::string(TMUNFOLD_CONFIG_DIR) + "/" + name); }

// Closed-form preimage count of (l, r) under (theta, phi) -> (2 theta, |sin(phi/2)|)
// with theta in [0, pi), phi in [-pi, pi): one theta, and phi = +-2 asin(r).
std::size_t torus_preimages(double l, double r) {
  std::size_t thetas = 0;
  for (int k = 0; k < 2; ++k) {
    const double th = 0.5 * l + k * std::numbers::pi;
    if (th >= 0 && th < std::numbers::pi) ++thetas;
  }
  std::size_t phis = 0;
  if (r > 0 && r < 1) phis = 2;
  else if (r == 0) phis = 1;
  return thetas * phis;
}

}  // namespace

TEST(Candidate, TorusOracleCountsTwo) {
  for (const auto& p : Sampler(1000, 42).grid(parse_domain("l in [0, 2*pi); r in [0, 1]")))
    EXPECT_EQ(torus_preimages(p[0], p[1]), 2u);
}

TEST(Candidate, TorusPasses) {
  const Config cfg = load("torus_rp2.conf");
  const CandidateUnfolding& c = *cfg.candidate("torus");
  const Report r = verify_candidate(c, *cfg.space(c.target), Sampler(1000, 42), 1e-6);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.find("candidate.covering")->residual, 0.0);
  EXPECT_LE(r.find("candidate.hypersurface")->residual, 1e-6);
  EXPECT_GT(r.find("candidate.unfolded_chart")->residual, 1e-6);
}

TEST(Candidate, SquaredHeightDegenerates) {
  const Config cfg = load("squared_height.conf");
  const CandidateUnfolding& c = *cfg.candidate("squared");
  const Report r = verify_candidate(c, *cfg.space(c.target), Sampler(1000, 42), 1e-6);
  EXPECT_FALSE(r.passed());
  const Check* j = r.find("candidate.unfolded_chart");
  ASSERT_NE(j, nullptr);
  EXPECT_EQ(j->status, Status::fail);
  ASSERT_EQ(j->witness.size(), 2u);
  EXPECT_LT(std::abs(j->witness[1]), 1e-3);
}

TEST(Candidate, DimensionMismatch) {
  Config cfg = load("torus_rp2.conf");
  CandidateUnfolding c = *cfg.candidate("torus");
  c.map.pop_back();
  EXPECT_THROW(verify_candidate(c, *cfg.space(c.target), Sampler(10, 1), 1e-6), ConfigError);
}

TEST(Candidate, SignedHeight) {
  EXPECT_TRUE(detail::signed_height(parse_expr("abs(sin(phi/2))")).structurally_equal(parse_expr("sin(phi/2)")));
  EXPECT_TRUE(detail::signed_height(parse_expr("s^2")).structurally_equal(parse_expr("s^2")));
}

TEST(Collar, CanonicalRecoversTau) {
  const Config cfg = load("collars.conf");
  const UnfoldingModel m = build_primary_unfolding(*cfg.space("rot"));
  const Report r = tube_from_unfolding(m, *cfg.collar("canonical"), Sampler(1000, 42), 1e-9);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.find("tube.tau_section")->residual, 0.0);
  EXPECT_EQ(r.find("tube.tau_projection")->residual, 0.0);
}

TEST(Collar, ReparametrizedKeepsTransitionForm) {
  const Config cfg = load("collars.conf");
  const UnfoldingModel m = build_primary_unfolding(*cfg.space("rot"));
  const Report r = tube_from_unfolding(m, *cfg.collar("reparam"), Sampler(1000, 42), 1e-6);
  EXPECT_TRUE(r.passed());
  for (const char* n : {"tube.transition_form.base", "tube.transition_form.link_radium_independent",
                        "tube.transition_form.radial_only", "tube.transition_form.cocycle"}) {
    ASSERT_NE(r.find(n), nullptr) << n;
    EXPECT_LT(r.find(n)->residual, 1e-6) << n;
  }
}

TEST(Collar, MovingHypersurfaceRejected) {
  const Config cfg = load("collar_bad.conf");
  const UnfoldingModel m = build_primary_unfolding(cfg.spaces.at(0));
  EXPECT_THROW(tube_from_unfolding(m, *cfg.collar("shifted"), Sampler(100, 42), 1e-9), CollarError);
}

TEST(Collar, NoStratum) {
  Config cfg = load("collars.conf");
  SpaceSpec s = *cfg.space("rot");
  s.charts.clear();
  s.cocycles.clear();
  s.singular = false;
  const UnfoldingModel m = build_primary_unfolding(s);
  EXPECT_THROW(tube_from_unfolding(m, *cfg.collar("canonical"), Sampler(10, 1), 1e-9), CollarError);
}
