#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "tmunfold/domain.hpp"
#include "tmunfold/sampling.hpp"

using namespace tmunfold;

constexpr double kTwoPi = 2 * std::numbers::pi;

TEST(Domain, ParseBoxAndFlags) {
  const Domain d = parse_domain("l in [0, 2*pi) periodic; s in [-6, 2]");
  ASSERT_EQ(d.dim(), 2u);
  EXPECT_EQ(d.names(), (std::vector<std::string>{"l", "s"}));
  EXPECT_TRUE(d[0].periodic);
  EXPECT_NEAR(d[0].period, kTwoPi, 1e-15);
  EXPECT_FALSE(d[1].periodic);
  EXPECT_DOUBLE_EQ(d[1].lower, -6.0);
  EXPECT_EQ(parse_domain("").dim(), 0u);
  EXPECT_THROW(parse_domain("x [0,1]"), ConfigError);
  EXPECT_THROW(parse_domain("x in [0,1] wrapped"), ConfigError);
  EXPECT_THROW(parse_domain("x in [0,1]; x in [0,2]"), ConfigError);
}

TEST(Domain, PeriodicReduceAndDistance) {
  const Domain d = parse_domain("l in [0, 2*pi) periodic");
  EXPECT_NEAR(d[0].reduce(-0.5), kTwoPi - 0.5, 1e-12);
  EXPECT_NEAR(d[0].reduce(kTwoPi + 0.25), 0.25, 1e-12);
  EXPECT_NEAR(d[0].distance(0.1, kTwoPi - 0.1), 0.2, 1e-12);
  EXPECT_TRUE(d.contains({100.0}));
}

TEST(Domain, SubArcContains) {
  const Domain parent = parse_domain("l in [0, 2*pi) periodic");
  const Domain arc = parse_subdomain("l in [-1, 1]", parent);
  EXPECT_TRUE(arc.contains({kTwoPi - 0.5}));
  EXPECT_TRUE(arc.contains({0.5}));
  EXPECT_FALSE(arc.contains({2.0}));
  EXPECT_THROW(parse_subdomain("q in [0, 1]", parent), ConfigError);
}

TEST(Domain, Intersect) {
  const Domain d = parse_domain("u in [0, 6]; l in [0, 2*pi) periodic");
  auto box = d.intersect(parse_domain("u in [3, 4]"));
  ASSERT_TRUE(box);
  EXPECT_DOUBLE_EQ((*box)[0].lower, 3.0);
  EXPECT_DOUBLE_EQ((*box)[0].upper, 4.0);
  EXPECT_FALSE(d.intersect(parse_domain("u in [7, 8]")));
}

TEST(Sampler, GridIsCellCentred) {
  const Domain d = parse_domain("x in [0, 1]");
  const auto g = Sampler::grid_per_axis(d, 4);
  ASSERT_EQ(g.size(), 4u);
  EXPECT_DOUBLE_EQ(g[0][0], 0.125);
  EXPECT_DOUBLE_EQ(g[3][0], 0.875);
}

TEST(Sampler, GridSizeTracksTarget) {
  const Domain d = parse_domain("x in [0, 1]; y in [0, 1]");
  EXPECT_EQ(Sampler(1000, 1).grid(d).size(), 32u * 32u);
  EXPECT_EQ(Sampler(1000, 1).grid(parse_domain("")).size(), 1u);
}

TEST(Sampler, RandomIsSeededAndInside) {
  const Domain d = parse_domain("x in [-1, 1]; l in [0, 2*pi) periodic");
  const auto a = Sampler(500, 42).random(d, 7);
  const auto b = Sampler(500, 42).random(d, 7);
  const auto c = Sampler(500, 43).random(d, 7);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  EXPECT_NE(a, Sampler(500, 42).random(d, 8));
  ASSERT_EQ(a.size(), 500u);
  for (const auto& p : a) EXPECT_TRUE(d.contains(p));
}

TEST(Sampler, StreamIdStable) {
  EXPECT_EQ(stream_id(""), 1469598103934665603ull);
  EXPECT_NE(stream_id("a"), stream_id("b"));
}
