#include <gtest/gtest.h>

#include <cmath>

#include "common.hpp"
#include "oracles.hpp"
#include "udkit/mst.hpp"

using namespace udkit;

TEST(Mst, SmallHandExamples) {
  // Root 0 and tokens 1..3; the best tree is 0->2, 2->1, 2->3.
  ScoreMatrix s(4, std::vector<double>(4, kNoArc));
  s[0][1] = 5;
  s[0][2] = 10;
  s[0][3] = 1;
  s[2][1] = 6;
  s[1][2] = 9;
  s[2][3] = 2;
  s[1][3] = 1;
  auto h = max_arborescence(s);
  EXPECT_EQ(h, (std::vector<int>{-1, 2, 0, 2}));
  EXPECT_DOUBLE_EQ(arborescence_weight(s, h), 18);

  // A two-cycle 1<->2 that must be broken.
  ScoreMatrix c(3, std::vector<double>(3, kNoArc));
  c[0][1] = 1;
  c[0][2] = 1;
  c[1][2] = 10;
  c[2][1] = 10;
  auto hc = max_arborescence(c);
  EXPECT_DOUBLE_EQ(arborescence_weight(c, hc), 11);
}

TEST(Mst, MatchesExhaustiveEnumeration) {
  Rng rng(2024);
  int agree = 0;
  double t = testing_support::seconds([&] {
    for (int trial = 0; trial < 1000; ++trial) {
      int n = 1 + static_cast<int>(rng.index(5));
      auto g = oracle::random_digraph(rng, n);
      auto arcs = decode_mst(g);
      auto s = oracle::matrix_of(ensure_reachable(g));
      ASSERT_TRUE(oracle::is_arborescence(n, arcs)) << trial;
      double got = oracle::weight_of(s, arcs);
      double best = oracle::best_arborescence_weight(s);
      EXPECT_NEAR(got, best, 1e-9) << "trial " << trial;
      agree += std::abs(got - best) < 1e-9;
    }
  });
  EXPECT_EQ(agree, 1000);
  EXPECT_LT(t, 10.0);
}

TEST(Mst, EnsureReachableAddsMinimalRootArcs) {
  WeightedDigraph g(3);
  g.add_weight(1, 2, 1.0);
  auto r = ensure_reachable(g);
  EXPECT_TRUE(r.has_arc(0, 1));
  EXPECT_FALSE(r.has_arc(0, 2));
  EXPECT_TRUE(r.has_arc(0, 3));
  EXPECT_DOUBLE_EQ(r.weight(0, 1), kReachabilityEpsilon);
  auto arcs = decode_mst(g);
  EXPECT_EQ(arcs, (std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {0, 3}}));
}

TEST(Mst, Errors) {
  EXPECT_THROW(decode_mst(WeightedDigraph(0)), DataError);
  WeightedDigraph g(2);
  EXPECT_THROW(g.add_weight(1, 1, 1.0), DataError);
  EXPECT_THROW(g.add_weight(0, 3, 1.0), DataError);
  EXPECT_THROW(g.add_weight(0, 1, -1.0), DataError);
  EXPECT_THROW(max_arborescence({{0}}), DataError);
}
