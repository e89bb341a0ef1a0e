#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace steiner;

using oracle::random_leave;

TEST(Leave, FindsTheFanoPlane) {
  const DecompositionResult res = decompose_exact(DecompositionProblem(Hypergraph::complete(7, 2), 3));
  ASSERT_EQ(res.status, SolveStatus::kSolved);
  EXPECT_EQ(res.edges.size(), 7u);
  EXPECT_TRUE(verify_decomposition(Hypergraph::complete(7, 2), res.edges));
  EXPECT_TRUE(verify_steiner(Design{res.edges}));
}

TEST(Leave, CountsSteinerTripleSystems) {
  // 30 labelled STS(7), 840 labelled STS(9)
  EXPECT_EQ(count_decompositions(Hypergraph::complete(7, 2), 3), 30u);
  EXPECT_EQ(oracle::count_decompositions(Hypergraph::complete(7, 2), 3), 30u);
  EXPECT_EQ(count_decompositions(Hypergraph::complete(9, 2), 3), 840u);
  EXPECT_EQ(count_decompositions(Hypergraph::complete(9, 2), 3, 5), 5u);
  EXPECT_EQ(count_decompositions(Hypergraph::complete(6, 2), 3), 0u);
  // K_4^(3) on 8 points: the 30 labelled SQS(8)
  EXPECT_EQ(count_decompositions(Hypergraph::complete(8, 3), 4), 30u);
}

TEST(Leave, FeasibilityAgreesWithOracleOnSmallInstances) {
  std::mt19937_64 g(17);
  int solved = 0, infeasible = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 6 + static_cast<int>(g() % 4);
    const Hypergraph l = random_leave(n, g);
    DecompositionProblem p(l, 3);
    p.seed = static_cast<std::uint64_t>(trial);
    p.restarts = 2;
    const DecompositionResult res = decompose_exact(p);
    ASSERT_NE(res.status, SolveStatus::kTimeout);
    const bool expected = oracle::decomposable(l, 3);
    ASSERT_EQ(res.status == SolveStatus::kSolved, expected) << trial;
    EXPECT_EQ(count_decompositions(l, 3), oracle::count_decompositions(l, 3));
    if (expected) {
      EXPECT_TRUE(verify_decomposition(l, res.edges));
      ++solved;
    } else {
      ++infeasible;
    }
  }
  EXPECT_GT(solved, 50);
  EXPECT_GT(infeasible, 50);
}

TEST(Leave, RestartsAndSeedsStillSolve) {
  const Hypergraph l = Hypergraph::complete(13, 2);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    DecompositionProblem p(l, 3);
    p.seed = seed;
    p.first_node_limit = 1;
    p.restarts = 6;
    const DecompositionResult res = decompose_exact(p);
    ASSERT_EQ(res.status, SolveStatus::kSolved);
    EXPECT_EQ(res.edges.size(), 26u);
    EXPECT_EQ(decompose_exact(p).edges, res.edges);
  }
}

TEST(Leave, PreferredCandidatesComeFirst) {
  // with one Fano plane's triples ordered first, every seed returns it
  const Hypergraph l = Hypergraph::complete(7, 2);
  const Hypergraph first = decompose_exact(DecompositionProblem(l, 3)).edges;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    DecompositionProblem p(l, 3);
    p.seed = seed;
    p.prefer = &first;
    EXPECT_EQ(decompose_exact(p).edges, first);
  }
}

TEST(Leave, VerifyRejectsBadDecompositions) {
  const Hypergraph l = Hypergraph::complete(7, 2);
  const Hypergraph s = decompose_exact(DecompositionProblem(l, 3)).edges;
  std::vector<Edge> fewer = s.edges();
  fewer.pop_back();
  EXPECT_FALSE(verify_decomposition(l, Hypergraph(7, 3, fewer)));
  std::vector<Edge> overlap = s.edges();
  // any triple outside an STS(7) shares a pair with it
  overlap.push_back(s.contains(Edge{0, 1, 2}) ? Edge{0, 1, 3} : Edge{0, 1, 2});
  EXPECT_FALSE(verify_decomposition(l, Hypergraph(7, 3, overlap)));
  EXPECT_EQ(decompose_exact(DecompositionProblem(Hypergraph::complete(6, 2), 3)).reason, "not k-divisible");
  EXPECT_EQ(decompose_exact(DecompositionProblem(Hypergraph(9, 2), 3)).status, SolveStatus::kSolved);
  EXPECT_THROW(decompose_exact(DecompositionProblem(Hypergraph::complete(7, 3), 3)), Error);
}
