#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"

using namespace steiner;

namespace {

FieldVector vec(std::initializer_list<std::uint32_t> v) {
  FieldVector out;
  for (auto x : v) out.push_back(fe(x));
  return out;
}

// Generic GF(q) product of two matrices, used to check that the {0,1}
// compositions agree with ordinary matrix multiplication.
Matrix product(const Matrix& a, const Matrix& b) { return multiply(FieldCtx(2), a, b); }

}  // namespace

TEST(Operators, FamilySizes) {
  for (int k = 2; k <= 6; ++k) {
    const OperatorFamily fam = build_families(k);
    const std::size_t half = std::size_t{1} << (k - 1);
    EXPECT_EQ(fam.vo.size(), static_cast<std::size_t>(k) * (half + 1));
    EXPECT_EQ(fam.of_kind(OperatorKind::kFO1).size(), static_cast<std::size_t>(k));
    EXPECT_EQ(fam.of_kind(OperatorKind::kEO1).size(), half);
    EXPECT_EQ(fam.eo.size(), absorber_edge_count(k));
    // FO2: nonempty even I, even J, i in [k]
    EXPECT_EQ(fam.of_kind(OperatorKind::kFO2).size(), (half - 1) * half * static_cast<std::size_t>(k));
  }
  EXPECT_EQ(build_families(3).vo.size(), 15u);
  EXPECT_EQ(build_families(4).vo.size(), 36u);
  EXPECT_EQ(build_families(3).eo.size(), 25u);
  EXPECT_EQ(build_families(4).eo.size(), 113u);
  EXPECT_THROW(build_families(1), Error);
}

TEST(Operators, MatricesAreTheirCompositions) {
  using namespace ops;
  for (int k = 3; k <= 5; ++k) {
    const OperatorFamily fam = build_families(k);
    const std::uint32_t full = (1u << k) - 1;
    for (const auto& op : fam.fo) {
      Matrix expected;
      if (op.kind == OperatorKind::kFO1) expected = product(projection(k, op.index), edge_selector(k, 0));
      else
        expected = product(product(projection(k, op.index), edge_selector(k, op.outer)),
                           product(associate(k), edge_selector(k, op.inner)));
      ASSERT_EQ(op.matrix, expected) << op.describe();
    }
    for (const auto& op : fam.vo) {
      const Matrix expected = op.kind == OperatorKind::kVO1
                                  ? product(coordinate(k, op.index), edge_selector(k, op.outer))
                                  : product(product(coordinate(k, op.index), edge_selector(k, full)),
                                            product(associate(k), edge_selector(k, op.inner)));
      ASSERT_EQ(op.matrix, expected) << op.describe();
    }
  }
}

TEST(Operators, SelectorsPickCoordinates) {
  const FieldCtx f(3);
  const FieldVector x = vec({1, 2, 4}), a = vec({6, 5, 3});
  FieldVector xa = x;
  xa.insert(xa.end(), a.begin(), a.end());
  EXPECT_EQ(apply(f, ops::edge_selector(3, 0), xa), x);
  EXPECT_EQ(apply(f, ops::edge_selector(3, 7), xa), a);
  EXPECT_EQ(apply(f, ops::edge_selector(3, 1), xa), vec({6, 2, 4}));
  // C maps an edge to (e; sigma + e)
  EXPECT_EQ(apply(f, ops::associate(3), x), vec({1, 2, 4, 6, 5, 3}));
  for (int k = 2; k <= 6; ++k) {
    const FieldCtx g(8);
    for (std::uint32_t s = 0; s < (1u << k); ++s) EXPECT_EQ(rank(g, ops::edge_selector(k, s)), k);
  }
}

TEST(Operators, EdgeImagesMatchCombinatorialAbsorberInGF8) {
  // GF(8) is too small for distinct absorber vertices, but the edge lists built
  // both ways must still agree as sets.
  const auto f = std::make_shared<const FieldCtx>(3);
  std::vector<FieldElement> ident;
  for (std::uint32_t v = 1; v <= 7; ++v) ident.push_back(fe(v));
  const Injection pi(f, ident);
  const FieldVector x = vec({1, 2, 4}), a = vec({6, 5, 3});
  const auto target = pi.preimage(x);
  ASSERT_TRUE(target.has_value());
  const OperatorFamily fam = build_families(3);
  std::set<oracle::Tuple> from_ops, from_absorber;
  for (const auto& op : fam.eo) {
    oracle::Tuple t;
    for (auto v : apply(*f, op, x, a)) t.push_back(v.bits);
    from_ops.insert(oracle::sorted(t));
  }
  // build the gadget combinatorially in value space
  auto edge = [&](const FieldVector& base, const FieldVector& alt, std::uint32_t mask) {
    oracle::Tuple t;
    for (int i = 0; i < 3; ++i) t.push_back(((mask >> i) & 1u) ? alt[i].bits : base[i].bits);
    return oracle::sorted(t);
  };
  for (std::uint32_t m : {1u, 2u, 4u, 7u}) from_absorber.insert(edge(x, a, m));
  for (std::uint32_t m : {3u, 5u, 6u}) {
    FieldVector e(3), w(3);
    for (int i = 0; i < 3; ++i) e[i] = ((m >> i) & 1u) ? a[i] : x[i];
    const FieldElement s = value_sum(e);
    for (int i = 0; i < 3; ++i) w[i] = s + e[i];
    for (std::uint32_t t = 1; t < 8; ++t) from_absorber.insert(edge(e, w, t));
  }
  EXPECT_EQ(from_ops, from_absorber);
}

TEST(Operators, FamilyImagesMatchAbsorbers) {
  const int n = 63;
  const auto f = std::make_shared<const FieldCtx>(7);
  const Hypergraph h = Hypergraph::complete(n, 3);
  const OperatorFamily fam = build_families(3);
  std::mt19937_64 g(17);
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 200; ++seed) {
    const Injection pi = sample_injection(n, f, seed);
    const Template t = build_template(h, {pi});
    Edge x = colex_unrank(g() % binom(n, 3), 3);
    if (pi.sum(x).is_zero()) continue;
    for (const auto& abs : find_absorbers(x, h, t.layer(0).edges, pi, 0, 10, seed, 0, 50000).absorbers) {
      ASSERT_EQ(oracle::absorber_invariants(abs, pi, fam), "");
      ++checked;
    }
  }
}

TEST(Operators, PropertiesHoldForKThreeAndFour) {
  for (auto [k, m] : {std::pair{3, 3}, std::pair{3, 7}, std::pair{4, 4}, std::pair{4, 7}}) {
    const OperatorReport rep = verify_properties(k, FieldCtx(m));
    for (const auto& c : rep.checks) EXPECT_TRUE(c.passed) << "k=" << k << " m=" << m << " " << c.name << ": " << c.counterexample;
    EXPECT_EQ(rep.screen_mismatches, 0u);
    EXPECT_EQ(rep.zero_sum_subsets, 0u);  // no zero-sum (k-2)-sets of distinct nonzero elements for k <= 4
    EXPECT_NE(rep.find("family_sizes"), nullptr);
  }
}

TEST(Operators, ScreenFailsExactlyOnZeroSumSubsetsAtKFive) {
  const OperatorReport rep = verify_properties(5, FieldCtx(5), 3, 4000);
  EXPECT_GT(rep.zero_sum_subsets, 0u);
  EXPECT_EQ(rep.screen_failures, rep.zero_sum_subsets);
  EXPECT_EQ(rep.screen_mismatches, 0u);
}
