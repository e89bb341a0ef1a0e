// Field axioms and linear algebra over GF(2^m), checked against a separate
// shift-and-xor multiplier and brute-force enumeration.

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"

using namespace steiner;

using oracle::all_vectors;
using oracle::random_matrix;
using oracle::random_vector;
using oracle::ref_mul;

TEST(Field, ModulusIsIrreducibleOfDegreeM) {
  for (int m = 2; m <= 20; ++m) {
    FieldCtx f(m);
    EXPECT_EQ(63 - std::countl_zero(f.modulus()), m);
    EXPECT_TRUE(gf_detail::is_irreducible(f.modulus())) << m;
  }
}

TEST(Field, AxiomsExhaustiveUpToEightBits) {
  for (int m = 2; m <= 8; ++m) {
    FieldCtx f(m);
    const std::uint32_t q = static_cast<std::uint32_t>(f.size());
    for (std::uint32_t a = 0; a < q; ++a) {
      ASSERT_EQ(f.mul(fe(a), f.one()), fe(a));
      ASSERT_EQ(f.mul(fe(a), f.zero()), f.zero());
      ASSERT_EQ(fe(a) + fe(a), f.zero());
      if (a) {
        ASSERT_EQ(f.mul(fe(a), f.inv(fe(a))), f.one()) << "m=" << m << " a=" << a;
      }
      for (std::uint32_t b = 0; b < q; ++b) {
        const FieldElement ab = f.mul(fe(a), fe(b));
        ASSERT_EQ(ab.bits, ref_mul(a, b, m, f.modulus())) << "m=" << m << " a=" << a << " b=" << b;
        ASSERT_EQ(ab, f.mul(fe(b), fe(a)));
        ASSERT_EQ(ab, f.mul_slow(fe(a), fe(b)));
        for (std::uint32_t c = 0; c < q; ++c) {
          ASSERT_EQ(f.mul(ab, fe(c)), f.mul(fe(a), f.mul(fe(b), fe(c))));
          ASSERT_EQ(f.mul(fe(a), fe(b) + fe(c)), ab + f.mul(fe(a), fe(c)));
        }
      }
    }
  }
}

TEST(Field, AxiomsSampledUpToSixteenBits) {
  std::mt19937_64 g(7);
  for (int m = 9; m <= 16; ++m) {
    FieldCtx f(m);
    for (int i = 0; i < 10000; ++i) {
      const auto a = static_cast<std::uint32_t>(g() & f.mask()), b = static_cast<std::uint32_t>(g() & f.mask()),
                 c = static_cast<std::uint32_t>(g() & f.mask());
      ASSERT_EQ(f.mul(fe(a), fe(b)).bits, ref_mul(a, b, m, f.modulus()));
      ASSERT_EQ(f.mul(f.mul(fe(a), fe(b)), fe(c)), f.mul(fe(a), f.mul(fe(b), fe(c))));
      ASSERT_EQ(f.mul(fe(a), fe(b) + fe(c)), f.mul(fe(a), fe(b)) + f.mul(fe(a), fe(c)));
      if (a) {
        ASSERT_EQ(f.mul(fe(a), f.inv(fe(a))), f.one());
      }
    }
  }
}

TEST(Field, WideFieldsWithoutTables) {
  std::mt19937_64 g(11);
  for (int m : {17, 24, 31}) {
    FieldCtx f(m);
    EXPECT_FALSE(f.has_log_tables());
    for (int i = 0; i < 2000; ++i) {
      const auto a = static_cast<std::uint32_t>(g() & f.mask()), b = static_cast<std::uint32_t>(g() & f.mask());
      ASSERT_EQ(f.mul(fe(a), fe(b)).bits, ref_mul(a, b, m, f.modulus()));
      if (a) {
        ASSERT_EQ(f.mul(fe(a), f.inv(fe(a))), f.one());
      }
    }
  }
}

TEST(Field, RejectsBadInput) {
  EXPECT_THROW(FieldCtx(1), Error);
  EXPECT_THROW(FieldCtx(32), Error);
  FieldCtx f(4);
  EXPECT_THROW(f.element(16), Error);
  EXPECT_THROW(f.inv(f.zero()), Error);
}

TEST(Field, SizingPolicies) {
  // minimal: smallest m with 2^m > n+1; wide: 2n <= 2^m <= 4n
  EXPECT_EQ(field_bits_for(7, FieldPolicy::kMinimal), 4);
  EXPECT_EQ(field_bits_for(14, FieldPolicy::kMinimal), 4);
  EXPECT_EQ(field_bits_for(15, FieldPolicy::kMinimal), 5);
  EXPECT_EQ(field_bits_for(49, FieldPolicy::kMinimal), 6);
  EXPECT_EQ(field_bits_for(63, FieldPolicy::kMinimal), 7);
  for (int n = 1; n <= 3000; ++n) {
    const int m = field_bits_for(n, FieldPolicy::kWide);
    const std::uint64_t q = std::uint64_t{1} << m;
    EXPECT_TRUE(q >= 2u * n || m == FieldCtx::kMinBits) << n;
    if (m > FieldCtx::kMinBits) {
      EXPECT_LE(q, 4u * n) << n;
    }
    const int mm = field_bits_for(n, FieldPolicy::kMinimal);
    EXPECT_GT(std::uint64_t{1} << mm, static_cast<std::uint64_t>(n) + 1);
    if (mm > FieldCtx::kMinBits) {
      EXPECT_LE(std::uint64_t{1} << (mm - 1), static_cast<std::uint64_t>(n) + 1);
    }
  }
}

TEST(LinearAlgebra, RankNullityOnRandomMatrices) {
  std::mt19937_64 g(3);
  for (int trial = 0; trial < 500; ++trial) {
    const int m = 2 + static_cast<int>(g() % 3);  // fields of size 4..16
    FieldCtx f(m);
    const int rows = 1 + static_cast<int>(g() % 4), cols = 1 + static_cast<int>(g() % 3);
    const Matrix a = random_matrix(f, rows, cols, g);
    std::uint64_t kernel = 0;
    std::set<std::vector<std::uint32_t>> image;
    for (const auto& x : all_vectors(f, cols)) {
      const FieldVector y = apply(f, a, x);
      bool zero = true;
      std::vector<std::uint32_t> key;
      for (auto e : y) {
        zero = zero && e.is_zero();
        key.push_back(e.bits);
      }
      kernel += zero;
      image.insert(key);
    }
    std::uint64_t space = 1;
    for (int i = 0; i < cols; ++i) space *= f.size();
    ASSERT_EQ(kernel * image.size(), space);
    // The library's rank and kernel agree with the counts.
    const int r = rank(f, a);
    std::uint64_t im = 1;
    for (int i = 0; i < r; ++i) im *= f.size();
    ASSERT_EQ(im, image.size());
    const auto basis = kernel_basis(f, a);
    ASSERT_EQ(static_cast<int>(basis.size()), cols - r);
    for (const auto& v : basis)
      for (auto e : apply(f, a, v)) ASSERT_TRUE(e.is_zero());
  }
}

TEST(LinearAlgebra, KernelBasisIndependentOnLargerMatrices) {
  std::mt19937_64 g(5);
  FieldCtx f(8);
  for (int trial = 0; trial < 200; ++trial) {
    const int rows = 1 + static_cast<int>(g() % 6), cols = 1 + static_cast<int>(g() % 8);
    const Matrix a = random_matrix(f, rows, cols, g, 0.5);
    const auto basis = kernel_basis(f, a);
    const int r = rank(f, a);
    ASSERT_EQ(static_cast<int>(basis.size()) + r, cols);
    if (basis.empty()) continue;
    Matrix b(static_cast<int>(basis.size()), cols);
    for (int i = 0; i < b.rows(); ++i)
      for (int j = 0; j < cols; ++j) b(i, j) = basis[i][j];
    ASSERT_EQ(rank(f, b), b.rows());
  }
}

TEST(LinearAlgebra, AffinePreimageMatchesEnumeration) {
  std::mt19937_64 g(9);
  for (int m = 2; m <= 4; ++m) {
    FieldCtx f(m);
    for (int trial = 0; trial < 150; ++trial) {
      const int rows = 1 + static_cast<int>(g() % 3), cols = 1 + static_cast<int>(g() % 3);
      const Matrix a = random_matrix(f, rows, cols, g, 0.4);
      const FieldVector y = trial % 2 ? random_vector(f, rows, g) : apply(f, a, random_vector(f, cols, g));
      std::set<FieldVector> expected;
      for (const auto& x : all_vectors(f, cols))
        if (apply(f, a, x) == y) expected.insert(x);
      const auto s = affine_preimage(f, a, y);
      if (expected.empty()) {
        ASSERT_FALSE(s.has_value());
        continue;
      }
      ASSERT_TRUE(s.has_value());
      // Span point + directions exhaustively.
      std::set<FieldVector> got;
      for (const auto& coeffs : all_vectors(f, s->dimension())) {
        FieldVector x = s->point;
        for (int d = 0; d < s->dimension(); ++d)
          for (int j = 0; j < cols; ++j) x[j] += f.mul(coeffs[d], s->directions[d][j]);
        got.insert(x);
      }
      ASSERT_EQ(got, expected);
    }
  }
}

TEST(Rng, KeyedStreamsAreStableAndSeparated) {
  EXPECT_EQ(hash_key({1, 2, 3}), hash_key({1, 2, 3}));
  EXPECT_NE(hash_key({1, 2, 3}), hash_key({1, 3, 2}));
  KeyedRng a({5, 6}), b({5, 6});
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
  KeyedRng c(42);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70000; ++i) ++hist[c.below(7)];
  for (int h : hist) EXPECT_NEAR(h, 10000, 500);
  for (int i = 0; i < 1000; ++i) {
    const double u = keyed_uniform({9, static_cast<std::uint64_t>(i)});
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}
