#pragma once

// Vertex, facet and edge operator families: linear maps F^{2k} -> F^d that
// produce the vertices, facets and edges of the absorber spanned by (x; a).
// Matrices have {0,1} entries and are composed over GF(2); the field only
// enters when they are applied, so one family serves every GF(2^m).

#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "steiner/gf.hpp"
#include "steiner/rng.hpp"

namespace steiner {

enum class OperatorKind { kVO1, kVO2, kFO1, kFO2, kEO1, kEO2 };

inline const char* to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::kVO1: return "VO1";
    case OperatorKind::kVO2: return "VO2";
    case OperatorKind::kFO1: return "FO1";
    case OperatorKind::kFO2: return "FO2";
    case OperatorKind::kEO1: return "EO1";
    case OperatorKind::kEO2: return "EO2";
  }
  return "?";
}

/// One family member with the generators it was composed from. Subsets are
/// bitmasks over coordinates 0..k-1; `index` is the projection index i.
struct Operator {
  Matrix matrix;
  OperatorKind kind;
  int index = -1;
  std::uint32_t inner = 0;  ///< I
  std::uint32_t outer = 0;  ///< J (or the E_{[k]} / E_0 selector for VO1/FO1)
  int k = 0;

  /// Block acting on x (first k coordinates).
  Matrix on_x() const { return matrix.column_block(0, k); }
  /// Block acting on a (last k coordinates).
  Matrix on_a() const { return matrix.column_block(k, k); }

  std::string describe() const {
    return std::string(to_string(kind)) + "(i=" + std::to_string(index) + ",I=" + std::to_string(inner) +
           ",J=" + std::to_string(outer) + ")";
  }
};

namespace ops {

/// Product of {0,1} matrices over GF(2).
inline Matrix compose(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw Error("dimension mismatch");
  Matrix r(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int l = 0; l < a.cols(); ++l) {
      if (a(i, l).bits > 1 || b.rows() == 0) throw Error("compose expects {0,1} entries");
      if (a(i, l).is_zero()) continue;
      for (int j = 0; j < b.cols(); ++j) r(i, j).bits ^= b(l, j).bits & 1u;
    }
  return r;
}

/// T_i: F^k -> F, x -> x_i.
inline Matrix coordinate(int k, int i) {
  Matrix m(1, k);
  m(0, i) = FieldElement{1};
  return m;
}

/// P_i: F^k -> F^{k-1}, drops coordinate i.
inline Matrix projection(int k, int i) {
  Matrix m(k - 1, k);
  for (int r = 0, c = 0; c < k; ++c) {
    if (c == i) continue;
    m(r++, c) = FieldElement{1};
  }
  return m;
}

/// X_I: diagonal selector of the coordinates in I.
inline Matrix selector(int k, std::uint32_t subset) {
  Matrix m(k, k);
  for (int i = 0; i < k; ++i)
    if ((subset >> i) & 1u) m(i, i) = FieldElement{1};
  return m;
}

/// E_I = [X_{[k]\I}  X_I]: (x; a) -> e_I.
inline Matrix edge_selector(int k, std::uint32_t subset) {
  Matrix m(k, 2 * k);
  for (int i = 0; i < k; ++i) m(i, ((subset >> i) & 1u) ? k + i : i) = FieldElement{1};
  return m;
}

/// C = [I_k ; J_k + I_k]: x -> vertices of the associated cross-polytope.
inline Matrix associate(int k) {
  Matrix m(2 * k, k);
  for (int i = 0; i < k; ++i) {
    m(i, i) = FieldElement{1};
    for (int j = 0; j < k; ++j)
      if (j != i) m(k + i, j) = FieldElement{1};
  }
  return m;
}

inline bool even_nonempty(std::uint32_t s) { return s != 0 && std::popcount(s) % 2 == 0; }

}  // namespace ops

struct OperatorFamily {
  int k = 0;
  std::vector<Operator> vo, fo, eo;  ///< VO1 then VO2, FO1 then FO2, EO1 then EO2

  std::vector<const Operator*> of_kind(OperatorKind kind) const {
    std::vector<const Operator*> out;
    for (const auto* list : {&vo, &fo, &eo})
      for (const auto& op : *list)
        if (op.kind == kind) out.push_back(&op);
    return out;
  }
};

inline OperatorFamily build_families(int k) {
  if (k < 2 || k > 8) throw Error("operator families need 2 <= k <= 8");
  using namespace ops;
  const std::uint32_t full = (1u << k) - 1;
  const Matrix C = associate(k);
  const Matrix E_empty = edge_selector(k, 0);
  const Matrix E_full = edge_selector(k, full);
  OperatorFamily fam;
  fam.k = k;

  for (int i = 0; i < k; ++i) {
    fam.vo.push_back({compose(coordinate(k, i), E_empty), OperatorKind::kVO1, i, 0, 0, k});
    fam.vo.push_back({compose(coordinate(k, i), E_full), OperatorKind::kVO1, i, 0, full, k});
  }
  for (std::uint32_t I = 1; I <= full; ++I) {
    if (!even_nonempty(I)) continue;
    const Matrix CE = compose(C, edge_selector(k, I));
    for (int i = 0; i < k; ++i)
      fam.vo.push_back({compose(compose(coordinate(k, i), E_full), CE), OperatorKind::kVO2, i, I, full, k});
  }

  for (int i = 0; i < k; ++i)
    fam.fo.push_back({compose(projection(k, i), E_empty), OperatorKind::kFO1, i, 0, 0, k});
  for (std::uint32_t I = 1; I <= full; ++I) {
    if (!even_nonempty(I)) continue;
    const Matrix CE = compose(C, edge_selector(k, I));
    for (std::uint32_t J = 0; J <= full; ++J) {
      if (std::popcount(J) % 2) continue;
      const Matrix ECE = compose(edge_selector(k, J), CE);
      for (int i = 0; i < k; ++i)
        fam.fo.push_back({compose(projection(k, i), ECE), OperatorKind::kFO2, i, I, J, k});
    }
  }

  for (std::uint32_t I = 0; I <= full; ++I)
    if (std::popcount(I) % 2 == 1) fam.eo.push_back({edge_selector(k, I), OperatorKind::kEO1, -1, I, 0, k});
  for (std::uint32_t I = 1; I <= full; ++I) {
    if (!even_nonempty(I)) continue;
    const Matrix CE = compose(C, edge_selector(k, I));
    for (std::uint32_t J = 1; J <= full; ++J)
      fam.eo.push_back({compose(edge_selector(k, J), CE), OperatorKind::kEO2, -1, I, J, k});
  }
  return fam;
}

/// op applied to the stacked vector (x; a).
inline FieldVector apply(const FieldCtx& f, const Operator& op, const FieldVector& x, const FieldVector& a) {
  if (static_cast<int>(x.size()) != op.k || static_cast<int>(a.size()) != op.k)
    throw Error("operator applied to vectors of the wrong length");
  FieldVector xa = x;
  xa.insert(xa.end(), a.begin(), a.end());
  return apply(f, op.matrix, xa);
}

struct PropertyCheck {
  std::string name;
  bool passed = true;
  std::uint64_t cases = 0;
  std::string counterexample;  ///< first failing case, empty when passed
};

struct OperatorReport {
  int k = 0;
  int field_bits = 0;
  std::vector<PropertyCheck> checks;
  /// For sampled x: whether the vertex screen failed, and whether x has a
  /// zero-sum (k-2)-subset. The screen should fail exactly on the latter.
  std::uint64_t screen_failures = 0;
  std::uint64_t zero_sum_subsets = 0;
  std::uint64_t screen_mismatches = 0;

  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.passed; });
  }
  const PropertyCheck* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

namespace ops_detail {

inline std::string vec_str(const FieldVector& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i].bits);
  return s + ")";
}

inline bool has_zero_sum_subset(const FieldVector& x, int size) {
  if (size <= 0 || size > static_cast<int>(x.size())) return false;
  const auto k = static_cast<std::uint32_t>(x.size());
  for (std::uint32_t s = 1; s < (1u << k); ++s) {
    if (std::popcount(s) != size) continue;
    FieldElement acc{};
    for (std::uint32_t i = 0; i < k; ++i)
      if ((s >> i) & 1u) acc += x[i];
    if (acc.is_zero()) return true;
  }
  return false;
}

// Distinct nonzero k-tuples of F, exhaustive (as sorted sets) or sampled.
template <class Fn>
void for_each_point_set(const FieldCtx& f, int k, std::uint64_t draws, std::uint64_t seed, Fn&& fn) {
  const std::uint64_t nonzero = f.size() - 1;
  double count = 1.0;
  for (int i = 0; i < k; ++i) count = count * static_cast<double>(nonzero - static_cast<std::uint64_t>(i)) / (i + 1);
  FieldVector x(static_cast<std::size_t>(k));
  if (count <= static_cast<double>(draws)) {
    std::vector<std::uint32_t> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[i] = static_cast<std::uint32_t>(i + 1);
    while (true) {
      for (int i = 0; i < k; ++i) x[i] = FieldElement{idx[i]};
      fn(x);
      int i = k - 1;
      while (i >= 0 && idx[i] == nonzero - static_cast<std::uint64_t>(k - 1 - i)) --i;
      if (i < 0) return;
      ++idx[i];
      for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  KeyedRng rng({stream::kSampling, seed, 0x0b});
  for (std::uint64_t t = 0; t < draws; ++t) {
    for (int i = 0; i < k; ++i) {
      bool fresh = false;
      while (!fresh) {
        x[i] = FieldElement{static_cast<std::uint32_t>(1 + rng.below(nonzero))};
        fresh = std::find(x.begin(), x.begin() + i, x[i]) == x.begin() + i;
      }
    }
    fn(x);
  }
}

}  // namespace ops_detail

/// Machine-checks the operator facts the absorber counting relies on, for one k
/// and field: family sizes; for FO2, two standard basis vectors in ker F_1 and
/// rk F_2 >= 1; for FO, the solvable-a set has dimension rk F_1 + 1; for EO,
/// dim ker E_2 <= k-1; rk E_I = k; and the vertex screen on sampled x.
inline OperatorReport verify_properties(int k, const FieldCtx& f, std::uint64_t seed = 1,
                                        std::uint64_t draws = 10000,
                                        std::uint64_t exhaustive_limit = 1000000) {
  const OperatorFamily fam = build_families(k);
  OperatorReport rep;
  rep.k = k;
  rep.field_bits = f.bits();

  {
    PropertyCheck c{"family_sizes", true, 0, {}};
    const std::size_t vo = static_cast<std::size_t>(k) * ((std::size_t{1} << (k - 1)) + 1);
    const std::size_t eo1 = std::size_t{1} << (k - 1);
    const std::size_t m = (std::size_t{1} << (2 * k - 1)) - (std::size_t{1} << k) + 1;
    const auto fo1 = fam.of_kind(OperatorKind::kFO1).size();
    const auto e1 = fam.of_kind(OperatorKind::kEO1).size();
    c.cases = 4;
    if (fam.vo.size() != vo || fo1 != static_cast<std::size_t>(k) || e1 != eo1 || fam.eo.size() != m) {
      c.passed = false;
      c.counterexample = "|VO|=" + std::to_string(fam.vo.size()) + " |FO1|=" + std::to_string(fo1) +
                         " |EO1|=" + std::to_string(e1) + " |EO|=" + std::to_string(fam.eo.size());
    }
    rep.checks.push_back(c);
  }

  {
    PropertyCheck basis{"fo2_kernel_has_two_basis_vectors", true, 0, {}}, r2{"fo2_rank_f2_at_least_one", true, 0, {}};
    for (const Operator* op : fam.of_kind(OperatorKind::kFO2)) {
      const Matrix f1 = op->on_x();
      int zero_cols = 0;
      for (int c = 0; c < k; ++c) {
        bool z = true;
        for (int r = 0; r < f1.rows(); ++r) z = z && f1(r, c).is_zero();
        zero_cols += z ? 1 : 0;
      }
      ++basis.cases;
      if (zero_cols < 2 && basis.passed) {
        basis.passed = false;
        basis.counterexample = op->describe();
      }
      ++r2.cases;
      if (rank(f, op->on_a()) < 1 && r2.passed) {
        r2.passed = false;
        r2.counterexample = op->describe();
      }
    }
    rep.checks.push_back(basis);
    rep.checks.push_back(r2);
  }

  {
    // {a : F_1^{-1}(f + F_2 a) nonempty} = a-projection of {z : F z = f}.
    PropertyCheck dim{"fo_solvable_set_dimension", true, 0, {}};
    const int d = k - 1;
    double domain = 1.0;
    for (int i = 0; i < d; ++i) domain *= static_cast<double>(f.size());
    const bool exhaustive = domain <= static_cast<double>(exhaustive_limit);
    for (const auto* list : {&fam.fo}) {
      for (const Operator& op : *list) {
        const int expect = rank(f, op.on_x()) + 1;
        const auto ker = kernel_basis(f, op.matrix);
        Matrix proj(static_cast<int>(ker.size()), k);
        for (std::size_t r = 0; r < ker.size(); ++r)
          for (int c = 0; c < k; ++c) proj(static_cast<int>(r), c) = ker[r][static_cast<std::size_t>(k + c)];
        const int got = ker.empty() ? 0 : rank(f, proj);
        KeyedRng rng({stream::kSampling, seed, 0xd1});
        FieldVector y(static_cast<std::size_t>(d));
        const std::uint64_t total = exhaustive ? static_cast<std::uint64_t>(domain) : draws;
        for (std::uint64_t t = 0; t < total; ++t) {
          for (int i = 0; i < d; ++i)
            y[i] = exhaustive ? FieldElement{static_cast<std::uint32_t>((t >> (f.bits() * i)) & f.mask())}
                              : FieldElement{static_cast<std::uint32_t>(rng.below(f.size()))};
          ++dim.cases;
          const bool solvable = affine_preimage(f, op.matrix, y).has_value();
          if ((!solvable || got != expect) && dim.passed) {
            dim.passed = false;
            dim.counterexample = op.describe() + " f=" + ops_detail::vec_str(y) +
                                 (solvable ? " dim=" + std::to_string(got) + " expected " + std::to_string(expect)
                                           : " empty");
          }
          if (!dim.passed) break;
        }
      }
    }
    rep.checks.push_back(dim);
  }

  {
    PropertyCheck ker{"eo_kernel_e2_at_most_k_minus_1", true, 0, {}};
    for (const Operator& op : fam.eo) {
      ++ker.cases;
      const int nullity = k - rank(f, op.on_a());
      if (nullity > k - 1 && ker.passed) {
        ker.passed = false;
        ker.counterexample = op.describe();
      }
    }
    rep.checks.push_back(ker);
  }

  {
    PropertyCheck rk{"edge_selector_rank_k", true, 0, {}};
    for (std::uint32_t I = 0; I < (1u << k); ++I) {
      ++rk.cases;
      if (rank(f, ops::edge_selector(k, I)) != k && rk.passed) {
        rk.passed = false;
        rk.counterexample = "I=" + std::to_string(I);
      }
    }
    rep.checks.push_back(rk);
  }

  {
    // Vertex screen: each V and each V + V' (V != V') satisfies V_1 x != 0 or V_2 != 0.
    PropertyCheck screen{"vo_screen_without_zero_sum_subsets", true, 0, {}};
    struct Lin {
      Matrix on_x;
      bool a_part_zero;
      std::string what;
    };
    std::vector<Lin> lins;
    for (std::size_t i = 0; i < fam.vo.size(); ++i) {
      lins.push_back({fam.vo[i].on_x(), fam.vo[i].on_a().is_zero(), fam.vo[i].describe()});
      for (std::size_t j = 0; j < i; ++j) {
        const Matrix s = fam.vo[i].matrix + fam.vo[j].matrix;
        lins.push_back({s.column_block(0, k), s.column_block(k, k).is_zero(),
                        fam.vo[i].describe() + "+" + fam.vo[j].describe()});
      }
    }
    // only maps with vanishing a-part can fail, and only when the x-part kills x
    std::vector<const Lin*> risky;
    for (const auto& l : lins)
      if (l.a_part_zero) risky.push_back(&l);
    ops_detail::for_each_point_set(f, k, draws, seed, [&](const FieldVector& x) {
      bool ok = true;
      std::string bad;
      for (const Lin* l : risky) {
        if (apply(f, l->on_x, x)[0].is_zero()) {
          ok = false;
          bad = l->what;
          break;
        }
      }
      const bool zero_subset = ops_detail::has_zero_sum_subset(x, k - 2);
      ++screen.cases;
      rep.screen_failures += ok ? 0 : 1;
      rep.zero_sum_subsets += zero_subset ? 1 : 0;
      rep.screen_mismatches += (ok == zero_subset) ? 1 : 0;
      if (!ok && !zero_subset && screen.passed) {
        screen.passed = false;
        screen.counterexample = "x=" + ops_detail::vec_str(x) + " via " + bad;
      }
    });
    rep.checks.push_back(screen);
  }
  return rep;
}

}  // namespace steiner
