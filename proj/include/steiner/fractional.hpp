#pragma once

// Fractional K_k-decompositions: weights w_e in [0,1] on the edges of H with
// sum_{f in e} w_e = 1 for every facet f. Feasibility is Phase I of a dense
// bounded-variable primal simplex (Bland's rule), templated on the scalar so the
// same code runs in doubles and in exact GMP rationals.
//
// The artificial columns are never dropped; their tableau block is B^{-1}, which
// lets a new edge column be priced and appended to a solved tableau. The
// hitting-time scan relies on this to warm-start as the process grows H.

#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "steiner/hypergraph.hpp"

namespace steiner {

using Rational = boost::multiprecision::mpq_rational;

enum class LpMode { kFloat, kRational };

template <class S>
struct LpTraits;

template <>
struct LpTraits<double> {
  static constexpr double kEps = 1e-9;
  static constexpr double kPivotEps = 1e-11;
  static bool negative(double x) { return x < -kEps; }
  static bool positive(double x) { return x > kEps; }
  static bool pivotable(double x) { return std::abs(x) > kPivotEps; }
};

template <>
struct LpTraits<Rational> {
  static bool negative(const Rational& x) { return x < 0; }
  static bool positive(const Rational& x) { return x > 0; }
  static bool pivotable(const Rational& x) { return x != 0; }
};

/// Phase I tableau for {A w + a = 1, 0 <= w <= 1, a >= 0}, A a 0/1 matrix given
/// column by column (the rows each column touches).
template <class S>
class BoundedSimplex {
 public:
  using T = LpTraits<S>;

  explicit BoundedSimplex(std::size_t rows) : m_(rows), tab_(rows), xb_(rows, S(1)), basis_(rows) {
    // artificial a_i is column i
    for (std::size_t i = 0; i < m_; ++i) {
      tab_[i].assign(m_, S(0));
      tab_[i][i] = S(1);
      basis_[i] = i;
    }
    d_.assign(m_, S(0));
    state_.assign(m_, kBasic);
    artificial_.assign(m_, true);
  }

  std::size_t rows() const noexcept { return m_; }
  std::size_t columns() const noexcept { return d_.size(); }
  std::size_t structural() const noexcept { return d_.size() - m_; }
  std::uint64_t pivots() const noexcept { return pivots_; }

  /// Appends w_j with 0 <= w_j <= 1, cost 0, at its lower bound.
  void add_column(const std::vector<std::size_t>& touched_rows) {
    std::vector<S> col(m_, S(0));
    // B^{-1} a = sum of the artificial columns of the touched rows
    for (std::size_t i = 0; i < m_; ++i) {
      S acc(0);
      for (auto r : touched_rows) acc += tab_[i][r];
      col[i] = acc;
    }
    // reduced cost 0 - y^T a with y_r = 1 - d_{a_r}
    S red(0);
    for (auto r : touched_rows) red -= S(1) - d_[r];
    for (std::size_t i = 0; i < m_; ++i) tab_[i].push_back(col[i]);
    d_.push_back(red);
    state_.push_back(kLower);
    artificial_.push_back(false);
  }

  /// Runs Phase I to optimality; returns true iff the artificial sum is zero.
  bool solve() {
    while (true) {
      std::size_t q = columns();
      int dir = 0;
      for (std::size_t j = 0; j < columns(); ++j) {
        if (state_[j] == kLower && T::negative(d_[j])) dir = 1;
        else if (state_[j] == kUpper && T::positive(d_[j])) dir = -1;
        else continue;
        q = j;
        break;
      }
      if (q == columns()) break;
      step(q, dir);
    }
    S obj(0);
    for (std::size_t i = 0; i < m_; ++i)
      if (artificial_[basis_[i]]) obj += xb_[i];
    return !T::positive(obj);
  }

  /// Value of structural column j (0-based among the added columns).
  S value(std::size_t j) const {
    const std::size_t c = m_ + j;
    if (state_[c] == kUpper) return S(1);
    if (state_[c] == kLower) return S(0);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] == c) return xb_[i];
    return S(0);
  }

 private:
  enum : std::uint8_t { kBasic, kLower, kUpper };

  bool bounded(std::size_t c) const noexcept { return !artificial_[c]; }

  void step(std::size_t q, int dir) {
    // largest move theta of w_q before some variable hits a bound
    bool have = false;
    S best(0);
    std::size_t row = m_;
    bool to_upper = false;
    if (bounded(q)) {
      best = S(1);
      have = true;
    }
    for (std::size_t i = 0; i < m_; ++i) {
      const S a = dir > 0 ? tab_[i][q] : S(-tab_[i][q]);
      if (!T::pivotable(a)) continue;
      S ratio;
      bool up = false;
      if (a > S(0)) {
        ratio = xb_[i] / a;
      } else if (bounded(basis_[i])) {
        ratio = (S(1) - xb_[i]) / S(-a);
        up = true;
      } else {
        continue;
      }
      if (ratio < S(0)) ratio = S(0);
      // Bland: smallest ratio, then smallest leaving index; a flip only wins outright
      const bool better = !have || ratio < best || (ratio == best && row < m_ && basis_[i] < basis_[row]) ||
                          (ratio == best && row == m_);
      if (better) {
        best = ratio;
        row = i;
        to_upper = up;
        have = true;
      }
    }
    if (!have) throw Error("internal: unbounded direction in a bounded Phase I");
    ++pivots_;
    for (std::size_t i = 0; i < m_; ++i) xb_[i] -= S(dir) * best * tab_[i][q];
    if (row == m_) {  // w_q runs to its other bound
      state_[q] = dir > 0 ? kUpper : kLower;
      return;
    }
    const std::size_t leaving = basis_[row];
    const S start = state_[q] == kUpper ? S(1) : S(0);
    xb_[row] = start + S(dir) * best;
    state_[leaving] = to_upper ? kUpper : kLower;
    state_[q] = kBasic;
    basis_[row] = q;

    const S piv = tab_[row][q];
    for (auto& v : tab_[row]) v /= piv;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == row) continue;
      const S f = tab_[i][q];
      if (f == S(0)) continue;
      for (std::size_t j = 0; j < columns(); ++j) tab_[i][j] -= f * tab_[row][j];
      tab_[i][q] = S(0);
    }
    const S fd = d_[q];
    if (fd != S(0)) {
      for (std::size_t j = 0; j < columns(); ++j) d_[j] -= fd * tab_[row][j];
      d_[q] = S(0);
    }
  }

  std::size_t m_;
  std::vector<std::vector<S>> tab_;
  std::vector<S> xb_;
  std::vector<std::size_t> basis_;
  std::vector<S> d_;
  std::vector<std::uint8_t> state_;
  std::vector<bool> artificial_;
  std::uint64_t pivots_ = 0;
};

template <class S>
struct FractionalSolution {
  bool feasible = false;
  std::vector<std::uint64_t> edges;  ///< colex ranks, aligned with weights
  std::vector<S> weights;
  std::uint64_t pivots = 0;
};

namespace frac_detail {

// Rows: every facet of [n] when cover_all, else the facets of H; indexed by rank.
struct RowMap {
  bool cover_all;
  std::unordered_map<std::uint64_t, std::size_t> index;
  std::size_t rows = 0;

  RowMap(const Hypergraph& h, bool all) : cover_all(all) {
    if (all) {
      rows = binom(h.n(), h.k() - 1);
    } else {
      const Hypergraph shadow = facets_of(h);
      for (auto f : shadow.ranks()) index.emplace(f, rows++);
    }
  }

  std::vector<std::size_t> touched(std::uint64_t edge_rank, int k) const {
    std::array<std::uint64_t, kMaxK> fr{};
    facet_ranks(colex_unrank(edge_rank, k), std::span(fr.data(), static_cast<std::size_t>(k)));
    std::vector<std::size_t> out;
    for (int i = 0; i < k; ++i) out.push_back(cover_all ? fr[i] : index.at(fr[i]));
    return out;
  }
};

}  // namespace frac_detail

template <class S>
FractionalSolution<S> fractional_solve(const Hypergraph& h, bool cover_all) {
  FractionalSolution<S> out;
  const frac_detail::RowMap rows(h, cover_all);
  out.edges = h.ranks();
  if (rows.rows == 0) {
    out.feasible = true;
    return out;
  }
  BoundedSimplex<S> lp(rows.rows);
  for (auto r : h.ranks()) lp.add_column(rows.touched(r, h.k()));
  out.feasible = lp.solve();
  out.pivots = lp.pivots();
  if (out.feasible)
    for (std::size_t j = 0; j < h.size(); ++j) out.weights.push_back(lp.value(j));
  return out;
}

/// Largest |sum_{f in e} w_e - 1| over the rows, and the range check on w.
template <class S>
S fractional_residual(const Hypergraph& h, const FractionalSolution<S>& sol, bool cover_all) {
  const frac_detail::RowMap rows(h, cover_all);
  std::vector<S> sum(rows.rows, S(0));
  S worst(0);
  for (std::size_t j = 0; j < sol.edges.size(); ++j) {
    const S& w = sol.weights.at(j);
    if (w < S(0) && S(-w) > worst) worst = -w;
    if (w > S(1) && S(w - 1) > worst) worst = w - 1;
    for (auto r : rows.touched(sol.edges[j], h.k())) sum[r] += w;
  }
  for (const auto& s : sum) {
    const S dev = s > S(1) ? S(s - 1) : S(1 - s);
    if (dev > worst) worst = dev;
  }
  return worst;
}

struct FractionalResult {
  bool feasible = false;
  LpMode mode = LpMode::kFloat;
  std::vector<std::uint64_t> edges;
  std::vector<double> weights;            ///< exact values rounded in rational mode
  std::vector<std::string> exact_weights;  ///< "p/q", rational mode only
  double residual = 0.0;                   ///< 0 exactly in rational mode when feasible
  std::uint64_t pivots = 0;
};

inline FractionalResult fractional_exists(const Hypergraph& h, LpMode mode, bool cover_all) {
  FractionalResult out;
  out.mode = mode;
  if (mode == LpMode::kFloat) {
    auto s = fractional_solve<double>(h, cover_all);
    out.feasible = s.feasible;
    out.edges = s.edges;
    out.weights = s.weights;
    out.pivots = s.pivots;
    if (s.feasible) out.residual = fractional_residual(h, s, cover_all);
  } else {
    auto s = fractional_solve<Rational>(h, cover_all);
    out.feasible = s.feasible;
    out.edges = s.edges;
    out.pivots = s.pivots;
    for (const auto& w : s.weights) {
      out.weights.push_back(w.convert_to<double>());
      out.exact_weights.push_back(w.str());
    }
    if (s.feasible) out.residual = fractional_residual(h, s, cover_all).template convert_to<double>();
  }
  return out;
}

struct HittingTimes {
  std::uint64_t t_cover = 0;
  std::uint64_t t_frac = 0;
  std::uint64_t lp_solves = 0;
  bool equal() const noexcept { return t_cover == t_frac; }
};

/// Runs the random k-graph process on [n]. t_cover is the first step at which
/// every facet lies in an edge; t_frac the first step at which a fractional
/// decomposition of all facets exists. The LP is built at t_cover and extended
/// one edge at a time.
template <class S = double>
HittingTimes hitting_times(int n, int k, std::uint64_t seed) {
  HittingTimes out;
  ProcessStream proc(n, k, seed);
  const std::uint64_t facets = binom(n, k - 1);
  std::vector<std::uint8_t> seen(facets, 0);
  std::uint64_t uncovered = facets;
  std::vector<std::uint64_t> added;
  std::array<std::uint64_t, kMaxK> fr{};
  while (uncovered > 0) {
    const std::uint64_t r = proc.next_rank();
    added.push_back(r);
    facet_ranks(colex_unrank(r, k), std::span(fr.data(), static_cast<std::size_t>(k)));
    for (int i = 0; i < k; ++i)
      if (!seen[fr[i]]++) --uncovered;
  }
  out.t_cover = proc.step();

  BoundedSimplex<S> lp(facets);
  auto touched = [&](std::uint64_t r) {
    facet_ranks(colex_unrank(r, k), std::span(fr.data(), static_cast<std::size_t>(k)));
    return std::vector<std::size_t>(fr.begin(), fr.begin() + k);
  };
  for (auto r : added) lp.add_column(touched(r));
  while (true) {
    ++out.lp_solves;
    if (lp.solve()) break;
    if (proc.exhausted()) throw Error("internal: complete k-graph has no fractional decomposition");
    lp.add_column(touched(proc.next_rank()));
  }
  out.t_frac = proc.step();
  return out;
}

}  // namespace steiner
