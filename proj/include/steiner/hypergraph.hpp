#pragma once

// k-uniform hypergraphs on [n]: storage, random models, facets, divisibility,
// typicality and affine-boundedness measurements, and the random edge process.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "steiner/combinatorics.hpp"
#include "steiner/gf.hpp"
#include "steiner/rng.hpp"

namespace steiner {

/// Immutable k-uniform hypergraph on {0..n-1}. Edges are kept as sorted colex
/// ranks; membership is O(1) through a rank bitmap when C(n,k) is moderate.
class Hypergraph {
 public:
  Hypergraph() = default;

  Hypergraph(int n, int k) : n_(n), k_(k) { validate(); build_index(); }

  Hypergraph(int n, int k, std::span<const Edge> edges) : n_(n), k_(k) {
    validate();
    ranks_.reserve(edges.size());
    for (const Edge& e : edges) {
      check_edge(e);
      ranks_.push_back(colex_rank(e));
    }
    finish();
  }

  Hypergraph(int n, int k, std::initializer_list<Edge> edges)
      : Hypergraph(n, k, std::span<const Edge>(edges.begin(), edges.size())) {}

  /// From colex ranks; duplicates are removed.
  static Hypergraph from_ranks(int n, int k, std::vector<std::uint64_t> ranks) {
    Hypergraph h;
    h.n_ = n;
    h.k_ = k;
    h.validate();
    const std::uint64_t total = binom(n, k);
    for (auto r : ranks)
      if (r >= total) throw Error("edge rank out of range");
    h.ranks_ = std::move(ranks);
    h.finish();
    return h;
  }

  static Hypergraph complete(int n, int k) {
    std::vector<std::uint64_t> r(binom(n, k));
    std::iota(r.begin(), r.end(), std::uint64_t{0});
    return from_ranks(n, k, std::move(r));
  }

  int n() const noexcept { return n_; }
  int k() const noexcept { return k_; }
  std::size_t size() const noexcept { return ranks_.size(); }
  bool empty() const noexcept { return ranks_.empty(); }

  /// Edge ranks in increasing colex order (the canonical scan order).
  const std::vector<std::uint64_t>& ranks() const noexcept { return ranks_; }
  Edge edge(std::size_t i) const { return colex_unrank(ranks_[i], k_); }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(ranks_.size());
    for (auto r : ranks_) out.push_back(colex_unrank(r, k_));
    return out;
  }

  /// Edges sorted lexicographically by their vertex tuples.
  std::vector<Edge> edges_lex() const {
    auto e = edges();
    std::sort(e.begin(), e.end());
    return e;
  }

  bool contains_rank(std::uint64_t r) const noexcept {
    if (!bitmap_.empty()) {
      if (r >= binom(n_, k_)) return false;
      return (bitmap_[r >> 6] >> (r & 63)) & 1u;
    }
    return std::binary_search(ranks_.begin(), ranks_.end(), r);
  }

  bool contains(const Edge& e) const noexcept {
    if (e.size() != k_) return false;
    for (Vertex v : e)
      if (v < 0 || v >= n_) return false;
    return contains_rank(colex_rank(e));
  }

  /// d(H) = |H| / C(n,k).
  double density() const noexcept {
    const auto total = binom(n_, k_);
    return total ? static_cast<double>(size()) / static_cast<double>(total) : 0.0;
  }

  friend bool operator==(const Hypergraph& a, const Hypergraph& b) noexcept {
    return a.n_ == b.n_ && a.k_ == b.k_ && a.ranks_ == b.ranks_;
  }

 private:
  void validate() const {
    if (n_ < 1 || n_ > kMaxN) throw Error("n out of range");
    if (k_ < 1 || k_ > kMaxK || k_ > n_) throw Error("uniformity out of range");
  }
  void check_edge(const Edge& e) const {
    if (e.size() != k_) throw Error("edge " + e.str() + " has wrong size");
    for (Vertex v : e)
      if (v < 0 || v >= n_) throw Error("edge " + e.str() + " has vertex out of range");
  }
  void finish() {
    std::sort(ranks_.begin(), ranks_.end());
    ranks_.erase(std::unique(ranks_.begin(), ranks_.end()), ranks_.end());
    build_index();
  }
  void build_index() {
    const std::uint64_t total = binom(n_, k_);
    if (total <= (std::uint64_t{1} << 28)) {
      bitmap_.assign((total + 63) / 64, 0);
      for (auto r : ranks_) bitmap_[r >> 6] |= std::uint64_t{1} << (r & 63);
    }
  }

  int n_ = 0, k_ = 0;
  std::vector<std::uint64_t> ranks_;
  std::vector<std::uint64_t> bitmap_;
};

/// Facet -> containing edges, in CSR form keyed by facet colex rank.
class FacetIndex {
 public:
  explicit FacetIndex(const Hypergraph& h) {
    const int k = h.k();
    std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
    pairs.reserve(h.size() * static_cast<std::size_t>(k));
    std::array<std::uint64_t, kMaxK> fr{};
    for (auto r : h.ranks()) {
      facet_ranks(colex_unrank(r, k), std::span(fr.data(), static_cast<std::size_t>(k)));
      for (int i = 0; i < k; ++i) pairs.emplace_back(fr[i], r);
    }
    std::sort(pairs.begin(), pairs.end());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (i == 0 || pairs[i].first != pairs[i - 1].first) {
        facets_.push_back(pairs[i].first);
        offsets_.push_back(edges_.size());
      }
      edges_.push_back(pairs[i].second);
    }
    offsets_.push_back(edges_.size());
  }

  /// Edge ranks containing the facet (empty if none).
  std::span<const std::uint64_t> edges_of(std::uint64_t facet_rank) const noexcept {
    auto it = std::lower_bound(facets_.begin(), facets_.end(), facet_rank);
    if (it == facets_.end() || *it != facet_rank) return {};
    const auto i = static_cast<std::size_t>(it - facets_.begin());
    return std::span(edges_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]);
  }

  const std::vector<std::uint64_t>& facets() const noexcept { return facets_; }

 private:
  std::vector<std::uint64_t> facets_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint64_t> edges_;
};

/// The uniform draw attached to a k-set; H(n;p) keeps the edge iff it is < p,
/// and the random process adds edges in increasing order of it.
inline double edge_uniform(std::uint64_t seed, int n, int k, std::uint64_t edge_rank) noexcept {
  return keyed_uniform({stream::kEdge, seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k), edge_rank});
}

inline Hypergraph sample_hnp(int n, int k, double p, std::uint64_t seed) {
  if (k < 2 || k > n) throw Error("sample_hnp requires 2 <= k <= n");
  if (!(p >= 0.0 && p <= 1.0)) throw Error("sample_hnp requires 0 <= p <= 1");
  const std::uint64_t total = binom(n, k);
  std::vector<std::uint64_t> r;
  for (std::uint64_t i = 0; i < total; ++i)
    if (p >= 1.0 || edge_uniform(seed, n, k, i) < p) r.push_back(i);
  return Hypergraph::from_ranks(n, k, std::move(r));
}

/// K_{k-1}(H): all facets of edges of H.
inline Hypergraph facets_of(const Hypergraph& h) {
  if (h.k() < 2) throw Error("facets_of requires k >= 2");
  std::vector<std::uint64_t> out;
  out.reserve(h.size() * static_cast<std::size_t>(h.k()));
  std::array<std::uint64_t, kMaxK> fr{};
  for (auto r : h.ranks()) {
    facet_ranks(colex_unrank(r, h.k()), std::span(fr.data(), static_cast<std::size_t>(h.k())));
    out.insert(out.end(), fr.begin(), fr.begin() + h.k());
  }
  return Hypergraph::from_ranks(h.n(), h.k() - 1, std::move(out));
}

/// K_k(G): the k-sets all of whose (k-1)-subsets lie in G (G is (k-1)-uniform).
inline Hypergraph k_cliques(const Hypergraph& g) {
  const int n = g.n();
  const int k = g.k() + 1;
  if (k > n || k > kMaxK) return Hypergraph(n, std::min(k, n));
  std::vector<std::uint64_t> out;
  std::array<std::uint64_t, kMaxK> fr{};
  // each k-set is generated once: from its facet omitting the largest vertex
  for (auto r : g.ranks()) {
    const Facet f = colex_unrank(r, k - 1);
    const Vertex top = f.empty() ? -1 : f[f.size() - 1];
    for (Vertex w = top + 1; w < n; ++w) {
      const Edge e = f.with(w);
      facet_ranks(e, std::span(fr.data(), static_cast<std::size_t>(k)));
      bool ok = true;
      for (int i = 0; i < k - 1 && ok; ++i) ok = g.contains_rank(fr[i]);  // fr[k-1] is f
      if (ok) out.push_back(colex_rank(e));
    }
  }
  return Hypergraph::from_ranks(n, k, std::move(out));
}

/// For every i-set S (0 <= i <= k-1), (k-i) divides |G(S)| where G(S) counts
/// facets of G containing S. G is (k-1)-uniform.
inline bool is_k_divisible(const Hypergraph& g, int k) {
  if (g.k() != k - 1) throw Error("is_k_divisible expects a (k-1)-uniform hypergraph");
  if (g.size() % static_cast<std::size_t>(k) != 0) return false;
  for (int i = 1; i <= k - 1; ++i) {
    std::unordered_map<std::uint64_t, std::uint64_t> count;
    for (auto r : g.ranks()) {
      for_each_subset(colex_unrank(r, k - 1), i, [&](const VertexSet& s) { ++count[colex_rank(s)]; });
    }
    for (const auto& [s, c] : count)
      if (c % static_cast<std::uint64_t>(k - i) != 0) return false;
  }
  return true;
}

/// Whether n satisfies (k-i) | C(n-i, k-1-i) for all 0 <= i <= k-1.
inline bool n_is_k_divisible(int n, int k) {
  for (int i = 0; i <= k - 1; ++i)
    if (binom(n - i, k - 1 - i) % static_cast<std::uint64_t>(k - i) != 0) return false;
  return true;
}

struct TypicalityResult {
  double defect = 0.0;
  bool exhaustive = true;  ///< false: sampled, so defect is a lower bound
  std::uint64_t tuples_examined = 0;
};

/// Smallest c such that G ((k-1)-uniform) is (c,h)-typical: for distinct
/// (k-2)-sets S_1..S_l, l <= h, | |cap G(S_i)| / (d(G)^l n) - 1 |.
inline TypicalityResult typicality_defect(const Hypergraph& g, int h, std::uint64_t samples = 100000,
                                          std::uint64_t seed = 0,
                                          std::uint64_t exhaustive_limit = 1000000) {
  if (g.empty()) throw Error("density zero");
  if (g.k() < 1) throw Error("typicality needs uniformity >= 1");
  const int n = g.n();
  const int s = g.k() - 1;  // |S_i| = k - 2 with k = g.k() + 1
  const double d = g.density();
  const std::size_t words = (static_cast<std::size_t>(n) + 63) / 64;
  const std::uint64_t num_sets = binom(n, s);
  if (num_sets > (std::uint64_t{1} << 24)) throw Error("typicality: too many (k-2)-sets");

  std::vector<std::uint64_t> nb(num_sets * words, 0);  // neighbourhood bitsets, indexed by colex rank
  for (auto r : g.ranks()) {
    const Facet f = colex_unrank(r, g.k());
    for (int i = 0; i < f.size(); ++i) {
      const auto srank = colex_rank(f.without_index(i));
      const Vertex v = f[i];
      nb[srank * words + static_cast<std::size_t>(v) / 64] |= std::uint64_t{1} << (v % 64);
    }
  }

  TypicalityResult out;
  std::vector<std::uint64_t> acc(words);
  auto eval = [&](std::span<const std::uint64_t> sets) {
    std::fill(acc.begin(), acc.end(), ~std::uint64_t{0});
    for (auto sr : sets)
      for (std::size_t w = 0; w < words; ++w) acc[w] &= nb[sr * words + w];
    std::uint64_t c = 0;
    for (std::size_t w = 0; w < words; ++w) c += static_cast<std::uint64_t>(std::popcount(acc[w]));
    const double expect = std::pow(d, static_cast<double>(sets.size())) * n;
    out.defect = std::max(out.defect, std::abs(static_cast<double>(c) / expect - 1.0));
    ++out.tuples_examined;
  };

  // tuple count: sum_{l<=h} C(num_sets, l), saturating
  double tuple_count = 0.0;
  for (int l = 1; l <= h; ++l) {
    double c = 1.0;
    for (int j = 0; j < l; ++j) c = c * static_cast<double>(num_sets - static_cast<std::uint64_t>(j)) / (j + 1);
    tuple_count += c;
  }

  std::vector<std::uint64_t> tuple;
  if (tuple_count <= static_cast<double>(exhaustive_limit)) {
    // exhaustive: strictly increasing tuples of set ranks
    for (int l = 1; l <= h && static_cast<std::uint64_t>(l) <= num_sets; ++l) {
      tuple.resize(static_cast<std::size_t>(l));
      std::iota(tuple.begin(), tuple.end(), std::uint64_t{0});
      while (true) {
        eval(tuple);
        int i = l - 1;
        while (i >= 0 && tuple[i] == num_sets - static_cast<std::uint64_t>(l - i)) --i;
        if (i < 0) break;
        ++tuple[i];
        for (int j = i + 1; j < l; ++j) tuple[j] = tuple[j - 1] + 1;
      }
    }
  } else {
    out.exhaustive = false;
    KeyedRng rng({stream::kSampling, seed, 0x7e});
    for (std::uint64_t t = 0; t < samples; ++t) {
      const int l = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(h)));
      tuple.clear();
      while (static_cast<int>(tuple.size()) < l) {
        auto x = rng.below(num_sets);
        if (std::find(tuple.begin(), tuple.end(), x) == tuple.end()) tuple.push_back(x);
      }
      eval(tuple);
    }
  }
  return out;
}

/// Measured affine-boundedness constant of tau(G) in F^{k-1}: the maximum over
/// affine lines A of |A cap tau(G)| |F|^{k-1} / (|A| |tau(G)|). Facets are
/// mapped coordinate-wise in increasing vertex order. Lines suffice since every
/// affine space of dimension >= 1 is partitioned into lines.
inline double affine_bound_C(const Hypergraph& g, const FieldCtx& f, std::span<const FieldElement> tau) {
  if (g.empty()) throw Error("affine bound of empty hypergraph");
  const int dim = g.k();
  if (dim < 1) throw Error("affine bound needs uniformity >= 1");
  if (static_cast<int>(tau.size()) < g.n()) throw Error("map does not cover all vertices");
  const int m = f.bits();
  if (m * dim > 62) throw Error("affine bound: dimension too large for this field");
  const std::uint64_t q = f.size();

  std::vector<std::array<std::uint32_t, kMaxK>> pts;
  pts.reserve(g.size());
  for (auto r : g.ranks()) {
    const Facet fc = colex_unrank(r, dim);
    std::array<std::uint32_t, kMaxK> p{};
    for (int i = 0; i < dim; ++i) p[i] = tau[fc[i]].bits;
    pts.push_back(p);
  }
  const double total = static_cast<double>(pts.size());
  if (dim == 1) {
    // the only line is F itself
    return total * static_cast<double>(q) / (static_cast<double>(q) * total);
  }

  std::uint64_t best = 0;
  std::array<std::uint32_t, kMaxK> dir{};
  std::vector<std::uint64_t> ids(pts.size());
  std::vector<std::uint32_t> dense;
  const bool use_dense = m * (dim - 1) <= 22;
  if (use_dense) dense.assign(std::uint64_t{1} << (m * (dim - 1)), 0);

  // directions: projective points, first nonzero coordinate equal to 1
  for (int lead = 0; lead < dim; ++lead) {
    const int free = dim - 1 - lead;
    const std::uint64_t count = std::uint64_t{1} << (m * free);
    for (std::uint64_t c = 0; c < count; ++c) {
      dir.fill(0);
      dir[lead] = 1;
      for (int i = 0; i < free; ++i) dir[lead + 1 + i] = static_cast<std::uint32_t>((c >> (m * i)) & f.mask());
      // line id: p - p_lead * dir, with coordinate `lead` dropped
      for (std::size_t pi = 0; pi < pts.size(); ++pi) {
        const auto& p = pts[pi];
        const FieldElement t{p[lead]};
        std::uint64_t id = 0;
        int sh = 0;
        for (int i = 0; i < dim; ++i) {
          if (i == lead) continue;
          const std::uint32_t v = p[i] ^ (i > lead ? f.mul(t, FieldElement{dir[i]}).bits : 0u);
          id |= static_cast<std::uint64_t>(v) << sh;
          sh += m;
        }
        ids[pi] = id;
      }
      if (use_dense) {
        for (auto id : ids) best = std::max<std::uint64_t>(best, ++dense[id]);
        for (auto id : ids) dense[id] = 0;
      } else {
        std::sort(ids.begin(), ids.end());
        std::uint64_t run = 0;
        for (std::size_t i = 0; i < ids.size(); ++i) {
          run = (i > 0 && ids[i] == ids[i - 1]) ? run + 1 : 1;
          best = std::max(best, run);
        }
      }
    }
  }
  const double qd = static_cast<double>(q);
  return static_cast<double>(best) * std::pow(qd, dim) / (qd * total);
}

/// The random k-uniform hypergraph process: every k-set of [n] exactly once,
/// in increasing order of its per-edge uniform (so the first m edges whose
/// uniform is below p are exactly H(n;p) for the same seed).
class ProcessStream {
 public:
  ProcessStream(int n, int k, std::uint64_t seed) : n_(n), k_(k), seed_(seed) {
    if (k < 1 || k > n || k > kMaxK) throw Error("process: bad parameters");
    const std::uint64_t total = binom(n, k);
    order_.resize(total);
    std::vector<double> u(total);
    for (std::uint64_t i = 0; i < total; ++i) {
      order_[i] = i;
      u[i] = edge_uniform(seed, n, k, i);
    }
    std::sort(order_.begin(), order_.end(), [&](std::uint64_t a, std::uint64_t b) {
      return u[a] != u[b] ? u[a] < u[b] : a < b;
    });
  }

  int n() const noexcept { return n_; }
  int k() const noexcept { return k_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t step() const noexcept { return t_; }
  std::uint64_t total() const noexcept { return order_.size(); }
  bool exhausted() const noexcept { return t_ >= order_.size(); }

  Edge next() {
    if (exhausted()) throw Error("process stream exhausted");
    return colex_unrank(order_[t_++], k_);
  }

  std::uint64_t next_rank() {
    if (exhausted()) throw Error("process stream exhausted");
    return order_[t_++];
  }

 private:
  int n_, k_;
  std::uint64_t seed_;
  std::vector<std::uint64_t> order_;
  std::uint64_t t_ = 0;
};

}  // namespace steiner
