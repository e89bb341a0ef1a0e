#pragma once

// Random injections into F*, the algebraic template, cross-polytopes and
// absorbers.
//
// Edges are handled in two coordinates: vertex ids (Edge) and their images
// under an injection (FieldVector, ordered like the sorted vertex ids).

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "steiner/combinatorics.hpp"
#include "steiner/gf.hpp"
#include "steiner/hypergraph.hpp"
#include "steiner/rng.hpp"

namespace steiner {

/// An injection pi: [n] -> F*, with its inverse.
class Injection {
 public:
  Injection(std::shared_ptr<const FieldCtx> field, std::vector<FieldElement> values)
      : field_(std::move(field)), values_(std::move(values)) {
    if (!field_) throw Error("injection needs a field");
    if (values_.size() + 1 > field_->size()) throw Error("n too large for field");
    if (field_->size() > (std::uint64_t{1} << 26)) throw Error("field too large for an inverse table");
    inverse_.assign(field_->size(), -1);
    for (std::size_t v = 0; v < values_.size(); ++v) {
      const auto x = values_[v];
      if (x.is_zero()) throw Error("injection hits zero");
      if (x.bits >= field_->size()) throw Error("injection value outside field");
      if (inverse_[x.bits] != -1) throw Error("map is not injective");
      inverse_[x.bits] = static_cast<Vertex>(v);
    }
  }

  const FieldCtx& field() const noexcept { return *field_; }
  const std::shared_ptr<const FieldCtx>& field_ptr() const noexcept { return field_; }
  int n() const noexcept { return static_cast<int>(values_.size()); }

  FieldElement operator()(Vertex v) const noexcept { return values_[static_cast<std::size_t>(v)]; }
  const std::vector<FieldElement>& values() const noexcept { return values_; }

  /// Preimage of a field value, or -1 when it is not in pi([n]).
  Vertex vertex_of(FieldElement x) const noexcept {
    return x.bits < inverse_.size() ? inverse_[x.bits] : -1;
  }
  bool in_image(FieldElement x) const noexcept { return vertex_of(x) >= 0; }

  FieldVector image(const VertexSet& s) const {
    FieldVector out;
    out.reserve(static_cast<std::size_t>(s.size()));
    for (Vertex v : s) out.push_back(values_[static_cast<std::size_t>(v)]);
    return out;
  }

  FieldElement sum(const VertexSet& s) const noexcept {
    FieldElement acc{};
    for (Vertex v : s) acc += values_[static_cast<std::size_t>(v)];
    return acc;
  }

  /// Vertex set of field values, nullopt if any value is outside the image.
  std::optional<VertexSet> preimage(const FieldVector& vals) const {
    std::array<Vertex, kMaxK> buf{};
    for (std::size_t i = 0; i < vals.size(); ++i) {
      buf[i] = vertex_of(vals[i]);
      if (buf[i] < 0) return std::nullopt;
    }
    return VertexSet(std::span<const Vertex>(buf.data(), vals.size()));
  }

 private:
  std::shared_ptr<const FieldCtx> field_;
  std::vector<FieldElement> values_;
  std::vector<Vertex> inverse_;
};

/// Uniformly random injection [n] -> F*, via a sparse Fisher-Yates shuffle.
inline Injection sample_injection(int n, std::shared_ptr<const FieldCtx> field, std::uint64_t seed,
                                  std::uint64_t layer = 0) {
  if (n < 0) throw Error("n must be nonnegative");
  const std::uint64_t nonzero = field->size() - 1;
  if (static_cast<std::uint64_t>(n) > nonzero) throw Error("n too large for field");
  KeyedRng rng({stream::kInjection, seed, layer});
  std::unordered_map<std::uint64_t, std::uint64_t> swapped;
  auto at = [&](std::uint64_t i) {
    auto it = swapped.find(i);
    return it == swapped.end() ? i : it->second;
  };
  std::vector<FieldElement> values(static_cast<std::size_t>(n));
  for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(n); ++i) {
    const std::uint64_t j = i + rng.below(nonzero - i);
    const std::uint64_t vi = at(i), vj = at(j);
    swapped[i] = vj;
    swapped[j] = vi;
    values[i] = FieldElement{static_cast<std::uint32_t>(vj + 1)};
  }
  return Injection(std::move(field), std::move(values));
}

struct TemplateLayer {
  Injection pi;
  Hypergraph edges;             ///< T_j
  std::uint64_t collisions = 0;  ///< zero-sum H-edges rejected by earlier layers
};

/// T = T_1 u ... u T_L; one layer for k <= 4, k+1 layers for k >= 5.
class Template {
 public:
  Template(int n, int k, std::vector<TemplateLayer> layers) : n_(n), k_(k), layers_(std::move(layers)) {
    std::vector<std::uint64_t> all;
    for (const auto& l : layers_) all.insert(all.end(), l.edges.ranks().begin(), l.edges.ranks().end());
    union_ = Hypergraph::from_ranks(n, k, std::move(all));
  }

  int n() const noexcept { return n_; }
  int k() const noexcept { return k_; }
  std::size_t layer_count() const noexcept { return layers_.size(); }
  const TemplateLayer& layer(std::size_t j) const { return layers_.at(j); }
  const std::vector<TemplateLayer>& layers() const noexcept { return layers_; }
  const Hypergraph& edges() const noexcept { return union_; }
  std::size_t size() const noexcept { return union_.size(); }

 private:
  int n_, k_;
  std::vector<TemplateLayer> layers_;
  Hypergraph union_;
};

inline std::size_t required_layers(int k) { return k <= 4 ? 1u : static_cast<std::size_t>(k + 1); }

inline Template build_template(const Hypergraph& h, const std::vector<Injection>& injections) {
  const int k = h.k();
  if (injections.size() != required_layers(k))
    throw Error("wrong number of injections for k=" + std::to_string(k));
  for (const auto& pi : injections)
    if (pi.n() != h.n()) throw Error("injection size does not match n");

  std::unordered_set<std::uint64_t> covered;  // facets of earlier layers
  std::vector<TemplateLayer> layers;
  std::array<std::uint64_t, kMaxK> fr{};
  for (const auto& pi : injections) {
    std::vector<std::uint64_t> mine;
    std::unordered_set<std::uint64_t> layer_facets;
    std::uint64_t collisions = 0;
    for (auto r : h.ranks()) {
      const Edge e = colex_unrank(r, k);
      if (!pi.sum(e).is_zero()) continue;
      facet_ranks(e, std::span(fr.data(), static_cast<std::size_t>(k)));
      bool clash = false;
      for (int i = 0; i < k && !clash; ++i) clash = covered.count(fr[i]) > 0;
      if (clash) {
        ++collisions;
        continue;
      }
      for (int i = 0; i < k; ++i)
        if (!layer_facets.insert(fr[i]).second)
          throw Error("internal: zero-sum edges of one layer share a facet");
      mine.push_back(r);
    }
    covered.insert(layer_facets.begin(), layer_facets.end());
    layers.push_back(TemplateLayer{pi, Hypergraph::from_ranks(h.n(), k, std::move(mine)), collisions});
  }
  return Template(h.n(), k, std::move(layers));
}

/// Cross-polytope in field coordinates: e_I takes a_i for i in I and x_i otherwise.
struct CrossPolytope {
  FieldVector x;
  FieldVector a;

  int k() const noexcept { return static_cast<int>(x.size()); }

  FieldVector edge(std::uint32_t subset) const {
    FieldVector e(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) e[i] = ((subset >> i) & 1u) ? a[i] : x[i];
    return e;
  }

  /// Edges e_I with |I| of the given parity (0 even, 1 odd), I in increasing bitmask order.
  std::vector<FieldVector> edges(int parity) const {
    std::vector<FieldVector> out;
    for (std::uint32_t s = 0; s < (1u << x.size()); ++s)
      if (std::popcount(s) % 2 == parity) out.push_back(edge(s));
    return out;
  }

  std::vector<FieldVector> all_edges() const {
    std::vector<FieldVector> out;
    for (std::uint32_t s = 0; s < (1u << x.size()); ++s) out.push_back(edge(s));
    return out;
  }

  FieldVector vertices() const {
    FieldVector v = x;
    v.insert(v.end(), a.begin(), a.end());
    return v;
  }
};

inline FieldElement value_sum(const FieldVector& v) noexcept {
  FieldElement s{};
  for (auto x : v) s += x;
  return s;
}

/// The associated cross-polytope of a non-algebraic k-tuple: a_i = sigma + x_i.
inline CrossPolytope associated_cross_polytope(const FieldVector& x) {
  const FieldElement sigma = value_sum(x);
  if (sigma.is_zero()) throw Error("edge is algebraic: no associated cross-polytope");
  CrossPolytope c{x, x};
  for (auto& ai : c.a) ai += sigma;
  return c;
}

inline CrossPolytope associated_cross_polytope(const Edge& x, const Injection& pi) {
  return associated_cross_polytope(pi.image(x));
}

enum class AbsorberFailure {
  kNone,
  kNotDisjoint,        ///< x and a share a vertex
  kVertexCollision,    ///< absorber vertices not distinct / zero / outside pi([n])
  kOddNotInH,          ///< an odd edge of C_{x,a} is missing from H
  kEvenAlgebraic,      ///< an even edge e != x has zero sum
  kFacetNotAlgebraic,  ///< an odd edge of some C_e is not in T
  kEvenNotInH,         ///< an even edge of some C_e (other than e) is missing from H
};

inline const char* to_string(AbsorberFailure f) {
  switch (f) {
    case AbsorberFailure::kNone: return "ok";
    case AbsorberFailure::kNotDisjoint: return "not disjoint";
    case AbsorberFailure::kVertexCollision: return "vertex collision";
    case AbsorberFailure::kOddNotInH: return "odd edge not in H";
    case AbsorberFailure::kEvenAlgebraic: return "even edge algebraic";
    case AbsorberFailure::kFacetNotAlgebraic: return "facet not algebraic";
    case AbsorberFailure::kEvenNotInH: return "associated even edge not in H";
  }
  return "?";
}

struct AbsorberCheck {
  AbsorberFailure reason = AbsorberFailure::kNone;
  explicit operator bool() const noexcept { return reason == AbsorberFailure::kNone; }
};

/// The gadget spanned by x and a, with its two decompositions. Edges are vertex sets.
struct Absorber {
  Edge target;
  FieldVector x;  ///< pi(target) in increasing vertex order
  FieldVector a;
  std::size_t layer = 0;
  std::vector<Edge> alg;      ///< union of C_e^odd over even e != x; subset of T
  std::vector<Edge> non_alg;  ///< C_{x,a}^odd plus C_e^even \ {e}; subset of H

  std::size_t size() const noexcept { return alg.size() + non_alg.size(); }

  std::vector<Edge> edges() const {
    std::vector<Edge> e = alg;
    e.insert(e.end(), non_alg.begin(), non_alg.end());
    return e;
  }

  /// K_{k-1}(A) as colex ranks, sorted and unique.
  std::vector<std::uint64_t> facet_ranks_sorted() const {
    std::vector<std::uint64_t> out;
    std::array<std::uint64_t, kMaxK> fr{};
    const int k = target.size();
    for (const auto* list : {&alg, &non_alg})
      for (const Edge& e : *list) {
        facet_ranks(e, std::span(fr.data(), static_cast<std::size_t>(k)));
        out.insert(out.end(), fr.begin(), fr.begin() + k);
      }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
};

inline std::size_t absorber_edge_count(int k) {
  return (std::size_t{1} << (2 * k - 1)) - (std::size_t{1} << k) + 1;
}

namespace template_detail {

// All absorber vertex values: x, a, then the algebraic vertices of C_{e_I} for
// each nonempty even I in increasing bitmask order.
inline void absorber_vertices(const FieldVector& x, const FieldVector& a, FieldVector& out) {
  out.assign(x.begin(), x.end());
  out.insert(out.end(), a.begin(), a.end());
  const auto k = static_cast<std::uint32_t>(x.size());
  for (std::uint32_t s = 1; s < (1u << k); ++s) {
    if (std::popcount(s) % 2) continue;
    FieldElement sigma{};
    for (std::uint32_t i = 0; i < k; ++i) sigma += ((s >> i) & 1u) ? a[i] : x[i];
    for (std::uint32_t i = 0; i < k; ++i) out.push_back(sigma + (((s >> i) & 1u) ? a[i] : x[i]));
  }
}

inline bool vertex_screen(const FieldVector& verts, const Injection& pi) {
  for (std::size_t i = 0; i < verts.size(); ++i) {
    if (verts[i].is_zero() || !pi.in_image(verts[i])) return false;
    for (std::size_t j = 0; j < i; ++j)
      if (verts[i] == verts[j]) return false;
  }
  return true;
}

}  // namespace template_detail

/// Checks the four absorber conditions for x (vertex ids) spanned by field values a.
/// `layer_edges` is the template layer the absorber lives under, `pi` its injection.
inline AbsorberCheck is_absorber(const Edge& x, const FieldVector& a, const Hypergraph& h,
                                 const Hypergraph& layer_edges, const Injection& pi) {
  const int k = x.size();
  if (static_cast<int>(a.size()) != k) throw Error("spanning tuple has wrong length");
  const FieldVector xv = pi.image(x);
  for (auto ai : a)
    for (auto xi : xv)
      if (ai == xi) return {AbsorberFailure::kNotDisjoint};

  FieldVector verts;
  template_detail::absorber_vertices(xv, a, verts);
  if (!template_detail::vertex_screen(verts, pi)) return {AbsorberFailure::kVertexCollision};

  const CrossPolytope outer{xv, a};
  auto in = [&](const Hypergraph& g, const FieldVector& vals) {
    auto e = pi.preimage(vals);
    return e && g.contains(*e);
  };
  for (const auto& e : outer.edges(1))
    if (!in(h, e)) return {AbsorberFailure::kOddNotInH};
  for (std::uint32_t s = 1; s < (1u << k); ++s) {
    if (std::popcount(s) % 2) continue;
    const FieldVector e = outer.edge(s);
    if (value_sum(e).is_zero()) return {AbsorberFailure::kEvenAlgebraic};
    const CrossPolytope inner = associated_cross_polytope(e);
    for (const auto& o : inner.edges(1))
      if (!in(layer_edges, o)) return {AbsorberFailure::kFacetNotAlgebraic};
    for (std::uint32_t t = 1; t < (1u << k); ++t) {
      if (std::popcount(t) % 2) continue;
      if (!in(h, inner.edge(t))) return {AbsorberFailure::kEvenNotInH};
    }
  }
  return {};
}

/// Builds the absorber structure; assumes is_absorber(x, a, ...) holds.
inline Absorber make_absorber(const Edge& x, const FieldVector& a, const Injection& pi, std::size_t layer) {
  const int k = x.size();
  Absorber abs;
  abs.target = x;
  abs.x = pi.image(x);
  abs.a = a;
  abs.layer = layer;
  auto vs = [&](const FieldVector& vals) {
    auto e = pi.preimage(vals);
    if (!e) throw Error("absorber vertex outside the image");
    return *e;
  };
  const CrossPolytope outer{abs.x, a};
  for (const auto& e : outer.edges(1)) abs.non_alg.push_back(vs(e));
  for (std::uint32_t s = 1; s < (1u << k); ++s) {
    if (std::popcount(s) % 2) continue;
    const CrossPolytope inner = associated_cross_polytope(outer.edge(s));
    for (const auto& o : inner.edges(1)) abs.alg.push_back(vs(o));
    for (std::uint32_t t = 1; t < (1u << k); ++t) {
      if (std::popcount(t) % 2) continue;
      abs.non_alg.push_back(vs(inner.edge(t)));
    }
  }
  return abs;
}

struct AbsorberSearch {
  std::vector<Absorber> absorbers;
  std::uint64_t candidates_examined = 0;
  bool exhaustive = true;
};

/// Enumerates spanning tuples a in pi([n])^k (lexicographic in field values when
/// n^k <= exhaustive_limit, otherwise `samples` uniform draws) and keeps the ones
/// spanning an absorber for x, up to `limit`.
inline AbsorberSearch find_absorbers(const Edge& x, const Hypergraph& h, const Hypergraph& layer_edges,
                                     const Injection& pi, std::size_t layer, std::size_t limit,
                                     std::uint64_t seed, std::uint64_t exhaustive_limit = 100000000ULL,
                                     std::uint64_t samples = 1000000ULL) {
  AbsorberSearch out;
  const int k = x.size();
  if (h.empty() || limit == 0) return out;
  std::vector<FieldElement> img = pi.values();
  std::sort(img.begin(), img.end());
  const std::uint64_t nv = img.size();
  double space = 1.0;
  for (int i = 0; i < k; ++i) space *= static_cast<double>(nv);

  FieldVector a(static_cast<std::size_t>(k));
  auto consider = [&]() {
    ++out.candidates_examined;
    if (is_absorber(x, a, h, layer_edges, pi)) out.absorbers.push_back(make_absorber(x, a, pi, layer));
    return out.absorbers.size() < limit;
  };

  if (space <= static_cast<double>(exhaustive_limit)) {
    std::array<std::uint64_t, kMaxK> idx{};
    while (true) {
      for (int i = 0; i < k; ++i) a[i] = img[idx[i]];
      if (!consider()) return out;
      int i = k - 1;
      while (i >= 0 && idx[i] + 1 == nv) idx[i--] = 0;
      if (i < 0) return out;
      ++idx[i];
    }
  }
  out.exhaustive = false;
  KeyedRng rng({stream::kSampling, seed, colex_rank(x), 0xab});
  std::unordered_set<std::uint64_t> seen;
  for (std::uint64_t t = 0; t < samples; ++t) {
    std::uint64_t key = 0;
    for (int i = 0; i < k; ++i) {
      const auto j = rng.below(nv);
      a[i] = img[j];
      key = key * nv + j;
    }
    if (!seen.insert(key).second) continue;
    if (!consider()) return out;
  }
  return out;
}

/// Smallest layer under which no (k-2)-subset of x sums to zero.
inline std::size_t select_layer(const Edge& x, const Template& t) {
  const int k = x.size();
  for (std::size_t j = 0; j < t.layer_count(); ++j) {
    const Injection& pi = t.layer(j).pi;
    bool bad = false;
    if (k >= 3)
      for_each_subset(x, k - 2, [&](const VertexSet& s) { bad = bad || pi.sum(s).is_zero(); });
    if (!bad) return j;
  }
  throw Error("resample injections: every layer has a zero-sum (k-2)-subset in " + x.str());
}

}  // namespace steiner
