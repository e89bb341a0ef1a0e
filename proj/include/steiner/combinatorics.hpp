#pragma once

// Small vertex sets, binomials and colex ranking of k-subsets of [n].
//
// Vertices are 0-based internally; the text file formats use 1-based ids.

#include <algorithm>
#include <array>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace steiner {

/// Library-wide error type; thrown on precondition violations.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kMaxK = 8;
inline constexpr int kMaxN = 2048;

using Vertex = int;

/// A sorted set of at most kMaxK distinct vertices. Used for edges (k-sets)
/// and facets ((k-1)-sets).
class VertexSet {
 public:
  VertexSet() = default;

  VertexSet(std::initializer_list<Vertex> vs) {
    if (vs.size() > static_cast<std::size_t>(kMaxK)) throw Error("vertex set too large");
    for (Vertex v : vs) v_[size_++] = v;
    normalize();
  }

  explicit VertexSet(std::span<const Vertex> vs) {
    if (vs.size() > static_cast<std::size_t>(kMaxK)) throw Error("vertex set too large");
    for (Vertex v : vs) v_[size_++] = v;
    normalize();
  }

  int size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  Vertex operator[](int i) const noexcept { return v_[i]; }
  const Vertex* begin() const noexcept { return v_.data(); }
  const Vertex* end() const noexcept { return v_.data() + size_; }

  bool contains(Vertex x) const noexcept {
    return std::binary_search(begin(), end(), x);
  }

  /// The set with the i-th smallest element removed.
  VertexSet without_index(int i) const noexcept {
    VertexSet r;
    for (int j = 0; j < size_; ++j)
      if (j != i) r.v_[r.size_++] = v_[j];
    return r;
  }

  VertexSet with(Vertex x) const {
    VertexSet r = *this;
    if (r.size_ >= kMaxK) throw Error("vertex set too large");
    r.v_[r.size_++] = x;
    r.normalize();
    return r;
  }

  int intersection_size(const VertexSet& o) const noexcept {
    int c = 0;
    for (Vertex x : *this) c += o.contains(x) ? 1 : 0;
    return c;
  }

  friend bool operator==(const VertexSet& a, const VertexSet& b) noexcept {
    return a.size_ == b.size_ && std::equal(a.begin(), a.end(), b.begin());
  }
  /// Lexicographic order on the sorted tuples.
  friend bool operator<(const VertexSet& a, const VertexSet& b) noexcept {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }

  std::string str() const {
    std::string s = "{";
    for (int i = 0; i < size_; ++i) {
      if (i) s += ',';
      s += std::to_string(v_[i]);
    }
    return s + "}";
  }

  friend std::ostream& operator<<(std::ostream& os, const VertexSet& s) { return os << s.str(); }

 private:
  void normalize() {
    std::sort(v_.begin(), v_.begin() + size_);
    if (std::adjacent_find(v_.begin(), v_.begin() + size_) != v_.begin() + size_)
      throw Error("vertex set has repeated vertices");
  }

  std::array<Vertex, kMaxK> v_{};
  int size_ = 0;
};

using Edge = VertexSet;
using Facet = VertexSet;

/// Binomial coefficients C(n, r) for n < kMaxN + 1, r <= kMaxK.
class Binomials {
 public:
  static const Binomials& get() {
    static const Binomials table;
    return table;
  }

  std::uint64_t operator()(int n, int r) const noexcept {
    if (r < 0 || n < 0 || r > n) return 0;
    return c_[static_cast<std::size_t>(n) * (kMaxK + 1) + static_cast<std::size_t>(r)];
  }

 private:
  Binomials() : c_(static_cast<std::size_t>(kMaxN + 1) * (kMaxK + 1), 0) {
    for (int n = 0; n <= kMaxN; ++n) {
      at(n, 0) = 1;
      for (int r = 1; r <= std::min(n, kMaxK); ++r)
        at(n, r) = at(n - 1, r - 1) + (r <= n - 1 ? at(n - 1, r) : 0);
    }
  }
  std::uint64_t& at(int n, int r) { return c_[static_cast<std::size_t>(n) * (kMaxK + 1) + r]; }

  std::vector<std::uint64_t> c_;
};

inline std::uint64_t binom(int n, int r) { return Binomials::get()(n, r); }

/// Colex rank of a sorted set: sum of C(v_i, i+1).
inline std::uint64_t colex_rank(const VertexSet& s) noexcept {
  const auto& c = Binomials::get();
  std::uint64_t r = 0;
  for (int i = 0; i < s.size(); ++i) r += c(s[i], i + 1);
  return r;
}

/// Inverse of colex_rank for sets of the given size.
inline VertexSet colex_unrank(std::uint64_t rank, int size) {
  const auto& c = Binomials::get();
  std::array<Vertex, kMaxK> out{};
  int hi = kMaxN;
  for (int i = size - 1; i >= 0; --i) {
    // largest v with C(v, i+1) <= rank
    int lo = i, h = hi;
    while (lo < h) {
      int mid = (lo + h + 1) / 2;
      if (c(mid, i + 1) <= rank) lo = mid;
      else h = mid - 1;
    }
    out[i] = lo;
    rank -= c(lo, i + 1);
    hi = lo - 1;
  }
  return VertexSet(std::span<const Vertex>(out.data(), static_cast<std::size_t>(size)));
}

/// Calls f(subset) for every r-subset of s, in lexicographic order.
template <class F>
void for_each_subset(const VertexSet& s, int r, F&& f) {
  const int n = s.size();
  if (r < 0 || r > n) return;
  std::array<int, kMaxK> idx{};
  for (int i = 0; i < r; ++i) idx[i] = i;
  std::array<Vertex, kMaxK> buf{};
  while (true) {
    for (int i = 0; i < r; ++i) buf[i] = s[idx[i]];
    f(VertexSet(std::span<const Vertex>(buf.data(), static_cast<std::size_t>(r))));
    int i = r - 1;
    while (i >= 0 && idx[i] == n - r + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
}

/// Calls f(set) for every r-subset of {0..n-1}, in lexicographic order.
template <class F>
void for_each_kset(int n, int r, F&& f) {
  if (r < 0 || r > n || r > kMaxK) return;
  std::array<Vertex, kMaxK> idx{};
  for (int i = 0; i < r; ++i) idx[i] = i;
  while (true) {
    f(VertexSet(std::span<const Vertex>(idx.data(), static_cast<std::size_t>(r))));
    int i = r - 1;
    while (i >= 0 && idx[i] == n - r + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
}

/// The (|e|-1)-subsets of e; index i omits the i-th smallest vertex.
inline std::vector<Facet> facets_of_edge(const Edge& e) {
  std::vector<Facet> out;
  out.reserve(static_cast<std::size_t>(e.size()));
  for (int i = 0; i < e.size(); ++i) out.push_back(e.without_index(i));
  return out;
}

/// Colex ranks of the facets of e, written into out[0..|e|).
inline void facet_ranks(const Edge& e, std::span<std::uint64_t> out) noexcept {
  const auto& c = Binomials::get();
  const int k = e.size();
  // prefix[i] = rank contribution of e[0..i) at their own positions
  // suffix contributions shift down by one position once e[i] is dropped
  std::array<std::uint64_t, kMaxK + 1> prefix{};
  for (int i = 0; i < k; ++i) prefix[i + 1] = prefix[i] + c(e[i], i + 1);
  std::array<std::uint64_t, kMaxK + 1> shifted{};
  for (int i = k - 1; i >= 0; --i) shifted[i] = shifted[i + 1] + c(e[i], i);
  for (int i = 0; i < k; ++i) out[i] = prefix[i] + shifted[i + 1];
}

}  // namespace steiner
