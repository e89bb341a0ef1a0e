#pragma once

// Arithmetic in GF(2^m) and linear algebra over it.

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "steiner/combinatorics.hpp"

namespace steiner {

struct FieldElement {
  std::uint32_t bits = 0;

  constexpr bool is_zero() const noexcept { return bits == 0; }
  friend constexpr bool operator==(FieldElement, FieldElement) noexcept = default;
  friend constexpr auto operator<=>(FieldElement, FieldElement) noexcept = default;
};

constexpr FieldElement fe(std::uint32_t bits) noexcept { return FieldElement{bits}; }

/// Characteristic two: addition is XOR, every element is its own negative.
constexpr FieldElement operator+(FieldElement a, FieldElement b) noexcept { return {a.bits ^ b.bits}; }
constexpr FieldElement& operator+=(FieldElement& a, FieldElement b) noexcept {
  a.bits ^= b.bits;
  return a;
}

namespace gf_detail {

// Carry-less product of two polynomials over GF(2) of degree < 32.
constexpr std::uint64_t clmul(std::uint32_t a, std::uint32_t b) noexcept {
  std::uint64_t r = 0;
  std::uint64_t aa = a;
  while (b) {
    if (b & 1u) r ^= aa;
    aa <<= 1;
    b >>= 1;
  }
  return r;
}

constexpr int degree(std::uint64_t p) noexcept { return p ? 63 - std::countl_zero(p) : -1; }

constexpr std::uint64_t poly_mod(std::uint64_t a, std::uint64_t m) noexcept {
  const int dm = degree(m);
  for (int d = degree(a); d >= dm; d = degree(a)) a ^= m << (d - dm);
  return a;
}

/// Irreducibility by trial division with every polynomial of degree 1..deg/2.
inline bool is_irreducible(std::uint64_t p) {
  const int d = degree(p);
  if (d < 1) return false;
  for (std::uint64_t q = 2; degree(q) <= d / 2; ++q) {
    if (poly_mod(p, q) == 0) return false;
  }
  return true;
}

// Fixed modulus per m. m <= 16 are standard primitive trinomials/pentanomials.
inline constexpr std::array<std::uint32_t, 17> kModulusTable = {
    0,       0,       0x7,     0xB,     0x13,    0x25,    0x43,    0x83,   0x11D,
    0x211,   0x409,   0x805,   0x1053,  0x201B,  0x4443,  0x8003,  0x1100B};

}  // namespace gf_detail

enum class FieldPolicy {
  kMinimal,  ///< smallest m with 2^m > n + 1
  kWide,    ///< 2n <= 2^m <= 4n
};

/// GF(2^m) with a fixed modulus. Immutable after construction.
class FieldCtx {
 public:
  static constexpr int kMinBits = 2;
  static constexpr int kMaxBits = 31;

  explicit FieldCtx(int m) : m_(m) {
    if (m < kMinBits || m > kMaxBits)
      throw Error("field bit-width out of range [2,31]: " + std::to_string(m));
    if (m < static_cast<int>(gf_detail::kModulusTable.size())) {
      modulus_ = gf_detail::kModulusTable[static_cast<std::size_t>(m)];
    } else {
      std::uint64_t p = (std::uint64_t{1} << m) | 1u;
      while (!gf_detail::is_irreducible(p)) p += 2;
      modulus_ = p;
    }
    build_log_tables();
  }

  int bits() const noexcept { return m_; }
  std::uint64_t modulus() const noexcept { return modulus_; }
  std::uint64_t size() const noexcept { return std::uint64_t{1} << m_; }
  std::uint32_t mask() const noexcept { return static_cast<std::uint32_t>(size() - 1); }

  FieldElement zero() const noexcept { return {0}; }
  FieldElement one() const noexcept { return {1}; }

  FieldElement element(std::uint64_t bits) const {
    if (bits >= size()) throw Error("value outside field");
    return {static_cast<std::uint32_t>(bits)};
  }

  FieldElement add(FieldElement a, FieldElement b) const noexcept { return a + b; }

  FieldElement mul(FieldElement a, FieldElement b) const noexcept {
    if (a.is_zero() || b.is_zero()) return {0};
    if (!log_.empty()) {
      std::uint32_t s = log_[a.bits] + log_[b.bits];
      const std::uint32_t order = mask();
      if (s >= order) s -= order;
      return {exp_[s]};
    }
    return mul_slow(a, b);
  }

  /// Shift-and-reduce multiplication (no tables).
  FieldElement mul_slow(FieldElement a, FieldElement b) const noexcept {
    return {static_cast<std::uint32_t>(gf_detail::poly_mod(gf_detail::clmul(a.bits, b.bits), modulus_))};
  }

  FieldElement inv(FieldElement a) const {
    if (a.is_zero()) throw Error("zero has no inverse");
    if (!log_.empty()) {
      const std::uint32_t order = mask();
      return {exp_[(order - log_[a.bits]) % order]};
    }
    // a^(2^m - 2)
    FieldElement r = one();
    FieldElement base = a;
    std::uint64_t e = size() - 2;
    while (e) {
      if (e & 1u) r = mul_slow(r, base);
      base = mul_slow(base, base);
      e >>= 1;
    }
    return r;
  }

  bool has_log_tables() const noexcept { return !log_.empty(); }

  friend bool operator==(const FieldCtx& a, const FieldCtx& b) noexcept {
    return a.m_ == b.m_ && a.modulus_ == b.modulus_;
  }

 private:
  void build_log_tables() {
    if (m_ > 16) return;
    const std::uint32_t order = mask();
    std::vector<std::uint32_t> exp(order), log(size(), 0);
    FieldElement x = one();
    for (std::uint32_t i = 0; i < order; ++i) {
      if (i > 0 && x == one()) return;  // x is not primitive: no tables
      exp[i] = x.bits;
      log[x.bits] = i;
      x = mul_slow(x, FieldElement{2});
    }
    exp_ = std::move(exp);
    log_ = std::move(log);
  }

  int m_;
  std::uint64_t modulus_ = 0;
  std::vector<std::uint32_t> exp_, log_;
};

inline FieldCtx field_new(int m) { return FieldCtx(m); }

/// Bit-width for a vertex count under a sizing policy.
inline int field_bits_for(int n, FieldPolicy policy) {
  if (n < 1) throw Error("n must be positive");
  int m = FieldCtx::kMinBits;
  if (policy == FieldPolicy::kMinimal) {
    while (m <= FieldCtx::kMaxBits && (std::uint64_t{1} << m) <= static_cast<std::uint64_t>(n) + 1) ++m;
  } else {
    while (m <= FieldCtx::kMaxBits && (std::uint64_t{1} << m) < 2 * static_cast<std::uint64_t>(n)) ++m;
  }
  if (m > FieldCtx::kMaxBits) throw Error("n too large for supported fields");
  return m;
}

using FieldVector = std::vector<FieldElement>;

/// Dense matrix over GF(2^m). Entries are stored row-major.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows * cols)) {}

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = FieldElement{1};
    return m;
  }
  static Matrix all_ones(int r, int c) {
    Matrix m(r, c);
    for (auto& x : m.a_) x = FieldElement{1};
    return m;
  }

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }

  FieldElement& operator()(int r, int c) noexcept { return a_[static_cast<std::size_t>(r * cols_ + c)]; }
  FieldElement operator()(int r, int c) const noexcept { return a_[static_cast<std::size_t>(r * cols_ + c)]; }

  bool is_zero() const noexcept {
    for (auto x : a_)
      if (!x.is_zero()) return false;
    return true;
  }

  /// Columns [from, from+count).
  Matrix column_block(int from, int count) const {
    Matrix m(rows_, count);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < count; ++c) m(r, c) = (*this)(r, from + c);
    return m;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<FieldElement> a_;
};

inline Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error("dimension mismatch");
  Matrix r(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) + b(i, j);
  return r;
}

inline Matrix multiply(const FieldCtx& f, const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw Error("dimension mismatch");
  Matrix r(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int l = 0; l < a.cols(); ++l) {
      const FieldElement x = a(i, l);
      if (x.is_zero()) continue;
      for (int j = 0; j < b.cols(); ++j) r(i, j) += f.mul(x, b(l, j));
    }
  return r;
}

inline FieldVector apply(const FieldCtx& f, const Matrix& a, const FieldVector& v) {
  if (static_cast<int>(v.size()) != a.cols()) throw Error("dimension mismatch");
  FieldVector r(static_cast<std::size_t>(a.rows()));
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r[i] += f.mul(a(i, j), v[j]);
  return r;
}

namespace gf_detail {

struct Echelon {
  Matrix m;               // reduced row echelon form
  std::vector<int> pivots;  // pivot column of each nonzero row
};

// Reduced row echelon form of [a | extra] where extra columns are carried along.
inline Echelon rref(const FieldCtx& f, Matrix m, int pivot_cols) {
  std::vector<int> pivots;
  int row = 0;
  for (int c = 0; c < pivot_cols && row < m.rows(); ++c) {
    int p = row;
    while (p < m.rows() && m(p, c).is_zero()) ++p;
    if (p == m.rows()) continue;
    if (p != row)
      for (int j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(row, j));
    const FieldElement s = f.inv(m(row, c));
    for (int j = 0; j < m.cols(); ++j) m(row, j) = f.mul(m(row, j), s);
    for (int r = 0; r < m.rows(); ++r) {
      if (r == row || m(r, c).is_zero()) continue;
      const FieldElement t = m(r, c);
      for (int j = 0; j < m.cols(); ++j) m(r, j) += f.mul(t, m(row, j));
    }
    pivots.push_back(c);
    ++row;
  }
  return {std::move(m), std::move(pivots)};
}

}  // namespace gf_detail

inline int rank(const FieldCtx& f, const Matrix& m) {
  return static_cast<int>(gf_detail::rref(f, m, m.cols()).pivots.size());
}

/// Basis of the null space; one vector per free column.
inline std::vector<FieldVector> kernel_basis(const FieldCtx& f, const Matrix& m) {
  auto [r, pivots] = gf_detail::rref(f, m, m.cols());
  std::vector<bool> is_pivot(static_cast<std::size_t>(m.cols()), false);
  for (int c : pivots) is_pivot[c] = true;
  std::vector<FieldVector> basis;
  for (int free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    FieldVector v(static_cast<std::size_t>(m.cols()));
    v[free] = FieldElement{1};
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = r(static_cast<int>(i), free);  // -x = x
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Solution set {x : Mx = y} as a point plus the kernel basis.
struct AffineSet {
  FieldVector point;
  std::vector<FieldVector> directions;

  int dimension() const noexcept { return static_cast<int>(directions.size()); }
};

inline std::optional<AffineSet> affine_preimage(const FieldCtx& f, const Matrix& m, const FieldVector& y) {
  if (static_cast<int>(y.size()) != m.rows()) throw Error("dimension mismatch");
  Matrix aug(m.rows(), m.cols() + 1);
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
    aug(i, m.cols()) = y[i];
  }
  auto [r, pivots] = gf_detail::rref(f, aug, m.cols());
  for (int i = static_cast<int>(pivots.size()); i < r.rows(); ++i)
    if (!r(i, m.cols()).is_zero()) return std::nullopt;
  AffineSet s;
  s.point.assign(static_cast<std::size_t>(m.cols()), FieldElement{});
  for (std::size_t i = 0; i < pivots.size(); ++i) s.point[pivots[i]] = r(static_cast<int>(i), m.cols());
  s.directions = kernel_basis(f, m);
  return s;
}

}  // namespace steiner
