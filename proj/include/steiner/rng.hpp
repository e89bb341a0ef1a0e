#pragma once

// Counter-based random numbers.
//
// Every random decision in the library is a pure function of a key built from
// the master seed plus a few integers naming the decision (stage, step, edge id
// ...). This keeps runs bit-reproducible across platforms and lets coupled
// experiments (H(n;p) at several p, the random edge process) share draws.

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <utility>
#include <vector>

namespace steiner {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Folds a sequence of integers into one 64-bit key.
constexpr std::uint64_t hash_key(std::initializer_list<std::uint64_t> parts) noexcept {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (auto p : parts) h = mix64(h ^ mix64(p));
  return h;
}

/// Uniform double in [0,1) with 53 random bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Uniform double in [0,1) determined by the key.
constexpr double keyed_uniform(std::initializer_list<std::uint64_t> parts) noexcept {
  return to_unit(hash_key(parts));
}

// Stream names used as the first key component.
namespace stream {
inline constexpr std::uint64_t kEdge = 0x11;        // per-edge uniform, H(n;p) and the process
inline constexpr std::uint64_t kInjection = 0x12;
inline constexpr std::uint64_t kNibble = 0x13;
inline constexpr std::uint64_t kGreedy = 0x14;
inline constexpr std::uint64_t kSolver = 0x15;
inline constexpr std::uint64_t kAbsorb = 0x16;
inline constexpr std::uint64_t kPipeline = 0x17;
inline constexpr std::uint64_t kSampling = 0x18;
inline constexpr std::uint64_t kTrial = 0x19;
}  // namespace stream

/// Sequential generator over a counter-based stream. Satisfies
/// UniformRandomBitGenerator, but prefer the member helpers: the std
/// distributions are not specified bit-for-bit across standard libraries.
class KeyedRng {
 public:
  using result_type = std::uint64_t;

  explicit KeyedRng(std::uint64_t key) noexcept : key_(key) {}
  KeyedRng(std::initializer_list<std::uint64_t> parts) noexcept : key_(hash_key(parts)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return mix64(key_ ^ mix64(counter_++)); }

  double uniform() noexcept { return to_unit((*this)()); }

  /// Uniform integer in [0, bound). Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t bound) noexcept {
    if (bound <= 1) return 0;
    const unsigned __int128 m0 = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m0);
    auto m = m0;
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  template <class T>
  void shuffle(std::vector<T>& v) noexcept {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace steiner
