#pragma once

// Rödl nibble and random greedy packing: grow a partial design N inside H,
// facet-disjoint from the template, until the uncovered facets are sparse.
//
// Both share PackingCore, which keeps the eligible edges G_t as a bitmap over
// colex ranks plus, per facet, the number of eligible edges through it. Covering
// a facet kills the n-k+1 k-sets through it, so each step costs O(|G_t|) for
// the bite and O(n) per newly covered facet.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "steiner/hypergraph.hpp"
#include "steiner/rng.hpp"
#include "steiner/template.hpp"

namespace steiner {

struct NibbleTraceRow {
  std::uint64_t t = 0;
  std::uint64_t eligible = 0;  ///< |G_t|
  std::uint64_t accepted = 0;  ///< |N_t|
  std::uint64_t leave = 0;     ///< |L_t|
  double degree = 0.0;         ///< D_t = k|G_t|/|L_t|
  double predicted_leave = 0.0;
  double predicted_degree = 0.0;
  double typicality_defect = std::numeric_limits<double>::quiet_NaN();
  double affine_c = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t discrepancy = 0;  ///< uncovered facets in no eligible edge
};

namespace nibble_detail {

inline constexpr std::uint8_t kUncovered = 0, kByTemplate = 1, kByPacking = 2;

class PackingCore {
 public:
  PackingCore(const Hypergraph& h, const Hypergraph& t) : n_(h.n()), k_(h.k()) {
    if (t.n() != n_ || (t.k() != k_ && !t.empty())) throw Error("template does not match H");
    const std::uint64_t edges = binom(n_, k_);
    if (edges > (std::uint64_t{1} << 32)) throw Error("instance too large for the packing core");
    facets_total_ = binom(n_, k_ - 1);
    covered_.assign(facets_total_, kUncovered);
    degree_.assign(facets_total_, 0);
    alive_.assign((edges + 63) / 64, 0);

    std::array<std::uint64_t, kMaxK> fr{};
    for (auto r : t.ranks()) {
      facet_ranks(colex_unrank(r, k_), span(fr));
      for (int i = 0; i < k_; ++i) {
        if (covered_[fr[i]] != kUncovered) throw Error("template is not a partial design");
        covered_[fr[i]] = kByTemplate;
      }
    }
    template_facets_ = t.size() * static_cast<std::uint64_t>(k_);
    uncovered_ = facets_total_ - template_facets_;
    for (auto r : h.ranks()) {
      facet_ranks(colex_unrank(r, k_), span(fr));
      bool ok = true;
      for (int i = 0; i < k_ && ok; ++i) ok = covered_[fr[i]] == kUncovered;
      if (!ok) continue;
      eligible_.push_back(r);
      alive_[r >> 6] |= std::uint64_t{1} << (r & 63);
      for (int i = 0; i < k_; ++i) ++degree_[fr[i]];
    }
    alive_count_ = eligible_.size();
    for (std::uint64_t f = 0; f < facets_total_; ++f)
      if (covered_[f] == kUncovered && degree_[f] == 0) ++discrepancy_;
  }

  int n() const noexcept { return n_; }
  int k() const noexcept { return k_; }
  std::uint64_t facets_total() const noexcept { return facets_total_; }
  std::uint64_t uncovered() const noexcept { return uncovered_; }
  std::uint64_t template_facets() const noexcept { return template_facets_; }
  std::uint64_t alive_count() const noexcept { return alive_count_; }
  std::uint64_t discrepancy() const noexcept { return discrepancy_; }
  const std::vector<std::uint64_t>& accepted() const noexcept { return accepted_; }
  bool alive(std::uint64_t r) const noexcept { return (alive_[r >> 6] >> (r & 63)) & 1u; }
  std::uint8_t facet_state(std::uint64_t f) const noexcept { return covered_[f]; }
  std::uint32_t facet_degree(std::uint64_t f) const noexcept { return degree_[f]; }

  /// Eligible ranks; may contain dead entries until compact() is called.
  const std::vector<std::uint64_t>& eligible_raw() const noexcept { return eligible_; }

  void compact() {
    std::erase_if(eligible_, [&](std::uint64_t r) { return !alive(r); });
  }

  /// Adds an eligible edge to N and kills every edge sharing a facet with it.
  void accept(std::uint64_t r) {
    if (!alive(r)) throw Error("internal: accepting an ineligible edge");
    const Edge e = colex_unrank(r, k_);
    accepted_.push_back(r);
    std::array<std::uint64_t, kMaxK> fr{};
    facet_ranks(e, span(fr));
    for (int i = 0; i < k_; ++i) {
      covered_[fr[i]] = kByPacking;
      --uncovered_;
    }
    for (int i = 0; i < k_; ++i) kill_through(e.without_index(i));
  }

  double leave_density() const noexcept {
    return facets_total_ ? static_cast<double>(uncovered_) / static_cast<double>(facets_total_) : 0.0;
  }

  Hypergraph leave() const {
    std::vector<std::uint64_t> r;
    r.reserve(uncovered_);
    for (std::uint64_t f = 0; f < facets_total_; ++f)
      if (covered_[f] == kUncovered) r.push_back(f);
    return Hypergraph::from_ranks(n_, k_ - 1, std::move(r));
  }

  Hypergraph packing() const { return Hypergraph::from_ranks(n_, k_, accepted_); }

  /// k|N| + |L| + |K(T)| = C(n, k-1), with |L| recounted from the facet array.
  bool accounting_holds() const {
    std::uint64_t unc = 0;
    for (auto c : covered_) unc += c == kUncovered ? 1 : 0;
    return unc == uncovered_ &&
           static_cast<std::uint64_t>(k_) * accepted_.size() + unc + template_facets_ == facets_total_;
  }

 private:
  std::span<std::uint64_t> span(std::array<std::uint64_t, kMaxK>& a) const {
    return std::span(a.data(), static_cast<std::size_t>(k_));
  }

  void kill_through(const Facet& f) {
    std::array<std::uint64_t, kMaxK> fr{};
    for (Vertex v = 0; v < n_; ++v) {
      if (f.contains(v)) continue;
      const Edge e = f.with(v);
      const std::uint64_t r = colex_rank(e);
      if (!alive(r)) continue;
      alive_[r >> 6] &= ~(std::uint64_t{1} << (r & 63));
      --alive_count_;
      facet_ranks(e, span(fr));
      for (int i = 0; i < k_; ++i)
        if (--degree_[fr[i]] == 0 && covered_[fr[i]] == kUncovered) ++discrepancy_;
    }
  }

  int n_, k_;
  std::uint64_t facets_total_ = 0, uncovered_ = 0, template_facets_ = 0, alive_count_ = 0, discrepancy_ = 0;
  std::vector<std::uint8_t> covered_;
  std::vector<std::uint32_t> degree_;
  std::vector<std::uint64_t> alive_;
  std::vector<std::uint64_t> eligible_;
  std::vector<std::uint64_t> accepted_;
};

}  // namespace nibble_detail

struct NibbleOptions {
  double nu = 0.1;
  double target_density = 0.05;
  int max_steps = 0;  ///< 0: ceil(10 ln n)
  bool check_divisibility = true;
  /// Typicality defect and affine bound per trace row; both cost a pass over L_t.
  bool diagnostics = false;
  int typicality_h = 2;
  std::uint64_t typicality_samples = 2000;
  std::optional<Injection> pi;  ///< injection for the affine bound (layer 0 if absent)
};

inline int default_max_steps(int n) { return static_cast<int>(std::ceil(10.0 * std::log(static_cast<double>(n)))); }

/// One bite's expected shrink factor of the leave, 1 - nu e^{-k nu}.
inline double nibble_shrink(double nu, int k) { return 1.0 - nu * std::exp(-static_cast<double>(k) * nu); }

class NibbleState {
 public:
  NibbleState(const Hypergraph& h, const Template& t, double nu)
      : core_(h, t.edges()), nu_(nu), p_(h.density()), pi_(t.layer_count() ? std::optional<Injection>(t.layer(0).pi) : std::nullopt) {
    if (!(nu >= 0.0 && nu <= 1.0)) throw Error("nu must lie in [0, 1]");
    leave0_ = core_.uncovered();
  }

  /// Nibble on H with no template (G_0 = H).
  NibbleState(const Hypergraph& h, double nu) : NibbleState(h, Template(h.n(), h.k(), {}), nu) {}

  int n() const noexcept { return core_.n(); }
  int k() const noexcept { return core_.k(); }
  double nu() const noexcept { return nu_; }
  std::uint64_t step() const noexcept { return t_; }
  std::uint64_t eligible() const noexcept { return core_.alive_count(); }
  std::uint64_t accepted() const noexcept { return core_.accepted().size(); }
  std::uint64_t leave_size() const noexcept { return core_.uncovered(); }
  double leave_density() const noexcept { return core_.leave_density(); }
  double degree() const noexcept {
    return core_.uncovered() ? static_cast<double>(k()) * static_cast<double>(eligible()) /
                                   static_cast<double>(core_.uncovered())
                             : 0.0;
  }
  Hypergraph leave() const { return core_.leave(); }
  Hypergraph packing() const { return core_.packing(); }
  const std::vector<std::uint64_t>& accepted_ranks() const noexcept { return core_.accepted(); }
  const std::vector<NibbleTraceRow>& trace() const noexcept { return trace_; }
  const nibble_detail::PackingCore& core() const noexcept { return core_; }

  /// Records the current state as a trace row.
  void record(const NibbleOptions& opt, std::uint64_t seed) {
    NibbleTraceRow row;
    row.t = t_;
    row.eligible = eligible();
    row.accepted = accepted();
    row.leave = leave_size();
    row.degree = degree();
    const double s = nibble_shrink(nu_, k());
    // |L| curve starts from the measured |L_0| = C(n,k-1) - k|T|; the D curve
    // starts from np, while the true D_0 is (n-k+1)p when T is empty
    row.predicted_leave = static_cast<double>(leave0_) * std::pow(s, static_cast<double>(t_));
    row.predicted_degree = static_cast<double>(n()) * p_ * std::pow(s, static_cast<double>((k() - 1) * t_));
    row.discrepancy = core_.discrepancy();
    if (opt.diagnostics && leave_size() > 0) {
      const Hypergraph l = leave();
      row.typicality_defect =
          typicality_defect(l, opt.typicality_h, opt.typicality_samples, hash_key({seed, t_})).defect;
      const auto& pi = opt.pi ? opt.pi : pi_;
      if (pi && l.k() >= 1) row.affine_c = affine_bound_C(l, pi->field(), pi->values());
    }
    trace_.push_back(row);
  }

  /// One bite: keep each eligible edge with probability nu/D_t, then accept the
  /// kept edges that share no facet with another kept edge. Returns false (and
  /// changes nothing) when D_t < 1 or nothing is eligible.
  bool advance(std::uint64_t seed, bool check_divisibility = true) {
    const double d = degree();
    if (eligible() == 0 || d < 1.0) return false;
    const double rate = nu_ / d;
    const int k = this->k();
    core_.compact();
    std::vector<std::uint64_t> bite;
    for (auto r : core_.eligible_raw())
      if (keyed_uniform({stream::kNibble, seed, t_, r}) < rate) bite.push_back(r);

    std::unordered_map<std::uint64_t, std::uint32_t> hits;
    std::vector<std::array<std::uint64_t, kMaxK>> fr(bite.size());
    for (std::size_t i = 0; i < bite.size(); ++i) {
      facet_ranks(colex_unrank(bite[i], k), std::span(fr[i].data(), static_cast<std::size_t>(k)));
      for (int j = 0; j < k; ++j) ++hits[fr[i][j]];
    }
    for (std::size_t i = 0; i < bite.size(); ++i) {
      bool lone = true;
      for (int j = 0; j < k && lone; ++j) lone = hits[fr[i][j]] == 1;
      if (lone) core_.accept(bite[i]);
    }
    ++t_;
    if (!core_.accounting_holds()) throw Error("internal: facet accounting identity violated");
    if (check_divisibility && n_is_k_divisible(n(), k) && !is_k_divisible(leave(), k))
      throw Error("internal: leave lost k-divisibility at step " + std::to_string(t_));
    return true;
  }

  /// A step that samples nothing (nu = 0): only the clock moves.
  void tick() { ++t_; }

 private:
  nibble_detail::PackingCore core_;
  double nu_;
  double p_;
  std::optional<Injection> pi_;
  std::uint64_t t_ = 0;
  std::uint64_t leave0_ = 0;
  std::vector<NibbleTraceRow> trace_;
};

enum class NibbleStatus { kReached, kStalled };

inline const char* to_string(NibbleStatus s) { return s == NibbleStatus::kReached ? "reached" : "stalled"; }

struct NibbleResult {
  NibbleStatus status = NibbleStatus::kStalled;
  Hypergraph packing;  ///< N
  Hypergraph leave;    ///< L, (k-1)-uniform
  std::vector<NibbleTraceRow> trace;
  std::string stop_reason;
};

inline NibbleState nibble_init(const Hypergraph& h, const Template& t, double nu = 0.1) {
  return NibbleState(h, t, nu);
}

/// A single bite; nu = 0 only advances the clock.
inline void nibble_step(NibbleState& s, std::uint64_t seed, const NibbleOptions& opt = {}) {
  if (s.trace().empty()) s.record(opt, seed);
  if (s.nu() == 0.0) s.tick();
  else if (!s.advance(seed, opt.check_divisibility)) throw Error("nibble stop: D_t < 1 or G_t empty");
  s.record(opt, seed);
}

inline NibbleResult nibble_run(const Hypergraph& h, const Template& t, std::uint64_t seed,
                               const NibbleOptions& opt = {}) {
  if (!(opt.nu > 0.0 && opt.nu <= 1.0)) throw Error("nu must lie in (0, 1]");
  if (!(opt.target_density > 0.0 && opt.target_density <= 1.0)) throw Error("target density must lie in (0, 1]");
  NibbleState s(h, t, opt.nu);
  const int max_steps = opt.max_steps > 0 ? opt.max_steps : default_max_steps(h.n());
  s.record(opt, seed);
  NibbleResult out;
  while (true) {
    if (s.leave_density() <= opt.target_density) {
      out.status = NibbleStatus::kReached;
      out.stop_reason = "target density";
      break;
    }
    if (s.step() >= static_cast<std::uint64_t>(max_steps)) {
      out.stop_reason = "max steps";
      break;
    }
    if (!s.advance(seed, opt.check_divisibility)) {
      out.stop_reason = s.eligible() == 0 ? "no eligible edges" : "degree below 1";
      break;
    }
    s.record(opt, seed);
  }
  out.packing = s.packing();
  out.leave = s.leave();
  out.trace = s.trace();
  return out;
}

/// Random greedy packing: repeatedly add a uniformly random eligible edge.
/// Equivalent to scanning the eligible edges in a uniformly random order and
/// keeping each one still eligible. Trace rows are logged every ~1/20 of the
/// facet count.
inline NibbleResult greedy_pack_run(const Hypergraph& h, const Template& t, double target_density,
                                    std::uint64_t seed) {
  if (!(target_density > 0.0 && target_density <= 1.0)) throw Error("target density must lie in (0, 1]");
  nibble_detail::PackingCore core(h, t.edges());
  std::vector<std::pair<std::uint64_t, std::uint64_t>> order;
  order.reserve(core.eligible_raw().size());
  for (auto r : core.eligible_raw()) order.emplace_back(hash_key({stream::kGreedy, seed, r}), r);
  std::sort(order.begin(), order.end());

  NibbleResult out;
  const std::uint64_t block = std::max<std::uint64_t>(1, core.facets_total() / (20 * static_cast<std::uint64_t>(h.k())));
  auto record = [&](std::uint64_t t) {
    NibbleTraceRow row;
    row.t = t;
    row.eligible = core.alive_count();
    row.accepted = core.accepted().size();
    row.leave = core.uncovered();
    row.degree = core.uncovered() ? static_cast<double>(h.k()) * static_cast<double>(core.alive_count()) /
                                        static_cast<double>(core.uncovered())
                                  : 0.0;
    row.discrepancy = core.discrepancy();
    out.trace.push_back(row);
  };
  record(0);
  std::uint64_t rows = 0;
  for (const auto& [key, r] : order) {
    if (core.leave_density() <= target_density) break;
    if (!core.alive(r)) continue;
    core.accept(r);
    if (core.accepted().size() % block == 0) record(++rows);
  }
  if (core.leave_density() <= target_density) {
    out.status = NibbleStatus::kReached;
    out.stop_reason = "target density";
  } else {
    out.stop_reason = "no eligible edges";
  }
  if (!core.accounting_holds()) throw Error("internal: facet accounting identity violated");
  record(++rows);
  out.packing = core.packing();
  out.leave = core.leave();
  return out;
}

}  // namespace steiner
