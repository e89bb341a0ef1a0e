#pragma once

// Exact K_k-decomposition of a leave L by exact cover: columns are the facets of
// L, rows the k-cliques of L. Algorithm X on flat arrays, branching on the column
// with fewest live rows, randomized row order per restart and a geometric
// node-limit schedule.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "steiner/hypergraph.hpp"
#include "steiner/rng.hpp"

namespace steiner {

enum class SolveStatus { kSolved, kInfeasible, kTimeout };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kSolved: return "solved";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kTimeout: return "timeout";
  }
  return "?";
}

struct DecompositionProblem {
  Hypergraph leave;  ///< (k-1)-uniform
  int k = 3;
  std::uint64_t budget_ms = 30000;
  int restarts = 10;
  std::uint64_t seed = 0;
  std::uint64_t first_node_limit = 20000;  ///< doubles on every restart; the last one is unlimited
  const Hypergraph* prefer = nullptr;      ///< candidates in this k-graph are tried first

  DecompositionProblem() = default;
  DecompositionProblem(Hypergraph l, int k_) : leave(std::move(l)), k(k_) {}
};

struct DecompositionResult {
  SolveStatus status = SolveStatus::kInfeasible;
  Hypergraph edges;  ///< S, k-uniform, when solved
  std::string reason;
  int restarts_used = 0;
  int winning_restart = -1;
  std::uint64_t nodes = 0;
  std::uint64_t candidates = 0;
};

namespace leave_detail {

class ExactCover {
 public:
  // rows: flat list of `width` column ids per row
  ExactCover(std::size_t columns, int width, std::vector<std::uint32_t> rows)
      : width_(width), rows_(std::move(rows)), row_count_(rows_.size() / static_cast<std::size_t>(width)) {
    count_.assign(columns, 0);
    for (auto c : rows_) ++count_[c];
    start_.assign(columns + 1, 0);
    for (std::size_t c = 0; c < columns; ++c) start_[c + 1] = start_[c] + count_[c];
    col_rows_.resize(rows_.size());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t r = 0; r < row_count_; ++r)
      for (int j = 0; j < width_; ++j) col_rows_[fill[at(r, j)]++] = static_cast<std::uint32_t>(r);
    base_count_ = count_;
  }

  std::size_t columns() const noexcept { return count_.size(); }
  std::size_t rows() const noexcept { return row_count_; }

  /// Orders each column's rows by `priority` (ascending).
  void order_rows(const std::vector<std::uint64_t>& priority) {
    for (std::size_t c = 0; c < columns(); ++c)
      std::sort(col_rows_.begin() + static_cast<std::ptrdiff_t>(start_[c]),
                col_rows_.begin() + static_cast<std::ptrdiff_t>(start_[c + 1]),
                [&](std::uint32_t a, std::uint32_t b) { return priority[a] < priority[b] || (priority[a] == priority[b] && a < b); });
  }

  enum class Outcome { kFound, kExhausted, kLimit, kDeadline, kCapped };

  /// Searches from scratch. on_solution(rows) returns false to stop.
  template <class OnSolution>
  Outcome search(std::uint64_t node_limit, std::chrono::steady_clock::time_point deadline, bool use_deadline,
                 OnSolution&& on_solution) {
    reset();
    node_limit_ = node_limit;
    deadline_ = deadline;
    use_deadline_ = use_deadline;
    stop_ = Outcome::kExhausted;
    recurse(on_solution);
    return stop_;
  }

  std::uint64_t nodes() const noexcept { return nodes_; }

 private:
  std::uint32_t at(std::size_t r, int j) const noexcept { return rows_[r * static_cast<std::size_t>(width_) + j]; }

  void reset() {
    count_ = base_count_;
    row_live_.assign(row_count_, 1);
    active_.resize(columns());
    pos_.resize(columns());
    for (std::size_t c = 0; c < columns(); ++c) {
      active_[c] = static_cast<std::uint32_t>(c);
      pos_[c] = static_cast<std::uint32_t>(c);
    }
    live_cols_ = columns();
    undo_.clear();
    chosen_.clear();
    nodes_ = 0;
  }

  void drop_column(std::uint32_t c) {
    const std::uint32_t last = active_[live_cols_ - 1];
    const std::uint32_t p = pos_[c];
    active_[p] = last;
    pos_[last] = p;
    active_[live_cols_ - 1] = c;
    pos_[c] = static_cast<std::uint32_t>(live_cols_ - 1);
    --live_cols_;
  }

  // Columns come back in reverse drop order, which restores the array exactly.
  void restore_column() { ++live_cols_; }

  void select(std::uint32_t r) {
    for (int j = 0; j < width_; ++j) {
      const std::uint32_t c = at(r, j);
      drop_column(c);
      for (std::size_t i = start_[c]; i < start_[c + 1]; ++i) {
        const std::uint32_t r2 = col_rows_[i];
        if (!row_live_[r2]) continue;
        row_live_[r2] = 0;
        undo_.push_back(r2);
        for (int j2 = 0; j2 < width_; ++j2) --count_[at(r2, j2)];
      }
    }
  }

  void unselect(std::size_t mark) {
    while (undo_.size() > mark) {
      const std::uint32_t r2 = undo_.back();
      undo_.pop_back();
      row_live_[r2] = 1;
      for (int j2 = 0; j2 < width_; ++j2) ++count_[at(r2, j2)];
    }
    for (int j = 0; j < width_; ++j) restore_column();
  }

  template <class OnSolution>
  bool recurse(OnSolution& on_solution) {
    if (live_cols_ == 0) {
      if (!on_solution(chosen_)) {
        stop_ = Outcome::kCapped;
        return false;
      }
      return true;
    }
    if (++nodes_ > node_limit_) {
      stop_ = Outcome::kLimit;
      return false;
    }
    if (use_deadline_ && (nodes_ & 1023) == 0 && std::chrono::steady_clock::now() > deadline_) {
      stop_ = Outcome::kDeadline;
      return false;
    }
    std::uint32_t best = active_[0];
    for (std::size_t i = 1; i < live_cols_ && count_[best] > 1; ++i)
      if (count_[active_[i]] < count_[best]) best = active_[i];
    if (count_[best] == 0) return true;

    for (std::size_t i = start_[best]; i < start_[best + 1]; ++i) {
      const std::uint32_t r = col_rows_[i];
      if (!row_live_[r]) continue;
      const std::size_t mark = undo_.size();
      chosen_.push_back(r);
      select(r);
      const bool go_on = recurse(on_solution);
      unselect(mark);
      chosen_.pop_back();
      if (!go_on) return false;
      if (stop_ == Outcome::kFound) return false;
    }
    return true;
  }

  int width_;
  std::vector<std::uint32_t> rows_;
  std::size_t row_count_;
  std::vector<std::uint32_t> count_, base_count_;
  std::vector<std::size_t> start_;
  std::vector<std::uint32_t> col_rows_;
  std::vector<std::uint8_t> row_live_;
  std::vector<std::uint32_t> active_, pos_;
  std::size_t live_cols_ = 0;
  std::vector<std::uint32_t> undo_;
  std::vector<std::uint32_t> chosen_;
  std::uint64_t nodes_ = 0, node_limit_ = 0;
  std::chrono::steady_clock::time_point deadline_;
  bool use_deadline_ = false;
  Outcome stop_ = Outcome::kExhausted;

 public:
  /// Lets on_solution end the search as a success rather than a cap.
  void mark_found() noexcept { stop_ = Outcome::kFound; }
};

struct Instance {
  Hypergraph candidates;
  std::vector<std::uint32_t> rows;
};

inline Instance build(const Hypergraph& leave, int k) {
  Instance in;
  in.candidates = k_cliques(leave);
  std::array<std::uint64_t, kMaxK> fr{};
  const auto& lr = leave.ranks();
  in.rows.reserve(in.candidates.size() * static_cast<std::size_t>(k));
  for (auto r : in.candidates.ranks()) {
    facet_ranks(colex_unrank(r, k), std::span(fr.data(), static_cast<std::size_t>(k)));
    for (int j = 0; j < k; ++j) {
      const auto it = std::lower_bound(lr.begin(), lr.end(), fr[j]);
      in.rows.push_back(static_cast<std::uint32_t>(it - lr.begin()));
    }
  }
  return in;
}

}  // namespace leave_detail

/// Exact-once cover check: every facet of every S-edge lies in L, and each facet
/// of L is covered exactly once.
inline bool verify_decomposition(const Hypergraph& leave, const Hypergraph& s) {
  if (leave.empty() && s.empty()) return true;
  if (s.k() != leave.k() + 1 || s.n() != leave.n()) return false;
  const int k = s.k();
  std::vector<std::uint32_t> hits(leave.size(), 0);
  std::array<std::uint64_t, kMaxK> fr{};
  const auto& lr = leave.ranks();
  for (auto r : s.ranks()) {
    facet_ranks(colex_unrank(r, k), std::span(fr.data(), static_cast<std::size_t>(k)));
    for (int j = 0; j < k; ++j) {
      const auto it = std::lower_bound(lr.begin(), lr.end(), fr[j]);
      if (it == lr.end() || *it != fr[j]) return false;
      if (++hits[static_cast<std::size_t>(it - lr.begin())] > 1) return false;
    }
  }
  return std::all_of(hits.begin(), hits.end(), [](std::uint32_t h) { return h == 1; });
}

inline DecompositionResult decompose_exact(const DecompositionProblem& p) {
  DecompositionResult out;
  const int k = p.k;
  if (p.leave.k() != k - 1 && !p.leave.empty()) throw Error("leave must be (k-1)-uniform");
  out.edges = Hypergraph(p.leave.n(), k);
  if (p.leave.empty()) {
    out.status = SolveStatus::kSolved;
    return out;
  }
  if (!is_k_divisible(p.leave, k)) {
    out.reason = "not k-divisible";
    return out;
  }
  leave_detail::Instance in = leave_detail::build(p.leave, k);
  out.candidates = in.candidates.size();
  leave_detail::ExactCover xc(p.leave.size(), k, std::move(in.rows));

  const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(p.budget_ms);
  const int restarts = std::max(1, p.restarts);
  std::vector<std::uint64_t> prio(xc.rows());
  std::uint64_t limit = std::max<std::uint64_t>(1, p.first_node_limit);
  for (int attempt = 0; attempt < restarts; ++attempt) {
    for (std::size_t r = 0; r < prio.size(); ++r) {
      std::uint64_t key = hash_key({stream::kSolver, p.seed, static_cast<std::uint64_t>(attempt), r});
      key >>= 1;
      if (p.prefer && !p.prefer->contains_rank(in.candidates.ranks()[r])) key |= std::uint64_t{1} << 63;
      prio[r] = key;
    }
    xc.order_rows(prio);
    const bool last = attempt + 1 == restarts;
    std::vector<std::uint32_t> found;
    const auto outcome = xc.search(last ? ~std::uint64_t{0} : limit, deadline, true,
                                   [&](const std::vector<std::uint32_t>& rows) {
                                     found = rows;
                                     xc.mark_found();
                                     return true;
                                   });
    out.nodes += xc.nodes();
    out.restarts_used = attempt + 1;
    using O = leave_detail::ExactCover::Outcome;
    if (outcome == O::kFound) {
      std::vector<std::uint64_t> ranks;
      for (auto r : found) ranks.push_back(in.candidates.ranks()[r]);
      out.edges = Hypergraph::from_ranks(p.leave.n(), k, std::move(ranks));
      out.status = SolveStatus::kSolved;
      out.winning_restart = attempt;
      if (!verify_decomposition(p.leave, out.edges)) throw Error("internal: solver returned a non-decomposition");
      return out;
    }
    if (outcome == O::kExhausted) {
      out.reason = "search exhausted";
      return out;
    }
    if (outcome == O::kDeadline) break;
    limit *= 2;
  }
  out.status = SolveStatus::kTimeout;
  out.reason = "budget expired";
  return out;
}

/// Number of distinct K_k-decompositions of L, stopping at `cap`.
inline std::uint64_t count_decompositions(const Hypergraph& leave, int k, std::uint64_t cap = ~std::uint64_t{0}) {
  if (leave.empty()) return 1;
  leave_detail::Instance in = leave_detail::build(leave, k);
  leave_detail::ExactCover xc(leave.size(), k, std::move(in.rows));
  std::uint64_t count = 0;
  xc.search(~std::uint64_t{0}, {}, false, [&](const std::vector<std::uint32_t>&) { return ++count < cap; });
  return count;
}

}  // namespace steiner
