#pragma once

// Absorbing the leave decomposition S, assembling the final design, and the
// end-to-end pipeline with its retry policy.

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "steiner/gf.hpp"
#include "steiner/hypergraph.hpp"
#include "steiner/leave.hpp"
#include "steiner/nibble.hpp"
#include "steiner/rng.hpp"
#include "steiner/template.hpp"

namespace steiner {

/// A design is a k-graph; verify_steiner decides whether it is one.
using Design = Hypergraph;

/// Number of facets an absorber touches, |FO| = k + k 2^{k-1} (2^{k-1} - 1).
inline std::size_t absorber_facet_count(int k) {
  const std::size_t h = std::size_t{1} << (k - 1);
  return static_cast<std::size_t>(k) + static_cast<std::size_t>(k) * h * (h - 1);
}

/// Template edges in one absorber's algebraic part, (2^{k-1} - 1) 2^{k-1}.
/// Absorbers are facet-disjoint, so |T| / this bounds how many fit.
inline std::size_t absorber_alg_count(int k) {
  const std::size_t h = std::size_t{1} << (k - 1);
  return (h - 1) * h;
}

/// Exact-once coverage of all C(n,k-1) facets; with H given, also D within H.
inline bool verify_steiner(const Design& d, const Hypergraph* h = nullptr, std::string* why = nullptr) {
  auto fail = [&](std::string m) {
    if (why) *why = std::move(m);
    return false;
  };
  const int n = d.n(), k = d.k();
  if (k < 2 || n < k) return fail("bad parameters");
  const std::uint64_t facets = binom(n, k - 1);
  if (d.size() * static_cast<std::uint64_t>(k) != facets)
    return fail("edge count " + std::to_string(d.size()) + " does not match C(n,k-1)/k");
  std::vector<std::uint8_t> hit(facets, 0);
  std::array<std::uint64_t, kMaxK> fr{};
  for (auto r : d.ranks()) {
    const Edge e = colex_unrank(r, k);
    if (h && !h->contains_rank(r)) return fail("edge " + e.str() + " not in H");
    facet_ranks(e, std::span(fr.data(), static_cast<std::size_t>(k)));
    for (int i = 0; i < k; ++i)
      if (hit[fr[i]]++) return fail("facet " + colex_unrank(fr[i], k - 1).str() + " covered twice");
  }
  return true;
}

struct AbortDiagnostics {
  std::size_t index = 0;          ///< position of s_i in the processing order
  Edge target;
  std::size_t candidates = 0;     ///< |A_{s_i}|
  std::size_t excluded_by_absorbers = 0;
  std::size_t excluded_by_leave = 0;  ///< meets a facet of S \ {s_i}
  std::size_t permissible = 0;
};

struct AbsorbOptions {
  bool skip_in_h = false;  ///< leave s in S cap H as a design edge instead of absorbing it
  std::uint64_t exhaustive_limit = 100000000ULL;
  std::uint64_t samples = 1000000ULL;
};

struct AbsorbResult {
  bool ok = true;
  std::vector<Absorber> absorbers;  ///< in processing order
  std::vector<Edge> kept;           ///< S edges used directly (skip_in_h)
  std::optional<AbortDiagnostics> abort;
  std::uint64_t candidates_total = 0;
  std::uint64_t permissible_total = 0;
};

/// Processes S in lexicographic order; for each s picks uniformly among the
/// absorbers for s that share no facet with the earlier picks or with S \ {s}.
inline AbsorbResult rga_absorb(const Hypergraph& s, const Template& t, const Hypergraph& h, std::uint64_t seed,
                               const AbsorbOptions& opt = {}) {
  AbsorbResult out;
  const int n = h.n(), k = h.k();
  if (s.empty()) return out;
  if (s.k() != k) throw Error("S must be k-uniform");

  // live index: 1 = facet of a chosen absorber, 2 = facet of S
  std::vector<std::uint8_t> mark(binom(n, k - 1), 0);
  std::set<std::uint64_t> absorber_facets, leave_facets;  // the same data as plain sets
  std::array<std::uint64_t, kMaxK> fr{};
  for (auto r : s.ranks()) {
    facet_ranks(colex_unrank(r, k), std::span(fr.data(), static_cast<std::size_t>(k)));
    for (int i = 0; i < k; ++i) {
      mark[fr[i]] = 2;
      leave_facets.insert(fr[i]);
    }
  }

  const std::vector<Edge> order = s.edges_lex();
  KeyedRng rng({stream::kAbsorb, seed});
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Edge& x = order[i];
    if (opt.skip_in_h && h.contains(x)) {
      out.kept.push_back(x);
      continue;
    }
    const std::size_t layer = select_layer(x, t);
    const TemplateLayer& tl = t.layer(layer);
    AbsorberSearch found = find_absorbers(x, h, tl.edges, tl.pi, layer, ~std::size_t{0},
                                          hash_key({seed, i}), opt.exhaustive_limit, opt.samples);
    out.candidates_total += found.absorbers.size();

    std::array<std::uint64_t, kMaxK> own{};
    facet_ranks(x, std::span(own.data(), static_cast<std::size_t>(k)));
    auto is_own = [&](std::uint64_t f) { return std::find(own.begin(), own.begin() + k, f) != own.begin() + k; };

    AbortDiagnostics diag;
    diag.index = i;
    diag.target = x;
    diag.candidates = found.absorbers.size();
    std::vector<std::size_t> ok;
    std::size_t ok_by_sets = 0;
    for (std::size_t c = 0; c < found.absorbers.size(); ++c) {
      const auto facets = found.absorbers[c].facet_ranks_sorted();
      bool by_abs = false, by_leave = false, set_abs = false, set_leave = false;
      for (auto f : facets) {
        by_abs = by_abs || mark[f] == 1;
        by_leave = by_leave || (mark[f] == 2 && !is_own(f));
        set_abs = set_abs || absorber_facets.count(f) > 0;
        set_leave = set_leave || (leave_facets.count(f) > 0 && !is_own(f));
      }
      if (by_abs) ++diag.excluded_by_absorbers;
      else if (by_leave) ++diag.excluded_by_leave;
      else ok.push_back(c);
      ok_by_sets += (set_abs || set_leave) ? 0 : 1;
    }
    diag.permissible = ok.size();
    if (ok.size() != ok_by_sets ||
        diag.permissible != diag.candidates - diag.excluded_by_absorbers - diag.excluded_by_leave)
      throw Error("internal: permissible counts disagree");
    out.permissible_total += ok.size();
    if (ok.empty()) {
      out.ok = false;
      out.abort = diag;
      return out;
    }
    Absorber chosen = std::move(found.absorbers[ok[rng.below(ok.size())]]);
    const auto facets = chosen.facet_ranks_sorted();
    if (facets.size() != absorber_facet_count(k)) throw Error("internal: absorber facet count differs from |FO|");
    for (auto f : facets) {
      if (!is_own(f)) mark[f] = 1;
      absorber_facets.insert(f);
    }
    out.absorbers.push_back(std::move(chosen));
  }
  return out;
}

/// N u (T minus the algebraic absorber edges) u the non-algebraic edges u kept S edges.
inline Design assemble_design(const Hypergraph& nset, const Template& t, const std::vector<Absorber>& absorbers,
                              const std::vector<Edge>& kept = {}) {
  const int n = t.n(), k = t.k();
  std::vector<std::uint64_t> removed;
  for (const auto& a : absorbers)
    for (const auto& e : a.alg) removed.push_back(colex_rank(e));
  std::sort(removed.begin(), removed.end());
  std::vector<std::uint64_t> all(nset.ranks().begin(), nset.ranks().end());
  for (auto r : t.edges().ranks())
    if (!std::binary_search(removed.begin(), removed.end(), r)) all.push_back(r);
  for (const auto& a : absorbers)
    for (const auto& e : a.non_alg) all.push_back(colex_rank(e));
  for (const auto& e : kept) all.push_back(colex_rank(e));
  const std::size_t raw = all.size();
  Design d = Hypergraph::from_ranks(n, k, std::move(all));
  std::string why;
  if (d.size() != raw) why = "an edge was produced twice";
  else verify_steiner(d, nullptr, &why);
  if (!why.empty()) throw Error("assembled union is not a design: " + why);
  return d;
}

struct PipelineConfig {
  FieldPolicy policy = FieldPolicy::kMinimal;
  double nu = 0.1;
  double target_density = 0.6;
  int max_steps = 0;
  int stage_retries = 5;  ///< nibble restarts after the first attempt
  int absorb_retries = 3;  ///< rga_absorb reseeds before restarting the nibble
  int injection_resamples = 100;
  std::uint64_t solver_budget_ms = 30000;
  int solver_restarts = 10;
  bool skip_in_h = false;
  bool prefer_h = true;  ///< solver tries S-candidates inside H first
};

struct StageStats {
  int attempt = 0;
  std::string nibble_status;
  std::uint64_t nibble_steps = 0;
  std::uint64_t packing = 0;
  std::uint64_t leave = 0;
  std::string solver_status;
  std::uint64_t solver_nodes = 0;
  int solver_restarts = 0;
  std::uint64_t s_size = 0;
  std::uint64_t s_in_h = 0;
  int absorb_attempts = 0;
  std::uint64_t absorbed = 0;
  std::uint64_t absorber_candidates = 0;
  std::uint64_t to_absorb = 0;         ///< S edges that need an absorber
  std::uint64_t absorb_capacity = 0;  ///< |T| / absorber_alg_count(k)
  std::optional<AbortDiagnostics> abort;
};

struct Provenance {
  int n = 0, k = 0;
  double p = 0.0;
  std::uint64_t seed = 0;
  int field_bits = 0;
  std::uint64_t modulus = 0;
  std::uint64_t h_size = 0;
  std::vector<std::uint64_t> template_layers;
  int injection_resamples = 0;
  PipelineConfig config;
  std::vector<StageStats> attempts;
  double seconds = 0.0;  ///< wall time; kept out of deterministic outputs
};

struct PipelineResult {
  bool success = false;
  Design design;
  Hypergraph h;
  Provenance provenance;
  std::string failure;
  std::vector<Absorber> absorbers;
};

namespace pipeline_detail {

inline std::vector<Injection> injections_for(int n, int k, const std::shared_ptr<const FieldCtx>& f,
                                             std::uint64_t seed, int resample) {
  std::vector<Injection> out;
  for (std::size_t j = 0; j < required_layers(k); ++j)
    out.push_back(sample_injection(n, f, hash_key({stream::kInjection, seed, static_cast<std::uint64_t>(resample)}), j));
  return out;
}

}  // namespace pipeline_detail

/// sample_hnp -> template -> nibble -> exact decomposition -> absorption ->
/// assembly. H depends on (n, k, seed) only through the per-edge uniforms, so
/// runs at different p with one seed see nested hypergraphs.
inline PipelineResult run_pipeline(int n, int k, double p, std::uint64_t seed, const PipelineConfig& cfg = {}) {
  const auto start = std::chrono::steady_clock::now();
  if (!n_is_k_divisible(n, k)) throw Error("n=" + std::to_string(n) + " is not k-divisible");
  PipelineResult res;
  Provenance& prov = res.provenance;
  prov.n = n;
  prov.k = k;
  prov.p = p;
  prov.seed = seed;
  prov.config = cfg;
  auto field = std::make_shared<const FieldCtx>(field_bits_for(n, cfg.policy));
  prov.field_bits = field->bits();
  prov.modulus = field->modulus();
  res.h = sample_hnp(n, k, p, seed);
  prov.h_size = res.h.size();
  auto finish = [&](std::string failure) {
    res.failure = std::move(failure);
    prov.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
  };
  if (res.h.size() * static_cast<std::uint64_t>(k) < binom(n, k - 1)) return finish("H has too few edges");

  // k >= 5 needs some layer without zero-sum (k-2)-subsets for each leave edge;
  // a miss resamples the injections and restarts.
  for (int resample = 0; resample <= cfg.injection_resamples; ++resample) {
    prov.injection_resamples = resample;
    const Template t = build_template(res.h, pipeline_detail::injections_for(n, k, field, seed, resample));
    prov.template_layers.clear();
    for (const auto& l : t.layers()) prov.template_layers.push_back(l.edges.size());
    prov.attempts.clear();
    bool resample_needed = false;

    for (int attempt = 0; attempt <= cfg.stage_retries && !resample_needed; ++attempt) {
      StageStats st;
      st.attempt = attempt;
      NibbleOptions no;
      no.nu = cfg.nu;
      no.target_density = cfg.target_density;
      no.max_steps = cfg.max_steps;
      const std::uint64_t nseed = hash_key({stream::kPipeline, seed, static_cast<std::uint64_t>(resample), 1,
                                            static_cast<std::uint64_t>(attempt)});
      NibbleResult nr = nibble_run(res.h, t, nseed, no);
      st.nibble_status = to_string(nr.status);
      st.nibble_steps = nr.trace.empty() ? 0 : nr.trace.back().t;
      st.packing = nr.packing.size();
      st.leave = nr.leave.size();

      DecompositionProblem dp(nr.leave, k);
      dp.budget_ms = cfg.solver_budget_ms;
      dp.restarts = cfg.solver_restarts;
      dp.seed = hash_key({nseed, 2});
      dp.prefer = cfg.prefer_h ? &res.h : nullptr;
      DecompositionResult dr = decompose_exact(dp);
      st.solver_status = to_string(dr.status);
      st.solver_nodes = dr.nodes;
      st.solver_restarts = dr.restarts_used;
      if (dr.status != SolveStatus::kSolved) {
        prov.attempts.push_back(st);
        continue;
      }
      st.s_size = dr.edges.size();
      for (auto r : dr.edges.ranks()) st.s_in_h += res.h.contains_rank(r) ? 1 : 0;

      AbsorbOptions ao;
      ao.skip_in_h = cfg.skip_in_h;
      st.to_absorb = cfg.skip_in_h ? st.s_size - st.s_in_h : st.s_size;
      st.absorb_capacity = t.size() / absorber_alg_count(k);
      if (st.to_absorb > st.absorb_capacity) {
        // the algebraic parts cannot all fit in T; rga_absorb would abort
        prov.attempts.push_back(st);
        continue;
      }
      for (int a = 0; a <= cfg.absorb_retries; ++a) {
        st.absorb_attempts = a + 1;
        AbsorbResult ar;
        try {
          ar = rga_absorb(dr.edges, t, res.h, hash_key({nseed, 3, static_cast<std::uint64_t>(a)}), ao);
        } catch (const Error& e) {
          if (std::string(e.what()).rfind("resample injections", 0) != 0) throw;
          resample_needed = true;
          break;
        }
        st.absorber_candidates = ar.candidates_total;
        if (!ar.ok) {
          st.abort = ar.abort;
          continue;
        }
        st.absorbed = ar.absorbers.size();
        st.abort.reset();
        res.design = assemble_design(nr.packing, t, ar.absorbers, ar.kept);
        std::string why;
        if (!verify_steiner(res.design, &res.h, &why)) throw Error("internal: assembled design fails: " + why);
        res.absorbers = std::move(ar.absorbers);
        res.success = true;
        prov.attempts.push_back(st);
        return finish("");
      }
      prov.attempts.push_back(st);
    }
    if (!resample_needed) {
      const bool over = std::all_of(prov.attempts.begin(), prov.attempts.end(), [](const StageStats& a) {
        return a.solver_status == "solved" && a.to_absorb > a.absorb_capacity;
      });
      const bool stuck = std::all_of(prov.attempts.begin(), prov.attempts.end(),
                                     [](const StageStats& a) { return a.solver_status == "infeasible"; });
      return finish(over ? "absorbers cannot fit in T" : stuck ? "leave has no decomposition" : "retry budget exhausted");
    }
  }
  return finish("injection resampling budget exhausted");
}

}  // namespace steiner
