#pragma once

// File formats.
//
// Hypergraph / design text: first non-comment line "n k", then one edge per
// line as k distinct 1-based vertex ids. Lines starting with '#' are ignored.
// Edges are written in lexicographic order so files diff cleanly.
//
// JSON for reports and templates goes through nlohmann::json; CSV is written
// by hand with fixed number formatting so repeated runs are byte-identical.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "steiner/absorb.hpp"
#include "steiner/fractional.hpp"
#include "steiner/hypergraph.hpp"
#include "steiner/nibble.hpp"
#include "steiner/operators.hpp"
#include "steiner/template.hpp"

namespace steiner {

using json = nlohmann::json;

inline void write_hypergraph(std::ostream& os, const Hypergraph& h) {
  os << h.n() << ' ' << h.k() << '\n';
  for (const Edge& e : h.edges_lex()) {
    for (int i = 0; i < e.size(); ++i) os << (i ? " " : "") << e[i] + 1;
    os << '\n';
  }
}

inline Hypergraph read_hypergraph(std::istream& is) {
  std::string line;
  int lineno = 0;
  auto next = [&](std::string& out) {
    while (std::getline(is, out)) {
      ++lineno;
      const auto p = out.find_first_not_of(" \t\r");
      if (p == std::string::npos || out[p] == '#') continue;
      return true;
    }
    return false;
  };
  auto fail = [&](const std::string& m) { return Error("hypergraph file line " + std::to_string(lineno) + ": " + m); };
  if (!next(line)) throw Error("hypergraph file is empty");
  int n = 0, k = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> n >> k) || n < 1 || k < 1 || k > kMaxK || n > kMaxN) throw fail("expected header \"n k\"");
  }
  std::vector<Edge> edges;
  std::vector<Vertex> buf;
  while (next(line)) {
    std::istringstream ss(line);
    buf.clear();
    long long v = 0;
    while (ss >> v) {
      if (v < 1 || v > n) throw fail("vertex " + std::to_string(v) + " out of range 1.." + std::to_string(n));
      buf.push_back(static_cast<Vertex>(v - 1));
    }
    if (!ss.eof()) throw fail("not an integer");
    if (static_cast<int>(buf.size()) != k) throw fail("expected " + std::to_string(k) + " vertices");
    try {
      edges.emplace_back(std::span<const Vertex>(buf));
    } catch (const Error& e) {
      throw fail(e.what());
    }
  }
  return Hypergraph(n, k, std::span<const Edge>(edges));
}

inline void save_hypergraph(const std::string& path, const Hypergraph& h) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  write_hypergraph(f, h);
}

inline Hypergraph load_hypergraph(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot read " + path);
  return read_hypergraph(f);
}

/// Shortest round-tripping decimal form; "nan" for NaN.
inline std::string fmt_double(double x) {
  if (x != x) return "nan";
  char buf[32];
  double back = 0;
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    std::sscanf(buf, "%lf", &back);
    if (back == x) break;
  }
  return buf;
}

inline json edge_json(const Edge& e) {
  json a = json::array();
  for (Vertex v : e) a.push_back(v + 1);
  return a;
}

inline json to_json(const Template& t) {
  json j;
  j["n"] = t.n();
  j["k"] = t.k();
  j["layers"] = json::array();
  for (const auto& l : t.layers()) {
    json lj;
    lj["field_bits"] = l.pi.field().bits();
    lj["modulus"] = l.pi.field().modulus();
    json vals = json::array();
    for (auto v : l.pi.values()) vals.push_back(v.bits);
    lj["injection"] = vals;
    lj["collisions"] = l.collisions;
    json edges = json::array();
    for (const Edge& e : l.edges.edges_lex()) edges.push_back(edge_json(e));
    lj["edges"] = edges;
    j["layers"].push_back(lj);
  }
  return j;
}

inline json to_json(const OperatorReport& r) {
  json j;
  j["k"] = r.k;
  j["field_bits"] = r.field_bits;
  j["all_passed"] = r.all_passed();
  j["screen_failures"] = r.screen_failures;
  j["zero_sum_subsets"] = r.zero_sum_subsets;
  j["screen_mismatches"] = r.screen_mismatches;
  j["checks"] = json::array();
  for (const auto& c : r.checks)
    j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"cases", c.cases}, {"counterexample", c.counterexample}});
  return j;
}

inline json to_json(const AbortDiagnostics& d) {
  return {{"index", d.index},
          {"target", edge_json(d.target)},
          {"candidates", d.candidates},
          {"excluded_by_absorbers", d.excluded_by_absorbers},
          {"excluded_by_leave", d.excluded_by_leave},
          {"permissible", d.permissible}};
}

inline json to_json(const PipelineConfig& c) {
  return {{"field_policy", c.policy == FieldPolicy::kMinimal ? "minimal" : "wide"},
          {"nu", c.nu},
          {"target_density", c.target_density},
          {"max_steps", c.max_steps},
          {"stage_retries", c.stage_retries},
          {"absorb_retries", c.absorb_retries},
          {"injection_resamples", c.injection_resamples},
          {"solver_budget_ms", c.solver_budget_ms},
          {"solver_restarts", c.solver_restarts},
          {"skip_in_h", c.skip_in_h},
          {"prefer_h", c.prefer_h}};
}

/// Provenance without wall-clock fields, so equal seeds give equal JSON.
inline json to_json(const Provenance& p) {
  json j;
  j["n"] = p.n;
  j["k"] = p.k;
  j["p"] = p.p;
  j["seed"] = p.seed;
  j["field_bits"] = p.field_bits;
  j["modulus"] = p.modulus;
  j["h_edges"] = p.h_size;
  j["template_layers"] = p.template_layers;
  j["injection_resamples"] = p.injection_resamples;
  j["config"] = to_json(p.config);
  j["attempts"] = json::array();
  for (const auto& a : p.attempts) {
    json aj = {{"attempt", a.attempt},
               {"nibble_status", a.nibble_status},
               {"nibble_steps", a.nibble_steps},
               {"packing", a.packing},
               {"leave", a.leave},
               {"solver_status", a.solver_status},
               {"solver_nodes", a.solver_nodes},
               {"solver_restarts", a.solver_restarts},
               {"s_size", a.s_size},
               {"s_in_h", a.s_in_h},
               {"absorb_attempts", a.absorb_attempts},
               {"absorbed", a.absorbed},
               {"absorber_candidates", a.absorber_candidates},
               {"to_absorb", a.to_absorb},
               {"absorb_capacity", a.absorb_capacity}};
    if (a.abort) aj["abort"] = to_json(*a.abort);
    j["attempts"].push_back(aj);
  }
  return j;
}

inline const char* kTraceHeader =
    "t,G,N,L,D,predicted_L,predicted_D,typicality_defect,affine_C,discrepancy_count";

inline void write_trace_csv(std::ostream& os, const std::vector<NibbleTraceRow>& rows, bool header = true,
                            const std::string& prefix = "") {
  if (header) os << (prefix.empty() ? "" : "seed,") << kTraceHeader << '\n';
  for (const auto& r : rows) {
    if (!prefix.empty()) os << prefix << ',';
    os << r.t << ',' << r.eligible << ',' << r.accepted << ',' << r.leave << ',' << fmt_double(r.degree) << ','
       << fmt_double(r.predicted_leave) << ',' << fmt_double(r.predicted_degree) << ','
       << fmt_double(r.typicality_defect) << ',' << fmt_double(r.affine_c) << ',' << r.discrepancy << '\n';
  }
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  f << j.dump(2) << '\n';
}

}  // namespace steiner
