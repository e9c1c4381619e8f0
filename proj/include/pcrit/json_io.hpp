#pragma once

// JSON formats (schema tag "pcrit/1") and CSV series output.
//
// Graph files:
//   {"edges":[{"b":1.0,"u":0,"v":1},...],
//    "vertices":[{"c":0.0,"id":0,"m":1.0},...]}
// with vertices sorted by id and edges canonical (u < v, sorted
// lexicographically).  Loading a canonical file and saving it again is
// byte-identical: the writer emits a fixed key order (alphabetical), a fixed
// indent, and shortest round-trip doubles.
//
// Function files:   {"schema":"pcrit/1","values":[...]}
// Problem files:    {"K":[...],"f":{"3":0.5,...},"g":{"0":1.0,...}}
// Report payloads carry {"schema":"pcrit/1","kind":...}.

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pcrit/certificate.hpp"
#include "pcrit/dirichlet.hpp"
#include "pcrit/eigen.hpp"
#include "pcrit/graph.hpp"
#include "pcrit/maxprinciple.hpp"
#include "pcrit/operators.hpp"
#include "pcrit/potential.hpp"

namespace pcrit {

using json = nlohmann::json;

inline constexpr const char* kSchemaTag = "pcrit/1";

inline json graph_to_json(const WeightedGraph& g) {
  GraphData d = g.to_data();
  json jv = json::array();
  for (const VertexData& v : d.vertices) jv.push_back({{"c", v.c}, {"id", v.id}, {"m", v.m}});
  json je = json::array();
  for (const EdgeData& e : d.edges) je.push_back({{"b", e.b}, {"u", e.u}, {"v", e.v}});
  return json{{"edges", je}, {"vertices", jv}};
}

inline GraphData graph_data_from_json(const json& j) {
  GraphData d;
  if (!j.is_object() || !j.contains("vertices") || !j.contains("edges"))
    throw input_error("graph json must be an object with 'vertices' and 'edges'");
  try {
    for (const auto& v : j.at("vertices")) {
      VertexData vd;
      vd.id = v.at("id").get<int>();
      vd.m = v.value("m", 1.0);
      vd.c = v.value("c", 0.0);
      d.vertices.push_back(vd);
    }
    for (const auto& e : j.at("edges")) {
      EdgeData ed;
      ed.u = e.at("u").get<int>();
      ed.v = e.at("v").get<int>();
      ed.b = e.at("b").get<double>();
      d.edges.push_back(ed);
    }
  } catch (const json::exception& ex) {
    throw input_error(std::string("malformed graph json: ") + ex.what());
  }
  return d;
}

inline std::string dump_graph(const WeightedGraph& g) { return graph_to_json(g).dump(2) + "\n"; }

inline json parse_json_text(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw input_error("could not parse " + what + " as json");
  return j;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write file: " + path);
  out << text;
}

inline WeightedGraph load_graph(const std::string& path) {
  json j = parse_json_text(read_text_file(path), "graph file " + path);
  return WeightedGraph::from_data(graph_data_from_json(j));
}

inline void save_graph(const WeightedGraph& g, const std::string& path) {
  write_text_file(path, dump_graph(g));
}

inline json function_to_json(const VertexFunction& f) {
  return json{{"schema", kSchemaTag}, {"values", f}};
}

inline VertexFunction function_from_json(const json& j, int expected_size = -1) {
  if (!j.is_object() || !j.contains("values") || !j.at("values").is_array())
    throw input_error("function json must be an object with a 'values' array");
  VertexFunction f;
  try {
    f = j.at("values").get<VertexFunction>();
  } catch (const json::exception& ex) {
    throw input_error(std::string("malformed function json: ") + ex.what());
  }
  if (expected_size >= 0 && static_cast<int>(f.size()) != expected_size)
    throw input_error("function length does not match the graph");
  return f;
}

struct ProblemData {
  std::vector<int> K;
  std::map<int, double> g;
  std::map<int, double> f;
};

inline ProblemData problem_from_json(const json& j) {
  ProblemData pd;
  if (!j.is_object() || !j.contains("K")) throw input_error("problem json must contain 'K'");
  try {
    pd.K = j.at("K").get<std::vector<int>>();
    auto read_map = [&](const char* key, std::map<int, double>& dst) {
      if (!j.contains(key)) return;
      for (const auto& [k, val] : j.at(key).items()) dst[std::stoi(k)] = val.get<double>();
    };
    read_map("g", pd.g);
    read_map("f", pd.f);
  } catch (const json::exception& ex) {
    throw input_error(std::string("malformed problem json: ") + ex.what());
  } catch (const std::invalid_argument&) {
    throw input_error("problem json maps must be keyed by integer vertex ids");
  }
  return pd;
}

inline json problem_to_json(const ProblemData& pd) {
  json jg = json::object(), jf = json::object();
  for (const auto& [k, v] : pd.g) jg[std::to_string(k)] = v;
  for (const auto& [k, v] : pd.f) jf[std::to_string(k)] = v;
  return json{{"K", pd.K}, {"f", jf}, {"g", jg}};
}

inline DirichletProblem make_dirichlet_problem(const WeightedGraph& g, const ProblemData& pd) {
  DirichletProblem prob;
  prob.subset = make_subset(g, pd.K);
  prob.g.assign(static_cast<std::size_t>(g.size()), 0.0);
  prob.f.assign(static_cast<std::size_t>(g.size()), 0.0);
  for (const auto& [k, v] : pd.g) {
    if (k < 0 || k >= g.size()) throw input_error("problem rhs references a vertex out of range");
    prob.g[static_cast<std::size_t>(k)] = v;
  }
  for (const auto& [k, v] : pd.f) {
    if (k < 0 || k >= g.size())
      throw input_error("problem boundary data references a vertex out of range");
    prob.f[static_cast<std::size_t>(k)] = v;
  }
  return prob;
}

inline json to_json(const Certificate& c) {
  json j{{"schema", kSchemaTag}, {"kind", "certificate"},      {"name", c.name},
         {"gap", c.gap},         {"min_term", c.min_term},     {"argmin", c.argmin},
         {"equality", c.equality_flag}, {"passed", c.passed},  {"detail", c.detail}};
  j["tolerances"] = c.tolerances;
  j["metrics"] = c.metrics;
  return j;
}

inline json to_json(const ValidationReport& r) {
  json viol = json::array();
  for (const auto& v : r.violations) viol.push_back({{"code", v.code}, {"message", v.message}});
  json notes = json::array();
  for (const auto& v : r.notes) notes.push_back({{"code", v.code}, {"message", v.message}});
  return json{{"schema", kSchemaTag},
              {"kind", "validation"},
              {"ok", r.ok()},
              {"violations", viol},
              {"notes", notes}};
}

inline json to_json(const SolveReport& r) {
  return json{{"schema", kSchemaTag},
              {"kind", "dirichlet-solve"},
              {"converged", r.converged},
              {"residual_sup", r.residual_sup},
              {"tol_effective", r.tol_effective},
              {"objective", r.objective},
              {"iterations", r.iterations},
              {"min_interior", r.min_interior},
              {"positivity", r.positivity},
              {"restart_spread", r.restart_spread},
              {"coercivity_lambda", r.coercivity_lambda},
              {"method", r.method},
              {"solution", r.solution}};
}

inline json to_json(const EigenReport& r) {
  json comps = json::array();
  for (const auto& c : r.components)
    comps.push_back({{"size", c.vertices.size()},
                     {"lambda", c.lambda},
                     {"residual_sup", c.residual_sup},
                     {"restart_spread", c.restart_spread},
                     {"converged", c.converged}});
  return json{{"schema", kSchemaTag},
              {"kind", "principal-eigenvalue"},
              {"lambda", r.lambda},
              {"residual_sup", r.residual_sup},
              {"restart_spread", r.restart_spread},
              {"converged", r.converged},
              {"positive_on_support", r.positive_on_support},
              {"method", r.method},
              {"definiteness_certified", r.definiteness_certified},
              {"definiteness_margin", r.definiteness_margin},
              {"components", comps},
              {"eigenfunction", r.eigenfunction}};
}

inline json to_json(const CapacityReport& r) {
  return json{{"schema", kSchemaTag},
              {"kind", "capacity"},
              {"value", r.value},
              {"residual_sup", r.residual_sup},
              {"stationarity_gap", r.stationarity_gap},
              {"lambda_gate", r.lambda_gate},
              {"converged", r.converged},
              {"minimizer", r.minimizer}};
}

inline json to_json(const CapacitySequenceReport& r) {
  return json{{"schema", kSchemaTag},
              {"kind", "capacity-sequence"},
              {"anchor", r.anchor},
              {"radii", r.radii},
              {"values", r.values},
              {"lambda_values", r.lambda_values},
              {"anchor_boundary_distance", r.anchor_boundary_distance},
              {"monotone_nonincreasing", r.monotone_nonincreasing},
              {"limit_estimate", r.limit_estimate},
              {"flattening", r.flattening},
              {"fit_slope", r.decay_fit.slope},
              {"fit_intercept", r.decay_fit.intercept},
              {"fit_r2", r.decay_fit.r2},
              {"second_anchor_value", r.second_anchor_value},
              {"all_converged", r.all_converged}};
}

inline json to_json(const GreenReport& r) {
  return json{{"schema", kSchemaTag},
              {"kind", "green"},
              {"anchor", r.anchor},
              {"radii", r.radii},
              {"cap_values", r.cap_values},
              {"anchor_values", r.anchor_values},
              {"cap_final", r.cap_final},
              {"residual_sup", r.residual_sup},
              {"energy_identity_gap", r.energy_identity_gap},
              {"monotone_ok", r.monotone_ok},
              {"nonconstant", r.nonconstant},
              {"converged", r.converged},
              {"host_size", r.host_size},
              {"green", r.green}};
}

inline json to_json(const WitnessReport& r) {
  json certs = json::array();
  for (const auto& c : r.certificates) certs.push_back(to_json(c));
  json j{{"schema", kSchemaTag},
         {"kind", "superharmonic-witness"},
         {"outcome", r.outcome == WitnessOutcome::witness ? "witness" : "supercritical"},
         {"anchor", r.anchor},
         {"radii", r.radii},
         {"lambda_values", r.lambda_values},
         {"normalizations", r.normalizations},
         {"host_size", r.host_size},
         {"min_on_final_interior", r.min_on_final_interior},
         {"certificates", certs}};
  if (r.outcome == WitnessOutcome::witness) {
    j["witness"] = r.witness;
  } else {
    j["eigenfunction"] = r.eigenfunction;
    j["lambda_bad"] = r.lambda_bad;
    j["bad_radius"] = r.bad_radius;
  }
  return j;
}

inline json to_json(const GroundStateReport& r) {
  return json{{"schema", kSchemaTag},
              {"kind", "ground-state"},
              {"anchor", r.anchor},
              {"radii", r.radii},
              {"region", r.region},
              {"host_size", r.host_size},
              {"anchor_value", r.anchor_value},
              {"positive", r.positive},
              {"stabilized", r.stabilized},
              {"max_error_indicator", r.max_error_indicator},
              {"deep_residual_sup", r.deep_residual_sup},
              {"minimal_growth", to_json(r.minimal_growth)},
              {"converged", r.converged},
              {"ground_state", r.ground_state}};
}

inline json to_json(const ClassifyReport& r) {
  return json{{"schema", kSchemaTag},
              {"kind", "classification"},
              {"verdict", verdict_name(r.verdict)},
              {"capacity_sequence", to_json(r.caps)},
              {"flattening", r.flattening},
              {"green_ok", r.green_ok},
              {"evidence_kind", r.evidence_kind},
              {"evidence_host_size", r.evidence_host_size},
              {"lambda_bad", r.lambda_bad},
              {"narrative", r.narrative},
              {"evidence", r.evidence}};
}

inline json to_json(const MaxPrincipleReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  return json{{"schema", kSchemaTag},
              {"kind", "maximum-principle"},
              {"lambda", r.lambda},
              {"principle_expected", r.principle_expected},
              {"principle_holds", r.principle_holds},
              {"trials", r.trials},
              {"checks", checks},
              {"counterexample", r.counterexample},
              {"detail", r.detail}};
}

// CSV series: header then one row per truncation, %.17g values.
inline std::string series_csv(const std::string& value_name, const std::vector<int>& radii,
                              const std::vector<double>& values) {
  std::string out = "n,radius," + value_name + "\n";
  char buf[64];
  for (std::size_t i = 0; i < radii.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%d,%.17g\n", i, radii[i],
                  i < values.size() ? values[i] : std::numeric_limits<double>::quiet_NaN());
    out += buf;
  }
  return out;
}

}  // namespace pcrit
