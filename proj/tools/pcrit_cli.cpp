// Command-line front end: graph ingestion, family generation, solves,
// classification, and JSON/CSV report emission.
//
// Exit codes: 0 success, 1 verdict-level refusal (green/witness on a
// supercritical or non-flattening family, failed verify suite), 2 input error
// (malformed files, invalid graphs, p <= 1, unknown family, bad vertex ids).
#include <CLI11.hpp>
#include <Eigen/Core>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pcrit/certificates.hpp"
#include "pcrit/common.hpp"
#include "pcrit/json_io.hpp"

namespace {

using namespace pcrit;

struct FamilyOpts {
  std::string family = "z";
  std::vector<int> radii;
  int degree = 3;
  int dim = 2;
  int cycle_len = 12;
  double edge_weight = 1.0;
  double measure = 1.0;
  double star_ratio = 1.0;
  std::string c_spec;                    // "const:0.5" or "dist:v0,v1,..."
  std::vector<std::string> c_over;       // "id:val"
  std::vector<std::string> edge_over;    // "u:v:w"
};

void add_family_flags(CLI::App* cmd, FamilyOpts& fo) {
  cmd->add_option("--family", fo.family, "family name: z|cycle|star|tree|lattice");
  cmd->add_option("--radii", fo.radii, "truncation radii, e.g. 4,8,16,32")->delimiter(',');
  cmd->add_option("--degree", fo.degree, "tree vertex degree");
  cmd->add_option("--dim", fo.dim, "lattice dimension");
  cmd->add_option("--cycle-len", fo.cycle_len, "cycle length");
  cmd->add_option("--edge-weight", fo.edge_weight, "uniform edge weight b");
  cmd->add_option("--measure", fo.measure, "uniform vertex measure m");
  cmd->add_option("--star-ratio", fo.star_ratio, "geometric decay of star leaf weights");
  cmd->add_option("--c", fo.c_spec, "potential: const:<v> or dist:<v0>,<v1>,...");
  cmd->add_option("--c-override", fo.c_over, "per-vertex potential override id:val");
  cmd->add_option("--edge-override", fo.edge_over, "edge weight override u:v:w");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = s.find(sep, pos);
    out.push_back(s.substr(pos, next - pos));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

double parse_num(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw input_error("trailing characters in " + what + ": " + s);
    return v;
  } catch (const std::exception&) {
    throw input_error("cannot parse " + what + ": '" + s + "'");
  }
}

int parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size()) throw input_error("trailing characters in " + what + ": " + s);
    return v;
  } catch (const std::exception&) {
    throw input_error("cannot parse " + what + ": '" + s + "'");
  }
}

ExhaustionSpec build_spec(const FamilyOpts& fo) {
  ExhaustionSpec spec;
  spec.family = family_from_name(fo.family);
  spec.radii = fo.radii;
  spec.degree = fo.degree;
  spec.dim = fo.dim;
  spec.cycle_len = fo.cycle_len;
  spec.edge_weight = fo.edge_weight;
  spec.measure = fo.measure;
  spec.star_leaf_ratio = fo.star_ratio;
  if (!fo.c_spec.empty()) {
    if (fo.c_spec.rfind("const:", 0) == 0) {
      spec.potential.constant = parse_num(fo.c_spec.substr(6), "--c constant");
    } else if (fo.c_spec.rfind("dist:", 0) == 0) {
      for (const std::string& tok : split(fo.c_spec.substr(5), ','))
        spec.potential.by_distance.push_back(parse_num(tok, "--c table entry"));
      if (spec.potential.by_distance.empty()) throw input_error("--c dist: needs at least one value");
    } else {
      throw input_error("--c must look like const:<v> or dist:<v0>,<v1>,...");
    }
  }
  for (const std::string& s : fo.c_over) {
    std::vector<std::string> parts = split(s, ':');
    if (parts.size() != 2) throw input_error("--c-override must look like id:val, got '" + s + "'");
    spec.c_overrides.emplace_back(parse_int(parts[0], "override vertex id"),
                                  parse_num(parts[1], "override value"));
  }
  for (const std::string& s : fo.edge_over) {
    std::vector<std::string> parts = split(s, ':');
    if (parts.size() != 3) throw input_error("--edge-override must look like u:v:w, got '" + s + "'");
    spec.edge_overrides.emplace_back(parse_int(parts[0], "override endpoint"),
                                     parse_int(parts[1], "override endpoint"),
                                     parse_num(parts[2], "override weight"));
  }
  return spec;
}

int parse_anchor(const std::string& s) {
  if (s == "root" || s == "origin" || s == "center") return 0;  // family ids start there
  return parse_int(s, "--anchor");
}

std::vector<int> load_interior(const std::string& path) {
  json j = parse_json_text(read_text_file(path), "interior file " + path);
  if (j.is_array()) return j.get<std::vector<int>>();
  return problem_from_json(j).K;
}

// A report plus the (radius, value) series the CSV projection uses.
struct Emission {
  json report;
  std::vector<int> radii;
  std::vector<double> values;
  bool has_series = false;
};

void emit(const Emission& em, const std::string& out_path, const std::string& format) {
  std::string text;
  if (format == "json") {
    text = em.report.dump(2) + "\n";
  } else if (format == "csv") {
    if (!em.has_series || em.radii.empty())
      throw input_error("this report carries no sequence; csv output is only for series reports");
    text = series_csv("value", em.radii, em.values);
  } else {
    throw input_error("unknown --format '" + format + "' (expected json or csv)");
  }
  if (out_path.empty())
    std::cout << text;
  else
    write_text_file(out_path, text);
}

// --- verify suites -----------------------------------------------------

// Small random instance generator for the self-check suites: a path backbone
// with random chords, weights and potentials in friendly ranges.
WeightedGraph random_instance(std::mt19937_64& rng, int n, double c_lo, double c_hi) {
  std::uniform_real_distribution<double> wdist(0.3, 2.0), mdist(0.5, 2.0), cdist(c_lo, c_hi),
      u01(0.0, 1.0);
  GraphData d;
  for (int v = 0; v < n; ++v) d.vertices.push_back({v, mdist(rng), cdist(rng)});
  for (int v = 0; v + 1 < n; ++v) d.edges.push_back({v, v + 1, wdist(rng)});
  for (int u = 0; u + 2 < n; ++u)
    for (int v = u + 2; v < n; ++v)
      if (u01(rng) < 0.12) d.edges.push_back({u, v, wdist(rng)});
  return WeightedGraph::from_data(d);
}

json verify_picone(double p, long trials, std::uint64_t seed) {
  std::mt19937_64 rng = rng_for(seed, "verify-picone", 0);
  std::uniform_real_distribution<double> ab(0.0, 4.0), cc(0.2, 5.0);
  double worst = std::numeric_limits<double>::infinity();
  long failures = 0;
  for (long t = 0; t < trials; ++t) {
    double a = ab(rng), b = ab(rng), c = cc(rng);
    if (t % 1000 == 17 % 1000) b = a * c;  // plant exact equality cases
    double val = pointwise_picone_value(a, b, c, p);
    double scale = std::pow(std::abs(a) + std::abs(b) + 1.0, p) * (1.0 + c + 1.0 / c);
    double gap = val / scale;
    worst = std::min(worst, gap);
    if (val < -1e-12 * scale) ++failures;
    if (b == a * c && std::abs(val) > 1e-11 * (1.0 + scale)) ++failures;
  }
  return json{{"suite", "picone"}, {"trials", trials}, {"failures", failures},
              {"worst_scaled_gap", worst}, {"passed", failures == 0}};
}

json verify_greens_formula(long trials, std::uint64_t seed) {
  const double ps[] = {1.2, 1.5, 2.0, 2.5, 3.0, 4.0};
  double worst = 0.0;
  long failures = 0;
  for (long t = 0; t < trials; ++t) {
    std::mt19937_64 rng = rng_for(seed, "verify-greens", static_cast<std::uint64_t>(t));
    std::uniform_int_distribution<int> nd(4, 30);
    int n = nd(rng);
    WeightedGraph g = random_instance(rng, n, -0.5, 0.5);
    OperatorParams P(g, ps[t % 6]);
    std::uniform_real_distribution<double> fd(-2.0, 2.0);
    VertexFunction f(static_cast<std::size_t>(n)), phi(static_cast<std::size_t>(n));
    for (auto& v : f) v = fd(rng);
    for (auto& v : phi) v = fd(rng);
    std::vector<int> K;
    for (int v = 0; v < n; ++v)
      if (v % 2 == 0) K.push_back(v);
    GreensFormulaCheck chk = greens_formula_check(P, make_subset(g, K), f, phi);
    double rel = chk.residual / (1.0 + chk.scale);
    worst = std::max(worst, rel);
    if (chk.residual > 1e-10 * (1.0 + chk.scale)) ++failures;
  }
  return json{{"suite", "greens-formula"}, {"trials", trials}, {"failures", failures},
              {"worst_scaled_residual", worst}, {"passed", failures == 0}};
}

json verify_ads(double p, long trials, std::uint64_t seed) {
  double worst = std::numeric_limits<double>::infinity();
  long failures = 0;
  for (long t = 0; t < trials; ++t) {
    std::mt19937_64 rng = rng_for(seed, "verify-ads", static_cast<std::uint64_t>(t));
    std::uniform_int_distribution<int> nd(4, 20);
    int n = nd(rng);
    WeightedGraph g = random_instance(rng, n, -0.4, 0.6);
    OperatorParams P(g, p);
    std::uniform_real_distribution<double> ud(0.1, 3.0);
    VertexFunction u1(static_cast<std::size_t>(n)), u2(static_cast<std::size_t>(n));
    for (auto& v : u1) v = ud(rng);
    for (auto& v : u2) v = ud(rng);
    std::vector<int> K;
    for (int v = 0; v < n; ++v)
      if (v % 2 == 1) K.push_back(v);
    if (t % 10 == 3) {
      double C = 0.5 + ud(rng);
      for (std::size_t i = 0; i < u1.size(); ++i) u1[i] = C * u2[i];
    }
    Certificate cert = ads_gap(P, u1, u2, make_subset(g, K));
    worst = std::min(worst, cert.gap);
    if (cert.gap < -1e-11) ++failures;
    if (t % 10 == 3 && std::abs(cert.gap) > 1e-10 * (1.0 + std::abs(cert.metrics.at("lhs"))))
      ++failures;
  }
  return json{{"suite", "ads"}, {"trials", trials}, {"failures", failures},
              {"worst_gap", worst}, {"passed", failures == 0}};
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("PCRIT_THREADS")) {
    int n = std::atoi(threads);
    if (n > 0) Eigen::setNbThreads(n);
  }

  CLI::App app{"discrete quasi-linear potential theory on weighted graphs"};
  app.require_subcommand(1);

  std::string graph_path, interior_path, problem_path, out_path, format = "json";
  std::string anchor_str = "0";
  double p = 2.0;
  std::uint64_t seed = 0;
  int restarts = -1;
  double tol = -1.0;
  FamilyOpts fo;

  auto add_common = [&](CLI::App* cmd, bool family_ok) {
    cmd->add_option("--p", p, "exponent p > 1");
    cmd->add_option("--seed", seed, "deterministic seed split per subtask");
    cmd->add_option("--restarts", restarts, "solver restart count");
    cmd->add_option("--tol", tol, "residual tolerance override");
    cmd->add_option("--out", out_path, "write the report here instead of stdout");
    cmd->add_option("--format", format, "json|csv");
    if (family_ok) add_family_flags(cmd, fo);
  };

  CLI::App* cmd_validate = app.add_subcommand("validate", "check a graph file");
  cmd_validate->add_option("--graph", graph_path, "graph json file")->required();
  cmd_validate->add_option("--out", out_path, "write the report here instead of stdout");
  cmd_validate->add_option("--format", format, "json|csv");

  CLI::App* cmd_eigen = app.add_subcommand("eigen", "principal eigenvalue on a vertex set");
  cmd_eigen->add_option("--graph", graph_path, "graph json file");
  cmd_eigen->add_option("--interior", interior_path, "json file with the vertex set K");
  add_common(cmd_eigen, true);

  CLI::App* cmd_dirichlet = app.add_subcommand("dirichlet", "solve H u = g on K, u = f outside");
  cmd_dirichlet->add_option("--graph", graph_path, "graph json file")->required();
  cmd_dirichlet->add_option("--problem", problem_path, "problem json file")->required();
  add_common(cmd_dirichlet, false);

  CLI::App* cmd_capacity = app.add_subcommand(
      "capacity", "variational capacity of an anchor in a set, or a family sequence");
  cmd_capacity->add_option("--graph", graph_path, "graph json file");
  cmd_capacity->add_option("--interior", interior_path, "json file with the capacity set K");
  cmd_capacity->add_option("--anchor", anchor_str, "anchor vertex id (or root/origin/center)");
  add_common(cmd_capacity, true);

  CLI::App* cmd_green = app.add_subcommand("green", "normalized green function along a family");
  cmd_green->add_option("--anchor", anchor_str, "pole vertex id (or root/origin/center)");
  add_common(cmd_green, true);

  CLI::App* cmd_classify = app.add_subcommand("classify", "criticality verdict along a family");
  cmd_classify->add_option("--anchor", anchor_str, "anchor vertex id (or root/origin/center)");
  add_common(cmd_classify, true);

  CLI::App* cmd_witness = app.add_subcommand("witness", "global superharmonic witness run");
  cmd_witness->add_option("--anchor", anchor_str, "anchor vertex id (or root/origin/center)");
  add_common(cmd_witness, true);

  std::string suite = "picone";
  long trials = 1000;
  CLI::App* cmd_verify = app.add_subcommand("verify", "randomized inequality self-checks");
  cmd_verify->add_option("--suite", suite, "picone|greens-formula|ads");
  cmd_verify->add_option("--trials", trials, "number of random instances");
  add_common(cmd_verify, false);

  CLI11_PARSE(app, argc, argv);

  try {
    Emission em;
    int exit_code = 0;

    if (cmd_validate->parsed()) {
      json j = parse_json_text(read_text_file(graph_path), "graph file " + graph_path);
      ValidationReport rep = validate(graph_data_from_json(j));
      em.report = to_json(rep);
      if (!rep.ok()) exit_code = 2;
    } else if (cmd_eigen->parsed()) {
      EigenConfig ec;
      ec.seed = seed;
      if (restarts > 0) ec.restarts = restarts;
      if (tol > 0.0) ec.tol = tol;
      std::optional<WeightedGraph> g;
      std::vector<int> K;
      if (!graph_path.empty()) {
        g = load_graph(graph_path);
        if (interior_path.empty()) throw input_error("eigen --graph needs --interior");
        K = load_interior(interior_path);
      } else if (!fo.radii.empty()) {
        FamilySlice slice = build_family(build_spec(fo), static_cast<int>(fo.radii.size()) - 1);
        g = slice.graph;
        K = slice.subset.interior;
      } else {
        throw input_error("eigen needs either --graph or --family with --radii");
      }
      OperatorParams P(*g, p);
      EigenReport rep = principal_eigenvalue(P, K, ec);
      em.report = to_json(rep);
      em.has_series = true;
      for (std::size_t i = 0; i < rep.components.size(); ++i) {
        em.radii.push_back(static_cast<int>(rep.components[i].vertices.size()));
        em.values.push_back(rep.components[i].lambda);
      }
    } else if (cmd_dirichlet->parsed()) {
      WeightedGraph g = load_graph(graph_path);
      json pj = parse_json_text(read_text_file(problem_path), "problem file " + problem_path);
      DirichletProblem prob = make_dirichlet_problem(g, problem_from_json(pj));
      OperatorParams P(g, p);
      SolverConfig cfg;
      cfg.seed = seed;
      if (restarts >= 0) cfg.restarts = restarts;
      if (tol > 0.0) cfg.tol_residual = tol;
      SolveReport rep = minimize_j(P, prob, cfg);
      em.report = to_json(rep);
    } else if (cmd_capacity->parsed()) {
      SolverConfig cfg;
      cfg.seed = seed;
      if (restarts >= 0) cfg.restarts = restarts;
      if (tol > 0.0) cfg.tol_residual = tol;
      if (!graph_path.empty()) {
        WeightedGraph g = load_graph(graph_path);
        if (interior_path.empty()) throw input_error("capacity --graph needs --interior");
        OperatorParams P(g, p);
        CapacityReport rep = capacity(P, load_interior(interior_path), parse_anchor(anchor_str), cfg);
        em.report = to_json(rep);
      } else if (!fo.radii.empty()) {
        CapacitySequenceReport rep =
            capacity_sequence(build_spec(fo), p, parse_anchor(anchor_str), cfg);
        em.report = to_json(rep);
        em.has_series = true;
        em.radii = rep.radii;
        em.values = rep.values;
      } else {
        throw input_error("capacity needs either --graph or --family with --radii");
      }
    } else if (cmd_green->parsed()) {
      SolverConfig cfg;
      cfg.seed = seed;
      if (tol > 0.0) cfg.tol_residual = tol;
      GreenReport rep = green_function(build_spec(fo), p, parse_anchor(anchor_str), cfg);
      em.report = to_json(rep);
      em.has_series = true;
      em.radii = rep.radii;
      em.values = rep.anchor_values;
    } else if (cmd_classify->parsed()) {
      SolverConfig cfg;
      cfg.seed = seed;
      if (tol > 0.0) cfg.tol_residual = tol;
      ClassifyReport rep = classify(build_spec(fo), p, parse_anchor(anchor_str), cfg);
      em.report = to_json(rep);
      em.has_series = true;
      em.radii = rep.caps.radii;
      em.values = rep.caps.values;
    } else if (cmd_witness->parsed()) {
      SolverConfig cfg;
      cfg.seed = seed;
      if (tol > 0.0) cfg.tol_residual = tol;
      WitnessReport rep = superharmonic_witness(build_spec(fo), p, parse_anchor(anchor_str), cfg);
      em.report = to_json(rep);
      em.has_series = true;
      em.radii = rep.radii;
      em.values = rep.lambda_values;
      if (rep.outcome == WitnessOutcome::supercritical) exit_code = 1;
    } else if (cmd_verify->parsed()) {
      json summary;
      if (suite == "picone")
        summary = verify_picone(p, trials, seed);
      else if (suite == "greens-formula")
        summary = verify_greens_formula(trials, seed);
      else if (suite == "ads")
        summary = verify_ads(p, trials, seed);
      else
        throw input_error("unknown --suite '" + suite + "' (picone|greens-formula|ads)");
      summary["schema"] = kSchemaTag;
      summary["kind"] = "verify";
      em.report = summary;
      if (!summary.at("passed").get<bool>()) exit_code = 1;
    }

    emit(em, out_path, format);
    return exit_code;
  } catch (const refusal& e) {
    std::cout << json{{"schema", kSchemaTag}, {"kind", "refusal"}, {"message", e.what()}}.dump(2)
              << "\n";
    return 1;
  } catch (const input_error& e) {
    std::cout << json{{"schema", kSchemaTag}, {"kind", "input-error"}, {"message", e.what()}}.dump(2)
              << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
