#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pcrit/dirichlet.hpp"
#include "pcrit/eigen.hpp"
#include "pcrit/families.hpp"
#include "pcrit/maxprinciple.hpp"

using namespace pcrit;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

FamilySlice z_slice(int r, double c_const = 0.0) {
  ExhaustionSpec spec;
  spec.family = Family::z;
  spec.radii = {r};
  spec.potential.constant = c_const;
  return build_family(spec, 0);
}

}  // namespace

TEST_CASE("principal eigenvalue: single vertex closed form") {
  std::mt19937_64 rng(5);
  WeightedGraph g = WeightedGraph::from_data(otest::random_graph_data(rng, 7, -0.5, 0.8));
  for (double p : {1.5, 2.0, 3.0}) {
    OperatorParams P(g, p);
    for (int v : {0, 3, 6}) {
      EigenReport er = principal_eigenvalue(P, {v});
      REQUIRE(er.converged);
      REQUIRE_THAT(er.lambda, WithinRel((g.deg(v) + g.c(v)) / g.m(v), 1e-9));
      REQUIRE(er.positive_on_support);
    }
  }
}

TEST_CASE("principal eigenvalue: p = 2 dense path against the generalized solver") {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 5; ++rep) {
    WeightedGraph g = WeightedGraph::from_data(otest::random_graph_data(rng, 11, -0.4, 0.7));
    OperatorParams P(g, 2.0);
    std::vector<int> K;
    for (int v = 0; v < g.size(); ++v)
      if ((v + rep) % 3 != 0) K.push_back(v);
    EigenReport er = principal_eigenvalue(P, K);
    double ref = otest::dense_lambda0_p2(g, K);
    REQUIRE(er.converged);
    REQUIRE_THAT(er.lambda, WithinAbs(ref, 1e-9 * (1.0 + std::abs(ref))));
    // Stationarity residual matches the advertised tolerance.
    SubsetSpec S = make_subset(g, K);
    double sup = 0.0;
    for (int v : S.interior)
      sup = std::max(sup, std::abs(apply_H_at(P, er.eigenfunction, v) -
                                   er.lambda * phi_p(er.eigenfunction[(size_t)v], 2.0)));
    REQUIRE(sup <= 1e-10 * (1.0 + std::abs(er.lambda)));
    REQUIRE_THAT(norm_p_m_pow(P, er.eigenfunction), WithinRel(1.0, 1e-9));
  }
}

TEST_CASE("principal eigenvalue: general p against brute-force Rayleigh minimization") {
  std::mt19937_64 rng(19);
  WeightedGraph g = WeightedGraph::from_data(otest::random_graph_data(rng, 9, -0.3, 0.6));
  for (double p : {1.5, 3.0}) {
    OperatorParams P(g, p);
    std::vector<int> K2 = {2, 3};
    EigenReport er2 = principal_eigenvalue(P, K2);
    REQUIRE(er2.converged);
    REQUIRE_THAT(er2.lambda, WithinAbs(otest::brute_force_lambda(g, p, K2),
                                       1e-7 * (1.0 + std::abs(er2.lambda))));
    std::vector<int> K3 = {1, 2, 3};
    EigenReport er3 = principal_eigenvalue(P, K3);
    REQUIRE(er3.converged);
    REQUIRE_THAT(er3.lambda, WithinAbs(otest::brute_force_lambda(g, p, K3),
                                       1e-6 * (1.0 + std::abs(er3.lambda))));
    REQUIRE(er3.positive_on_support);
  }
}

TEST_CASE("principal eigenvalue: interior path of the integer line, p = 2") {
  FamilySlice s = z_slice(3);  // interior = 7-vertex path
  OperatorParams P(s.graph, 2.0);
  EigenReport er = principal_eigenvalue(P, s.subset.interior);
  REQUIRE(er.converged);
  REQUIRE_THAT(er.lambda, WithinAbs(2.0 - 2.0 * std::cos(M_PI / 8.0), 1e-10));
  REQUIRE(er.positive_on_support);
  REQUIRE(er.method == "dense-newton");
}

TEST_CASE("principal eigenvalue: sparse p = 2 path agrees and certifies definiteness") {
  FamilySlice s = z_slice(14);  // interior = 29-vertex path
  OperatorParams P(s.graph, 2.0);
  EigenConfig cfg;
  cfg.dense_limit = 10;  // force the sparse path
  EigenReport er = principal_eigenvalue(P, s.subset.interior, cfg);
  REQUIRE(er.converged);
  REQUIRE(er.method == "sparse-p2");
  REQUIRE_THAT(er.lambda, WithinAbs(2.0 - 2.0 * std::cos(M_PI / 30.0), 1e-9));
  REQUIRE(er.definiteness_certified);
  REQUIRE(er.definiteness_margin <= 1e-6);
  REQUIRE(er.positive_on_support);

  OperatorParams P3(s.graph, 3.0);
  REQUIRE_THROWS_AS(principal_eigenvalue(P3, s.subset.interior, cfg), input_error);
}

TEST_CASE("principal eigenvalue: potential shift moves the spectrum exactly") {
  std::mt19937_64 rng(37);
  WeightedGraph g = WeightedGraph::from_data(otest::random_graph_data(rng, 8, -0.2, 0.5));
  std::vector<int> K = {1, 2, 3, 4, 5};
  for (double p : {1.5, 2.0, 3.0}) {
    for (double shift : {0.7, -0.4}) {
      OperatorParams P(g, p);
      EigenReport base = principal_eigenvalue(P, K);
      std::vector<double> c2(g.c_vec());
      for (int v = 0; v < g.size(); ++v) c2[(size_t)v] += shift * g.m(v);
      WeightedGraph g2 = g.with_potential(c2);
      OperatorParams P2(g2, p);
      EigenReport moved = principal_eigenvalue(P2, K);
      REQUIRE(base.converged);
      REQUIRE(moved.converged);
      REQUIRE_THAT(moved.lambda, WithinAbs(base.lambda + shift, 1e-9 * (1.0 + std::abs(base.lambda))));
    }
  }
}

TEST_CASE("principal eigenvalue: disconnected interiors take the component minimum") {
  FamilySlice s = z_slice(5);
  // Two separated segments: {-4..-2} and {1..4} (ids via coordinates).
  std::vector<int> K;
  for (int k = -4; k <= -2; ++k) K.push_back(z_vertex_id(k));
  for (int k = 1; k <= 4; ++k) K.push_back(z_vertex_id(k));
  OperatorParams P(s.graph, 2.0);
  EigenReport er = principal_eigenvalue(P, K);
  REQUIRE(er.converged);
  REQUIRE(er.components.size() == 2);
  double l3 = 2.0 - 2.0 * std::cos(M_PI / 4.0);  // 3-vertex segment
  double l4 = 2.0 - 2.0 * std::cos(M_PI / 5.0);  // 4-vertex segment
  REQUIRE_THAT(er.lambda, WithinAbs(std::min(l3, l4), 1e-10));
  // The eigenfunction lives on the wider segment only.
  for (int k = -4; k <= -2; ++k)
    REQUIRE_THAT(er.eigenfunction[(size_t)z_vertex_id(k)], WithinAbs(0.0, 1e-12));
  double mass = 0.0;
  for (int k = 1; k <= 4; ++k) mass += std::abs(er.eigenfunction[(size_t)z_vertex_id(k)]);
  REQUIRE(mass > 0.5);
}

TEST_CASE("principal eigenvalue: boundaryless host has the constant ground state") {
  ExhaustionSpec spec;
  spec.family = Family::cycle;
  spec.cycle_len = 10;
  spec.radii = {5};
  FamilySlice s = build_family(spec, 0);
  REQUIRE(s.subset.boundary.empty());
  for (double p : {1.5, 2.0, 2.5}) {
    OperatorParams P(s.graph, p);
    EigenReport er = principal_eigenvalue(P, s.subset.interior);
    REQUIRE(er.converged);
    REQUIRE_THAT(er.lambda, WithinAbs(0.0, 1e-10));
    REQUIRE(er.positive_on_support);
    double lo = 1e9, hi = 0.0;
    for (int v : s.subset.interior) {
      lo = std::min(lo, er.eigenfunction[(size_t)v]);
      hi = std::max(hi, er.eigenfunction[(size_t)v]);
    }
    REQUIRE_THAT(lo, WithinRel(hi, 1e-8));  // constant on the cycle
  }
}

TEST_CASE("eigenvalue solves are deterministic for a fixed seed") {
  std::mt19937_64 rng(41);
  WeightedGraph g = WeightedGraph::from_data(otest::random_graph_data(rng, 10, -0.3, 0.6));
  OperatorParams P(g, 2.6);
  std::vector<int> K = {0, 1, 2, 3, 4, 5, 6};
  EigenConfig cfg;
  cfg.seed = 1234;
  EigenReport a = principal_eigenvalue(P, K, cfg);
  EigenReport b = principal_eigenvalue(P, K, cfg);
  REQUIRE(a.lambda == b.lambda);
  REQUIRE(a.eigenfunction == b.eigenfunction);
}

TEST_CASE("empty interior eigen report") {
  FamilySlice s = z_slice(2);
  OperatorParams P(s.graph, 2.0);
  EigenReport er = principal_eigenvalue(P, {});
  REQUIRE(er.converged);
  REQUIRE(er.method == "empty");
  REQUIRE(std::isinf(er.lambda));
}

TEST_CASE("domain monotonicity of the principal eigenvalue") {
  FamilySlice s = z_slice(5);
  OperatorParams P(s.graph, 2.3);
  std::vector<int> inner, outer;
  for (int k = -2; k <= 2; ++k) inner.push_back(z_vertex_id(k));
  for (int k = -5; k <= 5; ++k) outer.push_back(z_vertex_id(k));
  Certificate cert = check_domain_monotonicity(P, inner, outer);
  REQUIRE(cert.passed);
  REQUIRE(cert.gap > 0.01);  // strictly smaller domain, strictly bigger eigenvalue
  REQUIRE(cert.metrics.at("lambda_inner") > cert.metrics.at("lambda_outer"));
  REQUIRE_THROWS_AS(check_domain_monotonicity(P, outer, inner), input_error);
}

TEST_CASE("Poisson-Dirichlet solve: p = 2 against the dense linear oracle") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  for (int rep = 0; rep < 4; ++rep) {
    WeightedGraph g = WeightedGraph::from_data(otest::random_graph_data(rng, 10, 0.0, 0.6));
    OperatorParams P(g, 2.0);
    std::vector<int> K;
    for (int v = 1; v < g.size() - 1; ++v)
      if ((v + rep) % 2 == 0) K.push_back(v);
    DirichletProblem prob;
    prob.subset = make_subset(g, K);
    prob.g.assign((size_t)g.size(), 0.0);
    prob.f.assign((size_t)g.size(), 0.0);
    for (int v : K) prob.g[(size_t)v] = U(rng);
    for (int v = 0; v < g.size(); ++v)
      if (!prob.subset.in_interior[(size_t)v]) prob.f[(size_t)v] = U(rng);
    SolveReport sr = minimize_j(P, prob);
    REQUIRE(sr.converged);
    REQUIRE(sr.residual_sup <= sr.tol_effective);
    REQUIRE(sr.coercivity_lambda > 0.0);
    VertexFunction ref = otest::dense_dirichlet_p2(g, K, prob.g, prob.f);
    for (int v : K) REQUIRE_THAT(sr.solution[(size_t)v], WithinAbs(ref[(size_t)v], 1e-7));
    REQUIRE(sr.restart_spread <= 1e-6);
  }
}

TEST_CASE("Poisson-Dirichlet solve: general p against brute-force minimization") {
  WeightedGraph g = WeightedGraph::from_data([] {
    GraphData d;
    for (int v = 0; v < 6; ++v) d.vertices.push_back({v, 1.0 + 0.1 * v, 0.1});
    for (int v = 0; v + 1 < 6; ++v) d.edges.push_back({v, v + 1, 1.0 + 0.2 * v});
    return d;
  }());
  std::vector<int> K = {2, 3, 4};
  for (double p : {1.5, 3.0}) {
    OperatorParams P(g, p);
    DirichletProblem prob;
    prob.subset = make_subset(g, K);
    prob.g = {0.0, 0.0, 1.0, -0.5, 0.25, 0.0};
    prob.f = {0.3, 0.0, 0.0, 0.0, 0.0, -0.2};
    SolveReport sr = minimize_j(P, prob);
    REQUIRE(sr.converged);
    VertexFunction ref = otest::brute_force_minimize(g, p, K, prob.g, prob.f);
    for (int v : K) REQUIRE_THAT(sr.solution[(size_t)v], WithinAbs(ref[(size_t)v], 2e-6));
    // Objective at the solver's answer is no worse than the grid's best.
    auto j = [&](const VertexFunction& u) {
      double s = otest::raw_energy(g, p, u) / p;
      for (int v : K) s -= g.m(v) * prob.g[(size_t)v] * u[(size_t)v];
      return s;
    };
    REQUIRE(j(sr.solution) <= j(ref) + 1e-9 * (1.0 + std::abs(j(ref))));
  }
}

TEST_CASE("Poisson-Dirichlet solve: deterministic, and refusal when not coercive") {
  FamilySlice s = z_slice(2);
  std::vector<double> c(s.graph.c_vec());
  c[0] = -5.0;
  WeightedGraph bad = s.graph.with_potential(c);
  OperatorParams P(bad, 2.0);
  DirichletProblem prob;
  prob.subset = s.subset;
  prob.g.assign((size_t)bad.size(), 1.0);
  prob.f.assign((size_t)bad.size(), 0.0);
  REQUIRE_THROWS_AS(minimize_j(P, prob), refusal);

  OperatorParams Pok(s.graph, 2.4);
  SolveReport a = minimize_j(Pok, prob);
  SolveReport b = minimize_j(Pok, prob);
  REQUIRE(a.converged);
  REQUIRE(a.solution == b.solution);
  REQUIRE(a.positivity);  // positive source, zero boundary: solution is positive
}

TEST_CASE("empty interior short-circuits") {
  FamilySlice s = z_slice(2);
  OperatorParams P(s.graph, 2.0);
  DirichletProblem prob;
  prob.subset = make_subset(s.graph, {});
  prob.g.assign((size_t)s.graph.size(), 0.0);
  prob.f.assign((size_t)s.graph.size(), 0.5);
  SolveReport sr = minimize_j(P, prob);
  REQUIRE(sr.converged);
  REQUIRE(sr.method == "empty-interior");
  for (int v = 0; v < s.graph.size(); ++v) REQUIRE(sr.solution[(size_t)v] == 0.5);
}

TEST_CASE("sign-split iteration brackets the direct solve") {
  FamilySlice s = z_slice(3, 0.4);
  std::vector<double> c(s.graph.c_vec());
  c[0] = -0.2;  // sign-changing potential
  WeightedGraph g = s.graph.with_potential(c);
  for (double p : {2.0, 2.5}) {
    OperatorParams P(g, p);
    EigenReport er = principal_eigenvalue(P, s.subset.interior);
    REQUIRE(er.lambda > 0.1);  // still coercive
    DirichletProblem prob;
    prob.subset = s.subset;
    prob.g.assign((size_t)g.size(), 1.0);
    prob.f.assign((size_t)g.size(), 0.0);
    SolveReport direct = minimize_j(P, prob);
    REQUIRE(direct.converged);

    SandwichReport sw = sandwich_solve(P, prob);
    REQUIRE(sw.converged);
    REQUIRE(sw.monotone_ok);
    REQUIRE(sw.lower.method == "sandwich");
    double scale = 1.0;
    for (int v : s.subset.interior) scale = std::max(scale, std::abs(direct.solution[(size_t)v]));
    for (int v : s.subset.interior)
      REQUIRE_THAT(sw.lower.solution[(size_t)v], WithinAbs(direct.solution[(size_t)v], 1e-7 * scale));

    VertexFunction upper = direct.solution;
    for (int v : s.subset.interior) upper[(size_t)v] = upper[(size_t)v] * 1.5 + 0.2;
    SandwichReport sw2 = sandwich_solve(P, prob, {}, &upper);
    REQUIRE(sw2.converged);
    REQUIRE(sw2.bracket_gap <= 1e-7 * scale);
  }
  OperatorParams P(g, 2.0);
  DirichletProblem neg;
  neg.subset = s.subset;
  neg.g.assign((size_t)g.size(), -1.0);
  neg.f.assign((size_t)g.size(), 0.0);
  REQUIRE_THROWS_AS(sandwich_solve(P, neg), input_error);
}

TEST_CASE("harmonic extension obeys the enclosure between boundary extremes") {
  FamilySlice s = z_slice(3);
  OperatorParams P(s.graph, 2.0);
  VertexFunction f((size_t)s.graph.size(), 0.0);
  f[(size_t)z_vertex_id(-4)] = 0.3;
  f[(size_t)z_vertex_id(4)] = 1.2;
  HarmonicExtensionReport ext = harmonic_extension(P, s.subset, f);
  REQUIRE(ext.converged);
  REQUIRE(ext.enclosure);
  REQUIRE_THAT(ext.boundary_min, WithinRel(0.3, 1e-12));
  REQUIRE_THAT(ext.boundary_max, WithinRel(1.2, 1e-12));
  // p = 2 on a path: linear interpolation between the boundary values.
  for (int k = -4; k <= 4; ++k) {
    double expect = 0.3 + (k + 4) * (1.2 - 0.3) / 8.0;
    REQUIRE_THAT(ext.extension[(size_t)z_vertex_id(k)], WithinAbs(expect, 1e-8));
  }
  // Interpolation also holds for p != 2 on the line (constant flux).
  OperatorParams P3(s.graph, 3.0);
  HarmonicExtensionReport ext3 = harmonic_extension(P3, s.subset, f);
  REQUIRE(ext3.converged);
  REQUIRE(ext3.enclosure);
  for (int k = -4; k <= 4; ++k) {
    double expect = 0.3 + (k + 4) * (1.2 - 0.3) / 8.0;
    REQUIRE_THAT(ext3.extension[(size_t)z_vertex_id(k)], WithinAbs(expect, 1e-7));
  }
}

TEST_CASE("weak comparison check") {
  FamilySlice s = z_slice(3, 0.2);
  OperatorParams P(s.graph, 2.0);
  DirichletProblem prob;
  prob.subset = s.subset;
  prob.g.assign((size_t)s.graph.size(), 0.5);
  prob.f.assign((size_t)s.graph.size(), 0.0);
  SolveReport small = minimize_j(P, prob);
  prob.g.assign((size_t)s.graph.size(), 1.0);
  for (int v = 0; v < s.graph.size(); ++v)
    if (!s.subset.in_interior[(size_t)v]) prob.f[(size_t)v] = 0.1;
  SolveReport big = minimize_j(P, prob);

  ComparisonReport cmp = check_weak_comparison(P, s.subset, small.solution, big.solution);
  REQUIRE(cmp.hypotheses_hold);
  REQUIRE(cmp.conclusion_holds);
  REQUIRE(cmp.asserted);  // c = 0.2 >= 0 on K
  REQUIRE(cmp.conclusion_margin >= 0.0);

  // Swapped order: hypotheses fail, and that is reported as such.
  ComparisonReport rev = check_weak_comparison(P, s.subset, big.solution, small.solution);
  REQUIRE_FALSE(rev.hypotheses_hold);
  REQUIRE_FALSE(rev.conclusion_holds);

  // Sign-changing potential: outcome only observed.
  std::vector<double> c(s.graph.c_vec());
  c[0] = -0.05;
  WeightedGraph g2 = s.graph.with_potential(c);
  OperatorParams P2(g2, 2.0);
  ComparisonReport obs = check_weak_comparison(P2, s.subset, small.solution, big.solution);
  REQUIRE_FALSE(obs.asserted);
  REQUIRE(obs.detail.find("observed") != std::string::npos);
}

TEST_CASE("minimum principle battery holds when the bottom eigenvalue is positive") {
  FamilySlice s = z_slice(2, 0.2);
  OperatorParams P(s.graph, 2.0);
  MaxPrincipleReport rep = check_maximum_principle(P, s.subset.interior, 3, 99);
  REQUIRE(rep.principle_expected);
  REQUIRE(rep.principle_holds);
  REQUIRE(rep.counterexample.empty());
  REQUIRE(rep.trials == 4);  // 3 randomized + 1 point source
  for (const Certificate& c : rep.checks) {
    INFO(c.name << ": " << c.detail);
    REQUIRE(c.passed);
  }
  bool saw_local = false;
  for (const Certificate& c : rep.checks)
    if (c.name == "local-source-positivity") {
      saw_local = true;
      REQUIRE(c.metrics.at("foreign_component_sup") == 0.0);
    }
  REQUIRE(saw_local);
}

TEST_CASE("minimum principle battery constructs a counterexample otherwise") {
  FamilySlice s = z_slice(2);
  std::vector<double> c(s.graph.c_vec());
  c[0] = -3.0;  // deg(0) + c(0) = -1 < 0 forces lambda_0 < 0
  WeightedGraph g = s.graph.with_potential(c);
  for (double p : {1.7, 2.0}) {
    OperatorParams P(g, p);
    MaxPrincipleReport rep = check_maximum_principle(P, s.subset.interior, 2, 7);
    REQUIRE_FALSE(rep.principle_expected);
    REQUIRE_FALSE(rep.principle_holds);
    REQUIRE(rep.lambda < 0.0);
    REQUIRE_FALSE(rep.counterexample.empty());
    REQUIRE(rep.checks.size() == 2);
    for (const Certificate& cert : rep.checks) {
      INFO(cert.name);
      REQUIRE(cert.passed);
    }
    // The counterexample really dips negative while staying superharmonic.
    double mn = 0.0;
    for (int v : s.subset.interior) mn = std::min(mn, rep.counterexample[(size_t)v]);
    REQUIRE(mn < -1e-3);
  }
}
