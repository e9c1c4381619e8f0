#pragma once

// Independent reference computations for the test suite.  Everything here
// deliberately avoids the library's solver code paths: dense linear algebra
// for p = 2, brute-force grid refinement for tiny interiors at general p,
// and hand-rolled assemblies that only touch the graph accessors.

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

#include "pcrit/graph.hpp"
#include "pcrit/operators.hpp"

namespace otest {

using pcrit::WeightedGraph;

// Energy functional evaluated by an O(n^2) pair scan (no edge-list reuse).
inline double raw_energy(const WeightedGraph& g, double p, const std::vector<double>& f) {
  double s = 0.0;
  for (int u = 0; u < g.size(); ++u)
    for (int v = u + 1; v < g.size(); ++v) {
      double b = g.edge_weight(u, v);
      if (b > 0.0) s += b * std::pow(std::abs(f[(size_t)u] - f[(size_t)v]), p);
    }
  for (int v = 0; v < g.size(); ++v) s += g.c(v) * std::pow(std::abs(f[(size_t)v]), p);
  return s;
}

// Dense assembly of the p = 2 Dirichlet pair (A, M) on K: A has deg+c on the
// diagonal (edges to anywhere) and -b for interior-interior edges; M = diag m.
inline void dense_p2_system(const WeightedGraph& g, const std::vector<int>& K, Eigen::MatrixXd& A,
                            Eigen::MatrixXd& M) {
  const int n = (int)K.size();
  std::vector<int> slot((size_t)g.size(), -1);
  for (int i = 0; i < n; ++i) slot[(size_t)K[(size_t)i]] = i;
  A.setZero(n, n);
  M.setZero(n, n);
  for (int i = 0; i < n; ++i) {
    int x = K[(size_t)i];
    A(i, i) = g.deg(x) + g.c(x);
    M(i, i) = g.m(x);
    for (const pcrit::Neighbor* nb = g.nbr_begin(x); nb != g.nbr_end(x); ++nb)
      if (slot[(size_t)nb->v] >= 0) A(i, slot[(size_t)nb->v]) -= nb->b;
  }
}

// Smallest eigenvalue of A phi = lambda M phi via Eigen's dense generalized
// symmetric solver.
inline double dense_lambda0_p2(const WeightedGraph& g, const std::vector<int>& K) {
  Eigen::MatrixXd A, M;
  dense_p2_system(g, K, A, M);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, M);
  return es.eigenvalues()(0);
}

// Dense linear solve of the p = 2 Dirichlet problem: H u = gfun on K,
// u = ffun off K.  Returns the full-length solution.
inline std::vector<double> dense_dirichlet_p2(const WeightedGraph& g, const std::vector<int>& K,
                                              const std::vector<double>& gfun,
                                              const std::vector<double>& ffun) {
  const int n = (int)K.size();
  std::vector<int> slot((size_t)g.size(), -1);
  for (int i = 0; i < n; ++i) slot[(size_t)K[(size_t)i]] = i;
  Eigen::MatrixXd A, M;
  dense_p2_system(g, K, A, M);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    int x = K[(size_t)i];
    double r = g.m(x) * gfun[(size_t)x];
    for (const pcrit::Neighbor* nb = g.nbr_begin(x); nb != g.nbr_end(x); ++nb)
      if (slot[(size_t)nb->v] < 0) r += nb->b * ffun[(size_t)nb->v];
    rhs(i) = r;
  }
  Eigen::VectorXd sol = Eigen::FullPivLU<Eigen::MatrixXd>(A).solve(rhs);
  std::vector<double> out((size_t)g.size(), 0.0);
  for (int v = 0; v < g.size(); ++v)
    if (slot[(size_t)v] < 0) out[(size_t)v] = ffun[(size_t)v];
  for (int i = 0; i < n; ++i) out[(size_t)K[(size_t)i]] = sol(i);
  return out;
}

// Brute-force minimizer of j(phi) = h(phi)/p - sum_K m g phi with phi = ffun
// off K, by recursive grid refinement over the free coordinates (|K| <= 3).
inline std::vector<double> brute_force_minimize(const WeightedGraph& g, double p,
                                                const std::vector<int>& K,
                                                const std::vector<double>& gfun,
                                                const std::vector<double>& ffun,
                                                double range = 8.0) {
  std::vector<double> x = ffun;
  for (int v : K) x[(size_t)v] = 0.0;
  auto objective = [&](const std::vector<double>& f) {
    double s = raw_energy(g, p, f) / p;
    for (int v : K) s -= g.m(v) * gfun[(size_t)v] * f[(size_t)v];
    return s;
  };
  std::vector<double> center((size_t)K.size(), 0.0);
  double width = range;
  const int pts = 13;
  for (int sweep = 0; sweep < 48; ++sweep) {
    std::vector<double> best = center;
    double best_val = std::numeric_limits<double>::infinity();
    std::vector<int> idx((size_t)K.size(), 0);
    while (true) {
      std::vector<double> cand = center;
      for (size_t d = 0; d < K.size(); ++d)
        cand[d] = center[d] + width * (2.0 * idx[d] / (pts - 1) - 1.0);
      for (size_t d = 0; d < K.size(); ++d) x[(size_t)K[d]] = cand[d];
      double val = objective(x);
      if (val < best_val) {
        best_val = val;
        best = cand;
      }
      size_t carry = 0;
      while (carry < idx.size() && ++idx[carry] == pts) {
        idx[carry] = 0;
        ++carry;
      }
      if (carry == idx.size()) break;
    }
    center = best;
    width *= 0.4;
  }
  for (size_t d = 0; d < K.size(); ++d) x[(size_t)K[d]] = center[d];
  return x;
}

// Brute-force bottom of the Rayleigh quotient for |K| in {1, 2, 3}: the
// quotient is scale-invariant, so a sphere parametrization plus refinement
// suffices.
inline double brute_force_lambda(const WeightedGraph& g, double p, const std::vector<int>& K) {
  auto rayleigh = [&](const std::vector<double>& coeffs) {
    std::vector<double> f((size_t)g.size(), 0.0);
    for (size_t i = 0; i < K.size(); ++i) f[(size_t)K[i]] = coeffs[i];
    double h = raw_energy(g, p, f);
    double nrm = 0.0;
    for (size_t i = 0; i < K.size(); ++i)
      nrm += g.m(K[i]) * std::pow(std::abs(coeffs[i]), p);
    return h / nrm;
  };
  if (K.size() == 1) {
    return (g.deg(K[0]) + g.c(K[0])) / g.m(K[0]);
  }
  if (K.size() == 2) {
    double c0 = 0.0, w = M_PI / 2.0, best = 0.0;
    for (int sweep = 0; sweep < 60; ++sweep) {
      double best_val = std::numeric_limits<double>::infinity();
      for (int i = 0; i <= 400; ++i) {
        double th = c0 + w * (2.0 * i / 400.0 - 1.0);
        double v = rayleigh({std::cos(th), std::sin(th)});
        if (v < best_val) {
          best_val = v;
          best = th;
        }
      }
      c0 = best;
      w *= 0.35;
    }
    return rayleigh({std::cos(c0), std::sin(c0)});
  }
  // |K| == 3: two spherical angles.
  double c0 = M_PI / 4, c1 = M_PI / 4, w = M_PI, best_val = 0.0;
  for (int sweep = 0; sweep < 50; ++sweep) {
    double b0 = c0, b1 = c1;
    best_val = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 40; ++i)
      for (int j = 0; j <= 40; ++j) {
        double th = c0 + w * (2.0 * i / 40.0 - 1.0);
        double ph = c1 + w * (2.0 * j / 40.0 - 1.0);
        double v = rayleigh({std::cos(th) * std::sin(ph), std::sin(th) * std::sin(ph), std::cos(ph)});
        if (v < best_val) {
          best_val = v;
          b0 = th;
          b1 = ph;
        }
      }
    c0 = b0;
    c1 = b1;
    w *= 0.5;
  }
  return best_val;
}

// Random connected test graph: a path backbone plus random chords, random
// weights/measures, potential drawn from [c_lo, c_hi].
inline pcrit::GraphData random_graph_data(std::mt19937_64& rng, int n, double c_lo, double c_hi,
                                          double chord_prob = 0.35) {
  std::uniform_real_distribution<double> Uw(0.3, 2.0), Um(0.5, 2.0), Uc(c_lo, c_hi), U01(0.0, 1.0);
  pcrit::GraphData d;
  for (int v = 0; v < n; ++v) d.vertices.push_back({v, Um(rng), Uc(rng)});
  for (int v = 0; v + 1 < n; ++v) d.edges.push_back({v, v + 1, Uw(rng)});
  for (int u = 0; u < n; ++u)
    for (int v = u + 2; v < n; ++v)
      if (U01(rng) < chord_prob) d.edges.push_back({u, v, Uw(rng)});
  return d;
}

}  // namespace otest
