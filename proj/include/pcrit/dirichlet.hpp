#pragma once

// Poisson-Dirichlet solves: minimize
//
//   j(phi) = (1/p) h(phi) - <g, phi>_K   over  { phi : phi = f on X \ K },
//
// whose stationarity condition is H phi = g on K with boundary data f.
// Solvability is certified up front through the principal eigenvalue of the
// relevant set (positivity of lambda_0 makes j coercive); the minimization
// itself runs through the smoothed-Newton continuation core.  Multiple
// seeded starts provide uniqueness evidence (the functional need not be
// convex when c takes negative values).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "pcrit/common.hpp"
#include "pcrit/eigen.hpp"
#include "pcrit/graph.hpp"
#include "pcrit/newton.hpp"
#include "pcrit/operators.hpp"

namespace pcrit {

struct DirichletProblem {
  SubsetSpec subset;  // interior K; boundary derived from it
  VertexFunction g;   // right-hand side, read on K only
  VertexFunction f;   // boundary data, read off K only
};

struct SolverConfig {
  double tol_residual = 1e-10;  // scaled by the data size, see report.tol_effective
  std::vector<double> epsilon_schedule;
  int max_iter_per_stage = 60;
  double curvature_cap = 1e12;
  int restarts = 3;  // extra seeded starts beyond the deterministic ones
  std::uint64_t seed = 0;
  bool verify_coercivity = true;
  double coercivity_margin = 1e-10;
  int irls_fallback_sweeps = 40;
  EigenConfig eigen;  // used for the coercivity certificate
};

struct SolveReport {
  VertexFunction solution;
  double residual_sup = std::numeric_limits<double>::infinity();
  double tol_effective = 0.0;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  double min_interior = 0.0;  // min of the solution over K
  bool positivity = false;    // min_interior > 0
  double restart_spread = 0.0;
  double coercivity_lambda = std::numeric_limits<double>::quiet_NaN();
  std::string method;
};

namespace detail {

inline double dirichlet_data_scale(const OperatorParams& P, const DirichletProblem& prob) {
  const WeightedGraph& g = *P.graph;
  double s = 0.0;
  for (int v : prob.subset.interior) s = std::max(s, std::abs(prob.g[static_cast<std::size_t>(v)]));
  double fmax = 0.0, degm = 0.0;
  for (int v = 0; v < g.size(); ++v) {
    if (prob.subset.in_interior[static_cast<std::size_t>(v)]) continue;
    fmax = std::max(fmax, std::abs(prob.f[static_cast<std::size_t>(v)]));
  }
  for (int v : prob.subset.interior) degm = std::max(degm, g.deg(v) / g.m(v));
  return 1.0 + s + std::pow(fmax, P.p - 1.0) * degm;
}

// Shared driver: minimize j with an optional potential override and an
// optional extra linear term (used by the sandwich iteration).
inline SolveReport solve_dirichlet_core(const OperatorParams& P, const DirichletProblem& prob,
                                        const SolverConfig& cfg,
                                        const std::vector<double>* c_override,
                                        const VertexFunction* linear_extra) {
  const WeightedGraph& g = *P.graph;
  detail::require_size(g, prob.g, "dirichlet rhs");
  detail::require_size(g, prob.f, "dirichlet boundary data");
  const std::vector<int>& K = prob.subset.interior;
  SolveReport rep;
  rep.method = "newton-continuation";

  VertexFunction base(static_cast<std::size_t>(g.size()), 0.0);
  for (int v = 0; v < g.size(); ++v)
    if (!prob.subset.in_interior[static_cast<std::size_t>(v)])
      base[static_cast<std::size_t>(v)] = prob.f[static_cast<std::size_t>(v)];

  if (K.empty()) {
    rep.solution = base;
    rep.residual_sup = 0.0;
    rep.tol_effective = cfg.tol_residual;
    rep.converged = true;
    rep.min_interior = std::numeric_limits<double>::infinity();
    rep.positivity = false;
    rep.method = "empty-interior";
    OperatorParams Pc = P;
    rep.objective = (c_override ? energy(P, base, c_override) : energy(P, base)) / P.p;
    (void)Pc;
    return rep;
  }

  std::vector<double> linear(static_cast<std::size_t>(g.size()), 0.0);
  for (int v : K) {
    double l = P.p * g.m(v) * prob.g[static_cast<std::size_t>(v)];
    if (linear_extra) l += P.p * (*linear_extra)[static_cast<std::size_t>(v)];
    linear[static_cast<std::size_t>(v)] = l;
  }
  FreeProblem fp = make_free_problem(g, P.p, K, std::move(linear), c_override);

  double fscale = 0.0;
  for (int v = 0; v < g.size(); ++v) fscale = std::max(fscale, std::abs(base[static_cast<std::size_t>(v)]));
  double gscale = 0.0;
  for (int v : K)
    gscale = std::max(gscale, std::abs(fp.linear[static_cast<std::size_t>(v)]) / P.p / g.m(v));
  double start_scale = 1.0 + fscale + std::pow(gscale, 1.0 / (P.p - 1.0));

  ContinuationOptions copt;
  copt.epsilon_schedule = cfg.epsilon_schedule;
  copt.max_iter_per_stage = cfg.max_iter_per_stage;
  copt.curvature_cap = cfg.curvature_cap;
  copt.irls_fallback_sweeps = cfg.irls_fallback_sweeps;

  double data_scale = dirichlet_data_scale(P, prob);
  // The core measures the gradient p m (H u - g); translate the residual
  // tolerance accordingly.
  double min_pm = std::numeric_limits<double>::infinity();
  for (int v : K) min_pm = std::min(min_pm, P.p * g.m(v));
  rep.tol_effective = cfg.tol_residual * data_scale;
  copt.tol_grad = 0.5 * rep.tol_effective * min_pm;

  auto residual_of = [&](const VertexFunction& u) {
    double sup = 0.0;
    for (int v : K) {
      double h = c_override ? apply_H_at(P, u, v, c_override) : apply_H_at(P, u, v);
      double rhs = fp.linear[static_cast<std::size_t>(v)] / (P.p * g.m(v));
      sup = std::max(sup, std::abs(h - rhs));
    }
    return sup;
  };

  int total_trials = 2 + std::max(0, cfg.restarts);
  bool have = false;
  double best_res = std::numeric_limits<double>::infinity();
  VertexFunction best;
  double spread_lo = std::numeric_limits<double>::infinity();
  std::vector<VertexFunction> converged_solutions;
  int iterations = 0;
  for (int t = 0; t < total_trials; ++t) {
    VertexFunction x = base;
    if (t == 1) {
      double mean = 0.0;
      int cnt = 0;
      for (int v = 0; v < g.size(); ++v)
        if (!prob.subset.in_interior[static_cast<std::size_t>(v)]) {
          mean += base[static_cast<std::size_t>(v)];
          ++cnt;
        }
      if (cnt > 0) mean /= cnt;
      for (int v : K) x[static_cast<std::size_t>(v)] = mean;
    } else if (t >= 2) {
      auto rng = rng_for(cfg.seed, "dirichlet-start", static_cast<std::uint64_t>(t));
      std::uniform_real_distribution<double> U(-1.0, 1.0);
      for (int v : K) x[static_cast<std::size_t>(v)] = U(rng) * start_scale;
    }
    ContinuationResult cr = continuation_minimize(fp, x, copt);
    iterations += cr.iterations;
    double res = residual_of(x);
    if (res <= rep.tol_effective) converged_solutions.push_back(x);
    if (!have || res < best_res) {
      have = true;
      best_res = res;
      best = std::move(x);
    }
  }
  (void)spread_lo;

  // One more deterministic start from |best| when the data are signed-free:
  // for nonnegative data the minimizer of interest is nonnegative, and the
  // fold can only lower the energy landscape's bad local valleys at p < 2.
  bool data_nonneg = true;
  for (int v : K)
    if (prob.g[static_cast<std::size_t>(v)] < 0.0) data_nonneg = false;
  for (int v = 0; v < g.size(); ++v)
    if (!prob.subset.in_interior[static_cast<std::size_t>(v)] &&
        prob.f[static_cast<std::size_t>(v)] < 0.0)
      data_nonneg = false;
  if (!linear_extra && data_nonneg) {
    double mn = 0.0;
    for (int v : K) mn = std::min(mn, best[static_cast<std::size_t>(v)]);
    if (mn < 0.0) {
      VertexFunction x = best;
      for (int v : K) x[static_cast<std::size_t>(v)] = std::abs(x[static_cast<std::size_t>(v)]);
      ContinuationResult cr = continuation_minimize(fp, x, copt);
      iterations += cr.iterations;
      double res = residual_of(x);
      if (res <= rep.tol_effective) converged_solutions.push_back(x);
      if (res < best_res ||
          (res <= rep.tol_effective && free_objective(fp, x, 0.0) < free_objective(fp, best, 0.0))) {
        best_res = res;
        best = std::move(x);
      }
    }
  }

  double spread = 0.0;
  for (const auto& u : converged_solutions)
    for (int v : K)
      spread = std::max(spread, std::abs(u[static_cast<std::size_t>(v)] - best[static_cast<std::size_t>(v)]));

  rep.solution = std::move(best);
  rep.residual_sup = best_res;
  rep.iterations = iterations;
  rep.converged = best_res <= rep.tol_effective;
  rep.restart_spread = spread;
  rep.min_interior = std::numeric_limits<double>::infinity();
  for (int v : K)
    rep.min_interior = std::min(rep.min_interior, rep.solution[static_cast<std::size_t>(v)]);
  rep.positivity = rep.min_interior > 0.0;
  double lin_term = 0.0;
  for (int v : K)
    lin_term += fp.linear[static_cast<std::size_t>(v)] * rep.solution[static_cast<std::size_t>(v)] / P.p;
  rep.objective =
      (c_override ? energy(P, rep.solution, c_override) : energy(P, rep.solution)) / P.p - lin_term;
  return rep;
}

}  // namespace detail

// Certify solvability, then minimize j.  Throws `refusal` when the principal
// eigenvalue of K together with the support of f is not safely positive.
inline SolveReport minimize_j(const OperatorParams& P, const DirichletProblem& prob,
                              const SolverConfig& cfg = {}) {
  double lambda = std::numeric_limits<double>::quiet_NaN();
  if (cfg.verify_coercivity) {
    // Coercivity of J over the free variables: boundary values are pinned, so
    // the relevant eigenvalue is the one of the interior alone.
    EigenConfig ec = cfg.eigen;
    ec.seed = cfg.seed;
    EigenReport er = principal_eigenvalue(P, prob.subset.interior, ec);
    lambda = er.lambda;
    if (!(er.lambda > cfg.coercivity_margin))
      throw refusal("dirichlet problem refused: lambda_0 of the active set is " +
                    std::to_string(er.lambda) + ", not safely positive");
  }
  SolveReport rep = detail::solve_dirichlet_core(P, prob, cfg, nullptr, nullptr);
  rep.coercivity_lambda = lambda;
  return rep;
}

struct SandwichReport {
  SolveReport lower;          // limit of the increasing iteration from 0
  bool monotone_ok = false;   // iterates increased up to tolerance
  int outer_iterations = 0;
  double bracket_gap = std::numeric_limits<double>::quiet_NaN();  // vs upper iteration, if run
  bool converged = false;
};

// For sign-changing potentials and nonnegative data: split c = c_+ - c_- and
// iterate H_{|c|} w_{k+1} = g + 2 (c_-/m) phi_p(w_k), which climbs from w = 0.
// When an upper starting point is supplied the same map is iterated downward
// from it and the final gap is reported.
inline SandwichReport sandwich_solve(const OperatorParams& P, const DirichletProblem& prob,
                                     const SolverConfig& cfg = {},
                                     const VertexFunction* upper_start = nullptr,
                                     int max_outer = 60) {
  const WeightedGraph& g = *P.graph;
  for (int v : prob.subset.interior)
    if (prob.g[static_cast<std::size_t>(v)] < 0.0)
      throw input_error("sandwich iteration needs a nonnegative right-hand side");
  for (int v = 0; v < g.size(); ++v)
    if (!prob.subset.in_interior[static_cast<std::size_t>(v)] &&
        prob.f[static_cast<std::size_t>(v)] < 0.0)
      throw input_error("sandwich iteration needs nonnegative boundary data");

  std::vector<double> c_abs(static_cast<std::size_t>(g.size()));
  std::vector<double> c_neg(static_cast<std::size_t>(g.size()));
  for (int v = 0; v < g.size(); ++v) {
    double cv = g.c(v);
    c_abs[static_cast<std::size_t>(v)] = std::abs(cv);
    c_neg[static_cast<std::size_t>(v)] = cv < 0.0 ? -cv : 0.0;
  }

  SolverConfig inner = cfg;
  inner.verify_coercivity = false;  // |c| >= 0 and g >= 0: the split problem is convex
  inner.restarts = 0;

  auto sweep = [&](const VertexFunction& w) {
    VertexFunction extra(static_cast<std::size_t>(g.size()), 0.0);
    for (int v : prob.subset.interior)
      extra[static_cast<std::size_t>(v)] =
          2.0 * c_neg[static_cast<std::size_t>(v)] * phi_p(w[static_cast<std::size_t>(v)], P.p);
    return detail::solve_dirichlet_core(P, prob, inner, &c_abs, &extra);
  };

  SandwichReport out;
  VertexFunction w(static_cast<std::size_t>(g.size()), 0.0);
  for (int v = 0; v < g.size(); ++v)
    if (!prob.subset.in_interior[static_cast<std::size_t>(v)])
      w[static_cast<std::size_t>(v)] = prob.f[static_cast<std::size_t>(v)];
  out.monotone_ok = true;
  double scale = 1.0;
  SolveReport last;
  for (int k = 0; k < max_outer; ++k) {
    last = sweep(w);
    ++out.outer_iterations;
    double diff = 0.0, drop = 0.0;
    for (int v : prob.subset.interior) {
      double d = last.solution[static_cast<std::size_t>(v)] - w[static_cast<std::size_t>(v)];
      diff = std::max(diff, std::abs(d));
      drop = std::min(drop, d);
      scale = std::max(scale, std::abs(last.solution[static_cast<std::size_t>(v)]));
    }
    if (drop < -1e-9 * scale) out.monotone_ok = false;
    w = last.solution;
    if (diff <= 1e-13 * scale) break;
  }
  // Residual under the true potential.
  double res = 0.0;
  for (int v : prob.subset.interior)
    res = std::max(res, std::abs(apply_H_at(P, w, v) - prob.g[static_cast<std::size_t>(v)]));
  last.solution = w;
  last.residual_sup = res;
  last.method = "sandwich";
  last.tol_effective = cfg.tol_residual * detail::dirichlet_data_scale(P, prob) *
                       std::max(1.0, std::pow(scale, P.p - 1.0));
  last.converged = res <= last.tol_effective;
  out.lower = last;
  out.converged = last.converged;

  if (upper_start) {
    VertexFunction v_up = *upper_start;
    for (int k = 0; k < max_outer; ++k) {
      SolveReport r = sweep(v_up);
      double diff = 0.0;
      for (int x : prob.subset.interior)
        diff = std::max(diff, std::abs(r.solution[static_cast<std::size_t>(x)] -
                                       v_up[static_cast<std::size_t>(x)]));
      v_up = r.solution;
      if (diff <= 1e-13 * scale) break;
    }
    double gap = 0.0;
    for (int x : prob.subset.interior)
      gap = std::max(gap, std::abs(v_up[static_cast<std::size_t>(x)] -
                                   w[static_cast<std::size_t>(x)]));
    out.bracket_gap = gap;
  }
  return out;
}

struct HarmonicExtensionReport {
  VertexFunction extension;
  double residual_sup = std::numeric_limits<double>::infinity();
  bool converged = false;
  double interior_min = 0.0, interior_max = 0.0;
  double boundary_min = 0.0, boundary_max = 0.0;
  bool enclosure = false;  // interior range inside boundary range (expected when c = 0 on K)
};

inline HarmonicExtensionReport harmonic_extension(const OperatorParams& P, const SubsetSpec& subset,
                                                  const VertexFunction& f,
                                                  const SolverConfig& cfg = {}) {
  const WeightedGraph& g = *P.graph;
  DirichletProblem prob;
  prob.subset = subset;
  prob.g.assign(static_cast<std::size_t>(g.size()), 0.0);
  prob.f = f;
  SolveReport rep = minimize_j(P, prob, cfg);
  HarmonicExtensionReport out;
  out.extension = rep.solution;
  out.residual_sup = rep.residual_sup;
  out.converged = rep.converged;
  out.interior_min = std::numeric_limits<double>::infinity();
  out.interior_max = -std::numeric_limits<double>::infinity();
  for (int v : subset.interior) {
    out.interior_min = std::min(out.interior_min, rep.solution[static_cast<std::size_t>(v)]);
    out.interior_max = std::max(out.interior_max, rep.solution[static_cast<std::size_t>(v)]);
  }
  out.boundary_min = std::numeric_limits<double>::infinity();
  out.boundary_max = -std::numeric_limits<double>::infinity();
  for (int v : subset.boundary) {
    out.boundary_min = std::min(out.boundary_min, f[static_cast<std::size_t>(v)]);
    out.boundary_max = std::max(out.boundary_max, f[static_cast<std::size_t>(v)]);
  }
  double tol = 1e-10 * (1.0 + std::max(std::abs(out.boundary_min), std::abs(out.boundary_max)));
  out.enclosure = out.interior_min >= out.boundary_min - tol &&
                  out.interior_max <= out.boundary_max + tol;
  return out;
}

struct ComparisonReport {
  bool hypotheses_hold = false;
  double operator_margin = 0.0;  // min over K of Hv - Hu
  double exterior_margin = 0.0;  // min off K of v - u
  bool conclusion_holds = false;
  double conclusion_margin = 0.0;  // min over K of v - u
  bool asserted = false;           // c >= 0 on every component of K: the principle is a theorem
  std::string detail;
};

// Weak comparison: Hu <= Hv on K and u <= v off K force u <= v on K when the
// potential is nonnegative there.  For sign-changing c the outcome is only
// observed, never asserted.
inline ComparisonReport check_weak_comparison(const OperatorParams& P, const SubsetSpec& subset,
                                              const VertexFunction& u, const VertexFunction& v,
                                              double tol = -1.0) {
  const WeightedGraph& g = *P.graph;
  detail::require_size(g, u, "comparison input u");
  detail::require_size(g, v, "comparison input v");
  ComparisonReport rep;
  double scale = 1.0;
  for (int x = 0; x < g.size(); ++x)
    scale = std::max({scale, std::abs(u[static_cast<std::size_t>(x)]),
                      std::abs(v[static_cast<std::size_t>(x)])});
  double op_scale = 0.0;
  rep.operator_margin = std::numeric_limits<double>::infinity();
  for (int x : subset.interior) {
    double hu = apply_H_at(P, u, x), hv = apply_H_at(P, v, x);
    op_scale = std::max({op_scale, std::abs(hu), std::abs(hv)});
    rep.operator_margin = std::min(rep.operator_margin, hv - hu);
  }
  rep.exterior_margin = std::numeric_limits<double>::infinity();
  for (int x = 0; x < g.size(); ++x)
    if (!subset.in_interior[static_cast<std::size_t>(x)])
      rep.exterior_margin =
          std::min(rep.exterior_margin, v[static_cast<std::size_t>(x)] - u[static_cast<std::size_t>(x)]);
  rep.conclusion_margin = std::numeric_limits<double>::infinity();
  for (int x : subset.interior)
    rep.conclusion_margin =
        std::min(rep.conclusion_margin, v[static_cast<std::size_t>(x)] - u[static_cast<std::size_t>(x)]);
  double tol_op = tol >= 0.0 ? tol : 1e-10 * (1.0 + op_scale);
  double tol_val = tol >= 0.0 ? tol : 1e-10 * scale;
  rep.hypotheses_hold = rep.operator_margin >= -tol_op && rep.exterior_margin >= -tol_val;
  rep.conclusion_holds = rep.conclusion_margin >= -tol_val;
  rep.asserted = true;
  for (int x : subset.interior)
    if (g.c(x) < 0.0) rep.asserted = false;
  if (!rep.hypotheses_hold)
    rep.detail = "hypotheses violated; conclusion reported for information only";
  else if (rep.asserted)
    rep.detail = "nonnegative potential on K: comparison asserted";
  else
    rep.detail = "sign-changing potential on K: comparison observed, not asserted";
  return rep;
}

}  // namespace pcrit
