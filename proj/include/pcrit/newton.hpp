#pragma once

// Internal minimization core.  Problems of the form
//
//   minimize  h_eps(phi; c) - sum_x l(x) phi(x)   over phi(x), x free,
//
// with the remaining entries held fixed, where h_eps replaces |t|^p by
// (t^2 + eps^2)^{p/2} - eps^p in both the edge and the potential terms.
// The smoothing is exact at p = 2 and vanishes as eps -> 0; stationarity of
// the unsmoothed objective at a free vertex x reads
//
//   p * m(x) * (H phi(x) - l(x) / (p m(x))) = 0,
//
// so the callers encode "H u = g on K" as l = p g m.  A damped Newton method
// with a Levenberg safeguard runs per continuation stage; a final stage uses
// the exact gradient with capped curvature weights (the |t|^{p-2} weights
// blow up at kinks when p < 2).  An IRLS sweep is the fallback when a Newton
// stage stalls.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "pcrit/graph.hpp"
#include "pcrit/operators.hpp"

namespace pcrit::detail {

// t (t^2 + eps^2)^{(p-2)/2}: smoothed phi_p (exact at eps = 0).
inline double sphi(double t, double eps, double p) {
  double q = t * t + eps * eps;
  if (q == 0.0) return 0.0;
  return t * std::pow(q, 0.5 * p - 1.0);
}

// d/dt sphi = (t^2+eps^2)^{(p-4)/2} ((p-1) t^2 + eps^2) > 0, capped.
inline double scurv(double t, double eps, double p, double cap) {
  double q = t * t + eps * eps;
  if (q == 0.0) return p > 2.0 ? 0.0 : (p == 2.0 ? 1.0 : cap);
  double v = std::pow(q, 0.5 * p - 2.0) * ((p - 1.0) * t * t + eps * eps);
  return v < cap ? v : cap;
}

// (t^2 + eps^2)^{p/2} - eps^p
inline double senergy(double t, double eps, double p) {
  if (eps == 0.0) return std::pow(std::abs(t), p);
  return std::pow(t * t + eps * eps, 0.5 * p) - std::pow(eps, p);
}

struct FreeProblem {
  const WeightedGraph* g = nullptr;
  double p = 2.0;
  std::vector<double> c;       // potential actually used (may differ from g->c)
  std::vector<int> free_ids;   // sorted host ids of the variables
  std::vector<int> var_of;     // host id -> variable index, -1 when fixed
  std::vector<double> linear;  // l(x), full length (fixed entries ignored)
};

inline FreeProblem make_free_problem(const WeightedGraph& g, double p, std::vector<int> free_ids,
                                     std::vector<double> linear,
                                     const std::vector<double>* c_override = nullptr) {
  FreeProblem fp;
  fp.g = &g;
  fp.p = p;
  fp.c = c_override ? *c_override : g.c_vec();
  std::sort(free_ids.begin(), free_ids.end());
  fp.free_ids = std::move(free_ids);
  fp.var_of.assign(static_cast<std::size_t>(g.size()), -1);
  for (std::size_t i = 0; i < fp.free_ids.size(); ++i)
    fp.var_of[static_cast<std::size_t>(fp.free_ids[i])] = static_cast<int>(i);
  fp.linear = std::move(linear);
  return fp;
}

inline double free_objective(const FreeProblem& fp, const VertexFunction& x, double eps) {
  const WeightedGraph& g = *fp.g;
  double s = 0.0;
  for (const EdgeData& e : g.edges())
    s += e.b * senergy(x[static_cast<std::size_t>(e.u)] - x[static_cast<std::size_t>(e.v)], eps, fp.p);
  for (int v = 0; v < g.size(); ++v)
    if (fp.c[static_cast<std::size_t>(v)] != 0.0)
      s += fp.c[static_cast<std::size_t>(v)] * senergy(x[static_cast<std::size_t>(v)], eps, fp.p);
  for (int v : fp.free_ids) s -= fp.linear[static_cast<std::size_t>(v)] * x[static_cast<std::size_t>(v)];
  return s;
}

// Gradient w.r.t. the free entries; returns its sup norm.
inline double free_gradient(const FreeProblem& fp, const VertexFunction& x, double eps,
                            Eigen::VectorXd& grad) {
  const WeightedGraph& g = *fp.g;
  grad.resize(static_cast<Eigen::Index>(fp.free_ids.size()));
  double sup = 0.0;
  for (std::size_t i = 0; i < fp.free_ids.size(); ++i) {
    int v = fp.free_ids[i];
    double s = 0.0;
    for (const Neighbor* nb = g.nbr_begin(v); nb != g.nbr_end(v); ++nb)
      s += nb->b * sphi(x[static_cast<std::size_t>(v)] - x[static_cast<std::size_t>(nb->v)], eps, fp.p);
    s += fp.c[static_cast<std::size_t>(v)] * sphi(x[static_cast<std::size_t>(v)], eps, fp.p);
    s = fp.p * s - fp.linear[static_cast<std::size_t>(v)];
    grad[static_cast<Eigen::Index>(i)] = s;
    sup = std::max(sup, std::abs(s));
  }
  return sup;
}

struct StageOptions {
  double eps = 0.0;
  double tol_grad = 1e-12;
  int max_iter = 60;
  double curvature_cap = 1e12;
};

struct StageResult {
  int iterations = 0;
  bool converged = false;
  double grad_inf = std::numeric_limits<double>::infinity();
};

// One damped-Newton stage at fixed eps.
inline StageResult newton_stage(const FreeProblem& fp, VertexFunction& x, const StageOptions& opt) {
  const WeightedGraph& g = *fp.g;
  const auto n = static_cast<Eigen::Index>(fp.free_ids.size());
  StageResult res;
  if (n == 0) {
    res.converged = true;
    res.grad_inf = 0.0;
    return res;
  }
  Eigen::VectorXd grad;
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::SparseMatrix<double> A(n, n);
  double tau = 0.0;
  for (int it = 0; it < opt.max_iter; ++it) {
    res.grad_inf = free_gradient(fp, x, opt.eps, grad);
    if (res.grad_inf <= opt.tol_grad) {
      res.converged = true;
      return res;
    }
    // Assemble the (free x free) Hessian of the smoothed objective.
    trips.clear();
    double diag_scale = 0.0;
    for (std::size_t i = 0; i < fp.free_ids.size(); ++i) {
      int v = fp.free_ids[i];
      double d = fp.c[static_cast<std::size_t>(v)] *
                 scurv(x[static_cast<std::size_t>(v)], opt.eps, fp.p, opt.curvature_cap);
      for (const Neighbor* nb = g.nbr_begin(v); nb != g.nbr_end(v); ++nb) {
        double w = nb->b * scurv(x[static_cast<std::size_t>(v)] - x[static_cast<std::size_t>(nb->v)],
                                 opt.eps, fp.p, opt.curvature_cap);
        d += w;
        int j = fp.var_of[static_cast<std::size_t>(nb->v)];
        if (j >= 0)
          trips.emplace_back(static_cast<int>(i), j, -fp.p * w);
      }
      trips.emplace_back(static_cast<int>(i), static_cast<int>(i), fp.p * d);
      diag_scale = std::max(diag_scale, std::abs(fp.p * d));
    }
    if (diag_scale == 0.0) diag_scale = 1.0;

    double obj0 = free_objective(fp, x, opt.eps);
    bool stepped = false;
    for (int attempt = 0; attempt < 14 && !stepped; ++attempt) {
      A.setFromTriplets(trips.begin(), trips.end());
      if (tau > 0.0) {
        for (Eigen::Index i = 0; i < n; ++i) A.coeffRef(i, i) += tau;
      }
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
      bool ok = ldlt.info() == Eigen::Success;
      Eigen::VectorXd dir;
      if (ok) {
        dir = ldlt.solve(-grad);
        ok = dir.allFinite() && grad.dot(dir) < 0.0;
      }
      if (!ok) {
        tau = tau == 0.0 ? 1e-8 * diag_scale : tau * 100.0;
        continue;
      }
      double slope = grad.dot(dir);
      double t = 1.0;
      for (int ls = 0; ls < 45; ++ls) {
        VertexFunction xt = x;
        for (std::size_t i = 0; i < fp.free_ids.size(); ++i)
          xt[static_cast<std::size_t>(fp.free_ids[i])] += t * dir[static_cast<Eigen::Index>(i)];
        double objt = free_objective(fp, xt, opt.eps);
        if (objt <= obj0 + 1e-4 * t * slope) {
          x.swap(xt);
          stepped = true;
          break;
        }
        t *= 0.5;
      }
      if (!stepped) tau = tau == 0.0 ? 1e-8 * diag_scale : tau * 100.0;
    }
    ++res.iterations;
    if (!stepped) return res;  // stalled; caller decides what next
    if (tau > 0.0) tau *= 0.25;  // relax the safeguard after a successful step
  }
  Eigen::VectorXd g2;
  res.grad_inf = free_gradient(fp, x, opt.eps, g2);
  res.converged = res.grad_inf <= opt.tol_grad;
  return res;
}

// Iteratively reweighted least squares sweeps: solve the quadratic surrogate
// with frozen weights b (grad^2 + eps^2)^{(p-2)/2}.  Shares the stationary
// points of the smoothed objective; used to escape stalls.
inline void irls_sweeps(const FreeProblem& fp, VertexFunction& x, double eps, int sweeps,
                        double cap) {
  const WeightedGraph& g = *fp.g;
  const auto n = static_cast<Eigen::Index>(fp.free_ids.size());
  if (n == 0) return;
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd rhs(n);
  double floor_eps = eps > 0.0 ? eps : 1e-12;
  for (int s = 0; s < sweeps; ++s) {
    trips.clear();
    rhs.setZero();
    for (std::size_t i = 0; i < fp.free_ids.size(); ++i) {
      int v = fp.free_ids[i];
      double diag = 0.0;
      double r = fp.linear[static_cast<std::size_t>(v)] / fp.p;
      for (const Neighbor* nb = g.nbr_begin(v); nb != g.nbr_end(v); ++nb) {
        double t = x[static_cast<std::size_t>(v)] - x[static_cast<std::size_t>(nb->v)];
        double w = nb->b * std::min(cap, std::pow(t * t + floor_eps * floor_eps, 0.5 * fp.p - 1.0));
        diag += w;
        int j = fp.var_of[static_cast<std::size_t>(nb->v)];
        if (j >= 0)
          trips.emplace_back(static_cast<int>(i), j, -w);
        else
          r += w * x[static_cast<std::size_t>(nb->v)];
      }
      double tv = x[static_cast<std::size_t>(v)];
      double wc = fp.c[static_cast<std::size_t>(v)] *
                  std::min(cap, std::pow(tv * tv + floor_eps * floor_eps, 0.5 * fp.p - 1.0));
      diag += wc;
      trips.emplace_back(static_cast<int>(i), static_cast<int>(i), diag);
      rhs[static_cast<Eigen::Index>(i)] = r;
    }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
    if (ldlt.info() != Eigen::Success) return;
    Eigen::VectorXd sol = ldlt.solve(rhs);
    if (!sol.allFinite()) return;
    // Damped update: full IRLS steps can overshoot for p far from 2.
    double mix = fp.p <= 3.0 ? 1.0 : 0.7;
    for (std::size_t i = 0; i < fp.free_ids.size(); ++i) {
      double& xv = x[static_cast<std::size_t>(fp.free_ids[i])];
      xv += mix * (sol[static_cast<Eigen::Index>(i)] - xv);
    }
  }
}

struct ContinuationOptions {
  double tol_grad = 1e-12;        // final, on the exact gradient
  std::vector<double> epsilon_schedule;  // empty -> automatic
  int max_iter_per_stage = 60;
  double curvature_cap = 1e12;
  int irls_fallback_sweeps = 40;
};

struct ContinuationResult {
  int iterations = 0;
  bool converged = false;
  double grad_inf = std::numeric_limits<double>::infinity();
};

inline std::vector<double> auto_epsilon_schedule(const FreeProblem& fp, const VertexFunction& x0,
                                                 double p) {
  double s = 1.0;
  for (double v : x0) s = std::max(s, std::abs(v));
  for (int v : fp.free_ids) {
    double l = std::abs(fp.linear[static_cast<std::size_t>(v)]) / p;
    if (l > 0.0) s = std::max(s, std::pow(l, 1.0 / (p - 1.0)));
  }
  std::vector<double> sched;
  if (p == 2.0) {
    sched.push_back(0.0);  // smoothing is exact at p = 2
    return sched;
  }
  for (int k = 0; k <= 14; ++k) sched.push_back(s * std::pow(10.0, -k));
  sched.push_back(0.0);
  return sched;
}

inline ContinuationResult continuation_minimize(const FreeProblem& fp, VertexFunction& x,
                                                const ContinuationOptions& opt) {
  ContinuationResult out;
  std::vector<double> sched =
      opt.epsilon_schedule.empty() ? auto_epsilon_schedule(fp, x, fp.p) : opt.epsilon_schedule;
  for (std::size_t k = 0; k < sched.size(); ++k) {
    StageOptions so;
    so.eps = sched[k];
    bool last = k + 1 == sched.size();
    so.tol_grad = last ? opt.tol_grad : std::max(opt.tol_grad, 1e-6 * (1.0 + so.eps));
    so.max_iter = opt.max_iter_per_stage;
    so.curvature_cap = opt.curvature_cap;
    StageResult sr = newton_stage(fp, x, so);
    out.iterations += sr.iterations;
    if (!sr.converged) {
      irls_sweeps(fp, x, so.eps, opt.irls_fallback_sweeps, opt.curvature_cap);
      StageResult retry = newton_stage(fp, x, so);
      out.iterations += retry.iterations;
      sr = retry;
    }
    if (last) {
      out.converged = sr.converged;
      out.grad_inf = sr.grad_inf;
    }
  }
  return out;
}

}  // namespace pcrit::detail
