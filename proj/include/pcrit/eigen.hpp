#pragma once

// Principal (bottom-of-spectrum) eigenvalue of H on a finite interior set K:
//
//   lambda_0(K) = inf { h(phi) : phi = 0 outside K, ||phi||_{p,m} = 1 }.
//
// The minimizer on a connected K can be taken positive, and a positive
// stationary pair (lambda, phi) is necessarily the principal one, so the
// solver projects iterates onto the nonnegative cone (which never increases
// the Rayleigh quotient) and certifies positivity at the end.
//
// Two paths:
//  * dense (any p, |K| up to a configured limit): Armijo-damped Rayleigh
//    descent followed by a bordered Newton polish on the stationarity system
//    augmented with the normalization row;
//  * sparse (p = 2 only, no size limit): shifted inverse power iteration,
//    plus an inertia certificate that A - (lambda - margin) M is positive
//    definite, pinning lambda_0 within margin.
// Disconnected K is handled per component; lambda_0 is the minimum.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "pcrit/certificate.hpp"
#include "pcrit/common.hpp"
#include "pcrit/graph.hpp"
#include "pcrit/newton.hpp"
#include "pcrit/operators.hpp"

namespace pcrit {

struct EigenConfig {
  int restarts = 5;
  std::uint64_t seed = 0;
  double tol = 1e-11;        // on sup |H phi - lambda phi_p(phi)|, relative to 1+|lambda|
  int dense_limit = 2500;    // largest component for the dense any-p path
  int max_grad_iter = 600;
  int max_polish_iter = 80;
  double curvature_cap = 1e12;
};

struct ComponentEigen {
  std::vector<int> vertices;
  double lambda = std::numeric_limits<double>::infinity();
  double residual_sup = 0.0;
  double restart_spread = 0.0;
  bool converged = false;
};

struct EigenReport {
  double lambda = std::numeric_limits<double>::infinity();
  VertexFunction eigenfunction;  // supported on the minimizing component
  double residual_sup = 0.0;
  double restart_spread = 0.0;
  bool converged = false;
  bool positive_on_support = false;
  std::string method;
  std::vector<ComponentEigen> components;
  bool definiteness_certified = false;  // sparse p = 2 path only
  double definiteness_margin = 0.0;
};

namespace detail {

inline double rayleigh(const OperatorParams& P, const VertexFunction& phi) {
  return energy(P, phi) / norm_p_m_pow(P, phi);
}

inline void normalize_p_m(const OperatorParams& P, VertexFunction& phi) {
  double nrm = std::pow(norm_p_m_pow(P, phi), 1.0 / P.p);
  for (double& v : phi) v /= nrm;
}

struct TrialResult {
  double lambda = std::numeric_limits<double>::infinity();
  VertexFunction phi;
  double residual_sup = std::numeric_limits<double>::infinity();
  bool converged = false;
  double min_value = 0.0;  // over the component
};

// sup_K |H phi - lambda phi_p(phi)|
inline double eigen_residual(const OperatorParams& P, const std::vector<int>& comp,
                             const VertexFunction& phi, double lambda) {
  double sup = 0.0;
  for (int v : comp) {
    double r = apply_H_at(P, phi, v) - lambda * phi_p(phi[static_cast<std::size_t>(v)], P.p);
    sup = std::max(sup, std::abs(r));
  }
  return sup;
}

inline TrialResult dense_eigen_trial(const OperatorParams& P, const std::vector<int>& comp,
                                     VertexFunction phi, const EigenConfig& cfg) {
  const auto nK = static_cast<Eigen::Index>(comp.size());
  TrialResult out;
  normalize_p_m(P, phi);
  double R = rayleigh(P, phi);

  // Phase 1: preconditioned Rayleigh descent with nonnegative projection.
  double step = 1.0;
  std::vector<double> dir(comp.size());
  for (int it = 0; it < cfg.max_grad_iter; ++it) {
    double sup = 0.0;
    for (std::size_t i = 0; i < comp.size(); ++i) {
      double r = apply_H_at(P, phi, comp[i]) - R * phi_p(phi[static_cast<std::size_t>(comp[i])], P.p);
      dir[i] = -r;
      sup = std::max(sup, std::abs(r));
    }
    if (sup <= 1e-3 * cfg.tol * (1.0 + std::abs(R)) || sup == 0.0) break;
    bool accepted = false;
    double t = step;
    for (int ls = 0; ls < 30 && !accepted; ++ls) {
      VertexFunction cand = phi;
      for (std::size_t i = 0; i < comp.size(); ++i) {
        double& cv = cand[static_cast<std::size_t>(comp[i])];
        cv = std::max(0.0, cv + t * dir[i]);
      }
      if (norm_p_m_pow(P, cand) == 0.0) {
        t *= 0.5;
        continue;
      }
      normalize_p_m(P, cand);
      double Rc = rayleigh(P, cand);
      if (Rc <= R - 1e-6 * t * sup * sup) {
        phi.swap(cand);
        R = Rc;
        accepted = true;
        step = std::min(4.0 * t, 1e3);
      } else {
        t *= 0.5;
      }
    }
    if (!accepted) break;  // hand over to the polish
  }

  // Phase 2: bordered Newton on [ m (H phi - lambda phi_p(phi)) ; ||phi||^p - 1 ].
  // Skipped when phase 1 already satisfies the stationarity system: at a
  // constant minimizer (boundaryless component) and p < 2 the second
  // derivative of |.|^p blows up and the polish would start on a capped,
  // nearly singular Jacobian for no gain.
  const WeightedGraph& g = *P.graph;
  double lambda = R;
  if (detail::eigen_residual(P, comp, phi, lambda) <= cfg.tol * (1.0 + std::abs(lambda)) &&
      std::abs(norm_p_m_pow(P, phi) - 1.0) <= 10.0 * cfg.tol) {
    out.lambda = lambda;
    out.phi = std::move(phi);
    out.residual_sup = eigen_residual(P, comp, out.phi, lambda);
    out.converged = true;
    out.min_value = std::numeric_limits<double>::infinity();
    for (int v : comp)
      out.min_value = std::min(out.min_value, out.phi[static_cast<std::size_t>(v)]);
    return out;
  }
  Eigen::VectorXd F(nK + 1);
  Eigen::MatrixXd J(nK + 1, nK + 1);
  std::vector<int> slot(static_cast<std::size_t>(g.size()), -1);
  for (std::size_t i = 0; i < comp.size(); ++i) slot[static_cast<std::size_t>(comp[i])] = static_cast<int>(i);
  auto fill_F = [&](const VertexFunction& u, double lam, Eigen::VectorXd& Fv) {
    for (std::size_t i = 0; i < comp.size(); ++i) {
      int v = comp[i];
      Fv[static_cast<Eigen::Index>(i)] =
          g.m(v) * (apply_H_at(P, u, v) - lam * phi_p(u[static_cast<std::size_t>(v)], P.p));
    }
    Fv[nK] = norm_p_m_pow(P, u) - 1.0;
  };
  fill_F(phi, lambda, F);
  for (int it = 0; it < cfg.max_polish_iter; ++it) {
    double res_op = 0.0;
    for (Eigen::Index i = 0; i < nK; ++i)
      res_op = std::max(res_op, std::abs(F[i]) / g.m(comp[static_cast<std::size_t>(i)]));
    if (res_op <= cfg.tol * (1.0 + std::abs(lambda)) && std::abs(F[nK]) <= cfg.tol) break;
    J.setZero();
    for (std::size_t i = 0; i < comp.size(); ++i) {
      int v = comp[i];
      double uv = phi[static_cast<std::size_t>(v)];
      double diag = g.c(v) * scurv(uv, 0.0, P.p, cfg.curvature_cap) -
                    lambda * g.m(v) * scurv(uv, 0.0, P.p, cfg.curvature_cap);
      for (const Neighbor* nb = g.nbr_begin(v); nb != g.nbr_end(v); ++nb) {
        double w = nb->b * scurv(uv - phi[static_cast<std::size_t>(nb->v)], 0.0, P.p, cfg.curvature_cap);
        diag += w;
        int j = slot[static_cast<std::size_t>(nb->v)];
        if (j >= 0) J(static_cast<Eigen::Index>(i), j) -= w;
      }
      J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += diag;
      J(static_cast<Eigen::Index>(i), nK) = -g.m(v) * phi_p(uv, P.p);
      J(nK, static_cast<Eigen::Index>(i)) = P.p * g.m(v) * phi_p(uv, P.p);
    }
    Eigen::VectorXd dz = Eigen::PartialPivLU<Eigen::MatrixXd>(J).solve(-F);
    if (!dz.allFinite()) break;
    double f0 = F.squaredNorm();
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      VertexFunction cand = phi;
      for (std::size_t i = 0; i < comp.size(); ++i)
        cand[static_cast<std::size_t>(comp[i])] += t * dz[static_cast<Eigen::Index>(i)];
      double lam_c = lambda + t * dz[nK];
      Eigen::VectorXd Fc(nK + 1);
      fill_F(cand, lam_c, Fc);
      if (Fc.squaredNorm() <= (1.0 - 1e-4 * t) * f0) {
        phi.swap(cand);
        lambda = lam_c;
        F.swap(Fc);
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }

  out.lambda = lambda;
  out.phi = std::move(phi);
  out.residual_sup = eigen_residual(P, comp, out.phi, lambda);
  double norm_err = std::abs(norm_p_m_pow(P, out.phi) - 1.0);
  out.converged =
      out.residual_sup <= cfg.tol * (1.0 + std::abs(lambda)) && norm_err <= 10.0 * cfg.tol;
  out.min_value = std::numeric_limits<double>::infinity();
  for (int v : comp)
    out.min_value = std::min(out.min_value, out.phi[static_cast<std::size_t>(v)]);
  return out;
}

// p = 2 only: shifted inverse power iteration with an LDLT inertia
// certificate.  Works at any size; factorizations are sparse.
inline TrialResult sparse_eigen_p2(const OperatorParams& P, const std::vector<int>& comp,
                                   const EigenConfig& cfg, bool& certified, double& margin_out) {
  const WeightedGraph& g = *P.graph;
  const auto nK = static_cast<Eigen::Index>(comp.size());
  std::vector<int> slot(static_cast<std::size_t>(g.size()), -1);
  for (std::size_t i = 0; i < comp.size(); ++i) slot[static_cast<std::size_t>(comp[i])] = static_cast<int>(i);

  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd mdiag(nK);
  for (std::size_t i = 0; i < comp.size(); ++i) {
    int v = comp[i];
    trips.emplace_back(static_cast<int>(i), static_cast<int>(i), g.deg(v) + g.c(v));
    for (const Neighbor* nb = g.nbr_begin(v); nb != g.nbr_end(v); ++nb) {
      int j = slot[static_cast<std::size_t>(nb->v)];
      if (j >= 0) trips.emplace_back(static_cast<int>(i), j, -nb->b);
    }
    mdiag[static_cast<Eigen::Index>(i)] = g.m(v);
  }
  Eigen::SparseMatrix<double> A(nK, nK);
  A.setFromTriplets(trips.begin(), trips.end());

  double sigma = std::numeric_limits<double>::infinity();
  for (int v : comp) sigma = std::min(sigma, g.c(v) / g.m(v));
  sigma -= 1.0;

  auto shifted = [&](double s) {
    Eigen::SparseMatrix<double> S = A;
    for (Eigen::Index i = 0; i < nK; ++i) S.coeffRef(i, i) -= s * mdiag[i];
    return S;
  };

  TrialResult out;
  Eigen::VectorXd x = Eigen::VectorXd::Ones(nK);
  x /= std::sqrt(x.dot(mdiag.cwiseProduct(x)));
  double lambda = 0.0, res_op = std::numeric_limits<double>::infinity();
  int refactors = 0;
  while (refactors < 6) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(shifted(sigma));
    if (ldlt.info() != Eigen::Success) {
      sigma -= 1.0 + std::abs(sigma);
      ++refactors;
      continue;
    }
    bool done = false;
    for (int it = 0; it < 80; ++it) {
      Eigen::VectorXd y = ldlt.solve(mdiag.cwiseProduct(x));
      if (!y.allFinite()) break;
      x = y / std::sqrt(y.dot(mdiag.cwiseProduct(y)));
      Eigen::VectorXd Ax = A * x;
      lambda = x.dot(Ax);
      res_op = 0.0;
      for (Eigen::Index i = 0; i < nK; ++i)
        res_op = std::max(res_op, std::abs(Ax[i] - lambda * mdiag[i] * x[i]) / mdiag[i]);
      if (res_op <= cfg.tol * (1.0 + std::abs(lambda))) {
        done = true;
        break;
      }
    }
    if (done) break;
    sigma = lambda - std::max(1e-8 * (1.0 + std::abs(lambda)), 10.0 * res_op);
    ++refactors;
  }
  if (x.sum() < 0.0) x = -x;

  out.lambda = lambda;
  out.phi.assign(static_cast<std::size_t>(g.size()), 0.0);
  out.min_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < comp.size(); ++i) {
    out.phi[static_cast<std::size_t>(comp[i])] = x[static_cast<Eigen::Index>(i)];
    out.min_value = std::min(out.min_value, x[static_cast<Eigen::Index>(i)]);
  }
  out.residual_sup = res_op;
  out.converged = res_op <= cfg.tol * (1.0 + std::abs(lambda));

  // Inertia certificate: A - (lambda - margin) M positive definite proves
  // lambda_0 >= lambda - margin; the Rayleigh quotient gives lambda_0 <= lambda.
  double margin = std::max(1e-9 * (1.0 + std::abs(lambda)), 4.0 * res_op);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> cert(shifted(lambda - margin));
  certified = cert.info() == Eigen::Success && cert.vectorD().minCoeff() > 0.0;
  margin_out = margin;
  return out;
}

}  // namespace detail

inline EigenReport principal_eigenvalue(const OperatorParams& P, const std::vector<int>& interior,
                                        const EigenConfig& cfg = {}) {
  const WeightedGraph& g = *P.graph;
  EigenReport rep;
  std::vector<int> K = interior;
  std::sort(K.begin(), K.end());
  K.erase(std::unique(K.begin(), K.end()), K.end());
  for (int v : K)
    if (v < 0 || v >= g.size()) throw input_error("interior vertex out of range");
  if (K.empty()) {
    rep.converged = true;
    rep.method = "empty";
    rep.eigenfunction.assign(static_cast<std::size_t>(g.size()), 0.0);
    return rep;
  }
  auto comps = connected_components(g, K);
  bool any_dense = false, any_sparse = false;
  for (const auto& comp : comps) {
    ComponentEigen ce;
    ce.vertices = comp;
    if (static_cast<int>(comp.size()) > cfg.dense_limit) {
      if (P.p != 2.0)
        throw input_error(
            "component too large for the dense eigenvalue path; only p = 2 has a sparse path");
      any_sparse = true;
      bool certified = false;
      double margin = 0.0;
      detail::TrialResult tr = detail::sparse_eigen_p2(P, comp, cfg, certified, margin);
      ce.lambda = tr.lambda;
      ce.residual_sup = tr.residual_sup;
      ce.converged = tr.converged;
      if (tr.lambda < rep.lambda) {
        rep.lambda = tr.lambda;
        rep.eigenfunction = tr.phi;
        rep.residual_sup = tr.residual_sup;
        rep.positive_on_support = tr.min_value > 0.0;
        rep.restart_spread = 0.0;
        rep.definiteness_certified = certified;
        rep.definiteness_margin = margin;
      }
    } else {
      any_dense = true;
      detail::TrialResult best;
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      int trials = std::max(1, cfg.restarts);
      for (int t = 0; t < trials; ++t) {
        VertexFunction start(static_cast<std::size_t>(g.size()), 0.0);
        if (t == 0) {
          for (int v : comp) start[static_cast<std::size_t>(v)] = 1.0;
        } else {
          auto rng = rng_for(cfg.seed, "eigen-restart", static_cast<std::uint64_t>(t) * 1000003u +
                                                            static_cast<std::uint64_t>(comp.front()));
          std::uniform_real_distribution<double> U(0.25, 1.75);
          for (int v : comp) start[static_cast<std::size_t>(v)] = U(rng);
        }
        detail::TrialResult tr = detail::dense_eigen_trial(P, comp, std::move(start), cfg);
        if (tr.converged) {
          lo = std::min(lo, tr.lambda);
          hi = std::max(hi, tr.lambda);
        }
        bool better = !best.converged ? (tr.converged || tr.lambda < best.lambda)
                                      : (tr.converged && tr.lambda < best.lambda);
        if (better) best = std::move(tr);
      }
      ce.lambda = best.lambda;
      ce.residual_sup = best.residual_sup;
      ce.converged = best.converged;
      ce.restart_spread = (hi >= lo) ? hi - lo : 0.0;
      if (best.lambda < rep.lambda) {
        rep.lambda = best.lambda;
        rep.eigenfunction = best.phi;
        rep.residual_sup = best.residual_sup;
        rep.positive_on_support = best.min_value > 0.0;
        rep.restart_spread = ce.restart_spread;
      }
    }
    rep.components.push_back(std::move(ce));
  }
  rep.converged = true;
  for (const auto& ce : rep.components)
    if (!ce.converged) rep.converged = false;
  if (any_dense && any_sparse)
    rep.method = "dense-newton+sparse-p2";
  else
    rep.method = any_sparse ? "sparse-p2" : "dense-newton";
  if (rep.eigenfunction.empty()) rep.eigenfunction.assign(static_cast<std::size_t>(g.size()), 0.0);
  return rep;
}

// lambda_0 is monotone under domain inclusion: K1 subset of K2 implies
// lambda_0(K1) >= lambda_0(K2).
inline Certificate check_domain_monotonicity(const OperatorParams& P, const std::vector<int>& inner,
                                             const std::vector<int>& outer,
                                             const EigenConfig& cfg = {}) {
  std::vector<int> in_sorted = inner, out_sorted = outer;
  std::sort(in_sorted.begin(), in_sorted.end());
  std::sort(out_sorted.begin(), out_sorted.end());
  if (!std::includes(out_sorted.begin(), out_sorted.end(), in_sorted.begin(), in_sorted.end()))
    throw input_error("domain monotonicity requires the first interior to be contained in the second");
  EigenReport a = principal_eigenvalue(P, in_sorted, cfg);
  EigenReport b = principal_eigenvalue(P, out_sorted, cfg);
  Certificate cert;
  cert.name = "domain-monotonicity";
  double tol = 1e-8 * (1.0 + std::abs(b.lambda));
  cert.tolerances["comparison"] = tol;
  cert.gap = a.lambda - b.lambda;
  cert.min_term = cert.gap;
  cert.metrics["lambda_inner"] = a.lambda;
  cert.metrics["lambda_outer"] = b.lambda;
  cert.passed = a.converged && b.converged && cert.gap >= -tol;
  cert.equality_flag = std::abs(cert.gap) <= tol;
  cert.detail = a.converged && b.converged
                    ? "principal eigenvalues compared on nested interiors"
                    : "an eigenvalue solve did not converge";
  return cert;
}

}  // namespace pcrit
