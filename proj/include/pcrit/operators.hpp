#pragma once

// The quasi-linear operator layer: phi_p, the (p-)Laplacian L and
// Schrödinger operator H = L + c/m * phi_p, the energy functional h, and the
// identities tying them together (Green's formula, the Gâteaux derivative),
// plus superharmonicity checks and Hardy weights from positive
// supersolutions.
//
// Membership in the formal domains (finite energy, locally summable neighbor
// sums) is automatic on finite hosts, so no runtime check represents it.

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "pcrit/certificate.hpp"
#include "pcrit/graph.hpp"

namespace pcrit {

// Functions on vertices are plain dense vectors indexed by vertex id; the
// support is implied (nonzero entries).
using VertexFunction = std::vector<double>;

// phi_p(a) = |a|^{p-1} sgn(a), with phi_p(0) = 0 exactly for every p > 1.
inline double phi_p(double a, double p) {
  if (a == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(a), p - 1.0), a);
}

struct OperatorParams {
  const WeightedGraph* graph = nullptr;
  double p = 2.0;

  OperatorParams(const WeightedGraph& g, double p_in) : graph(&g), p(p_in) {
    if (!(p > 1.0)) throw input_error("p must lie in (1, inf), got " + std::to_string(p));
  }
  const WeightedGraph& g() const { return *graph; }
};

namespace detail {

inline void require_size(const WeightedGraph& g, const VertexFunction& f, const char* what) {
  if (static_cast<int>(f.size()) != g.size())
    throw input_error(std::string(what) + ": function length " + std::to_string(f.size()) +
                      " != vertex count " + std::to_string(g.size()));
}

}  // namespace detail

// L f(x) = (1/m(x)) sum_y b(x,y) phi_p(f(x) - f(y))
inline double apply_L_at(const OperatorParams& P, const VertexFunction& f, int x) {
  const WeightedGraph& g = P.g();
  double s = 0.0;
  for (const Neighbor* nb = g.nbr_begin(x); nb != g.nbr_end(x); ++nb)
    s += nb->b * phi_p(f[static_cast<std::size_t>(x)] - f[static_cast<std::size_t>(nb->v)], P.p);
  return s / g.m(x);
}

// H f(x) = L f(x) + (c(x)/m(x)) phi_p(f(x)), with an optional replacement
// potential (used by the |c| sandwich solves and the c + m/n witness
// operators).
inline double apply_H_at(const OperatorParams& P, const VertexFunction& f, int x,
                         const std::vector<double>* c_override = nullptr) {
  const WeightedGraph& g = P.g();
  double c = c_override ? (*c_override)[static_cast<std::size_t>(x)] : g.c(x);
  return apply_L_at(P, f, x) + (c / g.m(x)) * phi_p(f[static_cast<std::size_t>(x)], P.p);
}

inline VertexFunction apply_L(const OperatorParams& P, const VertexFunction& f) {
  detail::require_size(P.g(), f, "apply_L");
  VertexFunction out(f.size());
  for (int x = 0; x < P.g().size(); ++x) out[static_cast<std::size_t>(x)] = apply_L_at(P, f, x);
  return out;
}

inline VertexFunction apply_H(const OperatorParams& P, const VertexFunction& f,
                              const std::vector<double>* c_override = nullptr) {
  detail::require_size(P.g(), f, "apply_H");
  VertexFunction out(f.size());
  for (int x = 0; x < P.g().size(); ++x) out[static_cast<std::size_t>(x)] = apply_H_at(P, f, x, c_override);
  return out;
}

// h(f) = (1/2) sum_{x,y} b(x,y) |f(x)-f(y)|^p + sum_x c(x) |f(x)|^p.
// The half double-sum is one pass over the stored undirected edges.
inline double energy(const OperatorParams& P, const VertexFunction& f,
                     const std::vector<double>* c_override = nullptr) {
  detail::require_size(P.g(), f, "energy");
  const WeightedGraph& g = P.g();
  double s = 0.0;
  for (const EdgeData& e : g.edges())
    s += e.b * std::pow(std::abs(f[static_cast<std::size_t>(e.u)] - f[static_cast<std::size_t>(e.v)]), P.p);
  for (int x = 0; x < g.size(); ++x) {
    double c = c_override ? (*c_override)[static_cast<std::size_t>(x)] : g.c(x);
    if (c != 0.0) s += c * std::pow(std::abs(f[static_cast<std::size_t>(x)]), P.p);
  }
  return s;
}

// ||f||_{p,m}^p = sum_x m(x) |f(x)|^p
inline double norm_p_m_pow(const OperatorParams& P, const VertexFunction& f) {
  detail::require_size(P.g(), f, "norm_p_m_pow");
  double s = 0.0;
  for (int x = 0; x < P.g().size(); ++x)
    s += P.g().m(x) * std::pow(std::abs(f[static_cast<std::size_t>(x)]), P.p);
  return s;
}

// <f, g>_S = sum_{x in S} f(x) g(x) m(x); empty S means the whole host.
inline double bracket(const OperatorParams& P, const VertexFunction& f, const VertexFunction& g,
                      const std::vector<int>* subset = nullptr) {
  detail::require_size(P.g(), f, "bracket");
  detail::require_size(P.g(), g, "bracket");
  double s = 0.0;
  if (subset) {
    for (int x : *subset)
      s += f[static_cast<std::size_t>(x)] * g[static_cast<std::size_t>(x)] * P.g().m(x);
  } else {
    for (int x = 0; x < P.g().size(); ++x)
      s += f[static_cast<std::size_t>(x)] * g[static_cast<std::size_t>(x)] * P.g().m(x);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Green's formula on a finite K:
//   <Hf, phi>_K = (1/2) sum_{x,y in K} b phi_p(grad f) grad phi
//               + sum_{x in K} c phi_p(f) phi
//               + sum_{x in K, y in bd K} b phi_p(f(x)-f(y)) phi(x).
// Both sides are assembled independently (star sums vs edge sums); the
// absolute gap must stay below 1e-10 * (1 + scale) where scale is the sum of
// the magnitudes of every assembled term.

struct GreensFormulaCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double scale = 0.0;
};

inline GreensFormulaCheck greens_formula_check(const OperatorParams& P, const SubsetSpec& K,
                                               const VertexFunction& f, const VertexFunction& phi) {
  detail::require_size(P.g(), f, "greens_formula");
  detail::require_size(P.g(), phi, "greens_formula");
  const WeightedGraph& g = P.g();
  GreensFormulaCheck out;
  double scale = 0.0;
  for (int x : K.interior) {
    double term = apply_H_at(P, f, x) * phi[static_cast<std::size_t>(x)] * g.m(x);
    out.lhs += term;
    scale += std::abs(term);
  }
  double rhs = 0.0;
  for (int x : K.interior) {
    for (const Neighbor* nb = g.nbr_begin(x); nb != g.nbr_end(x); ++nb) {
      double gradf = f[static_cast<std::size_t>(x)] - f[static_cast<std::size_t>(nb->v)];
      if (K.in_interior[static_cast<std::size_t>(nb->v)]) {
        // Each unordered interior pair appears twice here; the half in the
        // formula cancels the duplication.
        double term = 0.5 * nb->b * phi_p(gradf, P.p) *
                      (phi[static_cast<std::size_t>(x)] - phi[static_cast<std::size_t>(nb->v)]);
        rhs += term;
        scale += std::abs(term);
      } else {
        double term = nb->b * phi_p(gradf, P.p) * phi[static_cast<std::size_t>(x)];
        rhs += term;
        scale += std::abs(term);
      }
    }
    double term = g.c(x) * phi_p(f[static_cast<std::size_t>(x)], P.p) * phi[static_cast<std::size_t>(x)];
    rhs += term;
    scale += std::abs(term);
  }
  out.rhs = rhs;
  out.residual = std::abs(out.lhs - out.rhs);
  out.scale = scale;
  return out;
}

inline double greens_formula_residual(const OperatorParams& P, const SubsetSpec& K,
                                      const VertexFunction& f, const VertexFunction& phi) {
  return greens_formula_check(P, K, f, phi).residual;
}

// |(h(phi + t psi) - h(phi - t psi)) / (2t) - p <H phi, psi>| at t = step.
// The central difference matches the derivative at O(t^2) for p >= 2; for
// p in (1,2) the rate degrades near kinks of |.|^p (documented, tested with
// a relaxed tolerance).
inline double gateaux_residual(const OperatorParams& P, const VertexFunction& phi,
                               const VertexFunction& psi, double step) {
  detail::require_size(P.g(), phi, "gateaux_residual");
  detail::require_size(P.g(), psi, "gateaux_residual");
  if (!(step > 0.0)) throw input_error("gateaux_residual: step must be positive");
  VertexFunction plus(phi.size()), minus(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    plus[i] = phi[i] + step * psi[i];
    minus[i] = phi[i] - step * psi[i];
  }
  double fd = (energy(P, plus) - energy(P, minus)) / (2.0 * step);
  VertexFunction Hphi = apply_H(P, phi);
  double exact = P.p * bracket(P, Hphi, psi);
  return std::abs(fd - exact);
}

// ---------------------------------------------------------------------------
// Pointwise (super/sub/)harmonicity checks on K.interior.

namespace detail {

inline double auto_tol(const VertexFunction& Hu, double tol) {
  if (tol >= 0.0) return tol;
  double sup = 0.0;
  for (double v : Hu) sup = std::max(sup, std::abs(v));
  return 1e-10 * (1.0 + sup);
}

}  // namespace detail

// Passes iff Hu >= -tol on K.interior.  gap/min_term = worst Hu value.
// tol < 0 requests the default 1e-10 * (1 + sup|Hu|).
inline Certificate is_superharmonic(const OperatorParams& P, const VertexFunction& u,
                                    const SubsetSpec& K, double tol = -1.0,
                                    const std::vector<double>* c_override = nullptr) {
  detail::require_size(P.g(), u, "is_superharmonic");
  VertexFunction Hu(u.size(), 0.0);
  for (int x : K.interior) Hu[static_cast<std::size_t>(x)] = apply_H_at(P, u, x, c_override);
  double t = detail::auto_tol(Hu, tol);
  Certificate cert;
  cert.name = "superharmonic";
  cert.tolerances["residual"] = t;
  double worst = 0.0;
  int where = K.interior.empty() ? -1 : K.interior.front();
  bool first = true;
  for (int x : K.interior) {
    double v = Hu[static_cast<std::size_t>(x)];
    if (first || v < worst) {
      worst = v;
      where = x;
      first = false;
    }
  }
  cert.gap = first ? 0.0 : worst;
  cert.min_term = cert.gap;
  if (where >= 0) cert.argmin = {where};
  cert.passed = cert.gap >= -t;
  // Equality case: harmonic within tolerance everywhere.
  double supabs = 0.0;
  for (int x : K.interior) supabs = std::max(supabs, std::abs(Hu[static_cast<std::size_t>(x)]));
  cert.equality_flag = supabs <= t;
  return cert;
}

inline Certificate is_subharmonic(const OperatorParams& P, const VertexFunction& u,
                                  const SubsetSpec& K, double tol = -1.0) {
  VertexFunction neg(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) neg[i] = -u[i];
  Certificate cert = is_superharmonic(P, neg, K, tol);
  cert.name = "subharmonic";
  return cert;
}

// Passes iff sup |Hu| <= tol on K.interior; gap = -sup|Hu|.
inline Certificate is_harmonic(const OperatorParams& P, const VertexFunction& u,
                               const SubsetSpec& K, double tol = -1.0) {
  detail::require_size(P.g(), u, "is_harmonic");
  VertexFunction Hu(u.size(), 0.0);
  for (int x : K.interior) Hu[static_cast<std::size_t>(x)] = apply_H_at(P, u, x);
  double t = detail::auto_tol(Hu, tol);
  Certificate cert;
  cert.name = "harmonic";
  cert.tolerances["residual"] = t;
  double worst = 0.0;
  int where = -1;
  for (int x : K.interior) {
    double v = std::abs(Hu[static_cast<std::size_t>(x)]);
    if (v > worst) {
      worst = v;
      where = x;
    }
  }
  cert.gap = -worst;
  cert.min_term = cert.gap;
  if (where >= 0) cert.argmin = {where};
  cert.passed = worst <= t;
  cert.equality_flag = cert.passed;
  return cert;
}

// Hardy weight w = Hu / u^{p-1} on K.interior (zero elsewhere) from a
// strictly positive supersolution u.  The groundstate/Picone inequality then
// gives h(phi) >= ||phi||^p_{p, w m} for phi supported in K; tests spot-check
// that on random phi.  Requires u > 0 on K.interior and Hu >= -tol there.
inline VertexFunction hardy_weight(const OperatorParams& P, const VertexFunction& u,
                                   const SubsetSpec& K, double tol = -1.0) {
  detail::require_size(P.g(), u, "hardy_weight");
  for (int x : K.interior)
    if (!(u[static_cast<std::size_t>(x)] > 0.0))
      throw input_error("hardy_weight: u must be strictly positive on the interior (u(" +
                        std::to_string(x) + ") = " + std::to_string(u[static_cast<std::size_t>(x)]) + ")");
  VertexFunction Hu(u.size(), 0.0);
  for (int x : K.interior) Hu[static_cast<std::size_t>(x)] = apply_H_at(P, u, x);
  double t;
  if (tol >= 0.0) {
    t = tol;
  } else {
    double sup = 0.0;
    for (int x : K.interior) sup = std::max(sup, std::abs(Hu[static_cast<std::size_t>(x)]));
    t = 1e-12 * (1.0 + sup);
  }
  for (int x : K.interior)
    if (Hu[static_cast<std::size_t>(x)] < -t)
      throw input_error("hardy_weight: u is not superharmonic at vertex " + std::to_string(x) +
                        " (Hu = " + std::to_string(Hu[static_cast<std::size_t>(x)]) + ", tol " +
                        std::to_string(t) + ")");
  VertexFunction w(u.size(), 0.0);
  for (int x : K.interior)
    w[static_cast<std::size_t>(x)] =
        Hu[static_cast<std::size_t>(x)] / phi_p(u[static_cast<std::size_t>(x)], P.p);
  return w;
}

}  // namespace pcrit
