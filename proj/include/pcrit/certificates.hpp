#pragma once

// Inequality certificates: the pointwise three-parameter Picone inequality,
// its summed graph version, the Anane-Díaz-Saá pair (general form with
// boundary term, and the compactly-supported form), local Harnack ratios,
// and the two-sided eigenvalue bounds from positive test functions.
//
// Default tolerances (pinned here): nonnegativity slack 1e-12 * scale with
// scale = 1 + the natural p-th-power magnitudes of the inputs; equality
// detection 1e-9 relative.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "pcrit/certificate.hpp"
#include "pcrit/graph.hpp"
#include "pcrit/operators.hpp"

namespace pcrit {

inline constexpr double kNonnegTolPerScale = 1e-12;
inline constexpr double kEqualityRelTol = 1e-9;

// f(a,b,c) = |a-b|^p + |a|^p phi_p(c-1) + |b|^p phi_p(1/c - 1) on
// {a, b >= 0, c > 0}; nonnegative, and zero exactly when b = a c.
inline double pointwise_picone_value(double a, double b, double c, double p) {
  if (!(a >= 0.0) || !(b >= 0.0) || !(c > 0.0))
    throw input_error("pointwise_picone: need a,b >= 0 and c > 0");
  return std::pow(std::abs(a - b), p) + std::pow(a, p) * phi_p(c - 1.0, p) +
         std::pow(b, p) * phi_p(1.0 / c - 1.0, p);
}

inline Certificate pointwise_picone(double a, double b, double c, double p) {
  if (!(p > 1.0)) throw input_error("pointwise_picone: p must exceed 1");
  double val = pointwise_picone_value(a, b, c, p);
  double scale = 1.0 + std::pow(a, p) + std::pow(b, p);
  Certificate cert;
  cert.name = "picone-pointwise";
  cert.gap = val;
  cert.min_term = val;
  cert.tolerances["nonneg"] = kNonnegTolPerScale * scale;
  cert.tolerances["equality"] = kEqualityRelTol;
  cert.passed = val >= -cert.tolerances["nonneg"];
  cert.equality_flag = std::abs(b - a * c) <= kEqualityRelTol * (1.0 + std::abs(a) + std::abs(b));
  return cert;
}

// Summed Picone gap over ordered adjacent pairs inside V:
//   gap = sum_{x,y in V} b(x,y) [ |grad u|^p - phi_p(grad v) grad(u^p / v^{p-1}) ]
// which is term-by-term the pointwise value at (u(x), u(y), v(y)/v(x)).
// Requires v > 0 on V; a sign-changing u is replaced by |u| (recorded).
inline Certificate picone_gap(const OperatorParams& P, const VertexFunction& u_in,
                              const VertexFunction& v, const SubsetSpec& V) {
  detail::require_size(P.g(), u_in, "picone_gap");
  detail::require_size(P.g(), v, "picone_gap");
  for (int x : V.interior)
    if (!(v[static_cast<std::size_t>(x)] > 0.0))
      throw input_error("picone_gap: v must be strictly positive on V (v(" + std::to_string(x) + ") = " +
                        std::to_string(v[static_cast<std::size_t>(x)]) + ")");
  VertexFunction u = u_in;
  bool substituted = false;
  for (double val : u)
    if (val < 0.0) substituted = true;
  if (substituted)
    for (double& val : u) val = std::abs(val);

  Certificate cert;
  cert.name = "picone";
  double gap = 0.0, min_term = 0.0, scale = 1.0;
  bool first = true;
  int ax = -1, ay = -1;
  for (int x : V.interior) {
    for (const Neighbor* nb = P.g().nbr_begin(x); nb != P.g().nbr_end(x); ++nb) {
      int y = nb->v;
      if (!V.in_interior[static_cast<std::size_t>(y)]) continue;
      double term = nb->b * pointwise_picone_value(u[static_cast<std::size_t>(x)],
                                                   u[static_cast<std::size_t>(y)],
                                                   v[static_cast<std::size_t>(y)] / v[static_cast<std::size_t>(x)],
                                                   P.p);
      gap += term;
      scale += nb->b * (std::pow(u[static_cast<std::size_t>(x)], P.p) + std::pow(u[static_cast<std::size_t>(y)], P.p));
      if (first || term < min_term) {
        min_term = term;
        ax = x;
        ay = y;
        first = false;
      }
    }
  }
  cert.gap = gap;
  cert.min_term = first ? 0.0 : min_term;
  if (ax >= 0) cert.argmin = {ax, ay};
  cert.tolerances["nonneg"] = kNonnegTolPerScale * scale;
  cert.tolerances["equality"] = kEqualityRelTol;
  cert.passed = gap >= -cert.tolerances["nonneg"];
  if (substituted) cert.detail = "substituted |u| for sign-changing u";

  // Equality detection: u = C v on V (proportionality).
  if (!V.interior.empty()) {
    double C = u[static_cast<std::size_t>(V.interior.front())] / v[static_cast<std::size_t>(V.interior.front())];
    double dev = 0.0, mag = 0.0;
    for (int x : V.interior) {
      dev = std::max(dev, std::abs(u[static_cast<std::size_t>(x)] - C * v[static_cast<std::size_t>(x)]));
      mag = std::max(mag, std::abs(u[static_cast<std::size_t>(x)]));
    }
    cert.equality_flag = dev <= kEqualityRelTol * (1.0 + mag);
    cert.metrics["proportionality_C"] = C;
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Anane-Díaz-Saá.  General form on finite K for u1, u2 > 0 on K (arbitrary
// real values on the boundary):
//
//   <L u1 / u1^{p-1} - L u2 / u2^{p-1}, u1^p - u2^p>_K
//     >= sum_{x in K, y in bd K} b(x,y) (u1^p(x) - u2^p(x))
//          (phi_p(1 - u1(y)/u1(x)) - phi_p(1 - u2(y)/u2(x)))
//
// gap = LHS - RHS >= 0 always; the boundary sum itself is >= 0 when one of
// the side conditions (a)-(d) holds for every boundary pair, which the
// certificate evaluates and reports.  Equality on connected K forces
// u1 = C u2 on K.

struct AdsSideConditions {
  std::array<long, 4> counts{0, 0, 0, 0};  // pairs satisfying (a), (b), (c), (d)
  long pairs = 0;
  bool all_covered = true;  // every pair satisfies at least one condition
};

inline Certificate ads_gap(const OperatorParams& P, const VertexFunction& u1,
                           const VertexFunction& u2, const SubsetSpec& K) {
  detail::require_size(P.g(), u1, "ads_gap");
  detail::require_size(P.g(), u2, "ads_gap");
  for (int x : K.interior)
    if (!(u1[static_cast<std::size_t>(x)] > 0.0) || !(u2[static_cast<std::size_t>(x)] > 0.0))
      throw input_error("ads_gap: u1, u2 must be strictly positive on K");

  const WeightedGraph& g = P.g();
  double lhs = 0.0;
  for (int x : K.interior) {
    double l1 = apply_L_at(P, u1, x), l2 = apply_L_at(P, u2, x);
    double w = std::pow(u1[static_cast<std::size_t>(x)], P.p) - std::pow(u2[static_cast<std::size_t>(x)], P.p);
    lhs += (l1 / phi_p(u1[static_cast<std::size_t>(x)], P.p) - l2 / phi_p(u2[static_cast<std::size_t>(x)], P.p)) *
           w * g.m(x);
  }

  double rhs = 0.0;
  AdsSideConditions side;
  for (int x : K.interior) {
    for (const Neighbor* nb = g.nbr_begin(x); nb != g.nbr_end(x); ++nb) {
      int y = nb->v;
      if (K.in_interior[static_cast<std::size_t>(y)]) continue;
      double a1 = u1[static_cast<std::size_t>(x)], a2 = u2[static_cast<std::size_t>(x)];
      double b1 = u1[static_cast<std::size_t>(y)], b2 = u2[static_cast<std::size_t>(y)];
      rhs += nb->b * (std::pow(a1, P.p) - std::pow(a2, P.p)) *
             (phi_p(1.0 - b1 / a1, P.p) - phi_p(1.0 - b2 / a2, P.p));
      ++side.pairs;
      double eq_scale = kEqualityRelTol * (1.0 + std::abs(a1) + std::abs(a2));
      double cross_scale = kEqualityRelTol * (1.0 + std::abs(a1 * b2) + std::abs(b1 * a2));
      bool ca = std::abs(a1 - a2) <= eq_scale;
      bool cb = std::abs(a1 * b2 - b1 * a2) <= cross_scale;
      // u1 larger at x but relatively smaller at y (or vice versa): both
      // factors of the boundary term share their sign.
      bool cc = a1 > a2 && a1 * b2 > b1 * a2;
      bool cd = a1 < a2 && a1 * b2 < b1 * a2;
      if (ca) ++side.counts[0];
      if (cb) ++side.counts[1];
      if (cc) ++side.counts[2];
      if (cd) ++side.counts[3];
      if (!(ca || cb || cc || cd)) side.all_covered = false;
    }
  }

  // Independent route for the same gap: the proof's interior Picone
  // decomposition, a sum of pointwise-nonnegative terms.  Also yields the
  // worst per-term contribution.
  double picone_route = 0.0, min_term = 0.0, scale = 1.0;
  bool first = true;
  int ax = -1, ay = -1;
  for (int x : K.interior) {
    for (const Neighbor* nb = g.nbr_begin(x); nb != g.nbr_end(x); ++nb) {
      int y = nb->v;
      if (!K.in_interior[static_cast<std::size_t>(y)]) continue;
      double t1 = pointwise_picone_value(u1[static_cast<std::size_t>(x)], u1[static_cast<std::size_t>(y)],
                                         u2[static_cast<std::size_t>(y)] / u2[static_cast<std::size_t>(x)], P.p);
      double t2 = pointwise_picone_value(u2[static_cast<std::size_t>(x)], u2[static_cast<std::size_t>(y)],
                                         u1[static_cast<std::size_t>(y)] / u1[static_cast<std::size_t>(x)], P.p);
      double term = 0.5 * nb->b * (t1 + t2);
      picone_route += term;
      scale += nb->b * (std::pow(u1[static_cast<std::size_t>(x)], P.p) + std::pow(u2[static_cast<std::size_t>(x)], P.p));
      if (first || term < min_term) {
        min_term = term;
        ax = x;
        ay = y;
        first = false;
      }
    }
  }

  Certificate cert;
  cert.name = "ads";
  cert.gap = lhs - rhs;
  cert.min_term = first ? 0.0 : min_term;
  if (ax >= 0) cert.argmin = {ax, ay};
  cert.tolerances["nonneg"] = kNonnegTolPerScale * scale;
  cert.tolerances["equality"] = kEqualityRelTol;
  cert.passed = cert.gap >= -cert.tolerances["nonneg"];
  cert.metrics["lhs"] = lhs;
  cert.metrics["boundary_sum"] = rhs;
  cert.metrics["picone_route_gap"] = picone_route;
  cert.metrics["side_a"] = static_cast<double>(side.counts[0]);
  cert.metrics["side_b"] = static_cast<double>(side.counts[1]);
  cert.metrics["side_c"] = static_cast<double>(side.counts[2]);
  cert.metrics["side_d"] = static_cast<double>(side.counts[3]);
  cert.metrics["boundary_pairs"] = static_cast<double>(side.pairs);
  cert.metrics["side_all_covered"] = side.all_covered ? 1.0 : 0.0;

  // Equality case: proportional on K.
  if (!K.interior.empty()) {
    double C = u1[static_cast<std::size_t>(K.interior.front())] / u2[static_cast<std::size_t>(K.interior.front())];
    double dev = 0.0, mag = 0.0;
    for (int x : K.interior) {
      dev = std::max(dev, std::abs(u1[static_cast<std::size_t>(x)] - C * u2[static_cast<std::size_t>(x)]));
      mag = std::max(mag, std::abs(u1[static_cast<std::size_t>(x)]));
    }
    cert.equality_flag = dev <= kEqualityRelTol * (1.0 + mag);
    cert.metrics["proportionality_C"] = C;
  }
  return cert;
}

// Compactly supported form: phi, psi > 0 on K and zero outside; then
//   <L phi, (phi^p - psi^p)/phi^{p-1}>_K + <L psi, (psi^p - phi^p)/psi^{p-1}>_K >= 0
// with equality iff phi = C psi on connected K.
inline Certificate ads_finite_gap(const OperatorParams& P, const VertexFunction& phi,
                                  const VertexFunction& psi, const SubsetSpec& K) {
  detail::require_size(P.g(), phi, "ads_finite_gap");
  detail::require_size(P.g(), psi, "ads_finite_gap");
  for (int x = 0; x < P.g().size(); ++x) {
    bool inside = K.in_interior[static_cast<std::size_t>(x)];
    double a = phi[static_cast<std::size_t>(x)], b = psi[static_cast<std::size_t>(x)];
    if (inside && (!(a > 0.0) || !(b > 0.0)))
      throw input_error("ads_finite_gap: phi, psi must be strictly positive on K");
    if (!inside && (a != 0.0 || b != 0.0))
      throw input_error("ads_finite_gap: phi, psi must vanish outside K (vertex " + std::to_string(x) + ")");
  }
  Certificate cert = ads_gap(P, phi, psi, K);
  cert.name = "ads-finite";
  // The boundary sum vanishes identically here (u(y) = 0 makes both
  // phi_p(1 - 0) terms cancel); recompute gap as the two-bracket form for
  // the record.
  double s = 0.0;
  for (int x : K.interior) {
    double l1 = apply_L_at(P, phi, x), l2 = apply_L_at(P, psi, x);
    double pp = std::pow(phi[static_cast<std::size_t>(x)], P.p), qp = std::pow(psi[static_cast<std::size_t>(x)], P.p);
    s += l1 * (pp - qp) / phi_p(phi[static_cast<std::size_t>(x)], P.p) * P.g().m(x);
    s += l2 * (qp - pp) / phi_p(psi[static_cast<std::size_t>(x)], P.p) * P.g().m(x);
  }
  cert.metrics["two_bracket_sum"] = s;
  cert.gap = s;
  cert.passed = s >= -cert.tolerances["nonneg"];
  return cert;
}

// ---------------------------------------------------------------------------
// Local Harnack ratio.  For connected finite K, f on X, and u >= 0 in F(K)
// with Hu >= f u^{p-1} on K there is a constant C (depending on K, H, f but
// not u) with max_K u <= C min_K u; moreover u(x) = 0 at one x in K forces
// u = 0 on all of K and its boundary.  Only empirical per-instance constants
// are ever reported; no theoretical C is computed.

inline Certificate harnack_ratio(const OperatorParams& P, const VertexFunction& u,
                                 const SubsetSpec& K, const VertexFunction& f,
                                 double tol = 1e-10) {
  detail::require_size(P.g(), u, "harnack_ratio");
  detail::require_size(P.g(), f, "harnack_ratio");
  Certificate cert;
  cert.name = "harnack";
  cert.tolerances["hypothesis"] = tol;
  if (K.components.size() != 1) {
    cert.passed = false;
    cert.detail = "K must be connected";
    return cert;
  }
  // Hypotheses: u >= 0 on K and its boundary, Hu >= f u^{p-1} on K.
  double worst_sign = 0.0, worst_super = 0.0;
  for (int x : K.interior) worst_sign = std::min(worst_sign, u[static_cast<std::size_t>(x)]);
  for (int y : K.boundary) worst_sign = std::min(worst_sign, u[static_cast<std::size_t>(y)]);
  for (int x : K.interior) {
    double r = apply_H_at(P, u, x) -
               f[static_cast<std::size_t>(x)] * phi_p(u[static_cast<std::size_t>(x)], P.p);
    worst_super = std::min(worst_super, r);
  }
  cert.metrics["min_value"] = worst_sign;
  cert.metrics["supersolution_slack"] = worst_super;
  if (worst_sign < -tol || worst_super < -tol) {
    cert.passed = false;
    cert.detail = "hypotheses fail (u >= 0 and Hu >= f u^{p-1} required)";
    return cert;
  }

  double mx = 0.0, mn = 0.0;
  bool first = true;
  int arg = -1;
  for (int x : K.interior) {
    double v = u[static_cast<std::size_t>(x)];
    if (first) {
      mx = mn = v;
      arg = x;
      first = false;
    } else {
      mx = std::max(mx, v);
      if (v < mn) {
        mn = v;
        arg = x;
      }
    }
  }
  cert.min_term = mn;
  if (arg >= 0) cert.argmin = {arg};
  double zero_scale = tol * (1.0 + mx);
  if (mx <= zero_scale) {
    // u vanishes identically on K: the degenerate branch of the lemma.
    cert.gap = 1.0;
    cert.equality_flag = true;
    cert.detail = "u = 0 on K";
    double bd_max = 0.0;
    for (int y : K.boundary) bd_max = std::max(bd_max, std::abs(u[static_cast<std::size_t>(y)]));
    cert.metrics["boundary_max"] = bd_max;
    cert.passed = bd_max <= zero_scale;  // zero must propagate to the boundary
    if (!cert.passed) cert.detail = "u = 0 on K but not on its boundary (zero propagation violated)";
    return cert;
  }
  if (mn <= zero_scale) {
    cert.passed = false;
    cert.gap = std::numeric_limits<double>::infinity();
    cert.detail = "u vanishes at an interior vertex but not identically (contradicts the local Harnack lemma)";
    return cert;
  }
  cert.gap = mx / mn;  // the empirical ratio; reported, never bounded a priori
  cert.passed = true;
  return cert;
}

// Empirical Harnack constant across a batch sharing (K, H, f): the largest
// observed ratio.  Entries whose hypotheses fail are rejected.
inline double harnack_batch_constant(const OperatorParams& P, const std::vector<VertexFunction>& batch,
                                     const SubsetSpec& K, const VertexFunction& f) {
  double C = 1.0;
  for (const VertexFunction& u : batch) {
    Certificate c = harnack_ratio(P, u, K, f);
    if (!c.passed) throw input_error("harnack_batch_constant: hypotheses fail for a batch entry: " + c.detail);
    if (!c.equality_flag) C = std::max(C, c.gap);
  }
  return C;
}

// ---------------------------------------------------------------------------
// Barta-type two-sided bounds on the bottom of the spectrum from a positive
// test function u:
//   inf_V Hu/u^{p-1} <= lambda_0(V)   (valid when h >= 0 on C_c(V))
//   lambda_0(V) <= sup_V Hu/u^{p-1}   (requires u = 0 outside V).

struct BartaBounds {
  double lower = 0.0;
  double upper = 0.0;
};

inline BartaBounds barta_bounds(const OperatorParams& P, const VertexFunction& u, const SubsetSpec& V) {
  detail::require_size(P.g(), u, "barta_bounds");
  if (V.interior.empty()) throw input_error("barta_bounds: V is empty");
  for (int x : V.interior)
    if (!(u[static_cast<std::size_t>(x)] > 0.0))
      throw input_error("barta_bounds: u must be strictly positive on V");
  for (int x = 0; x < P.g().size(); ++x)
    if (!V.in_interior[static_cast<std::size_t>(x)] && u[static_cast<std::size_t>(x)] != 0.0)
      throw input_error("barta_bounds: u must vanish outside V (vertex " + std::to_string(x) +
                        ") for the upper bound to apply");
  BartaBounds out;
  bool first = true;
  for (int x : V.interior) {
    double q = apply_H_at(P, u, x) / phi_p(u[static_cast<std::size_t>(x)], P.p);
    if (first) {
      out.lower = out.upper = q;
      first = false;
    } else {
      out.lower = std::min(out.lower, q);
      out.upper = std::max(out.upper, q);
    }
  }
  return out;
}

}  // namespace pcrit
