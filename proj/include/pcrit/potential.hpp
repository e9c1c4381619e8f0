#pragma once

// Potential-theoretic objects along an exhaustion: variational capacities,
// Green functions of truncations, positive superharmonic witnesses built by
// the shifted-operator construction, ground-state extraction by Richardson
// extrapolation, and the criticality classification that ties them together.
//
// All family-level routines walk the truncation schedule of an
// ExhaustionSpec; vertex ids are stable across truncations (smaller slices
// are id-prefixes of larger ones), which the witness and ground-state code
// relies on.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "pcrit/certificate.hpp"
#include "pcrit/common.hpp"
#include "pcrit/dirichlet.hpp"
#include "pcrit/eigen.hpp"
#include "pcrit/families.hpp"
#include "pcrit/graph.hpp"
#include "pcrit/operators.hpp"

namespace pcrit {

// Pinned decision thresholds for the classification pipeline.
inline constexpr double kLambdaGateTol = 1e-10;   // lambda_0(K_n) below -this => supercritical
inline constexpr double kFlatteningTol = 1e-3;    // relative capacity steps below this => flat
inline constexpr double kCapPositiveFloor = 1e-6; // flat limit above this => positive capacity
inline constexpr double kDecayFitMinR2 = 0.999;   // quality gate for the power-law decay fit
inline constexpr double kDecayFitMaxSlope = -0.2; // slope must be at most this

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

inline LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  LineFit out;
  std::size_t n = xs.size();
  if (n < 2) return out;
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  double mx = sx / static_cast<double>(n), my = sy / static_cast<double>(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) return out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  out.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return out;
}

struct CapacityReport {
  double value = std::numeric_limits<double>::quiet_NaN();
  VertexFunction minimizer;
  double residual_sup = std::numeric_limits<double>::infinity();
  double stationarity_gap = std::numeric_limits<double>::infinity();
  double lambda_gate = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
};

// cap(o, K) = inf { h(phi) : phi(o) = 1, phi = 0 outside K }.  The minimizer
// is H-harmonic on K \ {o}, and p-homogeneity of h gives the stationarity
// identity m(o) Hu(o) = h(u), reported as a self-check.
inline CapacityReport capacity(const OperatorParams& P, const std::vector<int>& K, int anchor,
                               const SolverConfig& cfg = {}) {
  const WeightedGraph& g = *P.graph;
  if (anchor < 0 || anchor >= g.size()) throw input_error("capacity anchor out of range");
  std::vector<int> interior;
  bool found = false;
  for (int v : K) {
    if (v == anchor) {
      found = true;
      continue;
    }
    interior.push_back(v);
  }
  if (!found) throw input_error("capacity anchor must belong to the set K");

  DirichletProblem prob;
  prob.subset = make_subset(g, interior);
  prob.g.assign(static_cast<std::size_t>(g.size()), 0.0);
  prob.f.assign(static_cast<std::size_t>(g.size()), 0.0);
  prob.f[static_cast<std::size_t>(anchor)] = 1.0;
  SolveReport sr = minimize_j(P, prob, cfg);

  CapacityReport out;
  out.minimizer = sr.solution;
  out.residual_sup = sr.residual_sup;
  out.converged = sr.converged;
  out.lambda_gate = sr.coercivity_lambda;
  out.value = energy(P, sr.solution);
  double stat = g.m(anchor) * apply_H_at(P, sr.solution, anchor);
  out.stationarity_gap = std::abs(stat - out.value);
  return out;
}

struct CapacitySequenceReport {
  int anchor = 0;
  std::vector<int> radii;
  std::vector<double> values;
  std::vector<double> lambda_values;       // lambda_0(K_n), the truncation gates
  std::vector<double> anchor_boundary_distance;
  bool monotone_nonincreasing = false;
  double limit_estimate = std::numeric_limits<double>::quiet_NaN();
  double flattening = std::numeric_limits<double>::infinity();  // max of last relative steps
  LineFit decay_fit;  // log cap vs log dist(anchor, boundary)
  double second_anchor_value = std::numeric_limits<double>::quiet_NaN();
  bool all_converged = false;
};

namespace detail {

inline double lambda_gate_for_slice(const FamilySlice& slice, double p, const SolverConfig& cfg) {
  OperatorParams P(slice.graph, p);
  EigenConfig ec = cfg.eigen;
  ec.seed = cfg.seed;
  EigenReport er = principal_eigenvalue(P, slice.subset.interior, ec);
  if (!er.converged) throw error("principal eigenvalue solve did not converge on a truncation");
  return er.lambda;
}

}  // namespace detail

inline CapacitySequenceReport capacity_sequence(const ExhaustionSpec& spec, double p, int anchor,
                                                const SolverConfig& cfg = {}) {
  CapacitySequenceReport out;
  out.anchor = anchor;
  out.all_converged = true;
  int count = spec.truncation_count();
  if (count == 0) throw input_error("the truncation schedule is empty");
  for (int i = 0; i < count; ++i) {
    FamilySlice slice = build_family(spec, i);
    if (anchor >= slice.graph.size() || !slice.subset.in_interior[static_cast<std::size_t>(anchor)])
      throw input_error("anchor is not interior to every truncation");
    OperatorParams P(slice.graph, p);
    double lambda = detail::lambda_gate_for_slice(slice, p, cfg);
    out.radii.push_back(slice.radius);
    out.lambda_values.push_back(lambda);
    out.anchor_boundary_distance.push_back(
        static_cast<double>(slice.dist_to_boundary[static_cast<std::size_t>(anchor)]));
    if (lambda < -kLambdaGateTol) {
      // Non-coercive truncation: the capacity infimum is -inf, so there is
      // nothing meaningful to solve here or on any larger truncation.
      out.values.push_back(std::numeric_limits<double>::quiet_NaN());
      out.all_converged = false;
      break;
    }
    SolverConfig ccfg = cfg;
    ccfg.verify_coercivity = false;  // gate already computed once per truncation
    CapacityReport cr = capacity(P, slice.subset.interior, anchor, ccfg);
    out.values.push_back(cr.value);
    if (!cr.converged) out.all_converged = false;

    if (i + 1 == count) {
      // Informational cross-check at a second anchor (criticality does not
      // depend on the anchor choice).
      const WeightedGraph& g = slice.graph;
      int other = -1;
      for (const Neighbor* nb = g.nbr_begin(anchor); nb != g.nbr_end(anchor); ++nb)
        if (slice.subset.in_interior[static_cast<std::size_t>(nb->v)] && (other < 0 || nb->v < other))
          other = nb->v;
      if (other >= 0) {
        CapacityReport cr2 = capacity(P, slice.subset.interior, other, ccfg);
        out.second_anchor_value = cr2.value;
      }
    }
  }
  out.monotone_nonincreasing = true;
  for (std::size_t i = 1; i < out.values.size(); ++i)
    if (out.values[i] > out.values[i - 1] * (1.0 + 1e-9) + 1e-14) out.monotone_nonincreasing = false;
  out.limit_estimate = out.values.back();
  if (out.values.size() >= 3) {
    double f1 = std::abs(out.values[out.values.size() - 1] - out.values[out.values.size() - 2]);
    double f2 = std::abs(out.values[out.values.size() - 2] - out.values[out.values.size() - 3]);
    double scale = std::max({std::abs(out.values.back()), 1e-300});
    out.flattening = std::max(f1, f2) / scale;
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < out.values.size(); ++i)
    if (out.values[i] > 0.0 && out.anchor_boundary_distance[i] > 0.0) {
      lx.push_back(std::log(out.anchor_boundary_distance[i]));
      ly.push_back(std::log(out.values[i]));
    }
  out.decay_fit = fit_line(lx, ly);
  return out;
}

struct GreenReport {
  int anchor = 0;
  std::vector<int> radii;
  std::vector<double> cap_values;
  std::vector<double> anchor_values;  // G_n(o), nondecreasing for nested truncations
  VertexFunction green;               // on the final slice host
  int host_size = 0;
  double cap_final = std::numeric_limits<double>::quiet_NaN();
  double residual_sup = std::numeric_limits<double>::infinity();
  double energy_identity_gap = std::numeric_limits<double>::infinity();
  bool monotone_ok = false;
  bool nonconstant = false;
  bool converged = false;
};

// Green function of the final truncation with pole o: the capacity minimizer
// rescaled by homogeneity so that H G = 1_o on K_N.  Refuses when the
// capacity run shows critical or supercritical evidence.
inline GreenReport green_function(const ExhaustionSpec& spec, double p, int anchor,
                                  const SolverConfig& cfg = {}) {
  GreenReport out;
  out.anchor = anchor;
  int count = spec.truncation_count();
  if (count == 0) throw input_error("the truncation schedule is empty");
  VertexFunction prev_u;
  bool monotone = true;
  for (int i = 0; i < count; ++i) {
    FamilySlice slice = build_family(spec, i);
    if (anchor >= slice.graph.size() || !slice.subset.in_interior[static_cast<std::size_t>(anchor)])
      throw input_error("anchor is not interior to every truncation");
    OperatorParams P(slice.graph, p);
    double lambda = detail::lambda_gate_for_slice(slice, p, cfg);
    if (lambda < -kLambdaGateTol)
      throw refusal("green function refused: lambda_0 of a truncation is negative (" +
                    std::to_string(lambda) + "), supercritical evidence");
    SolverConfig ccfg = cfg;
    ccfg.verify_coercivity = false;
    CapacityReport cr = capacity(P, slice.subset.interior, anchor, ccfg);
    if (!cr.converged) throw error("capacity solve did not converge inside the green construction");
    double m_o = slice.graph.m(anchor);
    double t = std::pow(m_o / cr.value, 1.0 / (p - 1.0));
    out.radii.push_back(slice.radius);
    out.cap_values.push_back(cr.value);
    out.anchor_values.push_back(t);  // G_n(o) = t * u_n(o) = t

    if (!prev_u.empty()) {
      for (std::size_t v = 0; v < prev_u.size(); ++v)
        if (cr.minimizer[v] < prev_u[v] - 1e-9 * (1.0 + std::abs(prev_u[v]))) monotone = false;
    }
    prev_u = cr.minimizer;
    prev_u.resize(static_cast<std::size_t>(slice.graph.size()), 0.0);

    if (i + 1 == count) {
      out.host_size = slice.graph.size();
      out.cap_final = cr.value;
      out.green.assign(cr.minimizer.begin(), cr.minimizer.end());
      for (double& v : out.green) v *= t;
      double sup = 0.0;
      for (int v : slice.subset.interior) {
        double target = v == anchor ? 1.0 : 0.0;
        sup = std::max(sup, std::abs(apply_H_at(P, out.green, v) - target));
      }
      out.residual_sup = sup;
      // h(G) cap^{1/(p-1)} = m(o)^{p/(p-1)}
      double lhs = energy(P, out.green) * std::pow(cr.value, 1.0 / (p - 1.0));
      double rhs = std::pow(m_o, p / (p - 1.0));
      out.energy_identity_gap = std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
      double gmin = std::numeric_limits<double>::infinity(), gmax = -gmin;
      for (int v = 0; v < slice.graph.size(); ++v) {
        gmin = std::min(gmin, out.green[static_cast<std::size_t>(v)]);
        gmax = std::max(gmax, out.green[static_cast<std::size_t>(v)]);
      }
      out.nonconstant = gmax - gmin > 1e-12 * (1.0 + std::abs(gmax));
    }
  }
  // A shrinking capacity with no flattening is critical evidence; refuse to
  // present a truncation object as a limit Green function in that case.
  if (out.cap_values.size() >= 3) {
    double f1 = std::abs(out.cap_values[out.cap_values.size() - 1] -
                         out.cap_values[out.cap_values.size() - 2]);
    double f2 = std::abs(out.cap_values[out.cap_values.size() - 2] -
                         out.cap_values[out.cap_values.size() - 3]);
    double flat = std::max(f1, f2) / std::max(std::abs(out.cap_values.back()), 1e-300);
    if (flat > kFlatteningTol || out.cap_values.back() <= kCapPositiveFloor)
      throw refusal("green function refused: capacities are not flattening at a positive value "
                    "(critical evidence)");
  } else if (out.cap_values.back() <= kCapPositiveFloor) {
    throw refusal("green function refused: final capacity is not safely positive");
  }
  out.monotone_ok = monotone;
  out.converged = true;
  return out;
}

enum class WitnessOutcome { witness, supercritical };

struct WitnessReport {
  WitnessOutcome outcome = WitnessOutcome::witness;
  int anchor = 0;
  std::vector<int> radii;
  std::vector<double> lambda_values;
  std::vector<double> normalizations;  // C_n = u_n(o)^{1-p}
  VertexFunction witness;              // final normalized iterate, witness(o) = 1
  int host_size = 0;
  double min_on_final_interior = 0.0;
  std::vector<Certificate> certificates;
  // supercritical branch:
  VertexFunction eigenfunction;
  double lambda_bad = std::numeric_limits<double>::quiet_NaN();
  int bad_radius = -1;
};

// Shifted-operator witness construction.  On each truncation K_n solve
//   H u + (1/n) phi_p(u) = 1_{x_n},   u = 0 outside K_n,
// with x_n the interior vertex farthest from the anchor, normalize u(o) = 1
// by p-homogeneity, and certify that the final iterate is (H + m/n0)-
// superharmonic on K_{n0} for every scheduled n0.  Nonnegativity of h on
// compactly supported functions is gated through lambda_0(K_n) >= -tol; a
// negative gate switches the outcome to supercritical and ships the
// eigenfunction as the counterexample.
inline WitnessReport superharmonic_witness(const ExhaustionSpec& spec, double p, int anchor,
                                           const SolverConfig& cfg = {}) {
  WitnessReport out;
  out.anchor = anchor;
  int count = spec.truncation_count();
  if (count == 0) throw input_error("the truncation schedule is empty");
  VertexFunction final_u;
  for (int i = 0; i < count; ++i) {
    FamilySlice slice = build_family(spec, i);
    if (anchor >= slice.graph.size() || !slice.subset.in_interior[static_cast<std::size_t>(anchor)])
      throw input_error("anchor is not interior to every truncation");
    const WeightedGraph& g = slice.graph;
    OperatorParams P(g, p);

    EigenConfig ec = cfg.eigen;
    ec.seed = cfg.seed;
    EigenReport er = principal_eigenvalue(P, slice.subset.interior, ec);
    if (!er.converged) throw error("principal eigenvalue solve did not converge on a truncation");
    out.radii.push_back(slice.radius);
    out.lambda_values.push_back(er.lambda);
    if (er.lambda < -kLambdaGateTol) {
      out.outcome = WitnessOutcome::supercritical;
      out.eigenfunction = er.eigenfunction;
      out.lambda_bad = er.lambda;
      out.bad_radius = slice.radius;
      out.host_size = g.size();
      Certificate cert;
      cert.name = "negative-energy-witness";
      cert.gap = er.lambda;
      cert.tolerances["lambda_gate"] = kLambdaGateTol;
      cert.passed = true;
      cert.detail = "compactly supported function with h < 0: the principal eigenfunction of K_n";
      out.certificates.push_back(cert);
      return out;
    }

    // Farthest interior vertex from the anchor; ties resolved by smallest id.
    std::vector<int> dist = bfs_distances(g, anchor);
    int far = anchor, far_d = -1;
    for (int v : slice.subset.interior)
      if (dist[static_cast<std::size_t>(v)] > far_d) {
        far = v;
        far_d = dist[static_cast<std::size_t>(v)];
      }

    double n_shift = static_cast<double>(slice.radius);
    std::vector<double> c_shift = g.c_vec();
    for (int v = 0; v < g.size(); ++v) c_shift[static_cast<std::size_t>(v)] += g.m(v) / n_shift;
    // lambda_0(c + m/n) = lambda_0(c) + 1/n > 0: the shifted solve is coercive
    // by the gate above, so the inner coercivity check can be skipped.
    DirichletProblem prob;
    prob.subset = slice.subset;
    prob.g.assign(static_cast<std::size_t>(g.size()), 0.0);
    prob.f.assign(static_cast<std::size_t>(g.size()), 0.0);
    prob.g[static_cast<std::size_t>(far)] = 1.0;
    SolverConfig scfg = cfg;
    scfg.verify_coercivity = false;
    SolveReport sr = detail::solve_dirichlet_core(P, prob, scfg, &c_shift, nullptr);
    if (!sr.converged) throw error("shifted witness solve did not converge");
    double u_o = sr.solution[static_cast<std::size_t>(anchor)];
    if (!(u_o > 0.0)) throw error("witness iterate vanishes at the anchor");
    out.normalizations.push_back(std::pow(u_o, 1.0 - p));
    VertexFunction hat = sr.solution;
    for (double& v : hat) v /= u_o;

    Certificate pos;
    pos.name = "witness-positivity-r" + std::to_string(slice.radius);
    double pmin = std::numeric_limits<double>::infinity();
    for (int v : slice.subset.interior)
      pmin = std::min(pmin, hat[static_cast<std::size_t>(v)]);
    pos.gap = pmin;
    pos.min_term = pmin;
    pos.passed = pmin > 0.0;
    pos.detail = "normalized iterate strictly positive on the truncation interior";
    out.certificates.push_back(pos);

    if (i + 1 == count) {
      final_u = hat;
      out.host_size = g.size();
      out.min_on_final_interior = pmin;
      // Residual of the shifted solve, certificate form.
      Certificate res;
      res.name = "witness-residual";
      res.gap = sr.residual_sup;
      res.tolerances["residual"] = sr.tol_effective;
      res.passed = sr.converged;
      res.detail = "H u + phi_p(u)/n = point source at the far vertex, final truncation";
      out.certificates.push_back(res);
      // Superharmonicity w.r.t. every scheduled shift on its own truncation:
      // H_{n0} hat = C 1_{x_N} + (1/n0 - 1/N) phi_p(hat) >= 0 on K_{n0}.
      // Dividing by u(o)^{p-1} rescales the solve residual too, so the
      // superharmonicity tolerance carries the same factor.
      double tol_sh = 2.0 * sr.tol_effective * std::pow(u_o, 1.0 - p) + 1e-12;
      for (int j = 0; j <= i; ++j) {
        FamilySlice inner = build_family(spec, j);
        double n0 = static_cast<double>(inner.radius);
        std::vector<double> c0 = g.c_vec();
        for (int v = 0; v < g.size(); ++v) c0[static_cast<std::size_t>(v)] += g.m(v) / n0;
        SubsetSpec inner_on_final = make_subset(g, inner.subset.interior);
        Certificate sh = is_superharmonic(P, final_u, inner_on_final, tol_sh, &c0);
        sh.name = "witness-superharmonic-r" + std::to_string(inner.radius);
        sh.detail = "final iterate is superharmonic for the shift 1/" + std::to_string(inner.radius) +
                    " on that truncation";
        out.certificates.push_back(sh);
      }
    }
  }
  out.witness = std::move(final_u);
  out.outcome = WitnessOutcome::witness;
  return out;
}

struct GroundStateReport {
  int anchor = 0;
  std::vector<int> radii;
  VertexFunction ground_state;  // extrapolated values on `region`, 0 elsewhere
  std::vector<int> region;      // interior of the smallest scheduled truncation
  int host_size = 0;
  double anchor_value = std::numeric_limits<double>::quiet_NaN();
  bool positive = false;
  bool stabilized = false;  // at least 3 truncations entered the extrapolation
  std::vector<double> error_indicator;  // per region vertex: |deg-k - deg-(k-1)| extrapolants
  double max_error_indicator = std::numeric_limits<double>::quiet_NaN();
  double deep_residual_sup = std::numeric_limits<double>::quiet_NaN();  // sup |Hw| deep inside
  Certificate minimal_growth;
  bool converged = false;
};

namespace detail {

// Extrapolate samples (s_i, y_i) to s = 0 with the interpolating polynomial
// of degree min(max_deg, n-1) through the LAST deg+1 points (s decreasing
// toward 0 keeps those best).  Plain Neville scheme.
inline double extrapolate_to_zero(const std::vector<double>& s, const std::vector<double>& y,
                                  int max_deg) {
  int n = static_cast<int>(s.size());
  int deg = std::min(max_deg, n - 1);
  int lo = n - (deg + 1);
  std::vector<double> t(y.begin() + lo, y.end());
  std::vector<double> xs(s.begin() + lo, s.end());
  for (int level = 1; level <= deg; ++level)
    for (int i = 0; i + level <= deg; ++i)
      t[static_cast<std::size_t>(i)] =
          (xs[static_cast<std::size_t>(i + level)] * t[static_cast<std::size_t>(i)] -
           xs[static_cast<std::size_t>(i)] * t[static_cast<std::size_t>(i + 1)]) /
          (xs[static_cast<std::size_t>(i + level)] - xs[static_cast<std::size_t>(i)]);
  return t[0];
}

}  // namespace detail

// Ground-state candidate: extrapolate the capacity minimizers u_n vertexwise
// to the infinite-volume limit.  The abscissa is 1/dist(anchor, boundary of
// K_n) — one shared value per truncation — and the reported region is the
// interior of the smallest truncation so every vertex has a full sample set.
inline GroundStateReport ground_state(const ExhaustionSpec& spec, double p, int anchor,
                                      const SolverConfig& cfg = {}) {
  GroundStateReport out;
  out.anchor = anchor;
  int count = spec.truncation_count();
  if (count == 0) throw input_error("the truncation schedule is empty");
  std::vector<double> abscissa;
  std::vector<VertexFunction> minimizers;
  for (int i = 0; i < count; ++i) {
    FamilySlice slice = build_family(spec, i);
    if (anchor >= slice.graph.size() || !slice.subset.in_interior[static_cast<std::size_t>(anchor)])
      throw input_error("anchor is not interior to every truncation");
    OperatorParams P(slice.graph, p);
    SolverConfig ccfg = cfg;
    CapacityReport cr = capacity(P, slice.subset.interior, anchor, ccfg);
    if (!cr.converged) throw error("capacity solve did not converge in the ground-state run");
    out.radii.push_back(slice.radius);
    int d_anchor = slice.dist_to_boundary[static_cast<std::size_t>(anchor)];
    if (d_anchor < 1)
      throw input_error("ground-state extrapolation needs a boundary at positive distance");
    abscissa.push_back(1.0 / d_anchor);
    minimizers.push_back(cr.minimizer);
    if (i == 0) {
      out.region = slice.subset.interior;
    }
    if (i + 1 == count) out.host_size = slice.graph.size();
  }
  out.stabilized = count >= 3;

  out.ground_state.assign(static_cast<std::size_t>(out.host_size), 0.0);
  out.error_indicator.assign(out.region.size(), 0.0);
  out.max_error_indicator = 0.0;
  std::vector<double> samples(static_cast<std::size_t>(count));
  for (std::size_t ri = 0; ri < out.region.size(); ++ri) {
    int v = out.region[ri];
    for (int i = 0; i < count; ++i) samples[static_cast<std::size_t>(i)] = minimizers[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)];
    double w3 = detail::extrapolate_to_zero(abscissa, samples, 3);
    out.ground_state[static_cast<std::size_t>(v)] = w3;
    if (count >= 3) {
      double w2 = detail::extrapolate_to_zero(abscissa, samples, 2);
      out.error_indicator[ri] = std::abs(w3 - w2);
      out.max_error_indicator = std::max(out.max_error_indicator, out.error_indicator[ri]);
    }
  }
  out.anchor_value = out.ground_state[static_cast<std::size_t>(anchor)];
  out.positive = true;
  for (int v : out.region)
    if (!(out.ground_state[static_cast<std::size_t>(v)] > 0.0)) out.positive = false;

  // Residual of the limit candidate deep inside the region: vertices whose
  // neighbors all stayed in the region.
  {
    FamilySlice first = build_family(spec, 0);
    OperatorParams P(first.graph, p);
    std::vector<char> in_region(static_cast<std::size_t>(out.host_size), 0);
    for (int v : out.region) in_region[static_cast<std::size_t>(v)] = 1;
    double sup = 0.0;
    bool any = false;
    for (int v : out.region) {
      bool deep = true;
      for (const Neighbor* nb = first.graph.nbr_begin(v); nb != first.graph.nbr_end(v); ++nb)
        if (!in_region[static_cast<std::size_t>(nb->v)]) deep = false;
      if (!deep) continue;
      any = true;
      sup = std::max(sup, std::abs(apply_H_at(P, out.ground_state, v)));
    }
    out.deep_residual_sup = any ? sup : std::numeric_limits<double>::quiet_NaN();
  }

  // Minimal-growth spot check against certified global superharmonic
  // functions: the constants, when the potential is nonnegative on the final
  // host.  The ratio w/s must not climb toward the boundary of the region.
  {
    FamilySlice last = build_family(spec, count - 1);
    bool c_nonneg = true;
    for (int v = 0; v < last.graph.size(); ++v)
      if (last.graph.c(v) < 0.0) c_nonneg = false;
    Certificate mg;
    mg.name = "minimal-growth-spot-check";
    if (!c_nonneg) {
      mg.passed = true;
      mg.detail = "no certified comparison pool (sign-changing potential); check skipped";
    } else if (!out.positive) {
      mg.passed = false;
      mg.detail = "candidate not strictly positive on the region";
    } else {
      FamilySlice first = build_family(spec, 0);
      double d_anchor = first.dist_to_boundary[static_cast<std::size_t>(anchor)];
      double inner_max = 0.0, outer_max = 0.0;
      for (int v : out.region) {
        double ratio = out.ground_state[static_cast<std::size_t>(v)];  // s = 1
        if (first.dist_to_boundary[static_cast<std::size_t>(v)] * 2 >= d_anchor)
          inner_max = std::max(inner_max, ratio);
        else
          outer_max = std::max(outer_max, ratio);
      }
      mg.metrics["inner_max_ratio"] = inner_max;
      mg.metrics["outer_max_ratio"] = outer_max;
      mg.gap = inner_max - outer_max;
      mg.tolerances["growth"] = 1e-6 * (1.0 + inner_max);
      mg.passed = outer_max <= inner_max * (1.0 + 1e-6) + 1e-9;
      mg.detail = "ratio against the constant superharmonic function does not climb outward";
    }
    out.minimal_growth = mg;
  }
  out.converged = true;
  return out;
}

enum class Verdict { subcritical, critical_evidence, supercritical, inconclusive };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::subcritical: return "subcritical";
    case Verdict::critical_evidence: return "critical-evidence";
    case Verdict::supercritical: return "supercritical";
    default: return "inconclusive";
  }
}

struct ClassifyReport {
  Verdict verdict = Verdict::inconclusive;
  CapacitySequenceReport caps;
  double flattening = std::numeric_limits<double>::infinity();
  bool green_ok = false;
  std::string evidence_kind;  // "green" | "ground-state" | "negative-energy" | "vertex-scan"
  VertexFunction evidence;
  int evidence_host_size = 0;
  double lambda_bad = std::numeric_limits<double>::quiet_NaN();
  std::string narrative;
};

// Criticality classification along the exhaustion:
//  * any vertex with deg + c < 0, or any truncation with lambda_0 < -tol,
//    is a finite certificate of supercriticality;
//  * flattening capacities at a safely positive value, confirmed by a Green
//    construction, give subcriticality;
//  * cleanly decaying capacities with a positive extrapolated ground state
//    and nonnegative gates give critical evidence;
//  * anything else stays inconclusive.
inline ClassifyReport classify(const ExhaustionSpec& spec, double p, int anchor,
                               const SolverConfig& cfg = {}) {
  ClassifyReport out;
  int count = spec.truncation_count();
  if (count == 0) throw input_error("the truncation schedule is empty");
  FamilySlice last = build_family(spec, count - 1);

  // Finite certificate scan: h(1_x) = deg(x) + c(x).
  for (int v : last.subset.interior) {
    if (last.graph.deg(v) + last.graph.c(v) < 0.0) {
      out.verdict = Verdict::supercritical;
      out.evidence_kind = "vertex-scan";
      out.evidence.assign(static_cast<std::size_t>(last.graph.size()), 0.0);
      out.evidence[static_cast<std::size_t>(v)] = 1.0;
      out.evidence_host_size = last.graph.size();
      out.narrative = "vertex " + std::to_string(v) + " has deg + c = " +
                      std::to_string(last.graph.deg(v) + last.graph.c(v)) +
                      " < 0: the indicator has negative energy";
      return out;
    }
  }

  out.caps = capacity_sequence(spec, p, anchor, cfg);
  out.flattening = out.caps.flattening;
  for (std::size_t i = 0; i < out.caps.lambda_values.size(); ++i) {
    if (out.caps.lambda_values[i] < -kLambdaGateTol) {
      out.verdict = Verdict::supercritical;
      out.evidence_kind = "negative-energy";
      out.lambda_bad = out.caps.lambda_values[i];
      FamilySlice slice = build_family(spec, static_cast<int>(i));
      OperatorParams P(slice.graph, p);
      EigenConfig ec = cfg.eigen;
      ec.seed = cfg.seed;
      EigenReport er = principal_eigenvalue(P, slice.subset.interior, ec);
      out.evidence = er.eigenfunction;
      out.evidence_host_size = slice.graph.size();
      out.narrative = "lambda_0 of the radius-" + std::to_string(out.caps.radii[i]) +
                      " truncation is negative: its eigenfunction has negative energy";
      return out;
    }
  }

  bool flat = out.caps.flattening <= kFlatteningTol;
  bool positive_limit = out.caps.limit_estimate > kCapPositiveFloor;
  if (flat && positive_limit) {
    try {
      GreenReport gr = green_function(spec, p, anchor, cfg);
      out.green_ok = gr.converged && gr.residual_sup <= 1e-6 * (1.0 + 1.0 / gr.cap_final);
      if (out.green_ok) {
        out.verdict = Verdict::subcritical;
        out.evidence_kind = "green";
        out.evidence = gr.green;
        out.evidence_host_size = gr.host_size;
        out.narrative = "capacities flatten at " + std::to_string(out.caps.limit_estimate) +
                        " and the green construction verifies";
        return out;
      }
    } catch (const refusal&) {
      out.green_ok = false;
    }
  }

  bool decaying = !positive_limit ||
                  (!flat && out.caps.decay_fit.r2 >= kDecayFitMinR2 &&
                   out.caps.decay_fit.slope <= kDecayFitMaxSlope);
  if (decaying) {
    GroundStateReport gs = ground_state(spec, p, anchor, cfg);
    if (gs.converged && gs.positive && gs.minimal_growth.passed) {
      out.verdict = Verdict::critical_evidence;
      out.evidence_kind = "ground-state";
      out.evidence = gs.ground_state;
      out.evidence_host_size = gs.host_size;
      out.narrative = "capacities decay (fit slope " + std::to_string(out.caps.decay_fit.slope) +
                      ", r2 " + std::to_string(out.caps.decay_fit.r2) +
                      ") and a positive ground-state candidate extrapolates";
      return out;
    }
  }
  out.narrative = "no certificate fired: capacities neither flatten at a positive value nor decay "
                  "cleanly enough";
  return out;
}

struct LambdaCapReport {
  int anchor = 0;
  std::vector<int> radii;
  std::vector<double> upper_bounds;   // cap(o, K_n) / m(o)
  std::vector<double> lambda_values;  // lambda_0(K_n) crosschecks
  double best_upper = std::numeric_limits<double>::infinity();
  bool crosscheck_ok = false;
};

// Testing the capacity minimizer in the Rayleigh quotient gives
// lambda_0(K_n) <= cap(o, K_n) / m(o); the infimum over truncations bounds
// the bottom of the spectrum of the whole family.
inline LambdaCapReport lambda_upper_from_capacity(const ExhaustionSpec& spec, double p, int anchor,
                                                  const SolverConfig& cfg = {}) {
  LambdaCapReport out;
  out.anchor = anchor;
  CapacitySequenceReport caps = capacity_sequence(spec, p, anchor, cfg);
  out.radii = caps.radii;
  out.lambda_values = caps.lambda_values;
  out.crosscheck_ok = true;
  for (std::size_t i = 0; i < caps.values.size(); ++i) {
    FamilySlice slice = build_family(spec, static_cast<int>(i));
    double bound = caps.values[i] / slice.graph.m(anchor);
    out.upper_bounds.push_back(bound);
    if (std::isfinite(bound)) {
      out.best_upper = std::min(out.best_upper, bound);
      if (caps.lambda_values[i] > bound + 1e-8 * (1.0 + std::abs(bound)))
        out.crosscheck_ok = false;
    }
  }
  return out;
}

}  // namespace pcrit
