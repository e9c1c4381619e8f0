#pragma once

// Weighted graphs (X, b, m, c): symmetric positive edge weights b with zero
// diagonal, vertex measure m > 0, and a signed potential c.  Vertices are
// dense indices 0..n-1.  Graphs are immutable once built; raw ingestion data
// (GraphData) is validated separately so diagnostics can be reported on
// malformed files without throwing.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pcrit/common.hpp"

namespace pcrit {

struct VertexData {
  int id = 0;
  double m = 1.0;
  double c = 0.0;
};

struct EdgeData {
  int u = 0;
  int v = 0;
  double b = 1.0;
};

// Raw, not-yet-trusted graph description (e.g. straight from JSON).
struct GraphData {
  std::vector<VertexData> vertices;
  std::vector<EdgeData> edges;
};

struct Violation {
  std::string code;     // "duplicate-vertex", "asymmetric-edge", ...
  std::string message;  // human-readable detail
};

// Structural diagnostics for raw data.  `violations` are hard errors that
// block construction; `notes` are informational (isolated vertices,
// disconnected host).
struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<Violation> notes;
  bool ok() const { return violations.empty(); }
};

class WeightedGraph;

inline ValidationReport validate(const GraphData& data);

struct Neighbor {
  int v;
  double b;
};

class WeightedGraph {
 public:
  WeightedGraph() = default;

  // Builds from validated parts.  `edges` are undirected, stored once with
  // u < v.  Throws input_error if validate() finds hard violations.
  static WeightedGraph from_data(const GraphData& data) {
    ValidationReport rep = validate(data);
    if (!rep.ok()) {
      std::string msg = "invalid graph:";
      for (const auto& v : rep.violations) msg += " [" + v.code + "] " + v.message;
      throw input_error(msg);
    }
    WeightedGraph g;
    const std::size_t n = data.vertices.size();
    g.m_.resize(n);
    g.c_.resize(n);
    for (const auto& vd : data.vertices) {
      g.m_[static_cast<std::size_t>(vd.id)] = vd.m;
      g.c_[static_cast<std::size_t>(vd.id)] = vd.c;
    }
    g.edges_.reserve(data.edges.size());
    for (const auto& e : data.edges) {
      EdgeData canon{std::min(e.u, e.v), std::max(e.u, e.v), e.b};
      g.edges_.push_back(canon);
    }
    std::sort(g.edges_.begin(), g.edges_.end(), [](const EdgeData& a, const EdgeData& b) {
      return std::pair(a.u, a.v) < std::pair(b.u, b.v);
    });
    // CSR adjacency, both directions, neighbors sorted by index.
    std::vector<int> count(n, 0);
    for (const auto& e : g.edges_) {
      ++count[static_cast<std::size_t>(e.u)];
      ++count[static_cast<std::size_t>(e.v)];
    }
    g.offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] = g.offsets_[i] + count[i];
    g.adj_.resize(g.offsets_[n]);
    std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const auto& e : g.edges_) {
      g.adj_[cursor[static_cast<std::size_t>(e.u)]++] = Neighbor{e.v, e.b};
      g.adj_[cursor[static_cast<std::size_t>(e.v)]++] = Neighbor{e.u, e.b};
    }
    for (std::size_t i = 0; i < n; ++i) {
      std::sort(g.adj_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]),
                g.adj_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]),
                [](const Neighbor& a, const Neighbor& b) { return a.v < b.v; });
    }
    g.deg_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = g.offsets_[i]; k < g.offsets_[i + 1]; ++k) s += g.adj_[k].b;
      g.deg_[i] = s;
    }
    return g;
  }

  int size() const { return static_cast<int>(m_.size()); }
  double m(int x) const { return m_[static_cast<std::size_t>(x)]; }
  double c(int x) const { return c_[static_cast<std::size_t>(x)]; }
  // deg(x) = sum_y b(x,y)
  double deg(int x) const { return deg_[static_cast<std::size_t>(x)]; }

  const Neighbor* nbr_begin(int x) const { return adj_.data() + offsets_[static_cast<std::size_t>(x)]; }
  const Neighbor* nbr_end(int x) const { return adj_.data() + offsets_[static_cast<std::size_t>(x) + 1]; }

  // Canonical undirected edge list (u < v, sorted).  One pass over this list
  // equals the half double-sum in the energy functional.
  const std::vector<EdgeData>& edges() const { return edges_; }

  // b(u,v), 0 when not adjacent.
  double edge_weight(int u, int v) const {
    const Neighbor* lo = nbr_begin(u);
    const Neighbor* hi = nbr_end(u);
    auto it = std::lower_bound(lo, hi, v, [](const Neighbor& a, int key) { return a.v < key; });
    return (it != hi && it->v == v) ? it->b : 0.0;
  }

  const std::vector<double>& m_vec() const { return m_; }
  const std::vector<double>& c_vec() const { return c_; }

  // Copy with the potential replaced (used for |c| sandwich solves and the
  // c + m/n shifts in the superharmonic-witness construction).
  WeightedGraph with_potential(std::vector<double> c_new) const {
    if (static_cast<int>(c_new.size()) != size())
      throw input_error("with_potential: wrong length " + std::to_string(c_new.size()));
    WeightedGraph g = *this;
    g.c_ = std::move(c_new);
    return g;
  }

  GraphData to_data() const {
    GraphData d;
    d.vertices.reserve(m_.size());
    for (int i = 0; i < size(); ++i) d.vertices.push_back({i, m(i), c(i)});
    d.edges = edges_;
    return d;
  }

 private:
  std::vector<double> m_, c_, deg_;
  std::vector<EdgeData> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adj_;
};

inline ValidationReport validate(const GraphData& data) {
  ValidationReport rep;
  const std::size_t n = data.vertices.size();
  auto bad = [&rep](std::string code, std::string msg) {
    rep.violations.push_back({std::move(code), std::move(msg)});
  };
  std::vector<int> seen;
  seen.reserve(n);
  for (const auto& v : data.vertices) {
    if (v.id < 0 || static_cast<std::size_t>(v.id) >= n)
      bad("vertex-id-range", "vertex id " + std::to_string(v.id) + " outside 0.." + std::to_string(n ? n - 1 : 0));
    else
      seen.push_back(v.id);
    if (!(v.m > 0.0) || !std::isfinite(v.m))
      bad("nonpositive-measure", "m(" + std::to_string(v.id) + ") = " + std::to_string(v.m));
    if (!std::isfinite(v.c))
      bad("bad-potential", "c(" + std::to_string(v.id) + ") not finite");
  }
  std::sort(seen.begin(), seen.end());
  for (std::size_t i = 1; i < seen.size(); ++i)
    if (seen[i] == seen[i - 1])
      bad("duplicate-vertex", "vertex id " + std::to_string(seen[i]) + " repeated");
  if (seen.size() == n) {
    for (std::size_t i = 0; i < seen.size(); ++i)
      if (seen[i] != static_cast<int>(i)) {
        bad("vertex-id-gap", "ids are not dense 0.." + std::to_string(n - 1));
        break;
      }
  }

  // Edges: normalize to u<v and look for self-loops, bad weights and
  // repeated pairs.  A pair listed twice with different weights is the
  // "asymmetric edge" case (b(u,v) != b(v,u) cannot otherwise be stated in
  // the once-per-edge format).
  std::map<std::pair<int, int>, double> first_weight;
  for (const auto& e : data.edges) {
    if (e.u == e.v) {
      bad("self-loop", "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ")");
      continue;
    }
    if (e.u < 0 || e.v < 0 || static_cast<std::size_t>(e.u) >= n || static_cast<std::size_t>(e.v) >= n) {
      bad("edge-endpoint-range", "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ")");
      continue;
    }
    if (!(e.b > 0.0) || !std::isfinite(e.b)) {
      bad("nonpositive-weight", "b(" + std::to_string(e.u) + "," + std::to_string(e.v) + ") = " + std::to_string(e.b));
      continue;
    }
    auto key = std::minmax(e.u, e.v);
    auto [it, inserted] = first_weight.emplace(std::pair(key.first, key.second), e.b);
    if (!inserted) {
      if (it->second != e.b)
        bad("asymmetric-edge", "edge (" + std::to_string(key.first) + "," + std::to_string(key.second) +
                                   ") listed with weights " + std::to_string(it->second) + " and " +
                                   std::to_string(e.b));
      else
        bad("duplicate-edge", "edge (" + std::to_string(key.first) + "," + std::to_string(key.second) + ") repeated");
    }
  }

  if (rep.ok() && n > 0) {
    // Connectivity notes on the host (the theory assumes a connected host;
    // operations still work per component, so this is informational).
    std::vector<int> comp(n, -1);
    int ncomp = 0;
    std::vector<int> stack;
    std::vector<std::vector<int>> adj(n);
    for (const auto& [key, w] : first_weight) {
      (void)w;
      adj[static_cast<std::size_t>(key.first)].push_back(key.second);
      adj[static_cast<std::size_t>(key.second)].push_back(key.first);
    }
    for (std::size_t s = 0; s < n; ++s) {
      if (comp[s] >= 0) continue;
      comp[s] = ncomp;
      stack.push_back(static_cast<int>(s));
      while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        for (int y : adj[static_cast<std::size_t>(x)])
          if (comp[static_cast<std::size_t>(y)] < 0) {
            comp[static_cast<std::size_t>(y)] = ncomp;
            stack.push_back(y);
          }
      }
      ++ncomp;
    }
    if (ncomp > 1)
      rep.notes.push_back({"disconnected-host", std::to_string(ncomp) + " components"});
    for (std::size_t i = 0; i < n; ++i)
      if (adj[i].empty())
        rep.notes.push_back({"isolated-vertex", "vertex " + std::to_string(i) + " has no edges"});
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Finite subsets.  SubsetSpec materializes a finite interior K together with
// its vertex boundary (outside-K vertices adjacent to K) and the connected
// components of K.  It stores plain index sets; operations take the host
// graph alongside.

struct SubsetSpec {
  std::vector<int> interior;                // sorted
  std::vector<int> boundary;                // sorted, derived
  std::vector<std::vector<int>> components; // of the interior, each sorted
  std::vector<char> in_interior;            // host-sized mask
};

inline std::vector<int> vertex_boundary(const WeightedGraph& g, const std::vector<int>& K) {
  std::vector<char> in(static_cast<std::size_t>(g.size()), 0);
  for (int x : K) {
    if (x < 0 || x >= g.size()) throw input_error("vertex_boundary: id " + std::to_string(x) + " out of range");
    in[static_cast<std::size_t>(x)] = 1;
  }
  std::vector<int> bd;
  for (int x : K)
    for (const Neighbor* nb = g.nbr_begin(x); nb != g.nbr_end(x); ++nb)
      if (!in[static_cast<std::size_t>(nb->v)]) {
        bd.push_back(nb->v);
        in[static_cast<std::size_t>(nb->v)] = 1;  // reuse mask to dedupe
      }
  std::sort(bd.begin(), bd.end());
  return bd;
}

inline std::vector<std::vector<int>> connected_components(const WeightedGraph& g, const std::vector<int>& K) {
  std::vector<char> in(static_cast<std::size_t>(g.size()), 0);
  for (int x : K) {
    if (x < 0 || x >= g.size()) throw input_error("connected_components: id " + std::to_string(x) + " out of range");
    in[static_cast<std::size_t>(x)] = 1;
  }
  std::vector<char> done(static_cast<std::size_t>(g.size()), 0);
  std::vector<std::vector<int>> comps;
  std::vector<int> stack;
  std::vector<int> sortedK = K;
  std::sort(sortedK.begin(), sortedK.end());
  for (int s : sortedK) {
    if (done[static_cast<std::size_t>(s)]) continue;
    comps.emplace_back();
    stack.push_back(s);
    done[static_cast<std::size_t>(s)] = 1;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      comps.back().push_back(x);
      for (const Neighbor* nb = g.nbr_begin(x); nb != g.nbr_end(x); ++nb)
        if (in[static_cast<std::size_t>(nb->v)] && !done[static_cast<std::size_t>(nb->v)]) {
          done[static_cast<std::size_t>(nb->v)] = 1;
          stack.push_back(nb->v);
        }
    }
    std::sort(comps.back().begin(), comps.back().end());
  }
  return comps;
}

inline SubsetSpec make_subset(const WeightedGraph& g, std::vector<int> K) {
  std::sort(K.begin(), K.end());
  K.erase(std::unique(K.begin(), K.end()), K.end());
  SubsetSpec s;
  s.boundary = vertex_boundary(g, K);
  s.components = connected_components(g, K);
  s.in_interior.assign(static_cast<std::size_t>(g.size()), 0);
  for (int x : K) s.in_interior[static_cast<std::size_t>(x)] = 1;
  s.interior = std::move(K);
  return s;
}

}  // namespace pcrit
