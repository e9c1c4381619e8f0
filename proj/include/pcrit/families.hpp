#pragma once

// Built-in graph families with exhaustions: path segments of Z, cycles,
// stars, d-regular tree balls, and Z^d boxes.  Every family designates
// vertex 0 as the root/anchor o and assigns ids in shell order (distance
// first, canonical order within a shell), so the n-th truncation embeds in
// the (n+1)-th with identical ids and identical restricted edges — the
// nesting invariant the exhaustion-based operations rely on.

#include <algorithm>
#include <cstdlib>
#include <map>
#include <queue>
#include <string>
#include <tuple>
#include <vector>

#include "pcrit/graph.hpp"

namespace pcrit {

enum class Family { z, cycle, star, tree, lattice };

inline Family family_from_name(const std::string& name) {
  if (name == "z") return Family::z;
  if (name == "cycle") return Family::cycle;
  if (name == "star") return Family::star;
  if (name == "tree") return Family::tree;
  if (name == "lattice") return Family::lattice;
  throw input_error("unknown family '" + name + "' (expected z|cycle|star|tree|lattice)");
}

inline const char* family_name(Family f) {
  switch (f) {
    case Family::z: return "z";
    case Family::cycle: return "cycle";
    case Family::star: return "star";
    case Family::tree: return "tree";
    case Family::lattice: return "lattice";
  }
  return "?";
}

// Potential as a function of graph distance from the root: constant when
// `by_distance` is empty, otherwise table lookup with the last entry
// repeated beyond the table.
struct PotentialRule {
  double constant = 0.0;
  std::vector<double> by_distance;
  double operator()(int dist) const {
    if (by_distance.empty()) return constant;
    std::size_t i = static_cast<std::size_t>(dist) < by_distance.size()
                        ? static_cast<std::size_t>(dist)
                        : by_distance.size() - 1;
    return by_distance[i];
  }
};

struct ExhaustionSpec {
  Family family = Family::z;
  // Strictly increasing truncation radii.  For the star family the entries
  // are leaf counts (every leaf is at distance 1 from the center).
  std::vector<int> radii;
  int degree = 3;     // tree: every vertex has this many neighbors
  int dim = 2;        // lattice dimension
  int cycle_len = 12;
  double edge_weight = 1.0;
  double measure = 1.0;
  PotentialRule potential;
  // Star center weights b(0, leaf k) = edge_weight * ratio^(k-1).  The
  // default 1 matches finite truncations; a ratio < 1 gives the summable
  // weights the infinite star needs (deg(center) finite).
  double star_leaf_ratio = 1.0;
  // Post-build tweaks keyed by vertex id (ids are deterministic).
  std::vector<std::tuple<int, int, double>> edge_overrides;
  std::vector<std::pair<int, double>> c_overrides;

  int truncation_count() const { return static_cast<int>(radii.size()); }
};

struct FamilySlice {
  WeightedGraph graph;
  SubsetSpec subset;     // interior = radius-r_n ball, boundary = its vertex boundary
  int radius = 0;        // r_n (leaf count for star)
  // Per-vertex hop distance to the slice boundary (0 on the boundary itself,
  // >= 1 inside, -1 everywhere when the boundary is empty).
  std::vector<int> dist_to_boundary;
};

// BFS distances from src (unweighted hop count, -1 if unreachable).
inline std::vector<int> bfs_distances(const WeightedGraph& g, int src) {
  std::vector<int> dist(static_cast<std::size_t>(g.size()), -1);
  std::queue<int> q;
  dist[static_cast<std::size_t>(src)] = 0;
  q.push(src);
  while (!q.empty()) {
    int x = q.front();
    q.pop();
    for (const Neighbor* nb = g.nbr_begin(x); nb != g.nbr_end(x); ++nb)
      if (dist[static_cast<std::size_t>(nb->v)] < 0) {
        dist[static_cast<std::size_t>(nb->v)] = dist[static_cast<std::size_t>(x)] + 1;
        q.push(nb->v);
      }
  }
  return dist;
}

// Canonical id of the Z-family vertex with coordinate k (0, -1, +1, -2, ...).
inline int z_vertex_id(int k) {
  if (k == 0) return 0;
  return 2 * std::abs(k) - (k < 0 ? 1 : 0);
}

namespace detail {

struct RawFamily {
  std::vector<int> dist;                  // graph distance from root, per id
  std::vector<std::pair<int, int>> edges; // id pairs
  std::vector<double> weight;             // per edge; empty -> all default
  int interior_count = 0;                 // ids [0, interior_count) form the interior
};

inline RawFamily raw_z(int r) {
  RawFamily f;
  int R = r + 1;  // host = ball of radius r+1
  f.dist.resize(static_cast<std::size_t>(2 * R + 1));
  for (int k = -R; k <= R; ++k) f.dist[static_cast<std::size_t>(z_vertex_id(k))] = std::abs(k);
  for (int k = -R; k < R; ++k) f.edges.emplace_back(z_vertex_id(k), z_vertex_id(k + 1));
  f.interior_count = 2 * r + 1;
  return f;
}

inline RawFamily raw_cycle(int r, int N) {
  if (N < 3) throw input_error("cycle length must be >= 3");
  RawFamily f;
  // Coordinates 0..N-1 around the cycle; shells {N-d, d}; host is always the
  // whole (finite) cycle, only the interior grows with r.
  std::vector<int> id_of(static_cast<std::size_t>(N), -1);
  f.dist.resize(static_cast<std::size_t>(N));
  int next = 0;
  auto assign = [&](int coord, int d) {
    id_of[static_cast<std::size_t>(coord)] = next;
    f.dist[static_cast<std::size_t>(next)] = d;
    ++next;
  };
  assign(0, 0);
  for (int d = 1; next < N; ++d) {
    if (id_of[static_cast<std::size_t>(N - d)] < 0) assign(N - d, d);
    if (next < N && id_of[static_cast<std::size_t>(d)] < 0) assign(d, d);
  }
  for (int k = 0; k < N; ++k) {
    int a = id_of[static_cast<std::size_t>(k)], b = id_of[static_cast<std::size_t>((k + 1) % N)];
    f.edges.emplace_back(std::min(a, b), std::max(a, b));
  }
  int cnt = 0;
  for (int d : f.dist)
    if (d <= r) ++cnt;
  f.interior_count = cnt;  // shell order means these are exactly ids [0, cnt)
  return f;
}

inline RawFamily raw_star(int leaves, int extra, double base, double ratio) {
  RawFamily f;
  int total = leaves + extra;
  f.dist.resize(static_cast<std::size_t>(total + 1));
  f.dist[0] = 0;
  double w = base;
  for (int k = 1; k <= total; ++k) {
    f.dist[static_cast<std::size_t>(k)] = 1;
    f.edges.emplace_back(0, k);
    f.weight.push_back(w);
    w *= ratio;
  }
  f.interior_count = leaves + 1;
  return f;
}

inline RawFamily raw_tree(int r, int degree) {
  if (degree < 2) throw input_error("tree degree must be >= 2");
  RawFamily f;
  int R = r + 1;
  f.dist.push_back(0);
  std::vector<int> level = {0};  // ids at current depth
  for (int d = 1; d <= R; ++d) {
    std::vector<int> nxt;
    for (int parent : level) {
      int kids = (d == 1) ? degree : degree - 1;
      for (int j = 0; j < kids; ++j) {
        int id = static_cast<int>(f.dist.size());
        f.dist.push_back(d);
        f.edges.emplace_back(parent, id);
        nxt.push_back(id);
      }
    }
    level = std::move(nxt);
    if (d == r) f.interior_count = static_cast<int>(f.dist.size());
  }
  if (r == 0) f.interior_count = 1;
  return f;
}

inline RawFamily raw_lattice(int r, int dim) {
  if (dim < 1 || dim > 4) throw input_error("lattice dim must be in 1..4");
  RawFamily f;
  int R = r + 1;
  // Enumerate the box [-R, R]^dim by (max-norm shell, lexicographic order).
  std::vector<std::vector<int>> coords;
  std::vector<int> cur(static_cast<std::size_t>(dim), -R);
  while (true) {
    coords.push_back(cur);
    int i = dim - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == R) {
      cur[static_cast<std::size_t>(i)] = -R;
      --i;
    }
    if (i < 0) break;
    ++cur[static_cast<std::size_t>(i)];
  }
  auto linf = [](const std::vector<int>& x) {
    int s = 0;
    for (int v : x) s = std::max(s, std::abs(v));
    return s;
  };
  std::stable_sort(coords.begin(), coords.end(), [&](const auto& a, const auto& b) {
    int sa = linf(a), sb = linf(b);
    if (sa != sb) return sa < sb;
    return a < b;
  });
  std::map<std::vector<int>, int> id_of;
  for (std::size_t i = 0; i < coords.size(); ++i) id_of[coords[i]] = static_cast<int>(i);
  f.dist.resize(coords.size());
  f.interior_count = 0;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    int l1 = 0;
    for (int v : coords[i]) l1 += std::abs(v);
    f.dist[i] = l1;  // graph distance in Z^d is the 1-norm
    if (linf(coords[i]) <= r) ++f.interior_count;
  }
  for (std::size_t i = 0; i < coords.size(); ++i) {
    std::vector<int> nb = coords[i];
    for (int a = 0; a < dim; ++a) {
      ++nb[static_cast<std::size_t>(a)];
      auto it = id_of.find(nb);
      if (it != id_of.end()) f.edges.emplace_back(std::min(static_cast<int>(i), it->second),
                                                  std::max(static_cast<int>(i), it->second));
      --nb[static_cast<std::size_t>(a)];
    }
  }
  return f;
}

}  // namespace detail

// Builds the n-th truncation (0-based index into spec.radii).
inline FamilySlice build_family(const ExhaustionSpec& spec, int n) {
  if (n < 0 || n >= spec.truncation_count())
    throw input_error("truncation index " + std::to_string(n) + " outside radius schedule");
  for (std::size_t i = 0; i + 1 < spec.radii.size(); ++i)
    if (spec.radii[i] >= spec.radii[i + 1])
      throw input_error("radius schedule must be strictly increasing");
  int r = spec.radii[static_cast<std::size_t>(n)];
  if (r < 0) throw input_error("radius must be >= 0");

  detail::RawFamily raw;
  switch (spec.family) {
    case Family::z:
      raw = detail::raw_z(r);
      break;
    case Family::cycle:
      raw = detail::raw_cycle(r, spec.cycle_len);
      break;
    case Family::star: {
      if (r < 1) throw input_error("star leaf count must be >= 1");
      // Boundary width: up to the next schedule entry, else double up.
      int extra = (n + 1 < spec.truncation_count()) ? spec.radii[static_cast<std::size_t>(n + 1)] - r : r;
      raw = detail::raw_star(r, extra, spec.edge_weight, spec.star_leaf_ratio);
      break;
    }
    case Family::tree:
      raw = detail::raw_tree(r, spec.degree);
      break;
    case Family::lattice:
      raw = detail::raw_lattice(r, spec.dim);
      break;
  }

  GraphData data;
  data.vertices.reserve(raw.dist.size());
  for (std::size_t i = 0; i < raw.dist.size(); ++i)
    data.vertices.push_back({static_cast<int>(i), spec.measure, spec.potential(raw.dist[i])});
  for (auto& [id, cval] : spec.c_overrides) {
    if (id < 0 || static_cast<std::size_t>(id) >= data.vertices.size())
      throw input_error("c override on nonexistent vertex " + std::to_string(id));
    data.vertices[static_cast<std::size_t>(id)].c = cval;
  }
  data.edges.reserve(raw.edges.size());
  for (std::size_t i = 0; i < raw.edges.size(); ++i) {
    double w = raw.weight.empty() ? spec.edge_weight : raw.weight[i];
    data.edges.push_back({raw.edges[i].first, raw.edges[i].second, w});
  }
  for (auto& [u, v, w] : spec.edge_overrides) {
    bool found = false;
    for (auto& e : data.edges)
      if ((e.u == u && e.v == v) || (e.u == v && e.v == u)) {
        e.b = w;
        found = true;
        break;
      }
    if (!found)
      throw input_error("edge override (" + std::to_string(u) + "," + std::to_string(v) + ") does not exist");
  }

  FamilySlice slice;
  slice.graph = WeightedGraph::from_data(data);
  std::vector<int> interior(static_cast<std::size_t>(raw.interior_count));
  for (int i = 0; i < raw.interior_count; ++i) interior[static_cast<std::size_t>(i)] = i;
  slice.subset = make_subset(slice.graph, interior);
  slice.radius = r;
  slice.dist_to_boundary.assign(static_cast<std::size_t>(slice.graph.size()), -1);
  if (!slice.subset.boundary.empty()) {
    std::queue<int> q;
    for (int y : slice.subset.boundary) {
      slice.dist_to_boundary[static_cast<std::size_t>(y)] = 0;
      q.push(y);
    }
    while (!q.empty()) {
      int x = q.front();
      q.pop();
      for (const Neighbor* nb = slice.graph.nbr_begin(x); nb != slice.graph.nbr_end(x); ++nb)
        if (slice.dist_to_boundary[static_cast<std::size_t>(nb->v)] < 0) {
          slice.dist_to_boundary[static_cast<std::size_t>(nb->v)] =
              slice.dist_to_boundary[static_cast<std::size_t>(x)] + 1;
          q.push(nb->v);
        }
    }
  }
  return slice;
}

}  // namespace pcrit
