#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "pcrit/families.hpp"
#include "pcrit/graph.hpp"

using namespace pcrit;

namespace {

GraphData small_path(int n) {
  GraphData d;
  for (int v = 0; v < n; ++v) d.vertices.push_back({v, 1.0, 0.0});
  for (int v = 0; v + 1 < n; ++v) d.edges.push_back({v, v + 1, 1.0});
  return d;
}

bool has_violation(const ValidationReport& rep, const std::string& code) {
  return std::any_of(rep.violations.begin(), rep.violations.end(),
                     [&](const Violation& v) { return v.code == code; });
}

bool has_note(const ValidationReport& rep, const std::string& code) {
  return std::any_of(rep.notes.begin(), rep.notes.end(),
                     [&](const Violation& v) { return v.code == code; });
}

}  // namespace

TEST_CASE("validation accepts a clean path and reports its structure") {
  GraphData d = small_path(5);
  ValidationReport rep = validate(d);
  REQUIRE(rep.ok());
  REQUIRE(rep.notes.empty());
}

TEST_CASE("validation catches every hard violation class") {
  SECTION("duplicate vertex id") {
    GraphData d = small_path(3);
    d.vertices.push_back({2, 1.0, 0.0});
    d.vertices.push_back({4, 1.0, 0.0});  // keep ids in range 0..4
    REQUIRE(has_violation(validate(d), "duplicate-vertex"));
  }
  SECTION("vertex id out of range") {
    GraphData d = small_path(3);
    d.vertices[1].id = 7;
    REQUIRE(has_violation(validate(d), "vertex-id-range"));
  }
  SECTION("gap in the id sequence") {
    GraphData d;
    d.vertices.push_back({0, 1.0, 0.0});
    d.vertices.push_back({2, 1.0, 0.0});
    d.vertices.push_back({3, 1.0, 0.0});
    ValidationReport rep = validate(d);
    REQUIRE((has_violation(rep, "vertex-id-gap") || has_violation(rep, "vertex-id-range")));
  }
  SECTION("nonpositive or nonfinite measure") {
    GraphData d = small_path(3);
    d.vertices[0].m = 0.0;
    REQUIRE(has_violation(validate(d), "nonpositive-measure"));
    d = small_path(3);
    d.vertices[2].m = std::numeric_limits<double>::quiet_NaN();
    REQUIRE(has_violation(validate(d), "nonpositive-measure"));
  }
  SECTION("nonfinite potential") {
    GraphData d = small_path(3);
    d.vertices[1].c = std::numeric_limits<double>::infinity();
    REQUIRE(has_violation(validate(d), "bad-potential"));
  }
  SECTION("self loop") {
    GraphData d = small_path(3);
    d.edges.push_back({1, 1, 1.0});
    REQUIRE(has_violation(validate(d), "self-loop"));
  }
  SECTION("edge endpoint out of range") {
    GraphData d = small_path(3);
    d.edges.push_back({1, 9, 1.0});
    REQUIRE(has_violation(validate(d), "edge-endpoint-range"));
  }
  SECTION("nonpositive weight") {
    GraphData d = small_path(3);
    d.edges[0].b = -0.5;
    REQUIRE(has_violation(validate(d), "nonpositive-weight"));
  }
  SECTION("same pair with two different weights") {
    GraphData d = small_path(3);
    d.edges.push_back({1, 0, 2.0});  // reversed orientation, different b
    REQUIRE(has_violation(validate(d), "asymmetric-edge"));
  }
  SECTION("exact duplicate edge") {
    GraphData d = small_path(3);
    d.edges.push_back({0, 1, 1.0});
    REQUIRE(has_violation(validate(d), "duplicate-edge"));
  }
}

TEST_CASE("validation notes isolated vertices and disconnected hosts") {
  GraphData d = small_path(3);
  d.vertices.push_back({3, 1.0, 0.0});
  ValidationReport rep = validate(d);
  REQUIRE(rep.ok());
  REQUIRE(has_note(rep, "isolated-vertex"));
  REQUIRE(has_note(rep, "disconnected-host"));

  GraphData d2 = small_path(4);
  d2.edges.erase(d2.edges.begin() + 1);  // split {0,1} | {2,3}
  ValidationReport rep2 = validate(d2);
  REQUIRE(rep2.ok());
  REQUIRE(has_note(rep2, "disconnected-host"));
  REQUIRE_FALSE(has_note(rep2, "isolated-vertex"));
}

TEST_CASE("construction rejects invalid data with input_error") {
  GraphData d = small_path(3);
  d.edges[0].b = 0.0;
  REQUIRE_THROWS_AS(WeightedGraph::from_data(d), input_error);
}

TEST_CASE("edges are canonicalized and adjacency is sorted") {
  GraphData d;
  for (int v = 0; v < 4; ++v) d.vertices.push_back({v, 2.0, -0.25});
  d.edges.push_back({3, 1, 0.5});
  d.edges.push_back({2, 0, 1.5});
  d.edges.push_back({1, 0, 1.0});
  d.edges.push_back({3, 2, 0.25});
  WeightedGraph g = WeightedGraph::from_data(d);

  const auto& es = g.edges();
  REQUIRE(es.size() == 4);
  for (const auto& e : es) REQUIRE(e.u < e.v);
  REQUIRE(std::is_sorted(es.begin(), es.end(), [](const EdgeData& a, const EdgeData& b) {
    return std::pair(a.u, a.v) < std::pair(b.u, b.v);
  }));

  REQUIRE(g.edge_weight(1, 3) == 0.5);
  REQUIRE(g.edge_weight(3, 1) == 0.5);
  REQUIRE(g.edge_weight(0, 3) == 0.0);
  REQUIRE(g.deg(0) == Catch::Approx(2.5));
  REQUIRE(g.deg(3) == Catch::Approx(0.75));
  for (int x = 0; x < g.size(); ++x)
    REQUIRE(std::is_sorted(g.nbr_begin(x), g.nbr_end(x),
                           [](const Neighbor& a, const Neighbor& b) { return a.v < b.v; }));

  // Round trip through raw data preserves everything.
  GraphData back = g.to_data();
  WeightedGraph g2 = WeightedGraph::from_data(back);
  REQUIRE(g2.size() == g.size());
  for (int x = 0; x < g.size(); ++x) {
    REQUIRE(g2.m(x) == g.m(x));
    REQUIRE(g2.c(x) == g.c(x));
    REQUIRE(g2.deg(x) == g.deg(x));
  }
}

TEST_CASE("with_potential swaps c and nothing else") {
  WeightedGraph g = WeightedGraph::from_data(small_path(4));
  WeightedGraph g2 = g.with_potential({1.0, 2.0, 3.0, 4.0});
  REQUIRE(g2.c(2) == 3.0);
  REQUIRE(g.c(2) == 0.0);
  REQUIRE(g2.deg(1) == g.deg(1));
  REQUIRE_THROWS_AS(g.with_potential({1.0}), input_error);
}

TEST_CASE("vertex boundary and interior components") {
  // 0-1-2-3-4-5 path; K = {1,2,4} has boundary {0,3,5} and two components.
  WeightedGraph g = WeightedGraph::from_data(small_path(6));
  SubsetSpec s = make_subset(g, {4, 1, 2, 2});
  REQUIRE(s.interior == std::vector<int>{1, 2, 4});
  REQUIRE(s.boundary == std::vector<int>{0, 3, 5});
  REQUIRE(s.components.size() == 2);
  REQUIRE(s.components[0] == std::vector<int>{1, 2});
  REQUIRE(s.components[1] == std::vector<int>{4});
  REQUIRE(s.in_interior[2] == 1);
  REQUIRE(s.in_interior[3] == 0);
  REQUIRE_THROWS_AS(make_subset(g, {99}), input_error);
}

TEST_CASE("z family has shell-ordered ids and an id-stable nesting") {
  ExhaustionSpec spec;
  spec.family = Family::z;
  spec.radii = {2, 4};
  FamilySlice a = build_family(spec, 0);
  FamilySlice b = build_family(spec, 1);

  // Host of the radius-r slice is the ball of radius r+1.
  REQUIRE(a.graph.size() == 2 * 3 + 1);
  REQUIRE(b.graph.size() == 2 * 5 + 1);
  REQUIRE(a.subset.interior.size() == 5);
  REQUIRE(a.subset.boundary == std::vector<int>{z_vertex_id(-3), z_vertex_id(3)});

  // Coordinate ids: 0, -1 -> 1, +1 -> 2, -2 -> 3, ...
  REQUIRE(z_vertex_id(0) == 0);
  REQUIRE(z_vertex_id(-1) == 1);
  REQUIRE(z_vertex_id(1) == 2);
  REQUIRE(z_vertex_id(-2) == 3);
  REQUIRE(z_vertex_id(2) == 4);

  // Nesting: the smaller host is an induced prefix of the bigger one.
  for (int x = 0; x < a.graph.size(); ++x) {
    REQUIRE(a.graph.m(x) == b.graph.m(x));
    REQUIRE(a.graph.c(x) == b.graph.c(x));
    for (int y = 0; y < a.graph.size(); ++y)
      REQUIRE(a.graph.edge_weight(x, y) == b.graph.edge_weight(x, y));
  }

  // Distance to the slice boundary: r + 1 - |k|.
  for (int k = -3; k <= 3; ++k)
    REQUIRE(a.dist_to_boundary[(size_t)z_vertex_id(k)] == 3 - std::abs(k));
}

TEST_CASE("tree family counts and nesting") {
  ExhaustionSpec spec;
  spec.family = Family::tree;
  spec.degree = 3;
  spec.radii = {1, 2, 3};
  FamilySlice s0 = build_family(spec, 0);
  FamilySlice s2 = build_family(spec, 2);

  // Ball sizes for the 3-regular tree: 1 + 3(2^r - 1).
  auto ball = [](int r) { return 1 + 3 * ((1 << r) - 1); };
  REQUIRE((int)s0.subset.interior.size() == ball(1));
  REQUIRE(s0.graph.size() == ball(2));
  REQUIRE((int)s2.subset.interior.size() == ball(3));
  REQUIRE(s2.graph.size() == ball(4));

  // Root has `degree` neighbors, everyone else inside has degree too.
  REQUIRE(s2.graph.nbr_end(0) - s2.graph.nbr_begin(0) == 3);
  for (int x : s2.subset.interior)
    REQUIRE(s2.graph.nbr_end(x) - s2.graph.nbr_begin(x) == 3);

  // Prefix stability.
  for (int x = 0; x < s0.graph.size(); ++x)
    for (int y = x + 1; y < s0.graph.size(); ++y)
      REQUIRE(s0.graph.edge_weight(x, y) == s2.graph.edge_weight(x, y));
}

TEST_CASE("cycle family keeps the whole cycle as host") {
  ExhaustionSpec spec;
  spec.family = Family::cycle;
  spec.cycle_len = 8;
  spec.radii = {1, 4};  // radius 4 swallows the whole 8-cycle
  FamilySlice s0 = build_family(spec, 0);
  FamilySlice s1 = build_family(spec, 1);
  REQUIRE(s0.graph.size() == 8);
  REQUIRE(s1.graph.size() == 8);
  REQUIRE(s0.subset.interior.size() == 3);
  REQUIRE(s1.subset.interior.size() == 8);
  REQUIRE(s1.subset.boundary.empty());
  // Every vertex in the cycle has exactly two neighbors.
  for (int x = 0; x < 8; ++x) REQUIRE(s0.graph.nbr_end(x) - s0.graph.nbr_begin(x) == 2);
  // Empty boundary -> distance field degenerates to -1.
  REQUIRE(s1.dist_to_boundary[0] == -1);
}

TEST_CASE("lattice family sizes and distances") {
  ExhaustionSpec spec;
  spec.family = Family::lattice;
  spec.dim = 2;
  spec.radii = {1, 2};
  FamilySlice s = build_family(spec, 0);
  REQUIRE(s.graph.size() == 5 * 5);
  REQUIRE(s.subset.interior.size() == 9);
  // Root at the origin, four neighbors.
  REQUIRE(s.graph.nbr_end(0) - s.graph.nbr_begin(0) == 4);
  // Prefix stability into the next slice.
  FamilySlice t = build_family(spec, 1);
  for (int x = 0; x < s.graph.size(); ++x)
    for (int y = x + 1; y < s.graph.size(); ++y)
      REQUIRE(s.graph.edge_weight(x, y) == t.graph.edge_weight(x, y));
}

TEST_CASE("star family leaf weights follow the ratio") {
  ExhaustionSpec spec;
  spec.family = Family::star;
  spec.radii = {3, 6};
  spec.star_leaf_ratio = 0.5;
  FamilySlice s = build_family(spec, 0);
  REQUIRE(s.graph.size() == 1 + 6);  // 3 interior leaves + 3 boundary leaves
  REQUIRE(s.subset.interior.size() == 4);
  REQUIRE(s.graph.edge_weight(0, 1) == 1.0);
  REQUIRE(s.graph.edge_weight(0, 2) == 0.5);
  REQUIRE(s.graph.edge_weight(0, 3) == 0.25);
  // Geometric degree at the center: 1 + 1/2 + ... + 1/32.
  REQUIRE(s.graph.deg(0) == Catch::Approx(2.0 * (1.0 - std::pow(0.5, 6))));
}

TEST_CASE("potential rules and overrides are applied by distance and id") {
  ExhaustionSpec spec;
  spec.family = Family::z;
  spec.radii = {2};
  spec.potential.by_distance = {5.0, 1.0, 0.5};
  spec.c_overrides = {{2, -9.0}};
  spec.edge_overrides = {{0, 1, 4.0}};
  FamilySlice s = build_family(spec, 0);
  REQUIRE(s.graph.c(0) == 5.0);
  REQUIRE(s.graph.c(1) == 1.0);
  REQUIRE(s.graph.c(2) == -9.0);                       // override beats the rule
  REQUIRE(s.graph.c(z_vertex_id(-3)) == 0.5);          // table tail repeats
  REQUIRE(s.graph.edge_weight(0, 1) == 4.0);
  REQUIRE(s.graph.edge_weight(0, 2) == 1.0);

  ExhaustionSpec bad = spec;
  bad.edge_overrides = {{0, 5, 1.0}};  // not an edge
  REQUIRE_THROWS_AS(build_family(bad, 0), input_error);
}

TEST_CASE("schedules must be strictly increasing") {
  ExhaustionSpec spec;
  spec.family = Family::z;
  spec.radii = {4, 4};
  REQUIRE_THROWS_AS(build_family(spec, 0), input_error);
  spec.radii = {4, 2};
  REQUIRE_THROWS_AS(build_family(spec, 1), input_error);
  spec.radii = {2, 4};
  REQUIRE_THROWS_AS(build_family(spec, 5), input_error);
}

TEST_CASE("bfs distances") {
  WeightedGraph g = WeightedGraph::from_data(small_path(5));
  std::vector<int> d = bfs_distances(g, 2);
  REQUIRE(d == std::vector<int>{2, 1, 0, 1, 2});
}
