#include <algorithm>
#include <set>
#include <tuple>

#include "arianna/rng.hpp"

#include "arianna/pathgraph.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace arianna;

namespace {

std::set<std::pair<oracle::SegmentRef, oracle::SegmentRef>, decltype([](const auto& a, const auto& b) {
           return std::tie(a.first.edge, a.first.index, a.second.edge, a.second.index) <
                  std::tie(b.first.edge, b.first.index, b.second.edge, b.second.index);
         })>
planarity_pairs(const ValidationReport& r) {
  decltype(planarity_pairs(r)) out;
  for (const auto& v : r.violations) {
    if (v.kind == ViolationKind::Planarity) out.insert({{v.a, v.a_index}, {v.b, v.b_index}});
  }
  return out;
}

}  // namespace

TEST_CASE("observed pair reverses with direction for every palette pair") {
  for (ColorId a : kPalette) {
    for (ColorId b : kPalette) {
      if (a == b) continue;
      Edge e;
      e.colors = {a, b};
      CHECK(observed_pair(e, TravelDirection::Forward) == ColorPair{a, b});
      CHECK(observed_pair(e, TravelDirection::Backward) == ColorPair{b, a});
      CHECK(observed_pair(e, reverse(reverse(TravelDirection::Forward))) == observed_pair(e, TravelDirection::Forward));
    }
  }
}

TEST_CASE("colour names") {
  for (ColorId c : kPalette) CHECK(parse_color(color_name(c)) == c);
  CHECK(color_name(ColorId::Red) == "RED");
  CHECK_FALSE(parse_color("red").has_value());
}

TEST_CASE("minimal single-edge deployment validates") {
  const auto d = oracle::straight_edge(5.0);
  const auto r = validate_deployment(d);
  CHECK(r.ok());
  CHECK(r.unreachable.empty());
  CHECK(validate_deployment(fixture::triangle()).ok());
}

TEST_CASE("crossing interiors give one planarity violation") {
  Deployment d;
  d.floor_bounds = {{0, 0}, {4, 4}};
  d.nodes = {{NodeId{0}, {1, 1}, NodeKind::Intersection, {}},
             {NodeId{1}, {3, 3}, NodeKind::Intersection, {}},
             {NodeId{2}, {1, 3}, NodeKind::Intersection, {}},
             {NodeId{3}, {3, 1}, NodeKind::Intersection, {}}};
  d.edges = {{EdgeId{0}, NodeId{0}, NodeId{1}, {{1, 1}, {3, 3}}, {ColorId::Red, ColorId::Blue}, true},
             {EdgeId{1}, NodeId{2}, NodeId{3}, {{1, 3}, {3, 1}}, {ColorId::Red, ColorId::Blue}, true}};
  for (const auto& n : d.nodes) d.anchors.push_back({QrId{static_cast<std::uint16_t>(n.id.value + 1)}, n.id, n.position + Vec2{0, 0.3}, 0.2});
  const auto r = validate_deployment(d);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].kind == ViolationKind::Planarity);
  CHECK(r.violations[0].a == 0);
  CHECK(r.violations[0].b == 1);
}

TEST_CASE("same ordered pair leaving a node is ambiguous") {
  auto d = fixture::triangle();
  // Edge 0 leaves A as (RED, BLUE); make edge 2 leave A the same way.
  d.edges[2].colors = {ColorId::Red, ColorId::Blue};
  const auto r = validate_deployment(d);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].kind == ViolationKind::AmbiguousPair);
  CHECK(r.violations[0].a == 0);
  // The reversed pair leaving the same node is fine.
  d.edges[2].colors = {ColorId::Blue, ColorId::Red};
  CHECK(validate_deployment(d).ok());
}

TEST_CASE("anchors, spacing and bounds") {
  auto d = fixture::triangle();
  d.anchors.pop_back();
  auto r = validate_deployment(d);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].kind == ViolationKind::MissingAnchor);

  d = fixture::triangle();
  d.anchors[0].position = {0.0, 0.0};
  r = validate_deployment(d);
  REQUIRE_FALSE(r.ok());
  CHECK(r.violations[0].kind == ViolationKind::AnchorPlacement);

  d = fixture::triangle();
  d.anchors[1].qr_id = d.anchors[0].qr_id;
  CHECK(validate_deployment(d).violations.at(0).kind == ViolationKind::AnchorPlacement);

  d = fixture::triangle();
  d.floor_bounds.max = {1.9, 4};
  r = validate_deployment(d);
  REQUIRE_FALSE(r.ok());
  CHECK(std::all_of(r.violations.begin(), r.violations.end(), [](const Violation& v) { return v.kind == ViolationKind::OutOfBounds; }));

  d = oracle::straight_edge(0.4);
  r = validate_deployment(d);
  CHECK(std::any_of(r.violations.begin(), r.violations.end(), [](const Violation& v) { return v.kind == ViolationKind::NodeSpacing; }));
}

TEST_CASE("violation order is deterministic") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto d = fixture::random_edge_set(seed);
    const auto a = validate_deployment(d).violations;
    std::reverse(d.edges.begin(), d.edges.end());
    std::reverse(d.nodes.begin(), d.nodes.end());
    const auto b = validate_deployment(d).violations;
    CHECK(a == b);
  }
}

TEST_CASE("disconnection over enabled edges is reported") {
  auto d = fixture::triangle();
  d.edges[1].enabled = false;
  d.edges[2].enabled = false;
  const auto r = validate_deployment(d);
  CHECK(r.ok());
  REQUIRE(r.unreachable.size() == 1);
  CHECK(r.unreachable[0] == NodeId{2});
}

TEST_CASE("triangle routing") {
  auto d = fixture::triangle();
  const auto r = shortest_route(d, NodeId{0}, NodeId{2}, true);
  REQUIRE(r.has_value());
  CHECK(*r == Route{{EdgeId{0}, TravelDirection::Forward}, {EdgeId{1}, TravelDirection::Forward}});
  CHECK(route_length(d, *r) == doctest::Approx(2.0));
  const auto fw = oracle::floyd_warshall(d, true);
  CHECK(fw[0][2] == 2'000'000'000);

  const auto back = shortest_route(d, NodeId{2}, NodeId{0}, true);
  REQUIRE(back.has_value());
  CHECK(*back == Route{{EdgeId{1}, TravelDirection::Backward}, {EdgeId{0}, TravelDirection::Backward}});

  d.edges[0].enabled = false;
  const auto r2 = shortest_route(d, NodeId{0}, NodeId{2}, true);
  REQUIRE(r2.has_value());
  CHECK(*r2 == Route{{EdgeId{2}, TravelDirection::Forward}});
  CHECK(route_length(d, *r2) == doctest::Approx(2.5));
  CHECK(oracle::floyd_warshall(d, true)[0][2] == 2'500'000'000);
  // Disabled edges still count when enabled_only is false.
  CHECK(shortest_route(d, NodeId{0}, NodeId{2}, false)->size() == 2);

  CHECK(shortest_route(d, NodeId{1}, NodeId{1}, true)->empty());
  d.edges[1].enabled = false;
  d.edges[2].enabled = false;
  CHECK_FALSE(shortest_route(d, NodeId{0}, NodeId{2}, true).has_value());
}

TEST_CASE("shortest_route matches the all-pairs oracle on random worlds") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const auto d = fixture::random_routing_world(seed, 20);
    REQUIRE(d.nodes.size() <= 20);
    for (bool enabled_only : {true, false}) {
      const auto fw = oracle::floyd_warshall(d, enabled_only);
      for (std::size_t i = 0; i < d.nodes.size(); ++i) {
        for (std::size_t j = 0; j < d.nodes.size(); ++j) {
          const auto r = shortest_route(d, d.nodes[i].id, d.nodes[j].id, enabled_only);
          if (fw[i][j] < 0) {
            CHECK_FALSE(r.has_value());
            continue;
          }
          REQUIRE(r.has_value());
          std::int64_t w = 0;
          for (const auto& s : *r) {
            const Edge* e = d.find_edge(s.edge);
            CHECK((!enabled_only || e->enabled));
            w += edge_weight(*e);
          }
          CHECK(w == fw[i][j]);
          CHECK(*r == *oracle::brute_force_route(d, d.nodes[i].id, d.nodes[j].id, enabled_only));
        }
      }
    }
  }
}

TEST_CASE("routes are connected walks from source to target") {
  const auto d = fixture::random_routing_world(77, 16);
  for (const auto& a : d.nodes) {
    for (const auto& b : d.nodes) {
      const auto r = shortest_route(d, a.id, b.id, true);
      if (!r) continue;
      NodeId at = a.id;
      for (const auto& s : *r) {
        const Edge* e = d.find_edge(s.edge);
        CHECK(departure_node(*e, s.direction) == at);
        at = arrival_node(*e, s.direction);
      }
      CHECK(at == b.id);
    }
  }
}

TEST_CASE("planarity agrees with brute force segment intersection") {
  int with_crossings = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto d = fixture::random_edge_set(seed);
    const auto got = planarity_pairs(validate_deployment(d));
    const auto want_list = oracle::brute_force_crossings(d);
    decltype(planarity_pairs(ValidationReport{})) want(want_list.begin(), want_list.end());
    CHECK(got == want);
    with_crossings += want.empty() ? 0 : 1;
  }
  CHECK(with_crossings > 10);
}

TEST_CASE("cross track distance") {
  const auto d = oracle::straight_edge(5.0);
  const Edge& e = d.edges[0];
  CHECK(cross_track_distance({1.5, 1.0}, e) == 0.0);
  CHECK(cross_track_distance({1.8, 3.5}, e) == doctest::Approx(0.3));
  Edge bent = fixture::triangle().edges[2];
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const Vec2 p{rng.uniform(0, 4), rng.uniform(0, 4)};
    double best = 1e9;
    for (std::size_t s = 1; s < bent.polyline.size(); ++s) best = std::min(best, point_segment_distance(p, bent.polyline[s - 1], bent.polyline[s]));
    CHECK(cross_track_distance(p, bent) == doctest::Approx(best));
  }
}
