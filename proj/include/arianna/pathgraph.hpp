#pragma once

// Deployed path network: a planar graph whose edges are painted strip pairs.
// The ordered colour pair of an edge encodes its travel direction.

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "arianna/geometry.hpp"

namespace arianna {

/// Integer identifier tagged by what it names, so a NodeId never converts to an EdgeId.
template <typename Tag, typename Rep = std::uint32_t>
struct StrongId {
  Rep value{};

  constexpr StrongId() = default;
  constexpr explicit StrongId(Rep v) : value(v) {}
  friend constexpr auto operator<=>(StrongId, StrongId) = default;
};

using NodeId = StrongId<struct NodeTag>;
using EdgeId = StrongId<struct EdgeTag>;
using QrId = StrongId<struct QrTag, std::uint16_t>;
using DeploymentId = StrongId<struct DeploymentTag, std::uint16_t>;

enum class ColorId : std::uint8_t { Red, Green, Blue, Yellow, Magenta, Cyan };
inline constexpr int kPaletteSize = 6;
inline constexpr ColorId kPalette[kPaletteSize] = {ColorId::Red,    ColorId::Green,   ColorId::Blue,
                                                   ColorId::Yellow, ColorId::Magenta, ColorId::Cyan};

struct Rgb {
  std::uint8_t r{0};
  std::uint8_t g{0};
  std::uint8_t b{0};
  friend constexpr bool operator==(Rgb, Rgb) = default;
};

constexpr Rgb palette_rgb(ColorId c) {
  switch (c) {
    case ColorId::Red: return {220, 30, 30};
    case ColorId::Green: return {30, 180, 60};
    case ColorId::Blue: return {30, 60, 220};
    case ColorId::Yellow: return {230, 220, 40};
    case ColorId::Magenta: return {200, 40, 200};
    case ColorId::Cyan: return {40, 200, 210};
  }
  return {};
}

/// Uppercase name used on disk ("RED").
std::string_view color_name(ColorId c);
std::optional<ColorId> parse_color(std::string_view name);

/// Strip colours in left-to-right order for a walker facing along the travel direction.
struct ColorPair {
  ColorId left{ColorId::Red};
  ColorId right{ColorId::Blue};

  constexpr ColorPair reversed() const { return {right, left}; }
  friend constexpr auto operator<=>(ColorPair, ColorPair) = default;
};

std::string to_string(ColorPair p);

enum class TravelDirection : std::uint8_t { Forward, Backward };

constexpr TravelDirection reverse(TravelDirection d) {
  return d == TravelDirection::Forward ? TravelDirection::Backward : TravelDirection::Forward;
}

enum class NodeKind : std::uint8_t { Intersection, PointOfInterest };

struct Node {
  NodeId id;
  Vec2 position;
  NodeKind kind{NodeKind::Intersection};
  std::optional<std::string> label;
  friend bool operator==(const Node&, const Node&) = default;
};

struct Edge {
  EdgeId id;
  NodeId from;
  NodeId to;
  std::vector<Vec2> polyline;
  ColorPair colors;  // as seen travelling Forward
  bool enabled{true};

  double length() const { return polyline_length(polyline); }
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct QrAnchor {
  QrId qr_id;
  NodeId node;
  Vec2 position;
  double size{0.20};
  friend bool operator==(const QrAnchor&, const QrAnchor&) = default;
};

/// Immutable-by-convention snapshot of the path network.
struct Deployment {
  DeploymentId deployment_id;
  std::uint64_t version{1};
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  std::vector<QrAnchor> anchors;
  Bounds floor_bounds;

  const Node* find_node(NodeId id) const;
  const Edge* find_edge(EdgeId id) const;
  Edge* find_edge(EdgeId id);
  const QrAnchor* find_anchor(QrId id) const;
  /// First anchor attached to `node`, by qr id.
  const QrAnchor* anchor_for(NodeId node) const;
  /// Edges touching `node`, ordered by id.
  std::vector<const Edge*> incident_edges(NodeId node) const;

  friend bool operator==(const Deployment&, const Deployment&) = default;
};

/// Left-to-right strip order seen by a walker travelling along `e` in `dir`.
constexpr ColorPair observed_pair(const Edge& e, TravelDirection dir) {
  return dir == TravelDirection::Forward ? e.colors : e.colors.reversed();
}

/// Node the walker leaves from / arrives at when travelling `e` in `dir`.
constexpr NodeId departure_node(const Edge& e, TravelDirection dir) {
  return dir == TravelDirection::Forward ? e.from : e.to;
}
constexpr NodeId arrival_node(const Edge& e, TravelDirection dir) {
  return dir == TravelDirection::Forward ? e.to : e.from;
}

// --- validation ---

enum class ViolationKind : std::uint8_t {
  Structure,       // dangling ids, short polylines, duplicate ids
  Planarity,       // segments meet other than at a shared node
  AmbiguousPair,   // two edges leave a node showing the same ordered pair
  MissingAnchor,   // node without a QR anchor
  AnchorPlacement, // anchor too far from its node or duplicate qr id
  NodeSpacing,     // nodes closer than the minimum separation
  OutOfBounds,     // geometry outside floor_bounds
};

std::string_view violation_kind_name(ViolationKind k);

struct Violation {
  ViolationKind kind;
  // Primary and secondary subjects. For Planarity: edge ids with segment indices.
  std::uint32_t a{0};
  std::uint32_t a_index{0};
  std::uint32_t b{0};
  std::uint32_t b_index{0};
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
  std::vector<Violation> violations;
  /// Nodes not reachable from the lowest node id over enabled edges. Reported,
  /// not a violation: disabling a bridge edge is a legal administrative action.
  std::vector<NodeId> unreachable;

  bool ok() const { return violations.empty(); }
};

inline constexpr double kMinNodeSeparation = 0.5;
inline constexpr double kMaxAnchorOffset = 0.5;

ValidationReport validate_deployment(const Deployment& d);

// --- routing ---

struct RouteStep {
  EdgeId edge;
  TravelDirection direction{TravelDirection::Forward};
  friend bool operator==(const RouteStep&, const RouteStep&) = default;
};

using Route = std::vector<RouteStep>;

/// Edge weight used by routing: polyline length quantised to nanometres so that
/// path sums and tie detection are exact.
std::int64_t edge_weight(const Edge& e);
inline double weight_to_meters(std::int64_t w) { return static_cast<double>(w) * 1e-9; }

/// Shortest route by polyline length; ties resolve to the lexicographically
/// smallest edge-id sequence. Empty route when from == to; nullopt when no route.
std::optional<Route> shortest_route(const Deployment& d, NodeId from, NodeId to, bool enabled_only);

/// Total length of a route in metres (sum of quantised weights).
double route_length(const Deployment& d, const Route& r);

/// Minimum distance from p to the polyline of e.
double cross_track_distance(Vec2 p, const Edge& e);

}  // namespace arianna
