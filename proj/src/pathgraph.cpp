#include "arianna/pathgraph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_map>

namespace arianna {

std::string_view color_name(ColorId c) {
  switch (c) {
    case ColorId::Red: return "RED";
    case ColorId::Green: return "GREEN";
    case ColorId::Blue: return "BLUE";
    case ColorId::Yellow: return "YELLOW";
    case ColorId::Magenta: return "MAGENTA";
    case ColorId::Cyan: return "CYAN";
  }
  return "?";
}

std::optional<ColorId> parse_color(std::string_view name) {
  for (ColorId c : kPalette) {
    if (color_name(c) == name) {
      return c;
    }
  }
  return std::nullopt;
}

std::string to_string(ColorPair p) {
  std::string s = "(";
  s += color_name(p.left);
  s += ",";
  s += color_name(p.right);
  s += ")";
  return s;
}

std::string_view violation_kind_name(ViolationKind k) {
  switch (k) {
    case ViolationKind::Structure: return "structure";
    case ViolationKind::Planarity: return "planarity";
    case ViolationKind::AmbiguousPair: return "ambiguous_pair";
    case ViolationKind::MissingAnchor: return "missing_anchor";
    case ViolationKind::AnchorPlacement: return "anchor_placement";
    case ViolationKind::NodeSpacing: return "node_spacing";
    case ViolationKind::OutOfBounds: return "out_of_bounds";
  }
  return "?";
}

const Node* Deployment::find_node(NodeId id) const {
  auto it = std::find_if(nodes.begin(), nodes.end(), [id](const Node& n) { return n.id == id; });
  return it == nodes.end() ? nullptr : &*it;
}

const Edge* Deployment::find_edge(EdgeId id) const {
  auto it = std::find_if(edges.begin(), edges.end(), [id](const Edge& e) { return e.id == id; });
  return it == edges.end() ? nullptr : &*it;
}

Edge* Deployment::find_edge(EdgeId id) {
  auto it = std::find_if(edges.begin(), edges.end(), [id](const Edge& e) { return e.id == id; });
  return it == edges.end() ? nullptr : &*it;
}

const QrAnchor* Deployment::find_anchor(QrId id) const {
  auto it = std::find_if(anchors.begin(), anchors.end(), [id](const QrAnchor& a) { return a.qr_id == id; });
  return it == anchors.end() ? nullptr : &*it;
}

const QrAnchor* Deployment::anchor_for(NodeId node) const {
  const QrAnchor* best = nullptr;
  for (const auto& a : anchors) {
    if (a.node == node && (best == nullptr || a.qr_id < best->qr_id)) {
      best = &a;
    }
  }
  return best;
}

std::vector<const Edge*> Deployment::incident_edges(NodeId node) const {
  std::vector<const Edge*> out;
  for (const auto& e : edges) {
    if (e.from == node || e.to == node) {
      out.push_back(&e);
    }
  }
  std::sort(out.begin(), out.end(), [](const Edge* a, const Edge* b) { return a->id < b->id; });
  return out;
}

// ---------------------------------------------------------------------------
// Planarity: exact predicates on a micrometre integer lattice.

namespace {

struct IPoint {
  std::int64_t x;
  std::int64_t y;
  friend bool operator==(IPoint, IPoint) = default;
};

IPoint to_lattice(Vec2 p) { return {std::llround(p.x * 1e6), std::llround(p.y * 1e6)}; }

int orient(IPoint a, IPoint b, IPoint c) {
  const std::int64_t v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  return (v > 0) - (v < 0);
}

bool within_box(IPoint a, IPoint b, IPoint p) {
  return p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) && p.y >= std::min(a.y, b.y) &&
         p.y <= std::max(a.y, b.y);
}

enum class Contact { None, Point, Overlap };

struct Intersection {
  Contact contact{Contact::None};
  IPoint at{};  // valid for Contact::Point
};

Intersection intersect(IPoint a0, IPoint a1, IPoint b0, IPoint b1) {
  const int o1 = orient(a0, a1, b0);
  const int o2 = orient(a0, a1, b1);
  const int o3 = orient(b0, b1, a0);
  const int o4 = orient(b0, b1, a1);

  if (o1 == 0 && o2 == 0) {
    // Collinear: compare extents along the dominant axis of a.
    const bool use_x = std::abs(a1.x - a0.x) >= std::abs(a1.y - a0.y);
    auto key = [use_x](IPoint p) { return use_x ? p.x : p.y; };
    const std::int64_t lo = std::max(std::min(key(a0), key(a1)), std::min(key(b0), key(b1)));
    const std::int64_t hi = std::min(std::max(key(a0), key(a1)), std::max(key(b0), key(b1)));
    if (lo > hi) {
      return {};
    }
    if (lo < hi) {
      return {Contact::Overlap, {}};
    }
    for (IPoint p : {a0, a1}) {
      if (key(p) == lo && within_box(b0, b1, p)) {
        return {Contact::Point, p};
      }
    }
    return {Contact::Point, key(b0) == lo ? b0 : b1};
  }
  if (o1 * o2 < 0 && o3 * o4 < 0) {
    return {Contact::Point, IPoint{std::numeric_limits<std::int64_t>::min(), 0}};  // interior crossing
  }
  if (o1 == 0 && within_box(a0, a1, b0)) return {Contact::Point, b0};
  if (o2 == 0 && within_box(a0, a1, b1)) return {Contact::Point, b1};
  if (o3 == 0 && within_box(b0, b1, a0)) return {Contact::Point, a0};
  if (o4 == 0 && within_box(b0, b1, a1)) return {Contact::Point, a1};
  return {};
}

struct Segment {
  std::size_t edge_index;
  std::uint32_t seg_index;
  IPoint p0;
  IPoint p1;
};

void check_planarity(const Deployment& d, const std::vector<bool>& edge_ok, std::vector<Violation>& out) {
  std::vector<Segment> segs;
  for (std::size_t ei = 0; ei < d.edges.size(); ++ei) {
    if (!edge_ok[ei]) {
      continue;
    }
    const auto& pl = d.edges[ei].polyline;
    for (std::size_t k = 1; k < pl.size(); ++k) {
      segs.push_back({ei, static_cast<std::uint32_t>(k - 1), to_lattice(pl[k - 1]), to_lattice(pl[k])});
    }
  }

  // Broad phase: uniform grid of 1 m cells keyed by the segment bounding boxes.
  constexpr std::int64_t cell = 1'000'000;
  auto cell_of = [](std::int64_t v) { return v >= 0 ? v / cell : -((-v + cell - 1) / cell); };
  std::map<std::pair<std::int64_t, std::int64_t>, std::vector<std::size_t>> grid;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const auto& s = segs[i];
    for (std::int64_t cx = cell_of(std::min(s.p0.x, s.p1.x)); cx <= cell_of(std::max(s.p0.x, s.p1.x)); ++cx) {
      for (std::int64_t cy = cell_of(std::min(s.p0.y, s.p1.y)); cy <= cell_of(std::max(s.p0.y, s.p1.y)); ++cy) {
        grid[{cx, cy}].push_back(i);
      }
    }
  }
  std::set<std::pair<std::size_t, std::size_t>> candidates;
  for (const auto& [key, members] : grid) {
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        candidates.insert({std::min(members[i], members[j]), std::max(members[i], members[j])});
      }
    }
  }

  for (const auto& [i, j] : candidates) {
    const Segment& s = segs[i];
    const Segment& t = segs[j];
    const Intersection hit = intersect(s.p0, s.p1, t.p0, t.p1);
    if (hit.contact == Contact::None) {
      continue;
    }
    const Edge& es = d.edges[s.edge_index];
    const Edge& et = d.edges[t.edge_index];
    bool allowed = false;
    if (hit.contact == Contact::Point) {
      if (s.edge_index == t.edge_index) {
        const auto lo = std::min(s.seg_index, t.seg_index);
        const auto hi = std::max(s.seg_index, t.seg_index);
        allowed = hi == lo + 1 && hit.at == to_lattice(es.polyline[hi]);
      } else {
        // Allowed only at a node both edges terminate on, at that terminal vertex.
        auto terminal_at = [&](const Edge& e, const Segment& sg, NodeId n) {
          const auto last = static_cast<std::uint32_t>(e.polyline.size() - 2);
          if (e.from == n && sg.seg_index == 0 && sg.p0 == hit.at) return true;
          if (e.to == n && sg.seg_index == last && sg.p1 == hit.at) return true;
          return false;
        };
        for (NodeId n : {es.from, es.to}) {
          if ((et.from == n || et.to == n) && terminal_at(es, s, n) && terminal_at(et, t, n)) {
            const Node* node = d.find_node(n);
            if (node != nullptr && to_lattice(node->position) == hit.at) {
              allowed = true;
            }
          }
        }
      }
    }
    if (allowed) {
      continue;
    }
    std::pair<std::uint32_t, std::uint32_t> ka{es.id.value, s.seg_index};
    std::pair<std::uint32_t, std::uint32_t> kb{et.id.value, t.seg_index};
    if (kb < ka) {
      std::swap(ka, kb);
    }
    std::ostringstream msg;
    msg << "edge " << ka.first << " segment " << ka.second << " meets edge " << kb.first << " segment "
        << kb.second << (hit.contact == Contact::Overlap ? " (overlap)" : "") << " away from a shared node";
    out.push_back({ViolationKind::Planarity, ka.first, ka.second, kb.first, kb.second, msg.str()});
  }
}

bool finite(Vec2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

}  // namespace

ValidationReport validate_deployment(const Deployment& d) {
  ValidationReport report;
  auto& out = report.violations;
  auto add = [&out](ViolationKind k, std::uint32_t a, std::uint32_t ai, std::uint32_t b, std::uint32_t bi,
                    std::string msg) { out.push_back({k, a, ai, b, bi, std::move(msg)}); };

  // Structure.
  std::set<NodeId> node_ids;
  for (const auto& n : d.nodes) {
    if (!node_ids.insert(n.id).second) {
      add(ViolationKind::Structure, n.id.value, 0, 0, 0, "duplicate node id " + std::to_string(n.id.value));
    }
    if (!finite(n.position)) {
      add(ViolationKind::Structure, n.id.value, 0, 0, 0, "node " + std::to_string(n.id.value) + " position not finite");
    }
  }
  std::vector<bool> edge_ok(d.edges.size(), true);
  std::set<EdgeId> edge_ids;
  for (std::size_t i = 0; i < d.edges.size(); ++i) {
    const Edge& e = d.edges[i];
    const std::string name = "edge " + std::to_string(e.id.value);
    auto fail = [&](std::string why) {
      edge_ok[i] = false;
      add(ViolationKind::Structure, e.id.value, 1, 0, 0, name + ": " + why);
    };
    if (!edge_ids.insert(e.id).second) {
      fail("duplicate edge id");
      continue;
    }
    const Node* from = d.find_node(e.from);
    const Node* to = d.find_node(e.to);
    if (from == nullptr || to == nullptr) {
      fail("references an unknown node");
      continue;
    }
    if (e.from == e.to) {
      fail("self-loop");
      continue;
    }
    if (e.colors.left == e.colors.right) {
      fail("both strips have the same colour");
    }
    if (e.polyline.size() < 2) {
      fail("polyline needs at least two points");
      continue;
    }
    if (!std::all_of(e.polyline.begin(), e.polyline.end(), finite)) {
      fail("polyline point not finite");
      continue;
    }
    if (to_lattice(e.polyline.front()) != to_lattice(from->position) ||
        to_lattice(e.polyline.back()) != to_lattice(to->position)) {
      fail("polyline ends do not match node positions");
    }
    for (std::size_t k = 1; k < e.polyline.size(); ++k) {
      if (to_lattice(e.polyline[k]) == to_lattice(e.polyline[k - 1])) {
        fail("repeated consecutive polyline point");
        break;
      }
    }
  }

  check_planarity(d, edge_ok, out);

  // Ordered pair ambiguity as seen leaving each node.
  for (const auto& n : d.nodes) {
    std::vector<std::pair<ColorPair, EdgeId>> leaving;
    for (std::size_t i = 0; i < d.edges.size(); ++i) {
      const Edge& e = d.edges[i];
      if (!edge_ok[i]) continue;
      if (e.from == n.id) leaving.push_back({observed_pair(e, TravelDirection::Forward), e.id});
      if (e.to == n.id) leaving.push_back({observed_pair(e, TravelDirection::Backward), e.id});
    }
    std::sort(leaving.begin(), leaving.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    for (std::size_t i = 0; i < leaving.size(); ++i) {
      for (std::size_t j = i + 1; j < leaving.size(); ++j) {
        if (leaving[i].first == leaving[j].first) {
          add(ViolationKind::AmbiguousPair, n.id.value, leaving[i].second.value, leaving[j].second.value, 0,
              "node " + std::to_string(n.id.value) + ": edges " + std::to_string(leaving[i].second.value) +
                  " and " + std::to_string(leaving[j].second.value) + " both leave showing " +
                  to_string(leaving[i].first));
        }
      }
    }
  }

  // Anchors.
  std::set<QrId> qr_ids;
  std::set<NodeId> anchored;
  for (const auto& a : d.anchors) {
    if (!qr_ids.insert(a.qr_id).second) {
      add(ViolationKind::AnchorPlacement, a.qr_id.value, 0, 0, 0, "duplicate qr id " + std::to_string(a.qr_id.value));
    }
    const Node* n = d.find_node(a.node);
    if (n == nullptr) {
      add(ViolationKind::Structure, a.qr_id.value, 2, 0, 0,
          "anchor " + std::to_string(a.qr_id.value) + " references an unknown node");
      continue;
    }
    anchored.insert(a.node);
    if (!finite(a.position) || distance(a.position, n->position) > kMaxAnchorOffset + 1e-9) {
      add(ViolationKind::AnchorPlacement, a.qr_id.value, 0, a.node.value, 0,
          "anchor " + std::to_string(a.qr_id.value) + " is more than 0.5 m from node " +
              std::to_string(a.node.value));
    }
    if (!(a.size > 0.0)) {
      add(ViolationKind::AnchorPlacement, a.qr_id.value, 0, a.node.value, 0,
          "anchor " + std::to_string(a.qr_id.value) + " has non-positive size");
    }
  }
  for (const auto& n : d.nodes) {
    if (!anchored.contains(n.id)) {
      add(ViolationKind::MissingAnchor, n.id.value, 0, 0, 0, "node " + std::to_string(n.id.value) + " has no QR anchor");
    }
  }

  // Node spacing.
  for (std::size_t i = 0; i < d.nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < d.nodes.size(); ++j) {
      if (distance(d.nodes[i].position, d.nodes[j].position) < kMinNodeSeparation) {
        const auto a = std::min(d.nodes[i].id, d.nodes[j].id);
        const auto b = std::max(d.nodes[i].id, d.nodes[j].id);
        add(ViolationKind::NodeSpacing, a.value, 0, b.value, 0,
            "nodes " + std::to_string(a.value) + " and " + std::to_string(b.value) + " are closer than 0.5 m");
      }
    }
  }

  // Bounds.
  const Bounds& fb = d.floor_bounds;
  for (const auto& n : d.nodes) {
    if (!fb.contains(n.position)) {
      add(ViolationKind::OutOfBounds, n.id.value, 0, 0, 0, "node " + std::to_string(n.id.value) + " outside floor bounds");
    }
  }
  for (const auto& e : d.edges) {
    if (!std::all_of(e.polyline.begin(), e.polyline.end(), [&fb](Vec2 p) { return fb.contains(p); })) {
      add(ViolationKind::OutOfBounds, e.id.value, 1, 0, 0, "edge " + std::to_string(e.id.value) + " leaves floor bounds");
    }
  }
  for (const auto& a : d.anchors) {
    const Vec2 half{a.size / 2.0, a.size / 2.0};
    if (!fb.contains(a.position - half) || !fb.contains(a.position + half)) {
      add(ViolationKind::OutOfBounds, a.qr_id.value, 2, 0, 0,
          "anchor " + std::to_string(a.qr_id.value) + " outside floor bounds");
    }
  }

  std::sort(out.begin(), out.end(), [](const Violation& x, const Violation& y) {
    return std::tie(x.kind, x.a, x.a_index, x.b, x.b_index) < std::tie(y.kind, y.a, y.a_index, y.b, y.b_index);
  });

  // Connectivity over enabled edges, informational.
  if (!d.nodes.empty()) {
    NodeId root = d.nodes.front().id;
    for (const auto& n : d.nodes) root = std::min(root, n.id);
    std::set<NodeId> seen{root};
    std::vector<NodeId> stack{root};
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      for (const auto& e : d.edges) {
        if (!e.enabled) continue;
        NodeId v = e.from == u ? e.to : (e.to == u ? e.from : u);
        if (v != u && seen.insert(v).second) stack.push_back(v);
      }
    }
    for (const auto& n : d.nodes) {
      if (!seen.contains(n.id)) report.unreachable.push_back(n.id);
    }
    std::sort(report.unreachable.begin(), report.unreachable.end());
  }
  return report;
}

// ---------------------------------------------------------------------------
// Routing.

std::int64_t edge_weight(const Edge& e) { return std::llround(e.length() * 1e9); }

std::optional<Route> shortest_route(const Deployment& d, NodeId from, NodeId to, bool enabled_only) {
  if (from == to) {
    return Route{};
  }
  struct Arc {
    std::size_t edge;
    NodeId other;
    std::int64_t w;
  };
  std::map<NodeId, std::vector<Arc>> adj;
  for (std::size_t i = 0; i < d.edges.size(); ++i) {
    const Edge& e = d.edges[i];
    if (enabled_only && !e.enabled) continue;
    const std::int64_t w = edge_weight(e);
    adj[e.from].push_back({i, e.to, w});
    adj[e.to].push_back({i, e.from, w});
  }

  // Dijkstra from the target gives the distance-to-go of every node.
  constexpr std::int64_t inf = std::numeric_limits<std::int64_t>::max();
  std::map<NodeId, std::int64_t> togo;
  using Item = std::pair<std::int64_t, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  togo[to] = 0;
  pq.push({0, to});
  while (!pq.empty()) {
    const auto [dist, u] = pq.top();
    pq.pop();
    if (dist != togo[u]) continue;
    for (const Arc& a : adj[u]) {
      const std::int64_t nd = dist + a.w;
      auto it = togo.find(a.other);
      if (it == togo.end() || nd < it->second) {
        togo[a.other] = nd;
        pq.push({nd, a.other});
      }
    }
  }
  if (!togo.contains(from)) {
    return std::nullopt;
  }

  // Walk forward choosing the smallest edge id that stays on a shortest path.
  Route route;
  NodeId at = from;
  while (at != to) {
    const std::int64_t here = togo.at(at);
    const Arc* best = nullptr;
    for (const Arc& a : adj[at]) {
      auto it = togo.find(a.other);
      if (it == togo.end() || it->second == inf || it->second + a.w != here) continue;
      if (best == nullptr || d.edges[a.edge].id < d.edges[best->edge].id) best = &a;
    }
    if (best == nullptr) {
      return std::nullopt;
    }
    const Edge& e = d.edges[best->edge];
    route.push_back({e.id, e.from == at ? TravelDirection::Forward : TravelDirection::Backward});
    at = best->other;
  }
  return route;
}

double route_length(const Deployment& d, const Route& r) {
  std::int64_t total = 0;
  for (const auto& step : r) {
    if (const Edge* e = d.find_edge(step.edge)) total += edge_weight(*e);
  }
  return weight_to_meters(total);
}

double cross_track_distance(Vec2 p, const Edge& e) {
  if (e.polyline.empty()) {
    return std::numeric_limits<double>::infinity();
  }
  if (e.polyline.size() == 1) {
    return distance(p, e.polyline.front());
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < e.polyline.size(); ++k) {
    best = std::min(best, point_segment_distance(p, e.polyline[k - 1], e.polyline[k]));
  }
  return best;
}

}  // namespace arianna
