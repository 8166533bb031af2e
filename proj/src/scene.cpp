#include "arianna/scene.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "arianna/rng.hpp"

namespace arianna {

// ---------------------------------------------------------------------------
// World params.

Json world_params_to_json(const WorldParams& p) {
  return Json{{"seed", p.seed},
              {"min_nodes", p.min_nodes},
              {"max_nodes", p.max_nodes},
              {"floor", Json::array({p.floor_width, p.floor_height})},
              {"strip_width", p.strips.strip_width},
              {"strip_gap", p.strips.strip_gap},
              {"marker_size", p.marker_size},
              {"extra_edge_probability", p.extra_edge_probability},
              {"max_attempts", p.max_attempts}};
}

WorldParams world_params_from_json(const Json& j) {
  WorldParams p;
  if (!j.is_object()) throw FormatError("world params must be a JSON object");
  try {
    p.seed = j.value("seed", p.seed);
    p.min_nodes = j.value("min_nodes", p.min_nodes);
    p.max_nodes = j.value("max_nodes", p.max_nodes);
    if (j.contains("floor")) {
      const Vec2 f = vec_from_json(j.at("floor"));
      p.floor_width = f.x;
      p.floor_height = f.y;
    }
    p.strips.strip_width = j.value("strip_width", p.strips.strip_width);
    p.strips.strip_gap = j.value("strip_gap", p.strips.strip_gap);
    p.marker_size = j.value("marker_size", p.marker_size);
    p.extra_edge_probability = j.value("extra_edge_probability", p.extra_edge_probability);
    p.max_attempts = j.value("max_attempts", p.max_attempts);
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("bad world params: ") + ex.what());
  }
  if (p.min_nodes < 2 || p.max_nodes < p.min_nodes) throw FormatError("node count range must satisfy 2 <= min <= max");
  if (!(p.strips.strip_width > 0.0) || !(p.strips.strip_gap > 0.0)) throw FormatError("strip width and gap must be positive");
  if (!(p.marker_size > 0.0)) throw FormatError("marker size must be positive");
  if (!(p.floor_width > 0.0) || !(p.floor_height > 0.0)) throw FormatError("floor size must be positive");
  return p;
}

// ---------------------------------------------------------------------------
// Generator.

namespace {

constexpr double kBoundaryMargin = 1.0;
constexpr double kMinCell = 2.0;
constexpr double kEdgeClearance = 0.5;       // between lanes that share no node
constexpr double kNodeClearance = 0.8;       // between a lane and a node it does not touch
constexpr double kAnchorOffset = 0.35;
constexpr int kMaxDegree = 4;

struct Candidate {
  std::size_t a;
  std::size_t b;
  double straight;
};

bool near(double x, double y) { return std::abs(x - y) < 1e-9; }

// Corridor shapes between two points using only 45-degree multiples.
std::vector<std::vector<Vec2>> corridor_shapes(Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double ax = std::abs(d.x);
  const double ay = std::abs(d.y);
  if (near(ax, 0.0) || near(ay, 0.0) || near(ax, ay)) {
    return {{a, b}};
  }
  const double sx = d.x > 0 ? 1.0 : -1.0;
  const double sy = d.y > 0 ? 1.0 : -1.0;
  std::vector<std::vector<Vec2>> out;
  // Straight run along the dominant axis, then a 45-degree diagonal (both orders).
  const double diag = std::min(ax, ay);
  const Vec2 straight = ax > ay ? Vec2{sx * (ax - diag), 0.0} : Vec2{0.0, sy * (ay - diag)};
  out.push_back({a, round_mm(a + straight), b});
  out.push_back({a, round_mm(b - straight), b});
  // Axis-aligned L shapes.
  out.push_back({a, Vec2{b.x, a.y}, b});
  out.push_back({a, Vec2{a.x, b.y}, b});
  return out;
}

// Distance between two corridors, ignoring segment pairs that meet at a node
// both corridors end on (those are checked by leaving direction instead).
double polyline_distance(const std::vector<Vec2>& p, std::size_t p_start, std::size_t p_end,
                         const std::vector<Vec2>& q, std::size_t q_start, std::size_t q_end) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < p.size(); ++i) {
    for (std::size_t j = 1; j < q.size(); ++j) {
      bool meet = false;
      for (std::size_t pn : {i == 1 ? p_start : SIZE_MAX, i + 1 == p.size() ? p_end : SIZE_MAX}) {
        for (std::size_t qn : {j == 1 ? q_start : SIZE_MAX, j + 1 == q.size() ? q_end : SIZE_MAX}) {
          meet = meet || (pn != SIZE_MAX && pn == qn);
        }
      }
      if (meet) continue;
      best = std::min(best, segment_segment_distance(p[i - 1], p[i], q[j - 1], q[j]));
    }
  }
  return best;
}

Vec2 unit(Vec2 v) {
  const double n = norm(v);
  return n > 0 ? v * (1.0 / n) : Vec2{1.0, 0.0};
}

// Direction of the first segment leaving node position `at` along polyline `pl`.
Vec2 leaving_direction(const std::vector<Vec2>& pl, bool from_start) {
  return from_start ? unit(pl[1] - pl[0]) : unit(pl[pl.size() - 2] - pl.back());
}

struct Builder {
  const WorldParams& params;
  Rng& rng;
  std::vector<Vec2> nodes;
  std::vector<std::pair<std::size_t, std::size_t>> ends;
  std::vector<std::vector<Vec2>> polylines;
  std::vector<int> degree;

  bool fits(std::size_t a, std::size_t b, const std::vector<Vec2>& pl) const {
    if (degree[a] >= kMaxDegree || degree[b] >= kMaxDegree) return false;
    const Bounds inner{{0.5, 0.5}, {params.floor_width - 0.5, params.floor_height - 0.5}};
    for (Vec2 p : pl) {
      if (!inner.contains(p)) return false;
    }
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      if (n == a || n == b) continue;
      for (std::size_t i = 1; i < pl.size(); ++i) {
        if (point_segment_distance(nodes[n], pl[i - 1], pl[i]) < kNodeClearance) return false;
      }
    }
    for (std::size_t e = 0; e < polylines.size(); ++e) {
      const auto [ea, eb] = ends[e];
      if ((ea == a && eb == b) || (ea == b && eb == a)) return false;
      const auto& q = polylines[e];
      if (polyline_distance(pl, a, b, q, ea, eb) < kEdgeClearance) return false;
      for (std::size_t shared : {a, b}) {
        if (ea != shared && eb != shared) continue;
        const Vec2 mine = leaving_direction(pl, shared == a);
        const Vec2 theirs = leaving_direction(q, ea == shared);
        if (dot(mine, theirs) > std::cos(std::numbers::pi / 4.0) - 1e-6) return false;
      }
    }
    return true;
  }

  bool try_add(std::size_t a, std::size_t b) {
    auto shapes = corridor_shapes(nodes[a], nodes[b]);
    for (std::size_t i = shapes.size(); i > 1; --i) {
      std::swap(shapes[i - 1], shapes[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
    }
    for (auto& pl : shapes) {
      if (fits(a, b, pl)) {
        ends.push_back({a, b});
        polylines.push_back(std::move(pl));
        ++degree[a];
        ++degree[b];
        return true;
      }
    }
    return false;
  }
};

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

ColorPair leaving(const ColorPair& forward, bool from_side) { return from_side ? forward : forward.reversed(); }

std::optional<Deployment> attempt(const WorldParams& params, Rng& rng, int node_count) {
  const double usable_w = params.floor_width - 2 * kBoundaryMargin;
  const double usable_h = params.floor_height - 2 * kBoundaryMargin;
  int gx = std::max(1, static_cast<int>(std::floor(usable_w / kMinCell)));
  int gy = std::max(1, static_cast<int>(std::floor(usable_h / kMinCell)));
  // Prefer a grid only modestly larger than the node count so nodes have neighbours.
  while (gx * gy > 2 * node_count && (gx > 2 || gy > 2)) {
    if (gx >= gy && gx > 2) --gx; else if (gy > 2) --gy; else break;
  }
  if (gx * gy < node_count) {
    return std::nullopt;
  }
  const double cw = usable_w / gx;
  const double ch = usable_h / gy;

  std::vector<int> cells(static_cast<std::size_t>(gx * gy));
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = static_cast<int>(i);
  for (std::size_t i = cells.size(); i > 1; --i) {
    std::swap(cells[i - 1], cells[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
  }
  cells.resize(static_cast<std::size_t>(node_count));
  std::sort(cells.begin(), cells.end());

  Builder b{params, rng, {}, {}, {}, std::vector<int>(static_cast<std::size_t>(node_count), 0)};
  std::vector<std::pair<int, int>> grid_pos;
  for (int c : cells) {
    const int ix = c % gx;
    const int iy = c / gx;
    grid_pos.push_back({ix, iy});
    const double jx = rng.uniform(-0.2, 0.2) * cw;
    const double jy = rng.uniform(-0.2, 0.2) * ch;
    const Vec2 p{kBoundaryMargin + (ix + 0.5) * cw + jx, kBoundaryMargin + (iy + 0.5) * ch + jy};
    b.nodes.push_back({std::round(p.x * 100.0) / 100.0, std::round(p.y * 100.0) / 100.0});
  }

  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < b.nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < b.nodes.size(); ++j) {
      const int cheb = std::max(std::abs(grid_pos[i].first - grid_pos[j].first),
                                std::abs(grid_pos[i].second - grid_pos[j].second));
      if (cheb <= 2) cands.push_back({i, j, distance(b.nodes[i], b.nodes[j])});
    }
  }
  for (std::size_t i = cands.size(); i > 1; --i) {
    std::swap(cands[i - 1], cands[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) { return x.straight < y.straight; });

  std::vector<std::size_t> parent(b.nodes.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  std::vector<bool> used(cands.size(), false);
  for (std::size_t c = 0; c < cands.size(); ++c) {
    const auto ra = find_root(parent, cands[c].a);
    const auto rb = find_root(parent, cands[c].b);
    if (ra != rb && b.try_add(cands[c].a, cands[c].b)) {
      parent[ra] = rb;
      used[c] = true;
    }
  }
  const auto root = find_root(parent, 0);
  for (std::size_t i = 1; i < parent.size(); ++i) {
    if (find_root(parent, i) != root) return std::nullopt;
  }
  for (std::size_t c = 0; c < cands.size(); ++c) {
    if (!used[c] && rng.chance(params.extra_edge_probability)) {
      b.try_add(cands[c].a, cands[c].b);
    }
  }

  Deployment d;
  d.deployment_id = DeploymentId{static_cast<std::uint16_t>(params.seed & 0xffff)};
  d.version = 1;
  d.floor_bounds = {{0.0, 0.0}, {round_mm(params.floor_width), round_mm(params.floor_height)}};
  for (std::size_t i = 0; i < b.nodes.size(); ++i) {
    d.nodes.push_back({NodeId{static_cast<std::uint32_t>(i)}, round_mm(b.nodes[i]), NodeKind::Intersection, std::nullopt});
  }
  for (std::size_t e = 0; e < b.polylines.size(); ++e) {
    Edge edge;
    edge.id = EdgeId{static_cast<std::uint32_t>(e)};
    edge.from = NodeId{static_cast<std::uint32_t>(b.ends[e].first)};
    edge.to = NodeId{static_cast<std::uint32_t>(b.ends[e].second)};
    for (Vec2 p : b.polylines[e]) edge.polyline.push_back(round_mm(p));
    d.edges.push_back(std::move(edge));
  }

  // Colours: prefer pairs disjoint from every lane already touching either end
  // so same-colour strips never merge at a junction; fall back to rule (b).
  std::vector<ColorPair> all_pairs;
  for (ColorId x : kPalette) {
    for (ColorId y : kPalette) {
      if (x != y) all_pairs.push_back({x, y});
    }
  }
  for (auto& e : d.edges) {
    std::vector<ColorPair> order = all_pairs;
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
    }
    std::set<ColorId> near_colors;
    std::vector<ColorPair> leaving_from;
    std::vector<ColorPair> leaving_to;
    for (const auto& other : d.edges) {
      if (&other == &e) break;  // only edges already coloured
      for (NodeId n : {e.from, e.to}) {
        if (other.from != n && other.to != n) continue;
        near_colors.insert(other.colors.left);
        near_colors.insert(other.colors.right);
        const ColorPair out = leaving(other.colors, other.from == n);
        (n == e.from ? leaving_from : leaving_to).push_back(out);
      }
    }
    auto ok_b = [&](ColorPair p) {
      return std::find(leaving_from.begin(), leaving_from.end(), p) == leaving_from.end() &&
             std::find(leaving_to.begin(), leaving_to.end(), p.reversed()) == leaving_to.end();
    };
    auto it = std::find_if(order.begin(), order.end(), [&](ColorPair p) {
      return ok_b(p) && !near_colors.contains(p.left) && !near_colors.contains(p.right);
    });
    if (it == order.end()) it = std::find_if(order.begin(), order.end(), ok_b);
    if (it == order.end()) return std::nullopt;
    e.colors = *it;
  }

  // Kinds and labels.
  std::vector<int> deg(d.nodes.size(), 0);
  for (const auto& e : d.edges) {
    ++deg[e.from.value];
    ++deg[e.to.value];
  }
  bool any_poi = false;
  for (auto& n : d.nodes) {
    if (deg[n.id.value] == 1) {
      n.kind = NodeKind::PointOfInterest;
      any_poi = true;
    }
  }
  if (!any_poi) {
    d.nodes[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(d.nodes.size()) - 1))].kind =
        NodeKind::PointOfInterest;
  }
  for (auto& n : d.nodes) {
    if (n.kind == NodeKind::PointOfInterest) n.label = "POI " + std::to_string(n.id.value);
  }

  // One anchor per node, in the widest angular gap between its lanes.
  std::set<std::uint16_t> qr_used;
  for (const auto& n : d.nodes) {
    std::vector<double> angles;
    for (const Edge* e : d.incident_edges(n.id)) {
      const Vec2 dir = leaving_direction(e->polyline, e->from == n.id);
      angles.push_back(std::atan2(dir.y, dir.x));
    }
    std::sort(angles.begin(), angles.end());
    double bisector = 0.0;
    if (angles.size() == 1) {
      bisector = angles[0] + std::numbers::pi;
    } else {
      double widest = -1.0;
      for (std::size_t i = 0; i < angles.size(); ++i) {
        const double lo = angles[i];
        const double hi = i + 1 < angles.size() ? angles[i + 1] : angles[0] + 2 * std::numbers::pi;
        if (hi - lo > widest + 1e-9) {
          widest = hi - lo;
          bisector = (lo + hi) / 2.0;
        }
      }
    }
    std::uint16_t qr = 0;
    do {
      qr = static_cast<std::uint16_t>(rng.uniform_int(1, 9999));
    } while (qr_used.contains(qr));
    qr_used.insert(qr);
    d.anchors.push_back({QrId{qr}, n.id, round_mm(n.position + heading_vector(bisector) * kAnchorOffset), params.marker_size});
  }
  std::sort(d.anchors.begin(), d.anchors.end(), [](const QrAnchor& x, const QrAnchor& y) { return x.node < y.node; });

  if (!validate_deployment(d).ok()) {
    return std::nullopt;
  }
  return d;
}

}  // namespace

Deployment generate_world(const WorldParams& params) {
  if (params.min_nodes < 2 || params.max_nodes < params.min_nodes) {
    throw GenerationError("node count range must satisfy 2 <= min <= max");
  }
  Rng rng(params.seed);
  const int node_count = static_cast<int>(rng.uniform_int(params.min_nodes, params.max_nodes));
  for (int i = 0; i < params.max_attempts; ++i) {
    if (auto d = attempt(params, rng, node_count)) {
      return std::move(*d);
    }
  }
  throw GenerationError("no valid layout for " + std::to_string(node_count) + " nodes on a " +
                        std::to_string(params.floor_width) + " x " + std::to_string(params.floor_height) +
                        " m floor after " + std::to_string(params.max_attempts) + " attempts");
}

// ---------------------------------------------------------------------------
// Raster.

FloorRaster::FloorRaster(Bounds bounds, double resolution)
    : bounds_(bounds),
      resolution_(resolution),
      cols_(static_cast<int>(std::ceil(bounds.width() * resolution - 1e-9))),
      rows_(static_cast<int>(std::ceil(bounds.height() * resolution - 1e-9))),
      cells_(static_cast<std::size_t>(std::max(cols_, 0)) * static_cast<std::size_t>(std::max(rows_, 0)), kFloorGray) {}

std::optional<std::pair<int, int>> FloorRaster::cell_of(Vec2 p) const {
  const double fx = (p.x - bounds_.min.x) * resolution_;
  const double fy = (p.y - bounds_.min.y) * resolution_;
  if (!(fx >= 0.0) || !(fy >= 0.0)) return std::nullopt;
  const auto col = static_cast<int>(fx);
  const auto row = static_cast<int>(fy);
  if (col >= cols_ || row >= rows_) return std::nullopt;
  return std::pair{col, row};
}

Vec2 FloorRaster::cell_center(int col, int row) const {
  return {bounds_.min.x + (col + 0.5) / resolution_, bounds_.min.y + (row + 0.5) / resolution_};
}

std::optional<Rgb> FloorRaster::sample(Vec2 p) const {
  if (auto c = cell_of(p)) return at(c->first, c->second);
  return std::nullopt;
}

void draw_marker(FloorRaster& raster, Vec2 center, double size, const MarkerGrid& grid) {
  const double half = size / 2.0;
  const double cell = size / kMarkerCells;
  const auto lo = raster.cell_of(center - Vec2{half, half});
  const auto hi = raster.cell_of(center + Vec2{half, half});
  const int c0 = lo ? lo->first : 0;
  const int r0 = lo ? lo->second : 0;
  const int c1 = hi ? hi->first : raster.cols() - 1;
  const int r1 = hi ? hi->second : raster.rows() - 1;
  for (int row = std::max(r0, 0); row <= std::min(r1, raster.rows() - 1); ++row) {
    for (int col = std::max(c0, 0); col <= std::min(c1, raster.cols() - 1); ++col) {
      const Vec2 p = raster.cell_center(col, row);
      const double gx = (p.x - (center.x - half)) / cell;
      const double gy = ((center.y + half) - p.y) / cell;
      if (gx < 0.0 || gy < 0.0 || gx >= kMarkerCells || gy >= kMarkerCells) continue;
      const bool black = grid.at(static_cast<int>(gy), static_cast<int>(gx));
      raster.set(col, row, black ? kMarkerBlack : kMarkerWhite);
    }
  }
}

namespace {

void draw_lane(FloorRaster& raster, const Edge& e, const StripGeometry& g) {
  const auto& pl = e.polyline;
  if (pl.size() < 2) return;
  const double reach = g.lane_half_width();
  Vec2 lo = pl.front();
  Vec2 hi = pl.front();
  for (Vec2 p : pl) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  const double res = raster.resolution();
  const Bounds& b = raster.bounds();
  const int c0 = std::max(0, static_cast<int>(std::floor((lo.x - reach - b.min.x) * res)));
  const int c1 = std::min(raster.cols() - 1, static_cast<int>(std::floor((hi.x + reach - b.min.x) * res)));
  const int r0 = std::max(0, static_cast<int>(std::floor((lo.y - reach - b.min.y) * res)));
  const int r1 = std::min(raster.rows() - 1, static_cast<int>(std::floor((hi.y + reach - b.min.y) * res)));
  const Rgb left = palette_rgb(e.colors.left);
  const Rgb right = palette_rgb(e.colors.right);
  const double inner = g.strip_gap / 2.0;

  for (int row = r0; row <= r1; ++row) {
    for (int col = c0; col <= c1; ++col) {
      const Vec2 p = raster.cell_center(col, row);
      double best = std::numeric_limits<double>::infinity();
      double side = 0.0;
      bool beyond_end = false;
      for (std::size_t k = 1; k < pl.size(); ++k) {
        const Vec2 a = pl[k - 1];
        const Vec2 dir = pl[k] - a;
        const double len2 = dot(dir, dir);
        const double t = dot(p - a, dir) / len2;
        const Vec2 q = closest_on_segment(p, a, pl[k]);
        const double dist = distance(p, q);
        if (dist < best) {
          best = dist;
          side = cross(dir, p - q);
          beyond_end = (k == 1 && t < 0.0) || (k + 1 == pl.size() && t > 1.0);
        }
      }
      // Lanes end square at their nodes; interior joins are rounded.
      if (beyond_end || best < inner || best > inner + g.strip_width) continue;
      if (side > 0.0) {
        raster.set(col, row, left);
      } else if (side < 0.0) {
        raster.set(col, row, right);
      }
    }
  }
}

}  // namespace

FloorRaster rasterize_floor(const Deployment& d, const RasterOptions& opts) {
  FloorRaster raster(d.floor_bounds, opts.resolution);
  for (const auto& e : d.edges) {
    draw_lane(raster, e, opts.strips);
  }
  if (opts.edge_marker_spacing > 0.0) {
    for (const auto& e : d.edges) {
      if (e.id.value > 0xffff) continue;
      const double len = e.length();
      for (double s = opts.edge_marker_spacing; s < len - opts.edge_marker_spacing / 2.0; s += opts.edge_marker_spacing) {
        const Vec2 at = point_at_arclength(e.polyline, s);
        const Vec2 side = left_normal(tangent_at_arclength(e.polyline, s));
        const MarkerPayload payload{MarkerKind::Edge, static_cast<std::uint16_t>(e.id.value), distance_to_aux(s)};
        draw_marker(raster, at + side * opts.edge_marker_offset, opts.edge_marker_size, encode_marker(payload));
      }
    }
  }
  for (const auto& a : d.anchors) {
    draw_marker(raster, a.position, a.size, encode_marker({MarkerKind::Node, a.qr_id.value, 0}));
  }
  return raster;
}

// ---------------------------------------------------------------------------
// Camera.

double CameraIntrinsics::focal_px() const { return (width / 2.0) / std::tan(hfov / 2.0); }

namespace {

struct Vec3 {
  double x, y, z;
};

class CameraModel {
 public:
  CameraModel(const Pose& pose, const CameraIntrinsics& k)
      : origin_{pose.position.x, pose.position.y, pose.camera_height},
        f_(k.focal_px()),
        cx_(k.width / 2.0),
        cy_(k.height / 2.0) {
    const double yaw = pose.camera_yaw();
    const double cp = std::cos(pose.camera_pitch);
    const double sp = std::sin(pose.camera_pitch);
    const double cy = std::cos(yaw);
    const double sy = std::sin(yaw);
    fwd_ = {cy * cp, sy * cp, -sp};
    right_ = {sy, -cy, 0.0};
    up_ = {cy * sp, sy * sp, cp};
  }

  std::optional<Vec2> ground(double u, double v) const {
    const double x = (u - cx_) / f_;
    const double y = (v - cy_) / f_;
    const Vec3 ray{fwd_.x + right_.x * x - up_.x * y, fwd_.y + right_.y * x - up_.y * y,
                   fwd_.z + right_.z * x - up_.z * y};
    if (ray.z >= 0.0) return std::nullopt;
    const double t = -origin_.z / ray.z;
    return Vec2{origin_.x + t * ray.x, origin_.y + t * ray.y};
  }

  std::optional<std::pair<double, double>> image(Vec2 g) const {
    const Vec3 w{g.x - origin_.x, g.y - origin_.y, -origin_.z};
    const double depth = w.x * fwd_.x + w.y * fwd_.y + w.z * fwd_.z;
    if (depth <= 1e-9) return std::nullopt;
    const double x = (w.x * right_.x + w.y * right_.y + w.z * right_.z) / depth;
    const double y = -(w.x * up_.x + w.y * up_.y + w.z * up_.z) / depth;
    return std::pair{cx_ + f_ * x, cy_ + f_ * y};
  }

 private:
  Vec3 origin_;
  Vec3 fwd_{};
  Vec3 right_{};
  Vec3 up_{};
  double f_;
  double cx_;
  double cy_;
};

}  // namespace

std::optional<Vec2> project_ground(const Pose& pose, const CameraIntrinsics& k, double u, double v) {
  return CameraModel(pose, k).ground(u, v);
}

std::optional<std::pair<double, double>> project_to_image(const Pose& pose, const CameraIntrinsics& k, Vec2 ground) {
  return CameraModel(pose, k).image(ground);
}

Frame render_frame(const FloorRaster& raster, const Pose& pose, const CameraIntrinsics& k, const RenderNoise& noise) {
  const CameraModel cam(pose, k);
  Frame f(k.width, k.height);
  for (int v = 0; v < k.height; ++v) {
    for (int u = 0; u < k.width; ++u) {
      Rgb c = kHorizonColor;
      if (auto g = cam.ground(u + 0.5, v + 0.5)) {
        if (auto s = raster.sample(*g)) c = *s;
      }
      f.set(u, v, c);
    }
  }
  if (noise.sigma > 0.0) {
    Rng rng(noise.seed);
    for (auto& ch : f.rgb) {
      const double value = ch + noise.sigma * rng.normal();
      ch = static_cast<std::uint8_t>(std::clamp(std::lround(value), 0L, 255L));
    }
  }
  return f;
}

}  // namespace arianna
