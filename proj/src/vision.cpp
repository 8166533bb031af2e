#include "arianna/vision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace arianna {

namespace {

struct Reference {
  Label label;
  Rgb rgb;
};

// Palette order first, then the marker inks; ties resolve to the earlier entry.
constexpr Reference kReferences[] = {
    {Label::Red, palette_rgb(ColorId::Red)},         {Label::Green, palette_rgb(ColorId::Green)},
    {Label::Blue, palette_rgb(ColorId::Blue)},       {Label::Yellow, palette_rgb(ColorId::Yellow)},
    {Label::Magenta, palette_rgb(ColorId::Magenta)}, {Label::Cyan, palette_rgb(ColorId::Cyan)},
    {Label::MarkerBlack, kMarkerBlack},              {Label::MarkerWhite, kMarkerWhite},
};

int dist2(Rgb a, Rgb b) {
  const int dr = a.r - b.r;
  const int dg = a.g - b.g;
  const int db = a.b - b.b;
  return dr * dr + dg * dg + db * db;
}

struct Component {
  Label label{Label::Background};
  std::vector<std::pair<int, int>> pixels;
  double cu{0.0};
  double cv{0.0};
  double angle{0.0};  // axis angle, image-up clockwise
  double du{0.0};     // unit axis direction, oriented up
  double dv{-1.0};
};

std::vector<Component> components(const LabelMask& mask, auto keep) {
  std::vector<Component> out;
  std::vector<std::uint8_t> seen(mask.cells.size(), 0);
  std::vector<std::pair<int, int>> stack;
  for (int v = 0; v < mask.height; ++v) {
    for (int u = 0; u < mask.width; ++u) {
      const Label l = mask.at(u, v);
      if (seen[mask.index(u, v)] || !keep(l)) continue;
      Component c;
      c.label = l;
      seen[mask.index(u, v)] = 1;
      stack.push_back({u, v});
      while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        c.pixels.push_back({x, y});
        constexpr int du[4] = {1, -1, 0, 0};
        constexpr int dv[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int nx = x + du[k];
          const int ny = y + dv[k];
          if (!mask.in_bounds(nx, ny)) continue;
          const std::size_t i = mask.index(nx, ny);
          if (seen[i] || mask.cells[i] != l) continue;
          seen[i] = 1;
          stack.push_back({nx, ny});
        }
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

void fit_axis(Component& c) {
  double su = 0.0;
  double sv = 0.0;
  for (const auto& [u, v] : c.pixels) {
    su += u;
    sv += v;
  }
  const double n = static_cast<double>(c.pixels.size());
  c.cu = su / n;
  c.cv = sv / n;
  double suu = 0.0;
  double svv = 0.0;
  double suv = 0.0;
  for (const auto& [u, v] : c.pixels) {
    const double a = u - c.cu;
    const double b = v - c.cv;
    suu += a * a;
    svv += b * b;
    suv += a * b;
  }
  const double theta = 0.5 * std::atan2(2.0 * suv, suu - svv);
  double du = std::cos(theta);
  double dv = std::sin(theta);
  if (dv > 0.0 || (dv == 0.0 && du < 0.0)) {
    du = -du;
    dv = -dv;
  }
  c.du = du;
  c.dv = dv;
  c.angle = std::atan2(du, -dv);
  if (c.angle <= -std::numbers::pi / 2.0) c.angle += std::numbers::pi;
}

double axis_difference(double a, double b) {
  double d = std::fmod(std::abs(a - b), std::numbers::pi);
  return std::min(d, std::numbers::pi - d);
}

struct P2 {
  double x;
  double y;
};

double cross3(P2 o, P2 a, P2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

// Andrew's monotone chain; result counter-clockwise in (x, y), no collinear points.
std::vector<P2> convex_hull(std::vector<P2> pts) {
  std::sort(pts.begin(), pts.end(), [](P2 a, P2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end(), [](P2 a, P2 b) { return a.x == b.x && a.y == b.y; }), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<P2> h(2 * pts.size());
  std::size_t k = 0;
  for (const P2& p : pts) {
    while (k >= 2 && cross3(h[k - 2], h[k - 1], p) <= 0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    const P2& p = pts[i - 1];
    while (k >= t && cross3(h[k - 2], h[k - 1], p) <= 0) --k;
    h[k++] = p;
  }
  h.resize(k - 1);
  return h;
}

// Row extremes keep the hull input small without changing the hull.
void add_row_extremes(const std::vector<std::pair<int, int>>& pixels, std::vector<P2>& out) {
  if (pixels.empty()) return;
  int vmin = std::numeric_limits<int>::max();
  int vmax = std::numeric_limits<int>::min();
  for (const auto& [u, v] : pixels) {
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  std::vector<int> lo(static_cast<std::size_t>(vmax - vmin + 1), std::numeric_limits<int>::max());
  std::vector<int> hi(lo.size(), std::numeric_limits<int>::min());
  for (const auto& [u, v] : pixels) {
    auto& l = lo[static_cast<std::size_t>(v - vmin)];
    auto& h = hi[static_cast<std::size_t>(v - vmin)];
    l = std::min(l, u);
    h = std::max(h, u);
  }
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (lo[i] > hi[i]) continue;
    out.push_back({static_cast<double>(lo[i]), static_cast<double>(vmin + static_cast<int>(i))});
    out.push_back({static_cast<double>(hi[i]), static_cast<double>(vmin + static_cast<int>(i))});
  }
}

// Marks every pixel whose centre lies inside (or on) the convex polygon.
void fill_convex(const std::vector<P2>& hull, PixelMask& mask) {
  if (hull.empty()) return;
  if (hull.size() < 3) {
    for (const P2& p : hull) mask.set(static_cast<int>(p.x), static_cast<int>(p.y), 1);
    if (hull.size() == 2) {
      const int steps = static_cast<int>(std::ceil(std::max(std::abs(hull[1].x - hull[0].x), std::abs(hull[1].y - hull[0].y))));
      for (int s = 0; s <= steps; ++s) {
        const double t = steps == 0 ? 0.0 : static_cast<double>(s) / steps;
        mask.set(static_cast<int>(std::lround(hull[0].x + t * (hull[1].x - hull[0].x))),
                 static_cast<int>(std::lround(hull[0].y + t * (hull[1].y - hull[0].y))), 1);
      }
    }
    return;
  }
  double ymin = hull[0].y;
  double ymax = hull[0].y;
  for (const P2& p : hull) {
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  constexpr double eps = 1e-9;
  for (int v = static_cast<int>(std::ceil(ymin)); v <= static_cast<int>(std::floor(ymax)); ++v) {
    double xl = std::numeric_limits<double>::infinity();
    double xr = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < hull.size(); ++i) {
      const P2 a = hull[i];
      const P2 b = hull[(i + 1) % hull.size()];
      if ((v < std::min(a.y, b.y) - eps) || (v > std::max(a.y, b.y) + eps)) continue;
      if (std::abs(b.y - a.y) < eps) {
        xl = std::min({xl, a.x, b.x});
        xr = std::max({xr, a.x, b.x});
      } else {
        const double x = a.x + (v - a.y) * (b.x - a.x) / (b.y - a.y);
        xl = std::min(xl, x);
        xr = std::max(xr, x);
      }
    }
    for (int u = std::max(0, static_cast<int>(std::ceil(xl - eps))); u <= std::min(mask.width - 1, static_cast<int>(std::floor(xr + eps))); ++u) {
      if (v >= 0 && v < mask.height) mask.set(u, v, 1);
    }
  }
}

double polygon_area(const std::vector<P2>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const P2 p = poly[i];
    const P2 q = poly[(i + 1) % poly.size()];
    a += p.x * q.y - q.x * p.y;
  }
  return a / 2.0;
}

}  // namespace

LabelMask segment_colors(const Frame& f, const VisionParams& p) {
  LabelMask mask(f.width, f.height, Label::Background);
  const double limit2 = p.color_threshold * p.color_threshold;
  for (int v = 0; v < f.height; ++v) {
    for (int u = 0; u < f.width; ++u) {
      const Rgb px = f.at(u, v);
      int best = std::numeric_limits<int>::max();
      Label label = Label::Background;
      for (const auto& ref : kReferences) {
        const int d = dist2(px, ref.rgb);
        if (d < best) {
          best = d;
          label = ref.label;
        }
      }
      if (best <= limit2) mask.set(u, v, label);
    }
  }
  return mask;
}

std::vector<LaneDetection> detect_lanes(const LabelMask& mask, const VisionParams& p) {
  auto strips = components(mask, [](Label l) { return color_of(l).has_value(); });
  std::erase_if(strips, [&p](const Component& c) { return static_cast<int>(c.pixels.size()) < p.min_blob_area; });
  for (auto& c : strips) fit_axis(c);

  struct Pairing {
    std::size_t a;
    std::size_t b;
    std::size_t area;
  };
  std::vector<Pairing> pairs;
  for (std::size_t i = 0; i < strips.size(); ++i) {
    for (std::size_t j = i + 1; j < strips.size(); ++j) {
      const Component& a = strips[i];
      const Component& b = strips[j];
      if (a.label == b.label) continue;
      if (axis_difference(a.angle, b.angle) > p.max_pair_angle) continue;
      double du = a.du * a.pixels.size() + b.du * b.pixels.size();
      double dv = a.dv * a.pixels.size() + b.dv * b.pixels.size();
      const double n = std::hypot(du, dv);
      du /= n;
      dv /= n;
      const double gap = std::abs((b.cu - a.cu) * (-dv) + (b.cv - a.cv) * du);
      if (gap < p.min_gap_px || gap > p.max_gap_px) continue;
      pairs.push_back({i, j, a.pixels.size() + b.pixels.size()});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pairing& x, const Pairing& y) { return x.area > y.area; });

  std::vector<LaneDetection> out;
  std::vector<bool> used(strips.size(), false);
  for (const Pairing& pr : pairs) {
    if (used[pr.a] || used[pr.b]) continue;
    used[pr.a] = used[pr.b] = true;
    const Component& a = strips[pr.a];
    const Component& b = strips[pr.b];

    double du = a.du * a.pixels.size() + b.du * b.pixels.size();
    double dv = a.dv * a.pixels.size() + b.dv * b.pixels.size();
    const double n = std::hypot(du, dv);
    du /= n;
    dv /= n;
    // Right of the upward axis in image coordinates (v grows downward).
    const double ru = -dv;
    const double rv = du;
    const bool a_left = a.cu * ru + a.cv * rv < b.cu * ru + b.cv * rv;
    const Component& left = a_left ? a : b;
    const Component& right = a_left ? b : a;

    LaneDetection det;
    det.ordered_pair = {*color_of(left.label), *color_of(right.label)};
    det.axis_angle = std::atan2(du, -dv);
    if (det.axis_angle <= -std::numbers::pi / 2.0) det.axis_angle += std::numbers::pi;
    if (det.axis_angle > std::numbers::pi / 2.0) det.axis_angle -= std::numbers::pi;
    std::vector<P2> pts;
    add_row_extremes(a.pixels, pts);
    add_row_extremes(b.pixels, pts);
    det.lane_mask = PixelMask(mask.width, mask.height, 0);
    fill_convex(convex_hull(std::move(pts)), det.lane_mask);
    for (const auto& [u, v] : a.pixels) det.lane_mask.set(u, v, 1);
    for (const auto& [u, v] : b.pixels) det.lane_mask.set(u, v, 1);
    const auto covered = std::count(det.lane_mask.cells.begin(), det.lane_mask.cells.end(), std::uint8_t{1});
    det.strip_area = static_cast<int>(pr.area);
    det.confidence = std::clamp(static_cast<double>(pr.area) / (static_cast<double>(covered) * p.strip_fill_ratio), 0.0, 1.0);
    det.centroid_u = (a.cu * a.pixels.size() + b.cu * b.pixels.size()) / static_cast<double>(pr.area);
    det.centroid_v = (a.cv * a.pixels.size() + b.cv * b.pixels.size()) / static_cast<double>(pr.area);
    out.push_back(std::move(det));
  }
  return out;
}

std::optional<LaneDetection> detect_lane(const LabelMask& mask, const VisionParams& p) {
  auto lanes = detect_lanes(mask, p);
  if (lanes.empty()) return std::nullopt;
  return std::move(lanes.front());
}

MarkerScan detect_markers(const Frame& f, const LabelMask& mask, const VisionParams& p) {
  MarkerScan scan;
  auto blobs = components(mask, [](Label l) { return l == Label::MarkerBlack; });
  for (auto& blob : blobs) {
    std::vector<P2> pts;
    add_row_extremes(blob.pixels, pts);
    std::vector<P2> hull = convex_hull(std::move(pts));
    if (hull.size() < 4 || std::abs(polygon_area(hull)) < p.min_marker_area) continue;

    double cx = 0.0;
    double cy = 0.0;
    for (const auto& [u, v] : blob.pixels) {
      cx += u;
      cy += v;
    }
    cx /= static_cast<double>(blob.pixels.size());
    cy /= static_cast<double>(blob.pixels.size());

    // Quad corners: farthest hull point, the point farthest from it, then the
    // extreme points on either side of that diagonal.
    auto far_from = [&hull](P2 o) {
      std::size_t best = 0;
      double bd = -1.0;
      for (std::size_t i = 0; i < hull.size(); ++i) {
        const double d = std::hypot(hull[i].x - o.x, hull[i].y - o.y);
        if (d > bd) {
          bd = d;
          best = i;
        }
      }
      return hull[best];
    };
    const P2 c0 = far_from({cx, cy});
    const P2 c2 = far_from(c0);
    P2 c1 = c0;
    P2 c3 = c0;
    double s_max = 0.0;
    double s_min = 0.0;
    for (const P2& h : hull) {
      const double s = cross3(c0, c2, h);
      if (s > s_max) {
        s_max = s;
        c1 = h;
      }
      if (s < s_min) {
        s_min = s;
        c3 = h;
      }
    }
    std::vector<P2> quad{c0, c1, c2, c3};
    // Visually clockwise in image coordinates means positive shoelace area.
    if (polygon_area(quad) < 0) std::swap(quad[1], quad[3]);
    const double qx = (quad[0].x + quad[1].x + quad[2].x + quad[3].x) / 4.0;
    const double qy = (quad[0].y + quad[1].y + quad[2].y + quad[3].y) / 4.0;
    for (P2& q : quad) {
      const double len = std::hypot(q.x - qx, q.y - qy);
      if (len > 0) {
        q.x += (q.x - qx) / len * 0.7;
        q.y += (q.y - qy) / len * 0.7;
      }
    }

    MarkerGrid grid;
    for (int r = 0; r < kMarkerCells; ++r) {
      for (int c = 0; c < kMarkerCells; ++c) {
        const double s = (c + 0.5) / kMarkerCells;
        const double t = (r + 0.5) / kMarkerCells;
        const double x = (1 - s) * (1 - t) * quad[0].x + s * (1 - t) * quad[1].x + s * t * quad[2].x + (1 - s) * t * quad[3].x;
        const double y = (1 - s) * (1 - t) * quad[0].y + s * (1 - t) * quad[1].y + s * t * quad[2].y + (1 - s) * t * quad[3].y;
        const int u = std::clamp(static_cast<int>(std::lround(x)), 0, f.width - 1);
        const int v = std::clamp(static_cast<int>(std::lround(y)), 0, f.height - 1);
        const Rgb px = f.at(u, v);
        grid.set(r, c, (px.r + px.g + px.b) < 3 * 128);
      }
    }
    auto payload = decode_any_rotation(grid);
    if (!payload) {
      ++scan.rejected;
      continue;
    }
    const bool dup = std::any_of(scan.markers.begin(), scan.markers.end(),
                                 [&payload](const MarkerSighting& m) { return m.payload.kind == payload->kind && m.payload.id == payload->id; });
    if (!dup) scan.markers.push_back({*payload, cx, cy});
  }
  return scan;
}

bool within_dilated(const PixelMask& mask, int u, int v, double radius) {
  const int r = static_cast<int>(std::floor(radius));
  const double r2 = radius * radius;
  for (int dv = -r; dv <= r; ++dv) {
    for (int du = -r; du <= r; ++du) {
      if (du * du + dv * dv > r2) continue;
      const int x = u + du;
      const int y = v + dv;
      if (mask.in_bounds(x, y) && mask.at(x, y) != 0) return true;
    }
  }
  return false;
}

Frame label_overlay(const LabelMask& mask, const PixelMask* lane) {
  Frame out(mask.width, mask.height);
  for (int v = 0; v < mask.height; ++v) {
    for (int u = 0; u < mask.width; ++u) {
      const Label l = mask.at(u, v);
      Rgb c{0, 0, 64};  // background: dark navy
      if (auto col = color_of(l)) {
        c = palette_rgb(*col);
      } else if (l == Label::MarkerBlack) {
        c = {0, 0, 0};
      } else if (l == Label::MarkerWhite) {
        c = {255, 255, 255};
      } else if (lane != nullptr && lane->at(u, v) != 0) {
        c = {190, 190, 190};
      }
      out.set(u, v, c);
    }
  }
  return out;
}

}  // namespace arianna
