#pragma once

// Sensing half of the visual-to-haptic transducer: colour segmentation, strip
// pairing into lanes, and floor-marker detection.

#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "arianna/marker.hpp"
#include "arianna/pathgraph.hpp"
#include "arianna/scene.hpp"

namespace arianna {

enum class Label : std::uint8_t {
  Background = 0,
  Red,
  Green,
  Blue,
  Yellow,
  Magenta,
  Cyan,
  MarkerBlack,
  MarkerWhite,
};

constexpr Label label_of(ColorId c) { return static_cast<Label>(static_cast<std::uint8_t>(c) + 1); }
constexpr std::optional<ColorId> color_of(Label l) {
  if (l >= Label::Red && l <= Label::Cyan) return static_cast<ColorId>(static_cast<std::uint8_t>(l) - 1);
  return std::nullopt;
}

template <typename T>
struct Grid {
  int width{0};
  int height{0};
  std::vector<T> cells;

  Grid() = default;
  Grid(int w, int h, T fill = T{})
      : width(w), height(h), cells(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

  T at(int u, int v) const { return cells[index(u, v)]; }
  void set(int u, int v, T x) { cells[index(u, v)] = x; }
  bool in_bounds(int u, int v) const { return u >= 0 && v >= 0 && u < width && v < height; }
  std::size_t index(int u, int v) const {
    return static_cast<std::size_t>(v) * static_cast<std::size_t>(width) + static_cast<std::size_t>(u);
  }
  friend bool operator==(const Grid&, const Grid&) = default;
};

using LabelMask = Grid<Label>;
using PixelMask = Grid<std::uint8_t>;  // 1 = member

struct VisionParams {
  double color_threshold{60.0};
  int min_blob_area{80};
  double max_pair_angle{10.0 * std::numbers::pi / 180.0};
  double min_gap_px{4.0};
  double max_gap_px{60.0};
  double dilation_radius{12.0};
  /// Share of the lane corridor covered by strips (2 strips / (2 strips + gap)).
  double strip_fill_ratio{2.0 / 3.0};
  double min_marker_area{400.0};
};

struct LaneDetection {
  ColorPair ordered_pair;
  double axis_angle{0.0};  // from image up, clockwise positive, in (-pi/2, pi/2]
  PixelMask lane_mask;
  double confidence{0.0};
  int strip_area{0};
  double centroid_u{0.0};
  double centroid_v{0.0};
};

LabelMask segment_colors(const Frame& f, const VisionParams& p = {});

/// Every non-overlapping strip pairing, largest combined strip area first.
std::vector<LaneDetection> detect_lanes(const LabelMask& mask, const VisionParams& p = {});
/// The largest pairing, or nullopt (NoLane).
std::optional<LaneDetection> detect_lane(const LabelMask& mask, const VisionParams& p = {});

struct MarkerSighting {
  MarkerPayload payload;
  double u{0.0};
  double v{0.0};
};

struct MarkerScan {
  std::vector<MarkerSighting> markers;  // unique by (kind, id), ordered by first sighting
  int rejected{0};
};

MarkerScan detect_markers(const Frame& f, const LabelMask& mask, const VisionParams& p = {});

/// True when some member of `mask` lies within `radius` pixels of (u, v).
bool within_dilated(const PixelMask& mask, int u, int v, double radius);

/// False-colour rendering of a label mask with an optional lane overlay
/// (lane pixels that are not strips drawn in light grey).
Frame label_overlay(const LabelMask& mask, const PixelMask* lane = nullptr);

}  // namespace arianna
