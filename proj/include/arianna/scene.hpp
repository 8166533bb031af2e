#pragma once

// Synthetic world: deployment generator, floor rasteriser, and the phone
// camera (pinhole over the ground plane).

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "arianna/deployment_io.hpp"
#include "arianna/marker.hpp"
#include "arianna/pathgraph.hpp"

namespace arianna {

inline constexpr Rgb kFloorGray{128, 128, 128};
inline constexpr Rgb kHorizonColor{40, 40, 40};
inline constexpr Rgb kMarkerBlack{0, 0, 0};
inline constexpr Rgb kMarkerWhite{255, 255, 255};

struct StripGeometry {
  double strip_width{0.05};
  double strip_gap{0.05};

  double lane_half_width() const { return strip_gap / 2.0 + strip_width; }
  /// Lateral offset of each strip's centre line from the lane axis.
  double strip_center_offset() const { return (strip_gap + strip_width) / 2.0; }
};

struct WorldParams {
  std::uint64_t seed{1};
  int min_nodes{6};
  int max_nodes{12};
  double floor_width{20.0};
  double floor_height{20.0};
  StripGeometry strips;
  double marker_size{0.20};
  double extra_edge_probability{0.35};
  int max_attempts{200};
};

Json world_params_to_json(const WorldParams& p);
/// Missing keys keep their defaults. Throws FormatError on bad types or values.
WorldParams world_params_from_json(const Json& j);

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Deterministic in params.seed. Throws GenerationError when no valid layout is
/// found within params.max_attempts (typically too many nodes for the floor).
Deployment generate_world(const WorldParams& params);

// --- floor raster ---

struct RasterOptions {
  double resolution{100.0};  // cells per metre
  StripGeometry strips;
  /// Arc-length spacing of edge markers; 0 disables them.
  double edge_marker_spacing{0.0};
  double edge_marker_offset{0.3};
  double edge_marker_size{0.20};
};

class FloorRaster {
 public:
  FloorRaster(Bounds bounds, double resolution);

  int cols() const { return cols_; }
  int rows() const { return rows_; }
  double resolution() const { return resolution_; }
  const Bounds& bounds() const { return bounds_; }

  Rgb at(int col, int row) const { return cells_[index(col, row)]; }
  void set(int col, int row, Rgb c) { cells_[index(col, row)] = c; }
  /// Cell containing p, or nullopt outside the raster.
  std::optional<std::pair<int, int>> cell_of(Vec2 p) const;
  Vec2 cell_center(int col, int row) const;
  /// Nearest-neighbour lookup; nullopt outside the raster.
  std::optional<Rgb> sample(Vec2 p) const;

  std::span<const Rgb> cells() const { return cells_; }

 private:
  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(col);
  }

  Bounds bounds_;
  double resolution_;
  int cols_;
  int rows_;
  std::vector<Rgb> cells_;  // row 0 at bounds.min.y
};

FloorRaster rasterize_floor(const Deployment& d, const RasterOptions& opts = {});

/// Draws a marker grid as an axis-aligned square centred at `center`, grid row 0 to the north.
void draw_marker(FloorRaster& raster, Vec2 center, double size, const MarkerGrid& grid);

// --- camera ---

struct Pose {
  Vec2 position;
  double body_heading{0.0};      // radians, counter-clockwise from +x
  double phone_yaw_offset{0.0};  // radians relative to the body; positive = left
  double camera_height{1.3};
  double camera_pitch{1.0472};   // radians below horizontal

  double camera_yaw() const { return body_heading + phone_yaw_offset; }
};

inline constexpr double kMaxPhoneYaw = 1.22;

struct CameraIntrinsics {
  int width{320};
  int height{240};
  double hfov{1.0472};

  double focal_px() const;
};

struct Frame {
  int width{0};
  int height{0};
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

  Frame() = default;
  Frame(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3) {}

  Rgb at(int u, int v) const {
    const std::size_t i = (static_cast<std::size_t>(v) * static_cast<std::size_t>(width) + static_cast<std::size_t>(u)) * 3;
    return {rgb[i], rgb[i + 1], rgb[i + 2]};
  }
  void set(int u, int v, Rgb c) {
    const std::size_t i = (static_cast<std::size_t>(v) * static_cast<std::size_t>(width) + static_cast<std::size_t>(u)) * 3;
    rgb[i] = c.r;
    rgb[i + 1] = c.g;
    rgb[i + 2] = c.b;
  }
  friend bool operator==(const Frame&, const Frame&) = default;
};

/// Ground point seen through continuous pixel coordinates (u, v); the principal
/// point is (width/2, height/2) and pixel (i, j) is sampled at (i + 0.5, j + 0.5).
/// nullopt when the ray does not reach the ground in front of the camera.
std::optional<Vec2> project_ground(const Pose& pose, const CameraIntrinsics& k, double u, double v);

/// Inverse of project_ground for a floor point; nullopt when behind the camera.
std::optional<std::pair<double, double>> project_to_image(const Pose& pose, const CameraIntrinsics& k, Vec2 ground);

struct RenderNoise {
  double sigma{0.0};  // per-channel Gaussian, 8-bit units
  std::uint64_t seed{0};
};

Frame render_frame(const FloorRaster& raster, const Pose& pose, const CameraIntrinsics& k, const RenderNoise& noise = {});

}  // namespace arianna
