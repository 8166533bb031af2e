#pragma once

// Floor fiducial standing in for a QR code: an 8x8 black/white cell grid with
// a solid black ring and a 36-bit CRC-protected interior.
//
// Interior bits, row-major over the inner 6x6 cells (true = black):
//   [0..2]   sync 1,0,1
//   [3]      kind (0 node, 1 edge)
//   [4..19]  id, big-endian
//   [20..27] aux, big-endian
//   [28..35] CRC-8 (poly 0x07, init 0x00) over bytes {kind, id_hi, id_lo, aux}

#include <array>
#include <cstdint>
#include <optional>
#include <span>

namespace arianna {

enum class MarkerKind : std::uint8_t { Node = 0, Edge = 1 };

struct MarkerPayload {
  MarkerKind kind{MarkerKind::Node};
  std::uint16_t id{0};
  std::uint8_t aux{0};  // node: 0; edge: decimetres from the edge's from-node, saturating
  friend constexpr bool operator==(MarkerPayload, MarkerPayload) = default;
};

inline constexpr int kMarkerCells = 8;

struct MarkerGrid {
  std::array<bool, kMarkerCells * kMarkerCells> cells{};  // row-major, true = black

  bool at(int row, int col) const { return cells[static_cast<std::size_t>(row * kMarkerCells + col)]; }
  void set(int row, int col, bool black) { cells[static_cast<std::size_t>(row * kMarkerCells + col)] = black; }
  /// Quarter-turn clockwise.
  MarkerGrid rotated() const;
  friend bool operator==(const MarkerGrid&, const MarkerGrid&) = default;
};

std::uint8_t crc8(std::span<const std::uint8_t> bytes);

MarkerGrid encode_marker(MarkerPayload payload);
/// Decodes a grid already in canonical orientation. nullopt on border, sync or
/// CRC failure, or a node payload with non-zero aux.
std::optional<MarkerPayload> decode_grid(const MarkerGrid& grid);
/// Tries all four quarter turns. nullopt when none validates or when two
/// orientations validate with different payloads.
std::optional<MarkerPayload> decode_any_rotation(const MarkerGrid& grid);

/// Decimetre distance to the from-node, saturating at 255.
std::uint8_t distance_to_aux(double meters);

}  // namespace arianna
