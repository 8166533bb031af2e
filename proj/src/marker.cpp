#include "arianna/marker.hpp"

#include <algorithm>
#include <cmath>

namespace arianna {

namespace {

constexpr int kInterior = kMarkerCells - 2;
constexpr int kSyncBits = 3;
constexpr bool kSync[kSyncBits] = {true, false, true};

constexpr std::array<std::uint8_t, 256> make_crc_table() {
  std::array<std::uint8_t, 256> table{};
  for (int i = 0; i < 256; ++i) {
    auto c = static_cast<std::uint8_t>(i);
    for (int b = 0; b < 8; ++b) {
      c = static_cast<std::uint8_t>((c & 0x80) ? (c << 1) ^ 0x07 : (c << 1));
    }
    table[static_cast<std::size_t>(i)] = c;
  }
  return table;
}

constexpr auto kCrcTable = make_crc_table();

bool interior_bit(const MarkerGrid& g, int index) { return g.at(1 + index / kInterior, 1 + index % kInterior); }
void set_interior_bit(MarkerGrid& g, int index, bool v) { g.set(1 + index / kInterior, 1 + index % kInterior, v); }

std::uint32_t read_bits(const MarkerGrid& g, int first, int count) {
  std::uint32_t v = 0;
  for (int i = 0; i < count; ++i) {
    v = (v << 1) | (interior_bit(g, first + i) ? 1U : 0U);
  }
  return v;
}

void write_bits(MarkerGrid& g, int first, int count, std::uint32_t v) {
  for (int i = 0; i < count; ++i) {
    set_interior_bit(g, first + i, ((v >> (count - 1 - i)) & 1U) != 0);
  }
}

std::uint8_t payload_crc(MarkerKind kind, std::uint16_t id, std::uint8_t aux) {
  const std::uint8_t bytes[4] = {static_cast<std::uint8_t>(kind), static_cast<std::uint8_t>(id >> 8),
                                 static_cast<std::uint8_t>(id & 0xff), aux};
  return crc8(bytes);
}

}  // namespace

std::uint8_t crc8(std::span<const std::uint8_t> bytes) {
  std::uint8_t crc = 0x00;
  for (std::uint8_t b : bytes) {
    crc = kCrcTable[static_cast<std::uint8_t>(crc ^ b)];
  }
  return crc;
}

MarkerGrid MarkerGrid::rotated() const {
  MarkerGrid out;
  for (int r = 0; r < kMarkerCells; ++r) {
    for (int c = 0; c < kMarkerCells; ++c) {
      out.set(c, kMarkerCells - 1 - r, at(r, c));
    }
  }
  return out;
}

MarkerGrid encode_marker(MarkerPayload p) {
  MarkerGrid g;
  for (int i = 0; i < kMarkerCells; ++i) {
    g.set(0, i, true);
    g.set(kMarkerCells - 1, i, true);
    g.set(i, 0, true);
    g.set(i, kMarkerCells - 1, true);
  }
  for (int i = 0; i < kSyncBits; ++i) set_interior_bit(g, i, kSync[i]);
  write_bits(g, 3, 1, static_cast<std::uint32_t>(p.kind));
  write_bits(g, 4, 16, p.id);
  write_bits(g, 20, 8, p.aux);
  write_bits(g, 28, 8, payload_crc(p.kind, p.id, p.aux));
  return g;
}

std::optional<MarkerPayload> decode_grid(const MarkerGrid& g) {
  for (int i = 0; i < kMarkerCells; ++i) {
    if (!g.at(0, i) || !g.at(kMarkerCells - 1, i) || !g.at(i, 0) || !g.at(i, kMarkerCells - 1)) {
      return std::nullopt;
    }
  }
  for (int i = 0; i < kSyncBits; ++i) {
    if (interior_bit(g, i) != kSync[i]) return std::nullopt;
  }
  MarkerPayload p;
  p.kind = read_bits(g, 3, 1) != 0 ? MarkerKind::Edge : MarkerKind::Node;
  p.id = static_cast<std::uint16_t>(read_bits(g, 4, 16));
  p.aux = static_cast<std::uint8_t>(read_bits(g, 20, 8));
  if (read_bits(g, 28, 8) != payload_crc(p.kind, p.id, p.aux)) {
    return std::nullopt;
  }
  if (p.kind == MarkerKind::Node && p.aux != 0) {
    return std::nullopt;
  }
  return p;
}

std::optional<MarkerPayload> decode_any_rotation(const MarkerGrid& grid) {
  std::optional<MarkerPayload> found;
  MarkerGrid g = grid;
  for (int turn = 0; turn < 4; ++turn) {
    if (auto p = decode_grid(g)) {
      // Two orientations that both validate with different payloads cannot be
      // told apart; a wrong id would misroute the walker, so read nothing.
      if (found && !(*found == *p)) return std::nullopt;
      found = p;
    }
    g = g.rotated();
  }
  return found;
}

std::uint8_t distance_to_aux(double meters) {
  const double dm = std::floor(std::max(0.0, meters) * 10.0);
  return static_cast<std::uint8_t>(std::min(dm, 255.0));
}

}  // namespace arianna
