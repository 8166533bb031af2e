#pragma once

// The phone app: per-frame state machine from detections and a touch point to
// whole-device vibration, filtered by the edge the server assigned.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "arianna/protocol.hpp"
#include "arianna/scene.hpp"
#include "arianna/vision.hpp"

namespace arianna {

struct TouchPoint {
  double u{0.0};
  double v{0.0};
  friend bool operator==(TouchPoint, TouchPoint) = default;
};

struct HapticState {
  bool active{false};
  double pulse_rate{5.0};  // Hz
  double duty{0.5};
};

/// True iff a lane is detected, its pair matches the assignment (when there is
/// one), and the touch lies within the lane mask dilated by p.dilation_radius.
bool touch_feedback(const std::optional<LaneDetection>& det, const std::optional<ColorPair>& assigned,
                    const std::optional<TouchPoint>& touch, const VisionParams& p);

/// Square wave: on iff active and frac(t * pulse_rate) < duty.
bool vibration_sample(const HapticState& h, double t);

/// Whether any on-phase of the pulse train touches [t, t + window]. This is
/// what a hand holding the phone perceives over one tick.
bool vibration_felt(const HapticState& h, double t, double window);

/// Offline planning from a local deployment copy; same content as the server's answer.
Result<Guidance> offline_next_edge(const Deployment& d, NodeId at, NodeId dest);

enum class NavMode : std::uint8_t { Searching, AtNode, OnEdge, Arrived };
std::string_view nav_mode_name(NavMode m);

struct Assignment {
  EdgeId edge;
  TravelDirection direction{TravelDirection::Forward};
  ColorPair expected;
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct NavEvent {
  enum class Kind : std::uint8_t { MarkerSeen, GuidanceReceived, EdgeAcquired, EdgeLost, Arrived };
  Kind kind;
  std::uint64_t tick{0};
  std::optional<MarkerPayload> marker;  // MarkerSeen
  std::optional<Guidance> guidance;     // GuidanceReceived
  std::optional<EdgeId> edge;           // EdgeAcquired / EdgeLost
};

std::string_view event_kind_name(NavEvent::Kind k);
Json event_to_json(const NavEvent& e);
NavEvent event_from_json(const Json& j);

struct NavConfig {
  VisionParams vision;
  CameraIntrinsics camera;
  double pulse_rate{5.0};
  double duty{0.5};
  double tick_period{0.1};
  int debounce_ticks{3};
  double marker_retrigger{5.0};  // seconds before the same marker id may trigger again
  bool haptics_enabled{true};    // ablation switch
};

struct NavState {
  NavMode mode{NavMode::Searching};
  std::optional<Assignment> assigned;
  std::optional<NodeId> last_node;
  std::optional<SessionId> session;
  std::uint64_t deployment_version_seen{0};
  std::shared_ptr<const Deployment> offline_copy;
  std::optional<NodeId> destination;  // used in offline mode

  // Debounce bookkeeping.
  int match_streak{0};
  int miss_streak{0};
  bool acquired{false};
  std::optional<MarkerPayload> last_marker;
  double last_marker_time{0.0};
  std::optional<std::uint16_t> last_edge_marker;
};

struct ResolveRequest {
  QrId qr;
  SessionId session;
  std::optional<EdgeId> edge_hint;
};

struct DetectionSummary {
  ColorPair pair;
  double confidence{0.0};
  double axis_angle{0.0};
  bool matches_assignment{false};
};

struct StepOutput {
  HapticState haptic;
  bool feedback{false};   // touch_feedback this tick
  bool vibration{false};  // vibration_felt over this tick
  std::optional<DetectionSummary> detection;
  std::vector<MarkerPayload> markers;
  std::vector<NavEvent> events;
  std::optional<ResolveRequest> request;
};

/// Runs vision on `frame`, updates debounce state, decides haptics, and emits
/// at most one outbound resolve request. In offline mode the resolution
/// happens inline and GuidanceReceived is emitted directly.
StepOutput step(NavState& state, const Frame& frame, const std::optional<TouchPoint>& touch, std::uint64_t tick,
                double t, const NavConfig& cfg);

struct ScanOutput {
  std::vector<NavEvent> events;
  std::optional<ResolveRequest> request;
};

/// Treats `payload` as scanned now, bypassing the re-trigger rule: emits
/// MarkerSeen and either a request or, offline, the inline guidance. step()
/// calls this for decoded node markers; a harness can call it for the scan a
/// user makes at the starting point.
ScanOutput scan_marker(NavState& state, const MarkerPayload& payload, std::uint64_t tick, double t);

/// Merges the server's answer to the request step() produced at `tick`.
/// Unavailable keeps the assignment, emits nothing, and clears the marker
/// debounce so the next sighting retries. NoRoute keeps the previous guidance.
std::vector<NavEvent> receive(NavState& state, const ResolveRequest& req, const Result<Guidance>& response,
                              std::uint64_t tick, double t);

}  // namespace arianna
