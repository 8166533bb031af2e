#pragma once

// Closed-loop simulation: a cane-sweep walker steered only by vibration,
// the per-tick loop wiring scene -> vision -> navigator -> path server, JSONL
// traces, and metrics recomputed from traces.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "arianna/navigator.hpp"
#include "arianna/pathserver.hpp"
#include "arianna/rng.hpp"
#include "arianna/scene.hpp"

namespace arianna {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class TouchMode : std::uint8_t { FixedCenter, FingerScan };

struct AgentParams {
  double tick_rate{10.0};                     // Hz
  double walking_speed{0.5};                  // m/s
  double sweep_amplitude{0.6981317007977318};  // 40 degrees
  double sweep_frequency{1.0};                // Hz
  double steering_gain{0.6};
  TouchMode touch_mode{TouchMode::FixedCenter};
  double finger_scan_rate{2.0};  // traversals of the screen width per second
  bool search{true};             // stop and turn in place after a long silence
  double search_delay{2.0};      // seconds without vibration before stopping to search
  double search_turn_rate{0.5235987755982988};  // rad/s while searching in place
  double heading_noise{0.0};  // gait veer, rad per sqrt(second) of walking

  double dt() const { return 1.0 / tick_rate; }
  /// Throws ConfigError unless all values are positive and amplitude <= 70 degrees.
  void validate() const;
};

Json agent_params_to_json(const AgentParams& p);
/// Missing keys keep their defaults; throws ConfigError.
AgentParams agent_params_from_json(const Json& j);

/// Phone yaw of the sweeping hand: triangle wave starting at 0 and rising to
/// +amplitude (left) after a quarter period.
double sweep_angle(const AgentParams& p, double t);

/// Touch point the walker holds at `tick`: screen centre, or the scanning finger.
TouchPoint agent_touch(const AgentParams& p, std::uint64_t tick, const CameraIntrinsics& k);

/// Horizontal bearing of a screen column relative to the optical axis, positive left.
double touch_bearing(const TouchPoint& touch, const CameraIntrinsics& k);

struct AgentState {
  Pose pose;  // phone_yaw_offset is the yaw used at the current tick
  bool prev_vibration{false};
  int silent_ticks{0};
  double search_side{1.0};  // +1 turns left, -1 right
  bool searching{false};
  double search_turned{0.0};  // rotation so far in the current search
  Rng gait{0};
};

struct AgentAction {
  bool onset{false};
  double onset_angle{0.0};
  double correction{0.0};   // heading change from the steering law
  double search_turn{0.0};  // heading change from turning in place
  bool walked{false};
};

/// Advances the walker after it felt `vibration` during `tick`. On an onset at
/// hand angle phi the heading moves by gain * phi; after search_delay of
/// silence it stops and turns toward the side of the last onset until the
/// next one; a full turn without an onset sends it walking straight again for
/// another search_delay. Sets the phone yaw for tick + 1.
AgentAction agent_step(AgentState& s, bool vibration, const AgentParams& p, std::uint64_t tick, const CameraIntrinsics& k);

struct ScheduledPatch {
  double at{0.0};  // simulated seconds
  AdminPatch patch;
};

struct SimConfig {
  Deployment deployment;
  NodeId from;
  NodeId to;
  AgentParams agent;
  NavConfig nav;
  RasterOptions raster;
  std::uint64_t seed{1};
  double noise_sigma{0.0};
  double timeout{120.0};
  double start_offset{0.0};         // metres left of the first route edge
  double start_heading_error{0.0};  // radians, counter-clockwise
  bool offline{false};
  std::vector<ScheduledPatch> patches;
};

/// Throws ConfigError. Called by Simulation before tick 0.
void validate_config(const SimConfig& c);

/// Everything except the deployment and the patch bodies.
Json sim_config_to_json(const SimConfig& c);

struct RoundTrip {
  std::string op;  // create_session | resolve_qr | apply_patch
  Json request;
  int status{200};
  Json response;
};

struct TraceRecord {
  std::uint64_t tick{0};
  double t{0.0};
  Pose pose;
  double sweep{0.0};
  std::optional<TouchPoint> touch;
  bool vibration{false};
  bool haptic{false};
  std::optional<DetectionSummary> detection;
  std::vector<NavEvent> events;
  std::vector<RoundTrip> round_trips;
  NavMode mode{NavMode::Searching};
  std::optional<EdgeId> assigned;
  double steer{0.0};
  double search_turn{0.0};
};

Json trace_record_to_json(const TraceRecord& r);
Json pose_to_json(const Pose& p);

struct RunMetrics {
  bool reached{false};
  std::optional<double> time_to_goal;
  double mean_cross_track{0.0};
  double max_cross_track{0.0};
  double duty_cycle{0.0};
  int marker_scans{0};
  int reroutes{0};
  std::uint64_t ticks{0};
  friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

Json metrics_to_json(const RunMetrics& m);

/// Recomputes metrics from a JSONL trace (header line plus one record per
/// tick). Throws ParseError naming the 1-based line.
RunMetrics eval_trace(std::istream& in);
RunMetrics eval_trace_text(const std::string& text);

/// A user pose and hand the UI drives directly instead of the agent.
struct ManualInput {
  int turn{0};  // -1 right, 0, +1 left
  bool step{false};
  std::optional<TouchPoint> touch;
  std::optional<double> sweep_override;  // phone yaw; auto-sweep when absent
};

/// The tick engine shared by run_sim and the UI channel.
class Simulation {
 public:
  /// `client` may be null only in offline mode. Throws ConfigError.
  Simulation(SimConfig config, PathClient* client);

  std::string header_line() const;

  /// One tick driven by the agent.
  TraceRecord tick_agent();
  /// One tick driven by a human.
  TraceRecord tick_manual(const ManualInput& in);

  /// Requests made between ticks; their round trips go into the next record.
  Result<SessionId> set_destination(NodeId node);
  Result<std::uint64_t> admin_patch(const AdminPatch& patch);

  bool arrived() const { return arrived_; }
  std::uint64_t next_tick() const { return tick_; }
  double time() const { return static_cast<double>(tick_) / config_.agent.tick_rate; }
  const Pose& pose() const { return agent_.pose; }
  const Frame& last_frame() const { return frame_; }
  std::uint64_t frame_id() const { return frame_id_; }
  const std::optional<Guidance>& last_guidance() const { return last_guidance_; }
  const Deployment& world() const { return world_; }
  const NavState& nav() const { return nav_; }
  const SimConfig& config() const { return config_; }

  static constexpr double kManualTurnRate = 0.7853981633974483;  // rad/s

 private:
  TraceRecord sense(double yaw, const std::optional<TouchPoint>& touch);
  void resolve(const ResolveRequest& req, std::uint64_t tick, double t, TraceRecord& rec);
  void absorb(const std::vector<NavEvent>& events, TraceRecord& rec);
  void apply_local(const AdminPatch& patch);

  SimConfig config_;
  PathClient* client_;
  Deployment world_;
  FloorRaster raster_;
  NavState nav_;
  AgentState agent_;
  std::uint64_t tick_{0};
  bool arrived_{false};
  Frame frame_;
  std::uint64_t frame_id_{0};
  std::optional<Guidance> last_guidance_;
  std::vector<RoundTrip> pending_;
  std::vector<bool> patch_done_;
};

struct SimResult {
  RunMetrics metrics;
  std::string trace;  // JSONL
};

/// Runs until Arrived or timeout. With a null client and not offline, an
/// in-process PathServer over config.deployment is used.
SimResult run_sim(const SimConfig& config, PathClient* client = nullptr);

/// Fraction of steering corrections with a vibration onset at the same or the
/// previous tick, from a parsed trace. 1 when there are no corrections.
double haptic_causality(const std::string& trace);

// --- demo scenario ---

struct DemoScenario {
  SimConfig config;
  EdgeId branch;          // the direct T-junction branch to the destination
  AdminPatch close_branch;  // disables it
};

/// U-shaped corridor with a T-junction branch: entrance S -> junction J,
/// then either the branch J -> D or around the U via A and B.
DemoScenario demo_scenario(std::optional<double> patch_at = std::nullopt);

}  // namespace arianna
