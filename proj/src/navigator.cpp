#include "arianna/navigator.hpp"

#include <algorithm>
#include <cmath>

namespace arianna {

bool touch_feedback(const std::optional<LaneDetection>& det, const std::optional<ColorPair>& assigned,
                    const std::optional<TouchPoint>& touch, const VisionParams& p) {
  if (!det || !touch) return false;
  if (assigned && det->ordered_pair != *assigned) return false;
  const int u = static_cast<int>(std::floor(touch->u));
  const int v = static_cast<int>(std::floor(touch->v));
  return within_dilated(det->lane_mask, u, v, p.dilation_radius);
}

bool vibration_sample(const HapticState& h, double t) {
  if (!h.active) return false;
  const double x = t * h.pulse_rate;
  return x - std::floor(x) < h.duty;
}

bool vibration_felt(const HapticState& h, double t, double window) {
  if (!h.active) return false;
  if (vibration_sample(h, t)) return true;
  // Off now: felt iff the next on-phase starts inside the window. The window
  // is closed so that tick-aligned pulse edges are not lost to rounding.
  const double next_on = std::floor(t * h.pulse_rate) + 1.0;
  return next_on / h.pulse_rate <= t + window + 1e-9;
}

Result<Guidance> offline_next_edge(const Deployment& d, NodeId at, NodeId dest) { return plan_guidance(d, at, dest); }

std::string_view nav_mode_name(NavMode m) {
  switch (m) {
    case NavMode::Searching: return "searching";
    case NavMode::AtNode: return "at_node";
    case NavMode::OnEdge: return "on_edge";
    case NavMode::Arrived: return "arrived";
  }
  return "?";
}

std::string_view event_kind_name(NavEvent::Kind k) {
  switch (k) {
    case NavEvent::Kind::MarkerSeen: return "MarkerSeen";
    case NavEvent::Kind::GuidanceReceived: return "GuidanceReceived";
    case NavEvent::Kind::EdgeAcquired: return "EdgeAcquired";
    case NavEvent::Kind::EdgeLost: return "EdgeLost";
    case NavEvent::Kind::Arrived: return "Arrived";
  }
  return "?";
}

Json event_to_json(const NavEvent& e) {
  Json j{{"kind", event_kind_name(e.kind)}, {"tick", e.tick}};
  if (e.marker) {
    j["marker"] = Json{{"kind", e.marker->kind == MarkerKind::Node ? "node" : "edge"}, {"id", e.marker->id}, {"aux", e.marker->aux}};
  }
  if (e.guidance) j["guidance"] = guidance_to_json(*e.guidance);
  if (e.edge) j["edge"] = e.edge->value;
  return j;
}

NavEvent event_from_json(const Json& j) {
  try {
    NavEvent e{};
    const std::string kind = j.at("kind").get<std::string>();
    bool known = false;
    for (auto k : {NavEvent::Kind::MarkerSeen, NavEvent::Kind::GuidanceReceived, NavEvent::Kind::EdgeAcquired,
                   NavEvent::Kind::EdgeLost, NavEvent::Kind::Arrived}) {
      if (event_kind_name(k) == kind) {
        e.kind = k;
        known = true;
      }
    }
    if (!known) throw FormatError("unknown event kind '" + kind + "'");
    e.tick = j.at("tick").get<std::uint64_t>();
    if (j.contains("marker")) {
      const Json& m = j["marker"];
      e.marker = MarkerPayload{m.at("kind").get<std::string>() == "edge" ? MarkerKind::Edge : MarkerKind::Node,
                               m.at("id").get<std::uint16_t>(), m.at("aux").get<std::uint8_t>()};
    }
    if (j.contains("guidance")) e.guidance = guidance_from_json(j["guidance"]);
    if (j.contains("edge")) e.edge = EdgeId{j["edge"].get<std::uint32_t>()};
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("bad event: ") + ex.what());
  }
}

namespace {

std::vector<NavEvent> apply_guidance(NavState& s, const Guidance& g, std::uint64_t tick) {
  std::vector<NavEvent> events;
  events.push_back({NavEvent::Kind::GuidanceReceived, tick, std::nullopt, g, std::nullopt});
  s.last_node = g.node;
  s.deployment_version_seen = g.deployment_version;
  if (g.destination_reached) {
    s.mode = NavMode::Arrived;
    s.assigned.reset();
    s.acquired = false;
    s.match_streak = 0;
    s.miss_streak = 0;
    events.push_back({NavEvent::Kind::Arrived, tick, std::nullopt, std::nullopt, std::nullopt});
    return events;
  }
  const Assignment a{g.next->edge, g.next->direction, g.next->expected_pair};
  if (!s.assigned || !(*s.assigned == a)) {
    s.assigned = a;
    s.acquired = false;
    s.match_streak = 0;
    s.miss_streak = 0;
    s.mode = NavMode::AtNode;
  }
  return events;
}

}  // namespace

StepOutput step(NavState& state, const Frame& frame, const std::optional<TouchPoint>& touch, std::uint64_t tick,
                double t, const NavConfig& cfg) {
  StepOutput out;
  const LabelMask mask = segment_colors(frame, cfg.vision);
  auto lanes = detect_lanes(mask, cfg.vision);

  std::optional<LaneDetection> chosen;
  if (!lanes.empty()) {
    auto it = lanes.begin();
    if (state.assigned) {
      const auto match = std::find_if(lanes.begin(), lanes.end(),
                                      [&](const LaneDetection& l) { return l.ordered_pair == state.assigned->expected; });
      if (match != lanes.end()) it = match;
    }
    chosen = std::move(*it);
  }

  std::optional<ColorPair> expected;
  if (state.assigned) expected = state.assigned->expected;
  out.feedback = cfg.haptics_enabled && touch_feedback(chosen, expected, touch, cfg.vision);
  out.haptic = {out.feedback, cfg.pulse_rate, cfg.duty};
  out.vibration = vibration_felt(out.haptic, t, cfg.tick_period);

  const bool match = state.assigned && chosen && chosen->ordered_pair == state.assigned->expected;
  if (chosen) out.detection = DetectionSummary{chosen->ordered_pair, chosen->confidence, chosen->axis_angle, match};

  if (state.mode != NavMode::Arrived) {
    if (match) {
      ++state.match_streak;
      state.miss_streak = 0;
    } else {
      ++state.miss_streak;
      state.match_streak = 0;
    }
    if (!state.acquired && state.match_streak >= cfg.debounce_ticks) {
      state.acquired = true;
      state.mode = NavMode::OnEdge;
      out.events.push_back({NavEvent::Kind::EdgeAcquired, tick, std::nullopt, std::nullopt, state.assigned->edge});
    } else if (state.acquired && state.miss_streak >= cfg.debounce_ticks) {
      state.acquired = false;
      state.mode = NavMode::Searching;
      out.events.push_back({NavEvent::Kind::EdgeLost, tick, std::nullopt, std::nullopt,
                            state.assigned ? std::optional<EdgeId>(state.assigned->edge) : std::nullopt});
    }
  }

  const MarkerScan scan = detect_markers(frame, mask, cfg.vision);
  bool node_handled = false;
  for (const MarkerSighting& m : scan.markers) {
    out.markers.push_back(m.payload);
    if (m.payload.kind == MarkerKind::Edge) {
      if (state.last_edge_marker != m.payload.id) {
        state.last_edge_marker = m.payload.id;
        out.events.push_back({NavEvent::Kind::MarkerSeen, tick, m.payload, std::nullopt, std::nullopt});
      }
      continue;
    }
    if (node_handled) continue;
    const bool retrigger = !state.last_marker || !(*state.last_marker == m.payload) ||
                           t - state.last_marker_time >= cfg.marker_retrigger - 1e-9;
    if (!retrigger) continue;
    node_handled = true;
    auto scanned = scan_marker(state, m.payload, tick, t);
    out.events.insert(out.events.end(), scanned.events.begin(), scanned.events.end());
    out.request = scanned.request;
  }
  return out;
}

ScanOutput scan_marker(NavState& state, const MarkerPayload& payload, std::uint64_t tick, double t) {
  ScanOutput out;
  state.last_marker = payload;
  state.last_marker_time = t;
  out.events.push_back({NavEvent::Kind::MarkerSeen, tick, payload, std::nullopt, std::nullopt});
  if (state.offline_copy) {
    const QrAnchor* a = state.offline_copy->find_anchor(QrId{payload.id});
    if (a == nullptr || !state.destination) return out;
    const auto g = offline_next_edge(*state.offline_copy, a->node, *state.destination);
    if (const auto* guidance = std::get_if<Guidance>(&g)) {
      auto ev = apply_guidance(state, *guidance, tick);
      out.events.insert(out.events.end(), ev.begin(), ev.end());
    }
  } else if (state.session) {
    ResolveRequest req{QrId{payload.id}, *state.session, std::nullopt};
    if (state.last_edge_marker) req.edge_hint = EdgeId{*state.last_edge_marker};
    out.request = req;
  }
  return out;
}

std::vector<NavEvent> receive(NavState& state, const ResolveRequest& req, const Result<Guidance>& response,
                              std::uint64_t tick, double /*t*/) {
  if (const auto* g = std::get_if<Guidance>(&response)) return apply_guidance(state, *g, tick);
  const Failure& f = std::get<Failure>(response);
  if (f.code == ServerError::Unavailable && state.last_marker && state.last_marker->id == req.qr.value) {
    state.last_marker.reset();
  }
  return {};
}

}  // namespace arianna
