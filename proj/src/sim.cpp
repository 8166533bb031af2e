#include "arianna/sim.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <sstream>

#include "arianna/rng.hpp"

namespace arianna {

ParseError::ParseError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

namespace {

constexpr double kMaxSweep = 70.0 * std::numbers::pi / 180.0;

// 0 -> 1 -> 0 -> -1 -> 0 over one unit of x.
double triangle(double x) {
  const double p = x - std::floor(x);
  if (p < 0.25) return 4.0 * p;
  if (p < 0.75) return 2.0 - 4.0 * p;
  return 4.0 * p - 4.0;
}

std::string_view touch_mode_name(TouchMode m) { return m == TouchMode::FingerScan ? "finger_scan" : "fixed_center"; }

}  // namespace

void AgentParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive");
  };
  positive(tick_rate, "tick_rate");
  positive(walking_speed, "walking_speed");
  positive(sweep_amplitude, "sweep_amplitude");
  positive(sweep_frequency, "sweep_frequency");
  positive(steering_gain, "steering_gain");
  positive(finger_scan_rate, "finger_scan_rate");
  positive(search_delay, "search_delay");
  positive(search_turn_rate, "search_turn_rate");
  if (!(heading_noise >= 0.0) || !std::isfinite(heading_noise)) throw ConfigError("heading_noise must be non-negative");
  if (sweep_amplitude > kMaxSweep + 1e-12) throw ConfigError("sweep_amplitude must not exceed 70 degrees");
}

Json agent_params_to_json(const AgentParams& p) {
  return Json{{"tick_rate", p.tick_rate},
              {"walking_speed", p.walking_speed},
              {"sweep_amplitude", p.sweep_amplitude},
              {"sweep_frequency", p.sweep_frequency},
              {"steering_gain", p.steering_gain},
              {"touch_mode", touch_mode_name(p.touch_mode)},
              {"finger_scan_rate", p.finger_scan_rate},
              {"search", p.search},
              {"search_delay", p.search_delay},
              {"search_turn_rate", p.search_turn_rate},
              {"heading_noise", p.heading_noise}};
}

AgentParams agent_params_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("agent params must be a JSON object");
  AgentParams p;
  try {
    p.tick_rate = j.value("tick_rate", p.tick_rate);
    p.walking_speed = j.value("walking_speed", p.walking_speed);
    p.sweep_amplitude = j.value("sweep_amplitude", p.sweep_amplitude);
    p.sweep_frequency = j.value("sweep_frequency", p.sweep_frequency);
    p.steering_gain = j.value("steering_gain", p.steering_gain);
    p.finger_scan_rate = j.value("finger_scan_rate", p.finger_scan_rate);
    p.search = j.value("search", p.search);
    p.search_delay = j.value("search_delay", p.search_delay);
    p.search_turn_rate = j.value("search_turn_rate", p.search_turn_rate);
    p.heading_noise = j.value("heading_noise", p.heading_noise);
    const std::string mode = j.value("touch_mode", std::string(touch_mode_name(p.touch_mode)));
    if (mode == "fixed_center") {
      p.touch_mode = TouchMode::FixedCenter;
    } else if (mode == "finger_scan") {
      p.touch_mode = TouchMode::FingerScan;
    } else {
      throw ConfigError("unknown touch_mode '" + mode + "'");
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("bad agent params: ") + ex.what());
  }
  p.validate();
  return p;
}

double sweep_angle(const AgentParams& p, double t) { return p.sweep_amplitude * triangle(t * p.sweep_frequency); }

TouchPoint agent_touch(const AgentParams& p, std::uint64_t tick, const CameraIntrinsics& k) {
  const double w = k.width;
  const double h = k.height;
  if (p.touch_mode == TouchMode::FixedCenter) return {w / 2.0, h / 2.0};
  // One traversal of the width per 1/rate seconds, starting at the centre.
  const double t = static_cast<double>(tick) / p.tick_rate;
  const double x = triangle(t * p.finger_scan_rate / 2.0);
  const double u = std::clamp(w / 2.0 + x * w / 2.0, 0.5, w - 0.5);
  return {u, h / 2.0};
}

double touch_bearing(const TouchPoint& touch, const CameraIntrinsics& k) {
  return std::atan((k.width / 2.0 - touch.u) / k.focal_px());
}

AgentAction agent_step(AgentState& s, bool vibration, const AgentParams& p, std::uint64_t tick, const CameraIntrinsics& k) {
  AgentAction a;
  const double dt = p.dt();
  const double hand = p.touch_mode == TouchMode::FingerScan ? touch_bearing(agent_touch(p, tick, k), k) : s.pose.phone_yaw_offset;
  a.onset = vibration && !s.prev_vibration;
  s.prev_vibration = vibration;
  if (a.onset) {
    a.onset_angle = hand;
    a.correction = p.steering_gain * hand;
    s.pose.body_heading = wrap_angle(s.pose.body_heading + a.correction);
    s.searching = false;
    s.search_turned = 0.0;
    s.silent_ticks = 0;
    if (hand != 0.0) s.search_side = hand > 0.0 ? 1.0 : -1.0;
  } else if (vibration) {
    s.silent_ticks = 0;
  } else {
    ++s.silent_ticks;
    if (p.search && s.silent_ticks * dt >= p.search_delay - 1e-9) s.searching = true;
  }

  if (s.searching) {
    a.search_turn = s.search_side * p.search_turn_rate * dt;
    s.pose.body_heading = wrap_angle(s.pose.body_heading + a.search_turn);
    s.search_turned += std::abs(a.search_turn);
    if (s.search_turned >= 2.0 * std::numbers::pi - 1e-9) {
      // Nothing around here: move on and look again further ahead.
      s.searching = false;
      s.search_turned = 0.0;
      s.silent_ticks = 0;
    }
  } else {
    s.pose.position = s.pose.position + heading_vector(s.pose.body_heading) * (p.walking_speed * dt);
    if (p.heading_noise > 0.0) s.pose.body_heading = wrap_angle(s.pose.body_heading + p.heading_noise * std::sqrt(dt) * s.gait.normal());
    a.walked = true;
  }
  const double next_t = static_cast<double>(tick + 1) / p.tick_rate;
  s.pose.phone_yaw_offset = p.touch_mode == TouchMode::FingerScan ? 0.0 : sweep_angle(p, next_t);
  return a;
}

void validate_config(const SimConfig& c) {
  c.agent.validate();
  const auto report = validate_deployment(c.deployment);
  if (!report.ok()) {
    std::string msg = "deployment fails validation";
    for (std::size_t i = 0; i < report.violations.size() && i < 3; ++i) msg += (i == 0 ? ": " : "; ") + report.violations[i].message;
    throw ConfigError(msg);
  }
  if (c.deployment.find_node(c.from) == nullptr) throw ConfigError("unknown start node " + std::to_string(c.from.value));
  if (c.deployment.find_node(c.to) == nullptr) throw ConfigError("unknown destination node " + std::to_string(c.to.value));
  if (!(c.timeout > 0.0)) throw ConfigError("timeout must be positive");
  if (!(c.noise_sigma >= 0.0)) throw ConfigError("noise sigma must be non-negative");
  if (!std::isfinite(c.start_offset) || !std::isfinite(c.start_heading_error)) throw ConfigError("start pose must be finite");
  if (c.nav.pulse_rate < 1.0 || c.nav.pulse_rate > 10.0) throw ConfigError("pulse rate must be within 1..10 Hz");
  if (!(c.nav.duty > 0.0 && c.nav.duty < 1.0)) throw ConfigError("duty must be within (0, 1)");
  if (c.offline && !c.patches.empty()) throw ConfigError("patches need a server; offline runs cannot apply them");
  for (const auto& p : c.patches) {
    if (!(p.at >= 0.0)) throw ConfigError("patch time must be non-negative");
  }
}

Json sim_config_to_json(const SimConfig& c) {
  Json patches = Json::array();
  for (const auto& p : c.patches) patches.push_back(Json{{"at", p.at}, {"ops", p.patch.ops.size()}});
  return Json{{"from", c.from.value},
              {"to", c.to.value},
              {"seed", c.seed},
              {"noise_sigma", c.noise_sigma},
              {"timeout", c.timeout},
              {"start_offset", c.start_offset},
              {"start_heading_error", c.start_heading_error},
              {"offline", c.offline},
              {"haptics", c.nav.haptics_enabled},
              {"agent", agent_params_to_json(c.agent)},
              {"patches", patches}};
}

Json pose_to_json(const Pose& p) {
  return Json{{"x", p.position.x}, {"y", p.position.y}, {"heading", p.body_heading}, {"yaw", p.phone_yaw_offset}};
}

Json trace_record_to_json(const TraceRecord& r) {
  Json j;
  j["tick"] = r.tick;
  j["t"] = r.t;
  j["pose"] = pose_to_json(r.pose);
  j["sweep"] = r.sweep;
  j["touch"] = r.touch ? Json{{"u", r.touch->u}, {"v", r.touch->v}} : Json(nullptr);
  j["vibration"] = r.vibration;
  j["haptic"] = r.haptic;
  if (r.detection) {
    j["detection"] = Json{{"pair", pair_to_json(r.detection->pair)},
                          {"confidence", r.detection->confidence},
                          {"axis_angle", r.detection->axis_angle},
                          {"matches", r.detection->matches_assignment}};
  } else {
    j["detection"] = nullptr;
  }
  Json events = Json::array();
  for (const auto& e : r.events) events.push_back(event_to_json(e));
  j["events"] = std::move(events);
  Json trips = Json::array();
  for (const auto& rt : r.round_trips) {
    trips.push_back(Json{{"op", rt.op}, {"request", rt.request}, {"status", rt.status}, {"response", rt.response}});
  }
  j["round_trips"] = std::move(trips);
  j["mode"] = nav_mode_name(r.mode);
  j["assigned"] = r.assigned ? Json(r.assigned->value) : Json(nullptr);
  j["steer"] = r.steer;
  j["search_turn"] = r.search_turn;
  return j;
}

Json metrics_to_json(const RunMetrics& m) {
  return Json{{"reached", m.reached},
              {"time_to_goal", m.time_to_goal ? Json(*m.time_to_goal) : Json(nullptr)},
              {"mean_cross_track", m.mean_cross_track},
              {"max_cross_track", m.max_cross_track},
              {"duty_cycle", m.duty_cycle},
              {"marker_scans", m.marker_scans},
              {"reroutes", m.reroutes},
              {"ticks", m.ticks}};
}

namespace {

void apply_ops(Deployment& d, const AdminPatch& patch) {
  for (const auto& op : patch.ops) {
    if (const auto* s = std::get_if<SetEdgeEnabled>(&op)) {
      if (Edge* e = d.find_edge(s->edge)) e->enabled = s->enabled;
    } else {
      d = std::get<ReplaceDeployment>(op).deployment;
    }
  }
}

// A guidance whose edge and remaining distance both differ from the
// continuation of the previous plan.
bool is_reroute(const Guidance& prev, const Guidance& next) {
  if (!prev.next || !next.next) return false;
  if (prev.next->edge == next.next->edge) return false;
  const double continued = prev.next->remaining_distance - prev.next->edge_length;
  return std::abs(next.next->remaining_distance - continued) > 1e-6;
}

}  // namespace

RunMetrics eval_trace(std::istream& in) {
  RunMetrics m;
  std::string line;
  std::size_t lineno = 0;
  Deployment world;
  bool have_header = false;
  std::uint64_t expected_tick = 0;
  std::uint64_t vib_ticks = 0;
  double xt_sum = 0.0;
  std::uint64_t xt_count = 0;
  std::optional<Guidance> prev;

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) {
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw ParseError(lineno, "empty line");
    }
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(lineno, std::string("not JSON: ") + ex.what());
    }
    try {
      if (!have_header) {
        if (!j.is_object() || j.value("format", "") != "arianna-trace") throw ParseError(lineno, "missing trace header");
        world = deployment_from_json(j.at("deployment"));
        have_header = true;
        continue;
      }
      if (!j.is_object()) throw ParseError(lineno, "record must be an object");
      const std::uint64_t tick = j.at("tick").get<std::uint64_t>();
      if (tick != expected_tick) {
        throw ParseError(lineno, "tick " + std::to_string(tick) + " where " + std::to_string(expected_tick) + " was expected");
      }
      ++expected_tick;
      const double t = j.at("t").get<double>();
      const Vec2 pos{j.at("pose").at("x").get<double>(), j.at("pose").at("y").get<double>()};
      if (j.at("vibration").get<bool>()) ++vib_ticks;

      for (const Json& rt : j.at("round_trips")) {
        if (rt.at("op").get<std::string>() == "apply_patch" && rt.at("status").get<int>() == 200) {
          apply_ops(world, patch_from_json(rt.at("request")));
        }
      }
      const Json& assigned = j.at("assigned");
      if (!assigned.is_null()) {
        if (const Edge* e = world.find_edge(EdgeId{assigned.get<std::uint32_t>()})) {
          const double xt = cross_track_distance(pos, *e);
          xt_sum += xt;
          ++xt_count;
          m.max_cross_track = std::max(m.max_cross_track, xt);
        }
      }
      for (const Json& ej : j.at("events")) {
        const NavEvent e = event_from_json(ej);
        switch (e.kind) {
          case NavEvent::Kind::MarkerSeen:
            if (e.marker && e.marker->kind == MarkerKind::Node) ++m.marker_scans;
            break;
          case NavEvent::Kind::GuidanceReceived:
            if (prev && is_reroute(*prev, *e.guidance)) ++m.reroutes;
            prev = e.guidance;
            break;
          case NavEvent::Kind::Arrived:
            if (!m.reached) {
              m.reached = true;
              m.time_to_goal = t;
            }
            break;
          default: break;
        }
      }
    } catch (const ParseError&) {
      throw;
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(lineno, std::string("bad record: ") + ex.what());
    } catch (const FormatError& ex) {
      throw ParseError(lineno, ex.what());
    }
  }
  if (!have_header) throw ParseError(lineno + 1, "empty trace");
  m.ticks = expected_tick;
  m.duty_cycle = m.ticks == 0 ? 0.0 : static_cast<double>(vib_ticks) / static_cast<double>(m.ticks);
  m.mean_cross_track = xt_count == 0 ? 0.0 : xt_sum / static_cast<double>(xt_count);
  return m;
}

RunMetrics eval_trace_text(const std::string& text) {
  std::istringstream in(text);
  return eval_trace(in);
}

double haptic_causality(const std::string& trace) {
  std::istringstream in(trace);
  std::string line;
  std::getline(in, line);  // header
  std::vector<bool> vib;
  std::vector<bool> steered;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const Json j = Json::parse(line);
    vib.push_back(j.at("vibration").get<bool>());
    steered.push_back(j.at("steer").get<double>() != 0.0);
  }
  auto onset = [&](std::size_t i) { return vib[i] && (i == 0 || !vib[i - 1]); };
  std::size_t corrections = 0;
  std::size_t caused = 0;
  for (std::size_t i = 0; i < vib.size(); ++i) {
    if (!steered[i]) continue;
    ++corrections;
    if (onset(i) || (i > 0 && onset(i - 1))) ++caused;
  }
  return corrections == 0 ? 1.0 : static_cast<double>(caused) / static_cast<double>(corrections);
}

// --- Simulation ---

namespace {

Json failure_json(const Failure& f) { return failure_to_json(f); }

Pose start_pose(const SimConfig& c) {
  Pose pose;
  const Node* from = c.deployment.find_node(c.from);
  pose.position = from->position;
  if (const auto route = shortest_route(c.deployment, c.from, c.to, true); route && !route->empty()) {
    const Edge* e = c.deployment.find_edge(route->front().edge);
    Vec2 tangent;
    if (route->front().direction == TravelDirection::Forward) {
      tangent = tangent_at_arclength(e->polyline, 0.0);
    } else {
      tangent = tangent_at_arclength(e->polyline, e->length()) * -1.0;
    }
    pose.body_heading = std::atan2(tangent.y, tangent.x);
  }
  pose.position = pose.position + left_normal(heading_vector(pose.body_heading)) * c.start_offset;
  pose.body_heading = wrap_angle(pose.body_heading + c.start_heading_error);
  return pose;
}

}  // namespace

Simulation::Simulation(SimConfig config, PathClient* client)
    : config_((validate_config(config), std::move(config))),
      client_(client),
      world_(config_.deployment),
      raster_(rasterize_floor(world_, config_.raster)) {
  if (client_ == nullptr && !config_.offline) throw ConfigError("an online run needs a path server client");
  config_.nav.tick_period = config_.agent.dt();
  nav_.destination = config_.to;
  if (config_.offline) nav_.offline_copy = std::make_shared<const Deployment>(world_);
  agent_.pose = start_pose(config_);
  agent_.gait = Rng(mix64(config_.seed ^ 0x6761697400000000ULL));
  agent_.pose.phone_yaw_offset = 0.0;
  patch_done_.assign(config_.patches.size(), false);
}

std::string Simulation::header_line() const {
  return Json{{"format", "arianna-trace"}, {"version", 1}, {"config", sim_config_to_json(config_)}, {"deployment", deployment_to_json(config_.deployment)}}
      .dump();
}

void Simulation::absorb(const std::vector<NavEvent>& events, TraceRecord& rec) {
  for (const auto& e : events) {
    if (e.kind == NavEvent::Kind::Arrived) arrived_ = true;
    if (e.kind == NavEvent::Kind::GuidanceReceived) last_guidance_ = e.guidance;
    rec.events.push_back(e);
  }
}

void Simulation::resolve(const ResolveRequest& req, std::uint64_t tick, double t, TraceRecord& rec) {
  const auto r = client_->resolve_qr(req.qr, req.session, req.edge_hint);
  RoundTrip rt;
  rt.op = "resolve_qr";
  rt.request = Json{{"qr", req.qr.value},
                    {"session", session_to_string(req.session)},
                    {"edge_hint", req.edge_hint ? Json(req.edge_hint->value) : Json(nullptr)}};
  if (const auto* g = std::get_if<Guidance>(&r)) {
    rt.status = 200;
    rt.response = guidance_to_json(*g);
  } else {
    rt.status = http_status(std::get<Failure>(r).code);
    rt.response = failure_json(std::get<Failure>(r));
  }
  rec.round_trips.push_back(std::move(rt));
  absorb(receive(nav_, req, r, tick, t), rec);
}

void Simulation::apply_local(const AdminPatch& patch) {
  bool replaced = false;
  for (const auto& op : patch.ops) replaced = replaced || std::holds_alternative<ReplaceDeployment>(op);
  apply_ops(world_, patch);
  if (replaced) raster_ = rasterize_floor(world_, config_.raster);
}

Result<std::uint64_t> Simulation::admin_patch(const AdminPatch& patch) {
  if (client_ == nullptr) return Failure{ServerError::Unavailable, "offline run has no server", std::nullopt};
  const auto r = client_->apply_patch(patch);
  RoundTrip rt{"apply_patch", patch_to_json(patch), 200, {}};
  if (const auto* v = std::get_if<std::uint64_t>(&r)) {
    rt.response = Json{{"version", *v}};
    apply_local(patch);
  } else {
    rt.status = http_status(std::get<Failure>(r).code);
    rt.response = failure_json(std::get<Failure>(r));
  }
  pending_.push_back(std::move(rt));
  return r;
}

Result<SessionId> Simulation::set_destination(NodeId node) {
  if (client_ == nullptr) {
    if (world_.find_node(node) == nullptr) return Failure{ServerError::NotFound, "unknown destination", std::nullopt};
  } else {
    const auto r = client_->create_session(node);
    RoundTrip rt{"create_session", Json{{"destination", node.value}}, 200, {}};
    if (const auto* id = std::get_if<SessionId>(&r)) {
      rt.response = Json{{"session_id", session_to_string(*id)}};
      nav_.session = *id;
    } else {
      rt.status = http_status(std::get<Failure>(r).code);
      rt.response = failure_json(std::get<Failure>(r));
    }
    pending_.push_back(std::move(rt));
    if (!ok(r)) return r;
  }
  config_.to = node;
  nav_.destination = node;
  nav_.assigned.reset();
  nav_.acquired = false;
  nav_.match_streak = 0;
  nav_.miss_streak = 0;
  nav_.last_marker.reset();
  nav_.mode = NavMode::Searching;
  arrived_ = false;
  last_guidance_.reset();
  return nav_.session ? *nav_.session : SessionId{0};
}

TraceRecord Simulation::sense(double yaw, const std::optional<TouchPoint>& touch) {
  TraceRecord rec;
  rec.tick = tick_;
  rec.t = time();
  rec.round_trips = std::move(pending_);
  pending_.clear();

  if (tick_ == 0) {
    if (!config_.offline) {
      const auto r = client_->create_session(config_.to);
      RoundTrip rt{"create_session", Json{{"destination", config_.to.value}}, 200, {}};
      if (const auto* id = std::get_if<SessionId>(&r)) {
        rt.response = Json{{"session_id", session_to_string(*id)}};
        nav_.session = *id;
      } else {
        rt.status = http_status(std::get<Failure>(r).code);
        rt.response = failure_json(std::get<Failure>(r));
      }
      rec.round_trips.push_back(std::move(rt));
    }
    // The user scans the anchor at the starting point before setting off.
    if (const QrAnchor* a = world_.anchor_for(config_.from)) {
      auto scan = scan_marker(nav_, MarkerPayload{MarkerKind::Node, a->qr_id.value, 0}, tick_, rec.t);
      absorb(scan.events, rec);
      if (scan.request) resolve(*scan.request, tick_, rec.t, rec);
    }
  }

  for (std::size_t i = 0; i < config_.patches.size(); ++i) {
    if (patch_done_[i] || config_.patches[i].at > rec.t + 1e-9) continue;
    patch_done_[i] = true;
    (void)admin_patch(config_.patches[i].patch);
    for (auto& rt : pending_) rec.round_trips.push_back(std::move(rt));
    pending_.clear();
  }

  if (nav_.assigned) rec.assigned = nav_.assigned->edge;
  agent_.pose.phone_yaw_offset = yaw;
  const RenderNoise noise{config_.noise_sigma, mix64(config_.seed ^ mix64(tick_))};
  frame_ = render_frame(raster_, agent_.pose, config_.nav.camera, noise);
  frame_id_ = tick_;

  StepOutput out = step(nav_, frame_, touch, tick_, rec.t, config_.nav);
  absorb(out.events, rec);
  if (out.request) resolve(*out.request, tick_, rec.t, rec);

  rec.pose = agent_.pose;
  rec.sweep = yaw;
  rec.touch = touch;
  rec.vibration = out.vibration;
  rec.haptic = out.haptic.active;
  rec.detection = out.detection;
  rec.mode = nav_.mode;
  return rec;
}

TraceRecord Simulation::tick_agent() {
  const auto touch = agent_touch(config_.agent, tick_, config_.nav.camera);
  TraceRecord rec = sense(agent_.pose.phone_yaw_offset, touch);
  if (!arrived_) {
    const AgentAction a = agent_step(agent_, rec.vibration, config_.agent, tick_, config_.nav.camera);
    rec.steer = a.correction;
    rec.search_turn = a.search_turn;
  }
  ++tick_;
  return rec;
}

TraceRecord Simulation::tick_manual(const ManualInput& in) {
  const double yaw = in.sweep_override ? std::clamp(*in.sweep_override, -kMaxPhoneYaw, kMaxPhoneYaw)
                                       : sweep_angle(config_.agent, time());
  TraceRecord rec = sense(yaw, in.touch);
  const double dt = config_.agent.dt();
  const int turn = std::clamp(in.turn, -1, 1);
  if (turn != 0) {
    rec.steer = turn * kManualTurnRate * dt;
    agent_.pose.body_heading = wrap_angle(agent_.pose.body_heading + rec.steer);
  }
  if (in.step) agent_.pose.position = agent_.pose.position + heading_vector(agent_.pose.body_heading) * (config_.agent.walking_speed * dt);
  agent_.prev_vibration = rec.vibration;
  ++tick_;
  return rec;
}

SimResult run_sim(const SimConfig& config, PathClient* client) {
  validate_config(config);
  std::unique_ptr<PathServer> own;
  std::unique_ptr<InProcessClient> in_process;
  if (client == nullptr && !config.offline) {
    own = std::make_unique<PathServer>(config.deployment, std::filesystem::path{}, config.seed);
    in_process = std::make_unique<InProcessClient>(*own);
    client = in_process.get();
  }
  Simulation sim(config, client);
  std::ostringstream out;
  out << sim.header_line() << '\n';
  const auto max_ticks = static_cast<std::uint64_t>(std::llround(config.timeout * config.agent.tick_rate));
  while (sim.next_tick() < max_ticks && !sim.arrived()) out << trace_record_to_json(sim.tick_agent()).dump() << '\n';
  SimResult result;
  result.trace = out.str();
  result.metrics = eval_trace_text(result.trace);
  return result;
}

// --- demo ---

DemoScenario demo_scenario(std::optional<double> patch_at) {
  Deployment d;
  d.deployment_id = DeploymentId{1};
  d.version = 1;
  d.floor_bounds = {{0.0, 0.0}, {6.5, 13.5}};
  d.nodes = {{NodeId{0}, {1.0, 2.0}, NodeKind::PointOfInterest, "Entrance"},
             {NodeId{1}, {1.0, 9.0}, NodeKind::Intersection, "T-junction"},
             {NodeId{2}, {1.0, 12.0}, NodeKind::Intersection, "North-west corner"},
             {NodeId{3}, {5.0, 12.0}, NodeKind::Intersection, "North-east corner"},
             {NodeId{4}, {5.0, 9.0}, NodeKind::PointOfInterest, "Exhibit"}};
  d.edges = {{EdgeId{0}, NodeId{0}, NodeId{1}, {{1.0, 2.0}, {1.0, 9.0}}, {ColorId::Red, ColorId::Blue}, true},
             {EdgeId{1}, NodeId{1}, NodeId{2}, {{1.0, 9.0}, {1.0, 12.0}}, {ColorId::Green, ColorId::Yellow}, true},
             {EdgeId{2}, NodeId{1}, NodeId{4}, {{1.0, 9.0}, {5.0, 9.0}}, {ColorId::Magenta, ColorId::Cyan}, true},
             {EdgeId{3}, NodeId{2}, NodeId{3}, {{1.0, 12.0}, {5.0, 12.0}}, {ColorId::Red, ColorId::Blue}, true},
             {EdgeId{4}, NodeId{3}, NodeId{4}, {{5.0, 12.0}, {5.0, 9.0}}, {ColorId::Green, ColorId::Yellow}, true}};
  d.anchors = {{QrId{100}, NodeId{0}, {0.75, 1.75}, 0.2},
               {QrId{101}, NodeId{1}, {0.75, 9.25}, 0.2},
               {QrId{102}, NodeId{2}, {0.75, 12.25}, 0.2},
               {QrId{103}, NodeId{3}, {5.25, 12.25}, 0.2},
               {QrId{104}, NodeId{4}, {5.25, 8.75}, 0.2}};

  DemoScenario s;
  s.branch = EdgeId{2};
  s.close_branch.ops.push_back(SetEdgeEnabled{s.branch, false});
  s.config.deployment = std::move(d);
  s.config.from = NodeId{0};
  s.config.to = NodeId{4};
  if (patch_at) s.config.patches.push_back({*patch_at, s.close_branch});
  return s;
}

}  // namespace arianna
