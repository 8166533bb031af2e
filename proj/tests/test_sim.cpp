#include "arianna/sim.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "arianna/http.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace arianna;

namespace {

constexpr double kNorth = std::numbers::pi / 2;

// Straight 5 m lane from (1.5, 1) to (1.5, 6); the walker starts 0.3 m left of it.
SimConfig straight_config(double offset = 0.3) {
  SimConfig c;
  c.deployment = oracle::straight_edge(5.0);
  c.from = NodeId{0};
  c.to = NodeId{1};
  c.timeout = 60.0;
  c.start_offset = offset;
  return c;
}

std::vector<Json> records(const std::string& trace) {
  std::vector<Json> out;
  std::istringstream in(trace);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) out.push_back(Json::parse(line));
  return out;
}

Json header_for(const Deployment& d) {
  return Json{{"format", "arianna-trace"}, {"version", 1}, {"deployment", deployment_to_json(d)}};
}

Json bare_record(std::uint64_t tick, double x, double y, bool vib, std::optional<std::uint32_t> assigned) {
  return Json{{"tick", tick},
              {"t", tick / 10.0},
              {"pose", Json{{"x", x}, {"y", y}, {"heading", kNorth}, {"yaw", 0.0}}},
              {"vibration", vib},
              {"events", Json::array()},
              {"round_trips", Json::array()},
              {"assigned", assigned ? Json(*assigned) : Json(nullptr)}};
}

}  // namespace

TEST_CASE("sweep is a triangle wave starting at zero and rising left") {
  AgentParams p;
  const double a = p.sweep_amplitude;
  CHECK(sweep_angle(p, 0.0) == doctest::Approx(0.0));
  CHECK(sweep_angle(p, 0.25) == doctest::Approx(a));
  CHECK(sweep_angle(p, 0.5) == doctest::Approx(0.0));
  CHECK(sweep_angle(p, 0.75) == doctest::Approx(-a));
  CHECK(sweep_angle(p, 1.1) == doctest::Approx(sweep_angle(p, 0.1)));
  for (int i = 0; i <= 400; ++i) CHECK(std::abs(sweep_angle(p, i * 0.01)) <= a + 1e-12);
}

TEST_CASE("touch point: fixed centre or finger scanning across the width") {
  AgentParams p;
  CameraIntrinsics k;
  const TouchPoint c = agent_touch(p, 7, k);
  CHECK(c.u == 160.0);
  CHECK(c.v == 120.0);
  CHECK(touch_bearing(c, k) == 0.0);
  CHECK(touch_bearing({0.0, 120.0}, k) == doctest::Approx(k.hfov / 2));

  p.touch_mode = TouchMode::FingerScan;
  p.tick_rate = 20.0;
  CHECK(agent_touch(p, 0, k).u == 160.0);
  // Two traversals per second: the right edge after 0.25 s, the left after 0.75 s.
  CHECK(agent_touch(p, 5, k).u == doctest::Approx(319.5));
  CHECK(agent_touch(p, 15, k).u == doctest::Approx(0.5));
  CHECK(agent_touch(p, 20, k).u == doctest::Approx(160.0));
}

TEST_CASE("agent without vibration walks a straight line at walking speed") {
  AgentParams p;
  p.search = false;
  CameraIntrinsics k;
  AgentState s;
  s.pose.position = {1.0, 1.0};
  s.pose.body_heading = 0.3;
  for (std::uint64_t tick = 0; tick < 50; ++tick) {
    const Vec2 before = s.pose.position;
    const AgentAction a = agent_step(s, false, p, tick, k);
    CHECK(a.correction == 0.0);
    CHECK(s.pose.body_heading == 0.3);
    CHECK(distance(before, s.pose.position) == doctest::Approx(0.05));
    CHECK(s.pose.phone_yaw_offset == doctest::Approx(sweep_angle(p, (tick + 1) / 10.0)));
  }
  CHECK(s.pose.position.x == doctest::Approx(1.0 + 2.5 * std::cos(0.3)));
  CHECK(s.pose.position.y == doctest::Approx(1.0 + 2.5 * std::sin(0.3)));
}

TEST_CASE("onset steering: heading moves by gain times hand angle, symmetric onsets cancel") {
  AgentParams p;
  CameraIntrinsics k;
  AgentState s;
  s.pose.body_heading = 1.0;
  // Yaw at tick 2 is +0.8 A and at tick 8 is -0.8 A.
  double heading_after_first = 0.0;
  for (std::uint64_t tick = 0; tick < 10; ++tick) {
    const bool vib = tick == 2 || tick == 8;
    const double hand = s.pose.phone_yaw_offset;
    const AgentAction a = agent_step(s, vib, p, tick, k);
    CHECK(a.onset == vib);
    if (vib) CHECK(a.correction == doctest::Approx(0.6 * hand));
    if (tick == 2) heading_after_first = s.pose.body_heading;
  }
  CHECK(heading_after_first == doctest::Approx(1.0 + 0.6 * 0.8 * p.sweep_amplitude));
  CHECK(s.pose.body_heading == doctest::Approx(1.0));
}

TEST_CASE("sustained vibration is a single onset") {
  AgentParams p;
  CameraIntrinsics k;
  AgentState s;
  int onsets = 0;
  for (std::uint64_t tick = 0; tick < 20; ++tick) onsets += agent_step(s, tick >= 3 && tick < 12, p, tick, k).onset;
  CHECK(onsets == 1);
}

TEST_CASE("silence stops the walker to search, a full turn sends it on") {
  AgentParams p;
  CameraIntrinsics k;
  AgentState s;
  const auto ticks_delay = static_cast<std::uint64_t>(std::llround(p.search_delay * p.tick_rate));
  std::uint64_t tick = 0;
  for (; tick < ticks_delay - 1; ++tick) CHECK(agent_step(s, false, p, tick, k).walked);
  // search starts on the tick the silence reaches search_delay
  AgentAction a = agent_step(s, false, p, tick++, k);
  CHECK_FALSE(a.walked);
  CHECK(a.search_turn > 0.0);
  double turned = a.search_turn;
  while (!(a = agent_step(s, false, p, tick++, k)).walked) turned += a.search_turn;
  CHECK(turned == doctest::Approx(2 * std::numbers::pi).epsilon(0.03));
}

TEST_CASE("agent params json roundtrip and validation") {
  AgentParams p;
  p.touch_mode = TouchMode::FingerScan;
  p.steering_gain = 0.4;
  const AgentParams q = agent_params_from_json(agent_params_to_json(p));
  CHECK(q.touch_mode == TouchMode::FingerScan);
  CHECK(q.steering_gain == 0.4);
  CHECK_THROWS_AS(agent_params_from_json(Json{{"sweep_amplitude", 1.3}}), ConfigError);
  CHECK_THROWS_AS(agent_params_from_json(Json{{"walking_speed", 0.0}}), ConfigError);
  CHECK_THROWS_AS(agent_params_from_json(Json{{"touch_mode", "palm"}}), ConfigError);
  CHECK_THROWS_AS(agent_params_from_json(Json{{"tick_rate", "fast"}}), ConfigError);
}

TEST_CASE("convergence: 0.3 m off-axis on a 5 m lane") {
  const SimResult r = run_sim(straight_config());
  CHECK(r.metrics.reached);
  REQUIRE(r.metrics.time_to_goal);
  CHECK(*r.metrics.time_to_goal <= 60.0);

  // Cross-track error against the lane axis x = 1.5, read straight from the poses.
  std::optional<double> e2;
  std::optional<double> e6;
  for (const Json& rec : records(r.trace)) {
    const double xt = std::abs(rec["pose"]["x"].get<double>() - 1.5);
    if (rec["tick"] == 20) e2 = xt;
    if (rec["tick"] == 60) e6 = xt;
  }
  REQUIRE(e2);
  REQUIRE(e6);
  CHECK(*e6 < *e2);
}

TEST_CASE("the right-hand start converges too") {
  const SimResult r = run_sim(straight_config(-0.3));
  CHECK(r.metrics.reached);
  CHECK(*r.metrics.time_to_goal <= 60.0);
}

TEST_CASE("haptics disabled: no vibration and no steering correction") {
  SimConfig c = straight_config();
  c.nav.haptics_enabled = false;
  const SimResult blind = run_sim(c);
  const SimResult guided = run_sim(straight_config());
  CHECK(blind.metrics.duty_cycle == 0.0);
  for (const Json& rec : records(blind.trace)) {
    CHECK_FALSE(rec["vibration"].get<bool>());
    CHECK(rec["steer"].get<double>() == 0.0);
  }
  // Whether the walker stumbles onto the end anchor anyway is reported by the
  // acceptance suite; here only the cost of losing feedback is pinned.
  if (blind.metrics.reached) CHECK(*blind.metrics.time_to_goal > 3.0 * *guided.metrics.time_to_goal);
}

TEST_CASE("identical seed and config give byte-identical traces") {
  SimConfig c = straight_config();
  c.noise_sigma = 8.0;
  c.agent.heading_noise = 0.1;
  c.seed = 42;
  const SimResult a = run_sim(c);
  const SimResult b = run_sim(c);
  CHECK(a.trace == b.trace);
  CHECK(a.metrics == b.metrics);
  c.seed = 43;
  CHECK(run_sim(c).trace != a.trace);
}

TEST_CASE("metrics recomputed from the trace equal the run's metrics") {
  const SimResult r = run_sim(demo_scenario(10.0).config);
  CHECK(eval_trace_text(r.trace) == r.metrics);
  CHECK(r.metrics.duty_cycle >= 0.0);
  CHECK(r.metrics.duty_cycle <= 1.0);
  CHECK(r.metrics.ticks == records(r.trace).size());
}

TEST_CASE("eval_trace: duty cycle and cross-track arithmetic") {
  const Deployment d = oracle::straight_edge(5.0);
  std::ostringstream trace;
  trace << header_for(d).dump() << '\n';
  for (std::uint64_t i = 0; i < 100; ++i) trace << bare_record(i, 1.5, 1.0 + 0.04 * i, i % 4 == 0, 0).dump() << '\n';
  const RunMetrics m = eval_trace_text(trace.str());
  CHECK(m.ticks == 100);
  CHECK(m.duty_cycle == doctest::Approx(0.25));
  CHECK(m.mean_cross_track == 0.0);
  CHECK(m.max_cross_track == 0.0);
  CHECK_FALSE(m.reached);
  CHECK_FALSE(m.time_to_goal);

  std::ostringstream off;
  off << header_for(d).dump() << '\n';
  off << bare_record(0, 1.6, 2.0, false, 0).dump() << '\n';
  off << bare_record(1, 1.2, 2.0, false, 0).dump() << '\n';
  off << bare_record(2, 0.0, 2.0, false, std::nullopt).dump() << '\n';
  const RunMetrics o = eval_trace_text(off.str());
  CHECK(o.mean_cross_track == doctest::Approx(0.2));
  CHECK(o.max_cross_track == doctest::Approx(0.3));
}

TEST_CASE("eval_trace counts reroutes, not ordinary progress") {
  const Deployment d = fixture::triangle();
  auto guidance_event = [](std::uint32_t node, std::uint32_t edge, double remaining, double length) {
    Guidance g;
    g.node = NodeId{node};
    g.next = NextEdge{EdgeId{edge}, TravelDirection::Forward, {ColorId::Red, ColorId::Blue}, remaining, length};
    g.deployment_version = 1;
    return event_to_json({NavEvent::Kind::GuidanceReceived, 0, std::nullopt, g, std::nullopt});
  };
  std::ostringstream trace;
  trace << header_for(d).dump() << '\n';
  Json r0 = bare_record(0, 1, 1, false, std::nullopt);
  r0["events"].push_back(guidance_event(0, 0, 2.0, 1.0));  // A -> B -> C
  Json r1 = bare_record(1, 2, 1, false, 0);
  r1["events"].push_back(guidance_event(1, 1, 1.0, 1.0));  // continuing: not a reroute
  Json r2 = bare_record(2, 2, 1.5, false, 1);
  r2["events"].push_back(guidance_event(1, 7, 3.5, 2.5));  // new plan from B
  trace << r0.dump() << '\n' << r1.dump() << '\n' << r2.dump() << '\n';
  CHECK(eval_trace_text(trace.str()).reroutes == 1);
}

TEST_CASE("eval_trace rejects malformed traces with the line number") {
  const Deployment d = oracle::straight_edge(5.0);
  auto line_of = [](const std::string& text) -> std::size_t {
    try {
      eval_trace_text(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  const std::string header = header_for(d).dump() + "\n";
  const std::string r0 = bare_record(0, 1.5, 2, false, 0).dump() + "\n";
  const std::string r1 = bare_record(1, 1.5, 2, false, 0).dump() + "\n";
  const std::string r3 = bare_record(3, 1.5, 2, false, 0).dump() + "\n";
  CHECK(line_of(header + r0 + r1) == 0);
  CHECK(line_of(header + r0 + "{not json\n" + r1) == 3);
  CHECK(line_of(header + r0 + r1 + r3) == 4);  // tick gap
  CHECK(line_of(header + r0 + "\n" + r1) == 3);
  CHECK(line_of(header + "{\"tick\":0}\n") == 2);
  CHECK(line_of(r0) == 1);  // no header
  CHECK(line_of("") == 1);
  Json bad_event = bare_record(1, 1.5, 2, false, 0);
  bad_event["events"].push_back(Json{{"kind", "Teleported"}, {"tick", 1}});
  CHECK(line_of(header + r0 + bad_event.dump() + "\n") == 3);
}

TEST_CASE("config errors are reported before tick 0") {
  SimConfig c = straight_config();
  c.to = NodeId{9};
  CHECK_THROWS_AS(run_sim(c), ConfigError);
  c = straight_config();
  c.agent.sweep_amplitude = 1.5;
  CHECK_THROWS_AS(run_sim(c), ConfigError);
  c = straight_config();
  c.deployment.edges[0].polyline = {{1.5, 1.0}, {3.0, 3.0}};
  CHECK_THROWS_AS(run_sim(c), ConfigError);
  c = straight_config();
  c.timeout = 0.0;
  CHECK_THROWS_AS(run_sim(c), ConfigError);
  c = straight_config();
  CHECK_THROWS_AS(Simulation(c, nullptr), ConfigError);
  c.offline = true;
  c.patches.push_back({1.0, {}});
  CHECK_THROWS_AS(run_sim(c), ConfigError);
}

TEST_CASE("timeout yields reached=false with partial metrics") {
  SimConfig c = straight_config();
  c.timeout = 2.0;
  const SimResult r = run_sim(c);
  CHECK_FALSE(r.metrics.reached);
  CHECK_FALSE(r.metrics.time_to_goal);
  CHECK(r.metrics.ticks == 20);
  CHECK(r.metrics.marker_scans >= 1);  // the start anchor
}

TEST_CASE("demo scenario validates and has the U plus branch layout") {
  const DemoScenario s = demo_scenario();
  const auto report = validate_deployment(s.config.deployment);
  CHECK(report.ok());
  CHECK(report.unreachable.empty());
  CHECK(s.config.deployment.nodes.size() == 5);
  CHECK(s.config.deployment.edges.size() == 5);
  CHECK(s.config.deployment.find_node(s.config.to)->kind == NodeKind::PointOfInterest);
  const auto direct = shortest_route(s.config.deployment, s.config.from, s.config.to, true);
  REQUIRE(direct);
  CHECK(direct->back().edge == s.branch);
  Deployment closed = s.config.deployment;
  closed.find_edge(s.branch)->enabled = false;
  const auto around = shortest_route(closed, s.config.from, s.config.to, true);
  REQUIRE(around);
  CHECK(around->size() == 4);
  CHECK(demo_scenario(10.0).config.patches.size() == 1);
}

TEST_CASE("demo baseline reaches the destination through the branch") {
  const DemoScenario s = demo_scenario();
  const SimResult r = run_sim(s.config);
  CHECK(r.metrics.reached);
  CHECK(r.metrics.reroutes == 0);
  CHECK(haptic_causality(r.trace) >= 0.9);
  bool branch_assigned = false;
  for (const Json& rec : records(r.trace)) branch_assigned = branch_assigned || rec["assigned"] == s.branch.value;
  CHECK(branch_assigned);
}

TEST_CASE("demo with the branch closed mid-run reroutes and still arrives") {
  const DemoScenario s = demo_scenario(10.0);
  const SimResult r = run_sim(s.config);
  CHECK(r.metrics.reached);
  CHECK(r.metrics.reroutes >= 1);
  CHECK(haptic_causality(r.trace) >= 0.9);
  bool patched = false;
  for (const Json& rec : records(r.trace)) {
    for (const Json& rt : rec["round_trips"]) {
      if (rt["op"] == "apply_patch") {
        CHECK(rt["status"] == 200);
        CHECK(rec["t"].get<double>() == doctest::Approx(10.0));
        patched = true;
      }
    }
    if (!patched) continue;
    for (const Json& e : rec["events"]) {
      if (e["kind"] == "GuidanceReceived" && e["guidance"].contains("next") && !e["guidance"]["next"].is_null()) {
        CHECK(e["guidance"]["next"]["edge"] != s.branch.value);
      }
    }
  }
  CHECK(patched);
}

TEST_CASE("every server round trip appears in exactly one trace entry") {
  const DemoScenario s = demo_scenario(10.0);
  PathServer server(s.config.deployment, {}, s.config.seed);
  InProcessClient client(server);
  const SimResult r = run_sim(s.config, &client);
  std::vector<std::pair<std::string, int>> traced;
  for (const Json& rec : records(r.trace)) {
    for (const Json& rt : rec["round_trips"]) traced.emplace_back(rt["op"].get<std::string>(), rt["status"].get<int>());
  }
  const auto log = server.access_log();
  REQUIRE(log.size() == traced.size());
  for (std::size_t i = 0; i < log.size(); ++i) {
    CHECK(log[i].op == traced[i].first);
    CHECK(log[i].status == traced[i].second);
  }
}

TEST_CASE("offline run reaches without any server traffic") {
  SimConfig c = demo_scenario().config;
  c.offline = true;
  const SimResult r = run_sim(c);
  CHECK(r.metrics.reached);
  for (const Json& rec : records(r.trace)) CHECK(rec["round_trips"].empty());
  // Same guidance as the online run, so the same walk.
  CHECK(r.metrics.time_to_goal == run_sim(demo_scenario().config).metrics.time_to_goal);
}

TEST_CASE("a run over HTTP produces the same trace as in-process") {
  const DemoScenario s = demo_scenario(10.0);
  PathServer server(s.config.deployment, {}, s.config.seed);
  HttpFrontend http(server);
  const int port = http.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread serving([&] { http.serve(); });
  http.wait_until_ready();
  HttpPathClient client("http://127.0.0.1:" + std::to_string(port));
  const SimResult remote = run_sim(s.config, &client);
  http.stop();
  serving.join();
  const SimResult local = run_sim(s.config);
  CHECK(remote.metrics.reached);
  CHECK(remote.trace == local.trace);
}

TEST_CASE("server outage mid-run: requests fail visibly and the walker recovers") {
  const DemoScenario s = demo_scenario();
  PathServer server(s.config.deployment, {}, s.config.seed);
  InProcessClient inner(server);
  int calls = 0;
  // Every resolve between the 2nd and 4th call fails.
  FlakyClient flaky(inner, [&] {
    ++calls;
    return calls >= 3 && calls <= 5;
  });
  const SimResult r = run_sim(s.config, &flaky);
  int failures = 0;
  for (const Json& rec : records(r.trace)) {
    for (const Json& rt : rec["round_trips"]) failures += rt["status"] == 503;
  }
  CHECK(failures >= 1);
  CHECK(r.metrics.reached);
}

TEST_CASE("haptic causality counts corrections without a nearby onset") {
  const Deployment d = oracle::straight_edge(5.0);
  std::ostringstream trace;
  trace << header_for(d).dump() << '\n';
  for (std::uint64_t i = 0; i < 10; ++i) {
    Json rec = bare_record(i, 1.5, 2, i == 2 || i == 6, 0);
    rec["steer"] = (i == 3 || i == 6 || i == 9) ? 0.1 : 0.0;  // 3 after onset at 2, 6 at onset, 9 unprovoked
    trace << rec.dump() << '\n';
  }
  CHECK(haptic_causality(trace.str()) == doctest::Approx(2.0 / 3.0));
}
