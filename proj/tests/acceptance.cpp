// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when all pass).

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include "arianna/marker.hpp"
#include "arianna/navigator.hpp"
#include "arianna/pathserver.hpp"
#include "arianna/rng.hpp"
#include "arianna/sim.hpp"
#include "arianna/vision.hpp"
#include "oracles.hpp"

using namespace arianna;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void line(const char* name, const Outcome& o) {
  std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<Deployment> generated_worlds(int count) {
  std::vector<Deployment> out;
  for (int i = 0; i < count; ++i) {
    WorldParams p;
    p.seed = 1000 + static_cast<std::uint64_t>(i);
    out.push_back(generate_world(p));
  }
  return out;
}

struct LanePose {
  Pose pose;
  ColorPair expected;
};

// A walker on `e` travelling in `dir`, `s` metres past the departure node.
LanePose lane_pose(const Edge& e, TravelDirection dir, double s, double offset, double heading_error) {
  const double len = e.length();
  const double along = dir == TravelDirection::Forward ? s : len - s;
  Vec2 tangent = tangent_at_arclength(e.polyline, along);
  if (dir == TravelDirection::Backward) tangent = tangent * -1.0;
  LanePose lp;
  lp.pose.position = point_at_arclength(e.polyline, along) + left_normal(tangent) * offset;
  lp.pose.body_heading = wrap_angle(std::atan2(tangent.y, tangent.x) + heading_error);
  lp.expected = observed_pair(e, dir);
  return lp;
}

// --- criteria ---

Outcome codec_chain() {
  const auto start = Clock::now();
  const auto worlds = generated_worlds(10);
  std::vector<FloorRaster> rasters;
  for (const auto& w : worlds) rasters.push_back(rasterize_floor(w));
  const CameraIntrinsics k;
  const VisionParams vp;
  constexpr double kLookahead = 1.75;  // far edge of the camera footprint
  Rng rng(20240501);

  auto run = [&](int n, bool whole_edge, int& correct, int& reversed) {
    correct = 0;
    reversed = 0;
    for (int i = 0; i < n; ++i) {
      const std::size_t wi = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(worlds.size()) - 1));
      const Deployment& w = worlds[wi];
      const Edge* e = nullptr;
      while (e == nullptr || e->length() < kLookahead + 0.25) {
        e = &w.edges[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(w.edges.size()) - 1))];
      }
      const auto dir = rng.chance(0.5) ? TravelDirection::Forward : TravelDirection::Backward;
      const double s = rng.uniform(0.0, whole_edge ? e->length() : e->length() - kLookahead);
      const LanePose lp = lane_pose(*e, dir, s, rng.uniform(-0.3, 0.3), rng.uniform(-20.0, 20.0) * std::numbers::pi / 180.0);
      const auto det = detect_lane(segment_colors(render_frame(rasters[wi], lp.pose, k), vp), vp);
      if (det && det->ordered_pair == lp.expected) ++correct;
      if (det && det->ordered_pair == lp.expected.reversed()) ++reversed;
    }
  };

  constexpr int kPoses = 300;
  int correct = 0;
  int reversed = 0;
  run(kPoses, false, correct, reversed);
  const double elapsed = seconds_since(start);
  int whole_correct = 0;
  int whole_reversed = 0;
  run(kPoses, true, whole_correct, whole_reversed);
  const double rate = static_cast<double>(correct) / kPoses;
  return {rate >= 0.95 && reversed == 0 && elapsed < 60.0,
          fmt("%d/%d correct (%.1f%%, need >= 95%%), reversed %d (need 0), %.1f s (need < 60 s); "
              "poses up to 1.75 m before the arrival node. Over whole edges: %.1f%% correct, reversed %d",
              correct, kPoses, 100.0 * rate, reversed, elapsed, 100.0 * whole_correct / kPoses, whole_reversed)};
}

Outcome marker_roundtrip() {
  const auto start = Clock::now();
  Rng rng(77);
  constexpr int kPayloads = 10000;
  int payload_failures = 0;
  int rotation_failures = 0;
  int accepted_corruptions = 0;
  int corruptions = 0;
  for (int i = 0; i < kPayloads; ++i) {
    MarkerPayload p{rng.chance(0.5) ? MarkerKind::Edge : MarkerKind::Node, static_cast<std::uint16_t>(rng.uniform_int(0, 0xffff)), 0};
    if (p.kind == MarkerKind::Edge) p.aux = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
    const MarkerGrid base = encode_marker(p);
    MarkerGrid g = base;
    bool all = true;
    for (int turn = 0; turn < 4; ++turn) {
      if (decode_any_rotation(g) != p) {
        ++rotation_failures;
        all = false;
      }
      g = g.rotated();
    }
    if (!all) ++payload_failures;
    for (int r = 0; r < kMarkerCells; ++r) {
      for (int c = 0; c < kMarkerCells; ++c) {
        if (r != 0 && r != kMarkerCells - 1 && c != 0 && c != kMarkerCells - 1) continue;
        MarkerGrid bad = base;
        bad.set(r, c, !bad.at(r, c));
        ++corruptions;
        if (decode_any_rotation(bad)) ++accepted_corruptions;
      }
    }
  }
  const double elapsed = seconds_since(start);
  return {payload_failures == 0 && accepted_corruptions == 0 && elapsed < 10.0,
          fmt("%d of %d payloads fail in at least one rotation (%d of %d decodes; need 0), "
              "%d of %d single border-cell corruptions accepted (need 0), %.2f s (need < 10 s)",
              payload_failures, kPayloads, rotation_failures, 4 * kPayloads, accepted_corruptions, corruptions, elapsed)};
}

Outcome routing_oracle() {
  int pairs = 0;
  int length_mismatch = 0;
  int sequence_mismatch = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Deployment d = fixture::random_routing_world(seed * 7919, 20);
    const auto fw = oracle::floyd_warshall(d, true);
    for (std::size_t i = 0; i < d.nodes.size(); ++i) {
      for (std::size_t j = 0; j < d.nodes.size(); ++j) {
        ++pairs;
        const auto r = shortest_route(d, d.nodes[i].id, d.nodes[j].id, true);
        if (fw[i][j] < 0 || !r) {
          if ((fw[i][j] < 0) != !r) ++length_mismatch;
          continue;
        }
        std::int64_t w = 0;
        for (const auto& s : *r) w += edge_weight(*d.find_edge(s.edge));
        if (w != fw[i][j]) ++length_mismatch;
        if (*r != *oracle::brute_force_route(d, d.nodes[i].id, d.nodes[j].id, true)) ++sequence_mismatch;
      }
    }
  }
  return {length_mismatch == 0 && sequence_mismatch == 0,
          fmt("50 deployments, %d ordered pairs: %d length mismatches vs Floyd-Warshall, %d sequence mismatches vs "
              "exhaustive tie-break (need 0 and 0)",
              pairs, length_mismatch, sequence_mismatch)};
}

Outcome planarity_oracle() {
  int disagreements = 0;
  int with_crossings = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Deployment d = fixture::random_edge_set(seed * 104729);
    std::set<std::pair<std::pair<std::uint32_t, std::uint32_t>, std::pair<std::uint32_t, std::uint32_t>>> got;
    std::set<std::pair<std::pair<std::uint32_t, std::uint32_t>, std::pair<std::uint32_t, std::uint32_t>>> want;
    for (const auto& v : validate_deployment(d).violations) {
      if (v.kind == ViolationKind::Planarity) got.insert({{v.a, v.a_index}, {v.b, v.b_index}});
    }
    for (const auto& [a, b] : oracle::brute_force_crossings(d)) want.insert({{a.edge, a.index}, {b.edge, b.index}});
    if (got != want) ++disagreements;
    if (!want.empty()) ++with_crossings;
  }
  return {disagreements == 0, fmt("100 edge sets (%d with crossings): %d disagree with brute force (need 0)", with_crossings, disagreements)};
}

Outcome offline_online() {
  const DemoScenario s = demo_scenario();
  int compared = 0;
  int mismatches = 0;
  for (const bool closed : {false, true}) {
    Deployment d = s.config.deployment;
    if (closed) d.find_edge(s.branch)->enabled = false;
    PathServer server(d);
    for (const Node& at : d.nodes) {
      for (const Node& dest : d.nodes) {
        const SessionId sid = std::get<SessionId>(server.create_session(dest.id));
        const auto online = server.resolve_qr(d.anchor_for(at.id)->qr_id, sid);
        const auto offline = offline_next_edge(d, at.id, dest.id);
        ++compared;
        bool same = online.index() == offline.index();
        if (same && ok(online)) same = std::get<Guidance>(online) == std::get<Guidance>(offline);
        if (same && !ok(online)) same = std::get<Failure>(online).code == std::get<Failure>(offline).code;
        if (!same) ++mismatches;
      }
    }
  }
  return {mismatches == 0, fmt("%d (node, destination) pairs on the demo, with and without the branch: %d differ (need 0)", compared, mismatches)};
}

std::vector<Json> trace_records(const std::string& trace) {
  std::vector<Json> out;
  std::istringstream in(trace);
  std::string l;
  std::getline(in, l);
  while (std::getline(in, l)) out.push_back(Json::parse(l));
  return out;
}

Outcome live_reroute() {
  constexpr double kPatchAt = 10.0;
  const DemoScenario s = demo_scenario(kPatchAt);
  const SimResult r = run_sim(s.config);
  int post_patch_guidance = 0;
  int references = 0;
  for (const Json& rec : trace_records(r.trace)) {
    if (rec["t"].get<double>() < kPatchAt - 1e-9) continue;
    for (const Json& e : rec["events"]) {
      if (e["kind"] != "GuidanceReceived") continue;
      ++post_patch_guidance;
      const Json& next = e["guidance"]["next"];
      if (!next.is_null() && next["edge"] == s.branch.value) ++references;
    }
  }
  const bool reached = r.metrics.reached;
  return {reached && r.metrics.reroutes >= 1 && references == 0,
          fmt("reached %s at %.1f s, reroutes %d (need >= 1), %d post-patch guidance messages, %d reference the closed edge (need 0)",
              reached ? "yes" : "no", reached ? *r.metrics.time_to_goal : 0.0, r.metrics.reroutes, post_patch_guidance, references)};
}

Outcome convergence() {
  SimConfig c;
  c.deployment = oracle::straight_edge(5.0);
  c.from = NodeId{0};
  c.to = NodeId{1};
  c.timeout = 60.0;
  c.start_offset = 0.3;
  const SimResult guided = run_sim(c);
  c.nav.haptics_enabled = false;
  const SimResult ablation = run_sim(c);
  const bool ok_guided = guided.metrics.reached && *guided.metrics.time_to_goal <= 60.0;
  const bool ok_ablation = !ablation.metrics.reached;
  return {ok_guided && ok_ablation,
          fmt("with haptics: reached %s at %.1f s (need <= 60 s); haptics disabled: reached %s%s (need not reached within 60 s)",
              guided.metrics.reached ? "yes" : "no", guided.metrics.reached ? *guided.metrics.time_to_goal : 0.0,
              ablation.metrics.reached ? "yes at " : "no", ablation.metrics.reached ? fmt("%.1f s", *ablation.metrics.time_to_goal).c_str() : "")};
}

Outcome haptic_contract() {
  const auto worlds = generated_worlds(4);
  std::vector<FloorRaster> rasters;
  for (const auto& w : worlds) rasters.push_back(rasterize_floor(w));
  NavConfig cfg;
  Rng rng(99);
  int checks = 0;
  int vibrating = 0;
  int violations = 0;
  for (int f = 0; f < 120; ++f) {
    const std::size_t wi = static_cast<std::size_t>(f) % worlds.size();
    const Deployment& w = worlds[wi];
    const Edge& e = w.edges[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(w.edges.size()) - 1))];
    const auto dir = rng.chance(0.5) ? TravelDirection::Forward : TravelDirection::Backward;
    const LanePose lp = lane_pose(e, dir, rng.uniform(0.0, e.length()), rng.uniform(-0.6, 0.6), rng.uniform(-0.8, 0.8));
    Pose pose = lp.pose;
    pose.phone_yaw_offset = rng.uniform(-0.7, 0.7);
    const Frame frame = render_frame(rasters[wi], pose, cfg.camera, {rng.uniform(0.0, 10.0), rng.next_u64()});
    // Independent view of the frame for the oracle side.
    const auto lanes = detect_lanes(segment_colors(frame, cfg.vision), cfg.vision);
    for (int t = 0; t < 12; ++t) {
      NavState state;
      const ColorPair assigned = rng.chance(0.7) ? lp.expected : ColorPair{kPalette[rng.uniform_int(0, 5)], kPalette[rng.uniform_int(0, 5)]};
      state.assigned = Assignment{e.id, dir, assigned};
      const TouchPoint touch{rng.uniform(0.0, cfg.camera.width - 1e-6), rng.uniform(0.0, cfg.camera.height - 1e-6)};
      const double now = rng.uniform(0.0, 100.0);
      const StepOutput out = step(state, frame, touch, 0, now, cfg);
      for (int sample = 0; sample < 10; ++sample) {
        ++checks;
        const double ts = now + rng.uniform(0.0, 1.0);
        if (!vibration_sample(out.haptic, ts)) continue;
        ++vibrating;
        bool oracle_ok = false;
        for (const auto& l : lanes) {
          if (l.ordered_pair == assigned &&
              oracle::in_dilated_mask(l.lane_mask, static_cast<int>(touch.u), static_cast<int>(touch.v), cfg.vision.dilation_radius)) {
            oracle_ok = true;
          }
        }
        if (!out.feedback || !oracle_ok) ++violations;
      }
    }
  }
  return {violations == 0 && vibrating > 0,
          fmt("%d samples over 120 frames x 12 touches, %d vibrating: %d violate vibration => feedback => touch in dilated "
              "mask of the assigned pair (need 0)",
              checks, vibrating, violations)};
}

Outcome performance() {
  const auto worlds = generated_worlds(3);
  std::vector<FloorRaster> rasters;
  for (const auto& w : worlds) rasters.push_back(rasterize_floor(w));
  const CameraIntrinsics k;
  const VisionParams vp;
  Rng rng(3);
  std::vector<double> ms;
  for (int i = 0; i < 300; ++i) {
    const std::size_t wi = static_cast<std::size_t>(i) % worlds.size();
    const Deployment& w = worlds[wi];
    const Edge& e = w.edges[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(w.edges.size()) - 1))];
    Pose pose = lane_pose(e, TravelDirection::Forward, rng.uniform(0.0, e.length()), rng.uniform(-0.3, 0.3), rng.uniform(-0.5, 0.5)).pose;
    pose.phone_yaw_offset = rng.uniform(-0.7, 0.7);
    const auto t0 = Clock::now();
    const Frame f = render_frame(rasters[wi], pose, k, {5.0, static_cast<std::uint64_t>(i)});
    const LabelMask mask = segment_colors(f, vp);
    const auto lane = detect_lane(mask, vp);
    const auto markers = detect_markers(f, mask, vp);
    ms.push_back(seconds_since(t0) * 1000.0);
    (void)lane;
    (void)markers;
  }
  std::sort(ms.begin(), ms.end());
  const double median = (ms[149] + ms[150]) / 2.0;
  return {median < 33.0, fmt("median %.2f ms per frame over 300 frames (need < 33 ms), p95 %.2f ms, max %.2f ms", median, ms[284], ms.back())};
}

Outcome determinism() {
  WorldParams wp;
  wp.seed = 5;
  SimConfig c;
  c.deployment = generate_world(wp);
  c.from = c.deployment.nodes.front().id;
  c.to = c.deployment.nodes.back().id;
  c.seed = 31337;
  c.noise_sigma = 6.0;
  c.agent.heading_noise = 0.05;
  const SimResult a = run_sim(c);
  const SimResult b = run_sim(c);
  const SimResult d1 = run_sim(demo_scenario(10.0).config);
  const SimResult d2 = run_sim(demo_scenario(10.0).config);
  const bool same = a.trace == b.trace && d1.trace == d2.trace;
  return {same, fmt("generated world with camera and gait noise: %zu bytes, %s; patched demo: %zu bytes, %s",
                    a.trace.size(), a.trace == b.trace ? "identical" : "DIFFERENT", d1.trace.size(),
                    d1.trace == d2.trace ? "identical" : "DIFFERENT")};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"codec chain", codec_chain},
      {"marker roundtrip", marker_roundtrip},
      {"routing oracle", routing_oracle},
      {"planarity oracle", planarity_oracle},
      {"offline/online equivalence", offline_online},
      {"live reroute", live_reroute},
      {"closed-loop convergence", convergence},
      {"haptic contract", haptic_contract},
      {"performance budget", performance},
      {"determinism", determinism},
  };
  for (const auto& [name, check] : criteria) line(name, check());
  std::printf("%d of %zu criteria failed\n", failures, std::size(criteria));
  return failures;
}
