// arianna: world generation, headless runs, frame rendering, trace evaluation,
// the demo scenario, and the path server plus UI channel.
//
// Exit codes: 0 success, 1 destination not reached, 2 configuration error.

#include <CLI11.hpp>
#include <pthread.h>

#include <csignal>
#include <fstream>
#include <iostream>
#include <numbers>
#include <thread>

#include "arianna/deployment_io.hpp"
#include "arianna/http.hpp"
#include "arianna/image_io.hpp"
#include "arianna/sim.hpp"
#include "arianna/ui_channel.hpp"
#include "arianna/vision.hpp"

using namespace arianna;

namespace {

constexpr int kOk = 0;
constexpr int kNotReached = 1;
constexpr int kConfigError = 2;

std::pair<std::string, int> split_address(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos) throw ConfigError("address must look like HOST:PORT, got '" + addr + "'");
  try {
    const int port = std::stoi(addr.substr(colon + 1));
    if (port < 0 || port > 65535) throw ConfigError("port out of range in '" + addr + "'");
    return {addr.substr(0, colon), port};
  } catch (const std::logic_error&) {
    throw ConfigError("bad port in '" + addr + "'");
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

int report(const RunMetrics& m) {
  std::cout << metrics_to_json(m).dump(2) << '\n';
  return m.reached ? kOk : kNotReached;
}

// --- subcommands ---

struct GenArgs {
  std::uint64_t seed{1};
  std::string out;
  int min_nodes{6};
  int max_nodes{12};
  double width{20.0};
  double height{20.0};
};

int cmd_gen(const GenArgs& a) {
  WorldParams p;
  p.seed = a.seed;
  p.min_nodes = a.min_nodes;
  p.max_nodes = a.max_nodes;
  p.floor_width = a.width;
  p.floor_height = a.height;
  const Deployment d = generate_world(p);
  write_file_atomic(a.out, serialize_deployment(d));
  std::cerr << "wrote " << a.out << ": " << d.nodes.size() << " nodes, " << d.edges.size() << " edges\n";
  return kOk;
}

struct RunArgs {
  std::string world;
  std::uint32_t from{0};
  std::uint32_t to{0};
  std::string trace;
  std::string server;
  bool in_process{false};
  bool offline{false};
  bool no_haptics{false};
  double noise_sigma{0.0};
  std::uint64_t seed{1};
  double timeout{120.0};
  double start_offset{0.0};
  double start_heading_error{0.0};
  std::string agent;
  std::string patch;
  double patch_at{0.0};
};

int cmd_run(const RunArgs& a) {
  SimConfig c;
  c.deployment = load_deployment(a.world);
  c.from = NodeId{a.from};
  c.to = NodeId{a.to};
  c.seed = a.seed;
  c.noise_sigma = a.noise_sigma;
  c.timeout = a.timeout;
  c.start_offset = a.start_offset;
  c.start_heading_error = a.start_heading_error * std::numbers::pi / 180.0;
  c.offline = a.offline;
  c.nav.haptics_enabled = !a.no_haptics;
  if (!a.agent.empty()) c.agent = agent_params_from_json(Json::parse(read_file(a.agent)));
  if (!a.patch.empty()) c.patches.push_back({a.patch_at, patch_from_json(Json::parse(read_file(a.patch)))});

  std::unique_ptr<HttpPathClient> remote;
  if (!a.server.empty()) {
    remote = std::make_unique<HttpPathClient>(a.server);
    if (!ok(remote->health())) throw ConfigError("path server at " + a.server + " is not reachable");
  }
  const SimResult r = run_sim(c, remote.get());
  if (!a.trace.empty()) write_text(a.trace, r.trace);
  return report(r.metrics);
}

struct RenderArgs {
  std::string world;
  std::vector<double> pose;
  std::string out;
  std::string mask_out;
  std::string floor_out;
  double noise_sigma{0.0};
  std::uint64_t seed{0};
};

int cmd_render(const RenderArgs& a) {
  const Deployment d = load_deployment(a.world);
  const FloorRaster raster = rasterize_floor(d);
  if (!a.floor_out.empty()) write_image(a.floor_out, floor_image(raster));
  Pose pose;
  pose.position = {a.pose.at(0), a.pose.at(1)};
  pose.body_heading = a.pose.at(2);
  if (a.pose.size() > 3) pose.phone_yaw_offset = a.pose[3];
  if (std::abs(pose.phone_yaw_offset) > kMaxPhoneYaw) throw ConfigError("phone yaw is beyond reach");
  const CameraIntrinsics k;
  const Frame f = render_frame(raster, pose, k, {a.noise_sigma, a.seed});
  write_image(a.out, f);

  const VisionParams vp;
  const LabelMask mask = segment_colors(f, vp);
  const auto lane = detect_lane(mask, vp);
  if (!a.mask_out.empty()) write_image(a.mask_out, label_overlay(mask, lane ? &lane->lane_mask : nullptr));
  Json summary{{"lane", nullptr}, {"markers", Json::array()}};
  if (lane) {
    summary["lane"] = Json{{"pair", pair_to_json(lane->ordered_pair)}, {"axis_angle", lane->axis_angle}, {"confidence", lane->confidence}};
  }
  for (const auto& m : detect_markers(f, mask, vp).markers) {
    summary["markers"].push_back(Json{{"kind", m.payload.kind == MarkerKind::Node ? "node" : "edge"}, {"id", m.payload.id}, {"u", m.u}, {"v", m.v}});
  }
  std::cout << summary.dump(2) << '\n';
  return kOk;
}

int cmd_eval(const std::string& trace) {
  std::ifstream in(trace, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + trace);
  return report(eval_trace(in));
}

struct DemoArgs {
  std::optional<double> patch_at;
  std::string trace;
  std::uint64_t seed{1};
  double noise_sigma{0.0};
};

int cmd_demo(const DemoArgs& a) {
  DemoScenario s = demo_scenario(a.patch_at);
  s.config.seed = a.seed;
  s.config.noise_sigma = a.noise_sigma;
  const SimResult r = run_sim(s.config);
  if (!a.trace.empty()) write_text(a.trace, r.trace);
  return report(r.metrics);
}

struct ServeArgs {
  std::string world;
  std::string listen{"127.0.0.1:8080"};
  std::string ui_listen;
  std::string static_dir;
  std::optional<std::uint32_t> from;
  std::optional<std::uint32_t> to;
  std::uint64_t seed{1};
};

int cmd_serve(const ServeArgs& a) {
  // Signals are taken by a waiter thread; every thread started below inherits the mask.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  auto server = PathServer::open(a.world, a.seed);
  const Deployment d = *server->snapshot().deployment;
  if (d.nodes.empty()) throw ConfigError("world has no nodes");

  // The UI walker starts at --from and heads for --to; by default the first
  // node and the first other point of interest.
  SimConfig c;
  c.deployment = d;
  c.seed = a.seed;
  c.from = a.from ? NodeId{*a.from} : d.nodes.front().id;
  c.to = d.nodes.back().id;
  for (const Node& n : d.nodes) {
    if (n.kind == NodeKind::PointOfInterest && n.id != c.from) {
      c.to = n.id;
      break;
    }
  }
  if (a.to) c.to = NodeId{*a.to};
  InProcessClient client(*server);
  Simulation sim(c, &client);

  const auto [host, port] = split_address(a.listen);
  std::string ui_host = host;
  int ui_port = port == 0 ? 0 : port + 1;
  if (!a.ui_listen.empty()) std::tie(ui_host, ui_port) = split_address(a.ui_listen);

  std::optional<std::filesystem::path> static_dir;
  if (!a.static_dir.empty()) static_dir = a.static_dir;
  HttpFrontend http(*server, static_dir);
  const int bound = http.bind(host, port);
  if (bound < 0) throw ConfigError("cannot listen on " + a.listen);
  UiChannelServer ui(sim);
  const int ui_bound = ui.bind(ui_host, ui_port);
  ui.start();
  std::cerr << "path server on http://" << host << ':' << bound << ", UI channel on ws://" << ui_host << ':' << ui_bound
            << " (walker " << c.from.value << " -> " << c.to.value << ")\n";

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&stop_signals, &sig);
    http.stop();
  });
  http.serve();
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  ui.stop();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ARIANNA assisted-navigation simulator"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a random valid deployment");
  g->add_option("--seed", gen.seed, "Generator seed");
  g->add_option("--out", gen.out, "Output deployment file")->required();
  g->add_option("--min-nodes", gen.min_nodes);
  g->add_option("--max-nodes", gen.max_nodes);
  g->add_option("--width", gen.width, "Floor width in metres");
  g->add_option("--height", gen.height, "Floor height in metres");

  RunArgs run;
  auto* r = app.add_subcommand("run", "Run the scripted walker from one node to another");
  r->add_option("--world", run.world, "Deployment file")->required();
  r->add_option("--from", run.from, "Start node id")->required();
  r->add_option("--to", run.to, "Destination node id")->required();
  r->add_option("--trace", run.trace, "Write the JSONL trace here");
  auto* server_opt = r->add_option("--server", run.server, "Path server base URL, e.g. http://127.0.0.1:8080");
  auto* in_process_opt = r->add_flag("--in-process", run.in_process, "Use an in-process path server (default)");
  auto* offline_opt = r->add_flag("--offline", run.offline, "Route on a local copy of the deployment");
  server_opt->excludes(in_process_opt)->excludes(offline_opt);
  in_process_opt->excludes(offline_opt);
  r->add_flag("--no-haptics", run.no_haptics, "Disable vibration feedback (ablation)");
  r->add_option("--noise-sigma", run.noise_sigma, "Camera noise, 8-bit units");
  r->add_option("--seed", run.seed);
  r->add_option("--timeout", run.timeout, "Simulated seconds");
  r->add_option("--start-offset", run.start_offset, "Metres left of the first lane");
  r->add_option("--start-heading-error", run.start_heading_error, "Degrees, counter-clockwise");
  r->add_option("--agent", run.agent, "JSON file with walker parameters");
  auto* patch_opt = r->add_option("--patch", run.patch, "JSON admin patch to apply mid-run");
  r->add_option("--patch-at", run.patch_at, "Simulated time of --patch")->needs(patch_opt);

  RenderArgs render;
  auto* rd = app.add_subcommand("render", "Render one camera frame and report what the vision pipeline sees");
  rd->add_option("--world", render.world)->required();
  rd->add_option("--pose", render.pose, "x,y,heading[,yaw] in metres and radians")->required()->expected(3, 4)->delimiter(',');
  rd->add_option("--out", render.out, "Frame file (.png or .ppm)")->required();
  rd->add_option("--mask-out", render.mask_out, "Segmentation overlay image");
  rd->add_option("--floor-out", render.floor_out, "Whole floor image");
  rd->add_option("--noise-sigma", render.noise_sigma);
  rd->add_option("--seed", render.seed);

  std::string trace;
  auto* ev = app.add_subcommand("eval", "Recompute metrics from a trace");
  ev->add_option("--trace", trace)->required();

  DemoArgs demo;
  auto* dm = app.add_subcommand("demo", "Run the built-in demo scenario");
  dm->add_option("--patch-at", demo.patch_at, "Close the branch at this simulated time");
  dm->add_option("--trace", demo.trace);
  dm->add_option("--seed", demo.seed);
  dm->add_option("--noise-sigma", demo.noise_sigma);

  ServeArgs serve;
  auto* sv = app.add_subcommand("serve", "Serve the path server API and the UI simulation channel");
  sv->add_option("--world", serve.world, "Deployment repository file; patches are written back to it")->required();
  sv->add_option("--listen", serve.listen, "HTTP address HOST:PORT");
  sv->add_option("--ui-listen", serve.ui_listen, "WebSocket address (default: HTTP port + 1)");
  sv->add_option("--static", serve.static_dir, "Directory of UI assets served at /");
  sv->add_option("--from", serve.from, "UI walker start node");
  sv->add_option("--to", serve.to, "UI walker destination node");
  sv->add_option("--seed", serve.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (g->parsed()) return cmd_gen(gen);
    if (r->parsed()) return cmd_run(run);
    if (rd->parsed()) return cmd_render(render);
    if (ev->parsed()) return cmd_eval(trace);
    if (dm->parsed()) return cmd_demo(demo);
    if (sv->parsed()) return cmd_serve(serve);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
  } catch (const ParseError& e) {
    std::cerr << "trace error: " << e.what() << '\n';
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
  } catch (const GenerationError& e) {
    std::cerr << "generation failed: " << e.what() << '\n';
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "bad JSON: " << e.what() << '\n';
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return kConfigError;
}
