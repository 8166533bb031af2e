#include "arianna/deployment_io.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

namespace arianna {

Json vec_to_json(Vec2 p) { return Json::array({round_mm(p.x), round_mm(p.y)}); }

Vec2 vec_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw FormatError("expected a [x, y] pair, got " + j.dump());
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

namespace {

std::string_view kind_name(NodeKind k) { return k == NodeKind::PointOfInterest ? "poi" : "intersection"; }

NodeKind parse_kind(const std::string& s) {
  if (s == "poi") return NodeKind::PointOfInterest;
  if (s == "intersection") return NodeKind::Intersection;
  throw FormatError("unknown node kind '" + s + "'");
}

ColorId color_from_json(const Json& j) {
  if (!j.is_string()) throw FormatError("colour must be a string");
  auto c = parse_color(j.get<std::string>());
  if (!c) throw FormatError("unknown colour '" + j.get<std::string>() + "'");
  return *c;
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw FormatError(std::string("missing key '") + key + "'");
  }
  return j.at(key);
}

template <typename T>
T number(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number()) throw FormatError(std::string("key '") + key + "' must be a number");
  return v.get<T>();
}

}  // namespace

Json deployment_to_json(const Deployment& d) {
  Json j;
  j["deployment_id"] = d.deployment_id.value;
  j["version"] = d.version;
  Json nodes = Json::array();
  for (const auto& n : d.nodes) {
    Json jn;
    jn["id"] = n.id.value;
    jn["position"] = vec_to_json(n.position);
    jn["kind"] = kind_name(n.kind);
    if (n.label) jn["label"] = *n.label;
    nodes.push_back(std::move(jn));
  }
  j["nodes"] = std::move(nodes);
  Json edges = Json::array();
  for (const auto& e : d.edges) {
    Json je;
    je["id"] = e.id.value;
    je["from"] = e.from.value;
    je["to"] = e.to.value;
    Json pl = Json::array();
    for (Vec2 p : e.polyline) pl.push_back(vec_to_json(p));
    je["polyline"] = std::move(pl);
    je["colors"] = Json::array({color_name(e.colors.left), color_name(e.colors.right)});
    je["enabled"] = e.enabled;
    edges.push_back(std::move(je));
  }
  j["edges"] = std::move(edges);
  Json anchors = Json::array();
  for (const auto& a : d.anchors) {
    Json ja;
    ja["qr_id"] = a.qr_id.value;
    ja["node"] = a.node.value;
    ja["position"] = vec_to_json(a.position);
    ja["size"] = round_mm(a.size);
    anchors.push_back(std::move(ja));
  }
  j["anchors"] = std::move(anchors);
  j["floor_bounds"] = Json{{"min", vec_to_json(d.floor_bounds.min)}, {"max", vec_to_json(d.floor_bounds.max)}};
  return j;
}

Deployment deployment_from_json(const Json& j) {
  Deployment d;
  try {
    d.deployment_id = DeploymentId{number<std::uint16_t>(j, "deployment_id")};
    d.version = number<std::uint64_t>(j, "version");
    for (const auto& jn : field(j, "nodes")) {
      Node n;
      n.id = NodeId{number<std::uint32_t>(jn, "id")};
      n.position = vec_from_json(field(jn, "position"));
      n.kind = parse_kind(field(jn, "kind").get<std::string>());
      if (jn.contains("label")) n.label = jn.at("label").get<std::string>();
      d.nodes.push_back(std::move(n));
    }
    for (const auto& je : field(j, "edges")) {
      Edge e;
      e.id = EdgeId{number<std::uint32_t>(je, "id")};
      e.from = NodeId{number<std::uint32_t>(je, "from")};
      e.to = NodeId{number<std::uint32_t>(je, "to")};
      for (const auto& p : field(je, "polyline")) e.polyline.push_back(vec_from_json(p));
      const Json& cols = field(je, "colors");
      if (!cols.is_array() || cols.size() != 2) throw FormatError("edge colors must be a pair");
      e.colors = {color_from_json(cols[0]), color_from_json(cols[1])};
      e.enabled = je.value("enabled", true);
      d.edges.push_back(std::move(e));
    }
    for (const auto& ja : field(j, "anchors")) {
      QrAnchor a;
      a.qr_id = QrId{number<std::uint16_t>(ja, "qr_id")};
      a.node = NodeId{number<std::uint32_t>(ja, "node")};
      a.position = vec_from_json(field(ja, "position"));
      a.size = ja.contains("size") ? number<double>(ja, "size") : 0.20;
      d.anchors.push_back(a);
    }
    const Json& fb = field(j, "floor_bounds");
    d.floor_bounds = {vec_from_json(field(fb, "min")), vec_from_json(field(fb, "max"))};
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("malformed deployment: ") + ex.what());
  }
  return d;
}

std::string serialize_deployment(const Deployment& d) { return deployment_to_json(d).dump(2) + "\n"; }

Deployment parse_deployment(std::string_view text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw FormatError("deployment is not valid JSON");
  }
  return deployment_from_json(j);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Deployment load_deployment(const std::filesystem::path& path) { return parse_deployment(read_file(path)); }

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot write " + tmp.string());
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      throw std::runtime_error("short write to " + tmp.string());
    }
  }
  // Flush file data before the rename makes it visible.
  if (FILE* f = std::fopen(tmp.c_str(), "rb")) {
    ::fsync(fileno(f));
    std::fclose(f);
  }
  std::filesystem::rename(tmp, path);
}

Json validation_to_json(const ValidationReport& r) {
  Json violations = Json::array();
  for (const auto& v : r.violations) {
    violations.push_back(Json{{"kind", violation_kind_name(v.kind)}, {"message", v.message}});
  }
  Json unreachable = Json::array();
  for (NodeId n : r.unreachable) unreachable.push_back(n.value);
  return Json{{"violations", std::move(violations)}, {"unreachable", std::move(unreachable)}};
}

}  // namespace arianna
