#include "arianna/protocol.hpp"

#include <charconv>
#include <cstdio>

namespace arianna {

std::string session_to_string(SessionId id) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(id.value));
  return buf;
}

std::optional<SessionId> parse_session(std::string_view text) {
  if (text.empty() || text.size() > 16) return std::nullopt;
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v, 16);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return SessionId{v};
}

std::string_view error_name(ServerError e) {
  switch (e) {
    case ServerError::NotFound: return "NotFound";
    case ServerError::Unauthorized: return "Unauthorized";
    case ServerError::NoRoute: return "NoRoute";
    case ServerError::Rejected: return "Rejected";
    case ServerError::Unavailable: return "Unavailable";
    case ServerError::BadRequest: return "BadRequest";
  }
  return "?";
}

int http_status(ServerError e) {
  switch (e) {
    case ServerError::NotFound: return 404;
    case ServerError::Unauthorized: return 401;
    case ServerError::NoRoute: return 409;
    case ServerError::Rejected: return 422;
    case ServerError::Unavailable: return 503;
    case ServerError::BadRequest: return 400;
  }
  return 500;
}

ServerError error_from_status(int status) {
  switch (status) {
    case 404: return ServerError::NotFound;
    case 401: return ServerError::Unauthorized;
    case 409: return ServerError::NoRoute;
    case 422: return ServerError::Rejected;
    case 400: return ServerError::BadRequest;
    default: return ServerError::Unavailable;
  }
}

Result<Guidance> plan_guidance(const Deployment& d, NodeId at, NodeId dest) {
  if (d.find_node(at) == nullptr || d.find_node(dest) == nullptr) {
    return Failure{ServerError::NotFound, "unknown node", std::nullopt};
  }
  Guidance g;
  g.node = at;
  g.deployment_version = d.version;
  if (at == dest) {
    g.destination_reached = true;
    return g;
  }
  const auto route = shortest_route(d, at, dest, true);
  if (!route) {
    return Failure{ServerError::NoRoute, "no enabled route from node " + std::to_string(at.value) + " to node " +
                                             std::to_string(dest.value),
                   std::nullopt};
  }
  const Edge& e = *d.find_edge(route->front().edge);
  NextEdge next;
  next.edge = e.id;
  next.direction = route->front().direction;
  next.expected_pair = observed_pair(e, next.direction);
  next.remaining_distance = route_length(d, *route);
  next.edge_length = weight_to_meters(edge_weight(e));
  g.next = next;
  return g;
}

std::string_view direction_name(TravelDirection d) { return d == TravelDirection::Forward ? "forward" : "backward"; }

std::optional<TravelDirection> parse_direction(std::string_view s) {
  if (s == "forward") return TravelDirection::Forward;
  if (s == "backward") return TravelDirection::Backward;
  return std::nullopt;
}

Json pair_to_json(ColorPair p) { return Json::array({color_name(p.left), color_name(p.right)}); }

ColorPair pair_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw FormatError("colour pair must be a two-element array");
  const auto l = parse_color(j[0].get<std::string>());
  const auto r = parse_color(j[1].get<std::string>());
  if (!l || !r) throw FormatError("unknown colour in pair");
  return {*l, *r};
}

Json guidance_to_json(const Guidance& g) {
  Json j;
  j["node"] = g.node.value;
  j["destination_reached"] = g.destination_reached;
  if (g.next) {
    j["next"] = Json{{"edge", g.next->edge.value},
                     {"direction", direction_name(g.next->direction)},
                     {"expected_pair", pair_to_json(g.next->expected_pair)},
                     {"remaining_distance", g.next->remaining_distance},
                     {"edge_length", g.next->edge_length}};
  } else {
    j["next"] = nullptr;
  }
  j["deployment_version"] = g.deployment_version;
  return j;
}

Guidance guidance_from_json(const Json& j) {
  try {
    Guidance g;
    g.node = NodeId{j.at("node").get<std::uint32_t>()};
    g.destination_reached = j.at("destination_reached").get<bool>();
    g.deployment_version = j.at("deployment_version").get<std::uint64_t>();
    const Json& n = j.at("next");
    if (!n.is_null()) {
      NextEdge next;
      next.edge = EdgeId{n.at("edge").get<std::uint32_t>()};
      const auto dir = parse_direction(n.at("direction").get<std::string>());
      if (!dir) throw FormatError("bad direction");
      next.direction = *dir;
      next.expected_pair = pair_from_json(n.at("expected_pair"));
      next.remaining_distance = n.at("remaining_distance").get<double>();
      next.edge_length = n.at("edge_length").get<double>();
      g.next = next;
    }
    return g;
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("bad guidance: ") + ex.what());
  }
}

Json failure_to_json(const Failure& f) {
  Json j{{"error", error_name(f.code)}, {"message", f.message}};
  if (f.report) j["report"] = validation_to_json(*f.report);
  return j;
}

Failure failure_from_json(ServerError code, const Json& j) {
  Failure f;
  f.code = code;
  if (j.is_object()) f.message = j.value("message", "");
  return f;
}

Json patch_to_json(const AdminPatch& p) {
  Json ops = Json::array();
  for (const auto& op : p.ops) {
    if (const auto* s = std::get_if<SetEdgeEnabled>(&op)) {
      ops.push_back(Json{{"op", "set_edge_enabled"}, {"edge", s->edge.value}, {"enabled", s->enabled}});
    } else {
      ops.push_back(Json{{"op", "replace_deployment"}, {"deployment", deployment_to_json(std::get<ReplaceDeployment>(op).deployment)}});
    }
  }
  return Json{{"ops", ops}};
}

AdminPatch patch_from_json(const Json& j) {
  AdminPatch p;
  try {
    for (const Json& op : j.at("ops")) {
      const std::string kind = op.at("op").get<std::string>();
      if (kind == "set_edge_enabled") {
        p.ops.push_back(SetEdgeEnabled{EdgeId{op.at("edge").get<std::uint32_t>()}, op.at("enabled").get<bool>()});
      } else if (kind == "replace_deployment") {
        p.ops.push_back(ReplaceDeployment{deployment_from_json(op.at("deployment"))});
      } else {
        throw FormatError("unknown patch op '" + kind + "'");
      }
    }
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("bad patch: ") + ex.what());
  }
  return p;
}

}  // namespace arianna
