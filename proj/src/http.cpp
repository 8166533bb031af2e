#include "arianna/http.hpp"

#include "httplib.h"

namespace arianna {

namespace {

constexpr const char* kJson = "application/json";

void send_failure(httplib::Response& res, const Failure& f) {
  res.status = http_status(f.code);
  res.set_content(failure_to_json(f).dump(), kJson);
}

void send_json(httplib::Response& res, const Json& j) {
  res.status = 200;
  res.set_content(j.dump(), kJson);
}

std::optional<Json> parse_body(const httplib::Request& req, httplib::Response& res) {
  try {
    return Json::parse(req.body);
  } catch (const nlohmann::json::exception& ex) {
    send_failure(res, {ServerError::BadRequest, std::string("body is not JSON: ") + ex.what(), std::nullopt});
    return std::nullopt;
  }
}

}  // namespace

HttpFrontend::HttpFrontend(PathServer& server, std::optional<std::filesystem::path> static_dir)
    : server_(server), http_(std::make_unique<httplib::Server>()) {
  auto& http = *http_;

  http.Post("/session", [this](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req, res);
    if (!body) return;
    if (!body->is_object() || !body->contains("destination") || !(*body)["destination"].is_number_unsigned()) {
      send_failure(res, {ServerError::BadRequest, "expected {\"destination\": node id}", std::nullopt});
      return;
    }
    const auto r = server_.create_session(NodeId{(*body)["destination"].get<std::uint32_t>()});
    if (const auto* id = std::get_if<SessionId>(&r)) {
      send_json(res, Json{{"session_id", session_to_string(*id)}});
    } else {
      send_failure(res, std::get<Failure>(r));
    }
  });

  http.Get(R"(/session/([0-9a-fA-F]{1,16}))", [this](const httplib::Request& req, httplib::Response& res) {
    const auto id = parse_session(req.matches[1].str());
    const auto r = server_.session(*id);
    if (const auto* s = std::get_if<Session>(&r)) {
      Json j{{"session_id", session_to_string(s->id)},
             {"destination", s->destination.value},
             {"created_at", s->created_at},
             {"last_node", s->last_node ? Json(s->last_node->value) : Json(nullptr)},
             {"deployment_version_at_creation", s->deployment_version_at_creation}};
      send_json(res, j);
    } else {
      send_failure(res, std::get<Failure>(r));
    }
  });

  http.Get(R"(/qr/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
    const unsigned long qr = std::stoul(req.matches[1].str());
    const auto session = parse_session(req.get_param_value("session"));
    if (qr > 0xffff) {
      send_failure(res, {ServerError::NotFound, "unknown qr id", std::nullopt});
      return;
    }
    if (!session) {
      send_failure(res, {ServerError::Unauthorized, "missing or malformed session", std::nullopt});
      return;
    }
    std::optional<EdgeId> hint;
    if (req.has_param("edge_hint")) {
      try {
        hint = EdgeId{static_cast<std::uint32_t>(std::stoul(req.get_param_value("edge_hint")))};
      } catch (const std::exception&) {
        send_failure(res, {ServerError::BadRequest, "edge_hint must be an integer", std::nullopt});
        return;
      }
    }
    const auto r = server_.resolve_qr(QrId{static_cast<std::uint16_t>(qr)}, *session, hint);
    if (const auto* g = std::get_if<Guidance>(&r)) {
      send_json(res, guidance_to_json(*g));
    } else {
      send_failure(res, std::get<Failure>(r));
    }
  });

  http.Put("/admin/patch", [this](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req, res);
    if (!body) return;
    AdminPatch patch;
    try {
      patch = patch_from_json(*body);
    } catch (const FormatError& ex) {
      send_failure(res, {ServerError::BadRequest, ex.what(), std::nullopt});
      return;
    }
    const auto r = server_.apply_patch(patch);
    if (const auto* v = std::get_if<std::uint64_t>(&r)) {
      send_json(res, Json{{"version", *v}});
    } else {
      send_failure(res, std::get<Failure>(r));
    }
  });

  http.Get("/deployment", [this](const httplib::Request&, httplib::Response& res) {
    res.status = 200;
    res.set_content(server_.deployment_text(), kJson);
  });

  http.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
    const Health h = server_.health();
    send_json(res, Json{{"version", h.version}, {"uptime", h.uptime}});
  });

  if (static_dir) http.set_mount_point("/", static_dir->string());
}

HttpFrontend::~HttpFrontend() { stop(); }

int HttpFrontend::bind(const std::string& host, int port) {
  if (port == 0) return http_->bind_to_any_port(host);
  return http_->bind_to_port(host, port) ? port : -1;
}

bool HttpFrontend::serve() { return http_->listen_after_bind(); }

void HttpFrontend::stop() {
  if (http_) http_->stop();
}

void HttpFrontend::wait_until_ready() const { http_->wait_until_ready(); }

HttpPathClient::HttpPathClient(const std::string& base, std::chrono::milliseconds timeout)
    : http_(std::make_unique<httplib::Client>(base)) {
  http_->set_connection_timeout(timeout);
  http_->set_read_timeout(timeout);
  http_->set_write_timeout(timeout);
}

HttpPathClient::~HttpPathClient() = default;

namespace {

template <typename T, typename F>
Result<T> handle(const httplib::Result& r, F&& on_ok) {
  if (!r) return Failure{ServerError::Unavailable, "request failed: " + httplib::to_string(r.error()), std::nullopt};
  Json body;
  try {
    body = Json::parse(r->body);
  } catch (const nlohmann::json::exception&) {
    if (r->status == 200) return Failure{ServerError::Unavailable, "response is not JSON", std::nullopt};
  }
  if (r->status != 200) return failure_from_json(error_from_status(r->status), body);
  try {
    return on_ok(body, r->body);
  } catch (const std::exception& ex) {
    return Failure{ServerError::Unavailable, std::string("bad response: ") + ex.what(), std::nullopt};
  }
}

}  // namespace

Result<SessionId> HttpPathClient::create_session(NodeId destination) {
  const Json body{{"destination", destination.value}};
  return handle<SessionId>(http_->Post("/session", body.dump(), kJson), [](const Json& j, const std::string&) {
    const auto id = parse_session(j.at("session_id").get<std::string>());
    if (!id) throw FormatError("malformed session id");
    return *id;
  });
}

Result<Guidance> HttpPathClient::resolve_qr(QrId qr, SessionId session, std::optional<EdgeId> edge_hint) {
  std::string path = "/qr/" + std::to_string(qr.value) + "?session=" + session_to_string(session);
  if (edge_hint) path += "&edge_hint=" + std::to_string(edge_hint->value);
  return handle<Guidance>(http_->Get(path), [](const Json& j, const std::string&) { return guidance_from_json(j); });
}

Result<std::uint64_t> HttpPathClient::apply_patch(const AdminPatch& patch) {
  return handle<std::uint64_t>(http_->Put("/admin/patch", patch_to_json(patch).dump(), kJson),
                               [](const Json& j, const std::string&) { return j.at("version").get<std::uint64_t>(); });
}

Result<std::string> HttpPathClient::fetch_deployment() {
  return handle<std::string>(http_->Get("/deployment"), [](const Json&, const std::string& raw) { return raw; });
}

Result<Json> HttpPathClient::health() {
  return handle<Json>(http_->Get("/health"), [](const Json& j, const std::string&) { return j; });
}

}  // namespace arianna
