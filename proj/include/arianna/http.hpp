#pragma once

// HTTP/1.1 JSON front end for PathServer, and the matching client.
//
//   POST /session {"destination": N}          -> {"session_id": "hex16"}
//   GET  /session/{hex16}                     -> session record
//   GET  /qr/{qr_id}?session=S[&edge_hint=E]  -> Guidance
//   PUT  /admin/patch {"ops": [...]}          -> {"version": N}
//   GET  /deployment                          -> repository file bytes
//   GET  /health                              -> {"version": N, "uptime": seconds}
//
// Errors carry {"error", "message"[, "report"]} with 404 NotFound,
// 401 Unauthorized, 409 NoRoute, 422 Rejected, 400 BadRequest.

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "arianna/pathserver.hpp"

namespace httplib {
class Server;
class Client;
}  // namespace httplib

namespace arianna {

class HttpFrontend {
 public:
  /// `static_dir`, when set, is served at "/" (the browser UI assets).
  explicit HttpFrontend(PathServer& server, std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~HttpFrontend();
  HttpFrontend(const HttpFrontend&) = delete;
  HttpFrontend& operator=(const HttpFrontend&) = delete;

  /// Binds; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Blocks serving requests until stop().
  bool serve();
  void stop();
  void wait_until_ready() const;

 private:
  PathServer& server_;
  std::unique_ptr<httplib::Server> http_;
};

class HttpPathClient : public PathClient {
 public:
  /// `base` like "http://127.0.0.1:8080".
  explicit HttpPathClient(const std::string& base, std::chrono::milliseconds timeout = std::chrono::milliseconds(2000));
  ~HttpPathClient() override;

  Result<SessionId> create_session(NodeId destination) override;
  Result<Guidance> resolve_qr(QrId qr, SessionId session, std::optional<EdgeId> edge_hint) override;
  Result<std::uint64_t> apply_patch(const AdminPatch& patch) override;
  Result<std::string> fetch_deployment() override;
  Result<Json> health();

 private:
  std::unique_ptr<httplib::Client> http_;
};

}  // namespace arianna
