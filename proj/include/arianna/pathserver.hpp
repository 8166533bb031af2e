#pragma once

// Path server: versioned deployment repository, navigation sessions, QR
// resolution and live patches. Transport-agnostic; see http.hpp for HTTP.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "arianna/protocol.hpp"

namespace arianna {

struct Session {
  SessionId id;
  NodeId destination;
  double created_at{0.0};  // seconds since server start
  std::optional<NodeId> last_node;
  std::uint64_t deployment_version_at_creation{0};
};

struct AccessLogEntry {
  std::uint64_t seq{0};
  std::string op;      // create_session | resolve_qr | apply_patch | get_deployment | get_session | health
  std::string detail;  // request parameters, compact
  int status{200};
};

struct Health {
  std::uint64_t version{0};
  double uptime{0.0};
};

/// Snapshot plus its canonical serialisation, swapped together.
struct Snapshot {
  std::shared_ptr<const Deployment> deployment;
  std::shared_ptr<const std::string> text;
};

class PathServer {
 public:
  /// Serves `initial` without persistence when `repository` is empty. Throws
  /// FormatError if `initial` fails validation.
  explicit PathServer(Deployment initial, std::filesystem::path repository = {}, std::uint64_t seed = 0);

  /// Loads the repository file and rewrites it canonically if its bytes differ.
  static std::unique_ptr<PathServer> open(const std::filesystem::path& repository, std::uint64_t seed = 0);

  Result<SessionId> create_session(NodeId destination);
  Result<Session> session(SessionId id);
  Result<Guidance> resolve_qr(QrId qr, SessionId session, std::optional<EdgeId> edge_hint = std::nullopt);
  /// New version on success; Rejected (with report) or NotFound otherwise.
  Result<std::uint64_t> apply_patch(const AdminPatch& patch);

  Snapshot snapshot() const;
  /// Canonical text of the current snapshot, identical to the repository file.
  std::string deployment_text();
  Health health();

  std::vector<AccessLogEntry> access_log() const;

  /// Called between snapshot acquisition and route computation inside
  /// resolve_qr. Test hook for exercising snapshot isolation.
  void set_resolve_hook(std::function<void()> hook) { resolve_hook_ = std::move(hook); }

 private:
  void log(std::string op, std::string detail, int status);

  std::filesystem::path repository_;
  std::uint64_t seed_;
  std::chrono::steady_clock::time_point started_;

  mutable std::mutex snapshot_mutex_;
  Snapshot current_;

  std::mutex writer_mutex_;

  std::mutex session_mutex_;
  std::map<SessionId, Session> sessions_;
  std::uint64_t session_counter_{0};

  mutable std::mutex log_mutex_;
  std::vector<AccessLogEntry> log_;

  std::function<void()> resolve_hook_;
};

/// What the navigator needs from a server, in-process or remote.
class PathClient {
 public:
  virtual ~PathClient() = default;
  virtual Result<SessionId> create_session(NodeId destination) = 0;
  virtual Result<Guidance> resolve_qr(QrId qr, SessionId session, std::optional<EdgeId> edge_hint) = 0;
  virtual Result<std::uint64_t> apply_patch(const AdminPatch& patch) = 0;
  virtual Result<std::string> fetch_deployment() = 0;
};

class InProcessClient : public PathClient {
 public:
  explicit InProcessClient(PathServer& server) : server_(server) {}
  Result<SessionId> create_session(NodeId destination) override { return server_.create_session(destination); }
  Result<Guidance> resolve_qr(QrId qr, SessionId session, std::optional<EdgeId> edge_hint) override {
    return server_.resolve_qr(qr, session, edge_hint);
  }
  Result<std::uint64_t> apply_patch(const AdminPatch& patch) override { return server_.apply_patch(patch); }
  Result<std::string> fetch_deployment() override { return server_.deployment_text(); }

 private:
  PathServer& server_;
};

/// Wraps a client and fails calls with Unavailable while `down()` is true.
class FlakyClient : public PathClient {
 public:
  FlakyClient(PathClient& inner, std::function<bool()> down) : inner_(inner), down_(std::move(down)) {}
  Result<SessionId> create_session(NodeId destination) override {
    if (down_()) return unavailable();
    return inner_.create_session(destination);
  }
  Result<Guidance> resolve_qr(QrId qr, SessionId session, std::optional<EdgeId> edge_hint) override {
    if (down_()) return unavailable();
    return inner_.resolve_qr(qr, session, edge_hint);
  }
  Result<std::uint64_t> apply_patch(const AdminPatch& patch) override {
    if (down_()) return unavailable();
    return inner_.apply_patch(patch);
  }
  Result<std::string> fetch_deployment() override {
    if (down_()) return unavailable();
    return inner_.fetch_deployment();
  }

 private:
  static Failure unavailable() { return {ServerError::Unavailable, "server unreachable", std::nullopt}; }
  PathClient& inner_;
  std::function<bool()> down_;
};

}  // namespace arianna
