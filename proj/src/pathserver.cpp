#include "arianna/pathserver.hpp"

#include <sstream>

#include "arianna/rng.hpp"

namespace arianna {

namespace {

Snapshot make_snapshot(Deployment d) {
  auto text = std::make_shared<const std::string>(serialize_deployment(d));
  return {std::make_shared<const Deployment>(std::move(d)), std::move(text)};
}

std::string validation_summary(const ValidationReport& r) {
  std::ostringstream out;
  for (std::size_t i = 0; i < r.violations.size() && i < 3; ++i) {
    if (i > 0) out << "; ";
    out << r.violations[i].message;
  }
  if (r.violations.size() > 3) out << "; and " << r.violations.size() - 3 << " more";
  return out.str();
}

}  // namespace

PathServer::PathServer(Deployment initial, std::filesystem::path repository, std::uint64_t seed)
    : repository_(std::move(repository)), seed_(seed), started_(std::chrono::steady_clock::now()) {
  const auto report = validate_deployment(initial);
  if (!report.ok()) throw FormatError("deployment fails validation: " + validation_summary(report));
  current_ = make_snapshot(std::move(initial));
}

std::unique_ptr<PathServer> PathServer::open(const std::filesystem::path& repository, std::uint64_t seed) {
  const std::string bytes = read_file(repository);
  auto server = std::make_unique<PathServer>(parse_deployment(bytes), repository, seed);
  if (*server->current_.text != bytes) write_file_atomic(repository, *server->current_.text);
  return server;
}

Snapshot PathServer::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return current_;
}

void PathServer::log(std::string op, std::string detail, int status) {
  std::lock_guard lock(log_mutex_);
  log_.push_back({log_.size(), std::move(op), std::move(detail), status});
}

std::vector<AccessLogEntry> PathServer::access_log() const {
  std::lock_guard lock(log_mutex_);
  return log_;
}

Result<SessionId> PathServer::create_session(NodeId destination) {
  const Snapshot snap = snapshot();
  const std::string detail = "destination=" + std::to_string(destination.value);
  if (snap.deployment->find_node(destination) == nullptr) {
    log("create_session", detail, http_status(ServerError::NotFound));
    return Failure{ServerError::NotFound, "unknown destination node " + std::to_string(destination.value), std::nullopt};
  }
  Session s;
  s.destination = destination;
  s.deployment_version_at_creation = snap.deployment->version;
  s.created_at = std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
  {
    std::lock_guard lock(session_mutex_);
    // Deterministic per server seed; the counter guarantees uniqueness.
    do {
      s.id = SessionId{mix64(seed_ ^ mix64(++session_counter_))};
    } while (sessions_.contains(s.id));
    sessions_[s.id] = s;
  }
  log("create_session", detail, 200);
  return s.id;
}

Result<Session> PathServer::session(SessionId id) {
  std::lock_guard lock(session_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) {
    log("get_session", session_to_string(id), 401);
    return Failure{ServerError::Unauthorized, "unknown session", std::nullopt};
  }
  log("get_session", session_to_string(id), 200);
  return it->second;
}

Result<Guidance> PathServer::resolve_qr(QrId qr, SessionId session, std::optional<EdgeId> edge_hint) {
  std::string detail = "qr=" + std::to_string(qr.value) + " session=" + session_to_string(session);
  if (edge_hint) detail += " edge_hint=" + std::to_string(edge_hint->value);
  const Snapshot snap = snapshot();
  if (resolve_hook_) resolve_hook_();
  NodeId destination;
  {
    std::lock_guard lock(session_mutex_);
    const auto it = sessions_.find(session);
    if (it == sessions_.end()) {
      log("resolve_qr", detail, 401);
      return Failure{ServerError::Unauthorized, "unknown session", std::nullopt};
    }
    destination = it->second.destination;
  }
  const QrAnchor* anchor = snap.deployment->find_anchor(qr);
  if (anchor == nullptr) {
    log("resolve_qr", detail, 404);
    return Failure{ServerError::NotFound, "unknown qr id " + std::to_string(qr.value), std::nullopt};
  }
  auto result = plan_guidance(*snap.deployment, anchor->node, destination);
  {
    std::lock_guard lock(session_mutex_);
    sessions_[session].last_node = anchor->node;
  }
  log("resolve_qr", detail, ok(result) ? 200 : http_status(std::get<Failure>(result).code));
  return result;
}

Result<std::uint64_t> PathServer::apply_patch(const AdminPatch& patch) {
  std::lock_guard writer(writer_mutex_);
  const Snapshot base = snapshot();
  Deployment next = *base.deployment;
  for (const auto& op : patch.ops) {
    if (const auto* s = std::get_if<SetEdgeEnabled>(&op)) {
      Edge* e = next.find_edge(s->edge);
      if (e == nullptr) {
        log("apply_patch", "unknown edge " + std::to_string(s->edge.value), 404);
        return Failure{ServerError::NotFound, "unknown edge " + std::to_string(s->edge.value), std::nullopt};
      }
      e->enabled = s->enabled;
    } else {
      next = std::get<ReplaceDeployment>(op).deployment;
    }
  }
  next.version = base.deployment->version + 1;
  const std::string detail = "ops=" + std::to_string(patch.ops.size());
  auto report = validate_deployment(next);
  if (!report.ok()) {
    log("apply_patch", detail, 422);
    return Failure{ServerError::Rejected, "patch fails validation: " + validation_summary(report), std::move(report)};
  }
  Snapshot snap = make_snapshot(std::move(next));
  // Durable before visible: a crash after this call returns keeps the patch.
  if (!repository_.empty()) write_file_atomic(repository_, *snap.text);
  const std::uint64_t version = snap.deployment->version;
  {
    std::lock_guard lock(snapshot_mutex_);
    current_ = std::move(snap);
  }
  log("apply_patch", detail, 200);
  return version;
}

std::string PathServer::deployment_text() {
  const Snapshot snap = snapshot();
  log("get_deployment", "", 200);
  return *snap.text;
}

Health PathServer::health() {
  const Snapshot snap = snapshot();
  log("health", "", 200);
  return {snap.deployment->version, std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count()};
}

}  // namespace arianna
