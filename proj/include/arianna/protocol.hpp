#pragma once

// Path server wire types shared by the server, the navigator and the UI channel.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "arianna/deployment_io.hpp"
#include "arianna/pathgraph.hpp"

namespace arianna {

using SessionId = StrongId<struct SessionTag, std::uint64_t>;

/// Session ids travel as 16 hex digits; JSON numbers cannot hold 64 bits in every client.
std::string session_to_string(SessionId id);
std::optional<SessionId> parse_session(std::string_view text);

enum class ServerError : std::uint8_t {
  NotFound,      // unknown destination or qr id
  Unauthorized,  // unknown session
  NoRoute,       // no enabled route to the destination
  Rejected,      // patch fails validation
  Unavailable,   // transport failure; never produced by the server itself
  BadRequest,    // malformed request body or parameters
};

std::string_view error_name(ServerError e);
int http_status(ServerError e);
ServerError error_from_status(int status);

struct Failure {
  ServerError code{ServerError::Unavailable};
  std::string message;
  std::optional<ValidationReport> report;  // set for Rejected
};

template <typename T>
using Result = std::variant<T, Failure>;

template <typename T>
bool ok(const Result<T>& r) {
  return std::holds_alternative<T>(r);
}

struct NextEdge {
  EdgeId edge;
  TravelDirection direction{TravelDirection::Forward};
  ColorPair expected_pair;
  double remaining_distance{0.0};  // whole route, metres
  double edge_length{0.0};         // this edge, metres
  friend bool operator==(const NextEdge&, const NextEdge&) = default;
};

struct Guidance {
  NodeId node;
  bool destination_reached{false};
  std::optional<NextEdge> next;
  std::uint64_t deployment_version{0};
  friend bool operator==(const Guidance&, const Guidance&) = default;
};

/// Guidance from `at` toward `dest` over enabled edges; NoRoute when stranded.
Result<Guidance> plan_guidance(const Deployment& d, NodeId at, NodeId dest);

Json guidance_to_json(const Guidance& g);
Guidance guidance_from_json(const Json& j);

Json failure_to_json(const Failure& f);
Failure failure_from_json(ServerError code, const Json& j);

std::string_view direction_name(TravelDirection d);
std::optional<TravelDirection> parse_direction(std::string_view s);

Json pair_to_json(ColorPair p);
ColorPair pair_from_json(const Json& j);

// --- admin patches ---

struct SetEdgeEnabled {
  EdgeId edge;
  bool enabled{true};
};

struct ReplaceDeployment {
  Deployment deployment;
};

using PatchOp = std::variant<SetEdgeEnabled, ReplaceDeployment>;

struct AdminPatch {
  std::vector<PatchOp> ops;
};

/// {"ops":[{"op":"set_edge_enabled","edge":3,"enabled":false},{"op":"replace_deployment","deployment":{...}}]}
Json patch_to_json(const AdminPatch& p);
AdminPatch patch_from_json(const Json& j);

}  // namespace arianna
