#pragma once

// Simulation channel for the browser UI: JSON messages over one WebSocket.
// UiSession holds the message semantics and is usable without a socket;
// UiChannelServer carries it over Boost.Beast and ticks in real time.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "arianna/sim.hpp"

namespace arianna {

/// Server-to-client tick message.
Json tick_message(const TraceRecord& rec, const Simulation& sim);

class UiSession {
 public:
  explicit UiSession(Simulation& sim) : sim_(sim) {}

  /// Replies to one client message. Malformed messages produce a single
  /// {"type":"error"} reply and change nothing.
  std::vector<Json> handle_message(const Json& msg);
  std::vector<Json> handle_text(const std::string& text);

  /// Advances one tick with the latest input. turn and step act for one tick;
  /// touch and sweep_override persist until the next input replaces them.
  Json tick();

  Simulation& sim() { return sim_; }

 private:
  Json handle_input(const Json& msg);

  Simulation& sim_;
  ManualInput input_;
};

class UiChannelServer {
 public:
  /// `sim` is only touched from the server's io thread once start() is called.
  explicit UiChannelServer(Simulation& sim);
  ~UiChannelServer();
  UiChannelServer(const UiChannelServer&) = delete;
  UiChannelServer& operator=(const UiChannelServer&) = delete;

  /// Port 0 picks a free port. Returns the bound port; throws on failure.
  int bind(const std::string& host, int port);
  /// Runs the accept loop and the tick timer on a background thread. Ticks
  /// only advance while at least one client is connected.
  void start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace arianna
