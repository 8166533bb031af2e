#include "arianna/ui_channel.hpp"

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/core/detail/base64.hpp>
#include <boost/beast/websocket.hpp>
#include <chrono>
#include <deque>
#include <set>
#include <thread>

#include "arianna/deployment_io.hpp"
#include "arianna/image_io.hpp"

namespace arianna {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

namespace {

Json error_message(const std::string& message) { return Json{{"type", "error"}, {"message", message}}; }

std::string base64(const std::vector<std::uint8_t>& bytes) {
  std::string out(beast::detail::base64::encoded_size(bytes.size()), '\0');
  out.resize(beast::detail::base64::encode(out.data(), bytes.data(), bytes.size()));
  return out;
}

Json failure_message(const char* type, const Failure& f) {
  Json j = failure_to_json(f);
  j["type"] = type;
  return j;
}

}  // namespace

Json tick_message(const TraceRecord& rec, const Simulation& sim) {
  Json events = Json::array();
  for (const auto& e : rec.events) events.push_back(event_to_json(e));
  const auto& g = sim.last_guidance();
  return Json{{"type", "tick"},
              {"tick", rec.tick},
              {"t", rec.t},
              {"pose", pose_to_json(rec.pose)},
              {"vibration", rec.vibration},
              {"frame_id", sim.frame_id()},
              {"events", std::move(events)},
              {"guidance", g ? guidance_to_json(*g) : Json(nullptr)},
              {"mode", nav_mode_name(rec.mode)},
              {"arrived", sim.arrived()}};
}

Json UiSession::handle_input(const Json& msg) {
  ManualInput in = input_;
  in.turn = 0;
  in.step = false;
  if (msg.contains("turn")) {
    const Json& t = msg["turn"];
    if (!t.is_number_integer() || t.get<int>() < -1 || t.get<int>() > 1) return error_message("turn must be -1, 0 or 1");
    in.turn = t.get<int>();
  }
  if (msg.contains("step")) {
    if (!msg["step"].is_boolean()) return error_message("step must be a boolean");
    in.step = msg["step"].get<bool>();
  }
  if (msg.contains("touch")) {
    const Json& t = msg["touch"];
    if (t.is_null()) {
      in.touch.reset();
    } else {
      if (!t.is_object() || !t.contains("u") || !t.contains("v") || !t["u"].is_number() || !t["v"].is_number()) {
        return error_message("touch must be {u, v} or null");
      }
      const auto& k = sim_.config().nav.camera;
      const TouchPoint p{t["u"].get<double>(), t["v"].get<double>()};
      if (p.u < 0 || p.v < 0 || p.u >= k.width || p.v >= k.height) return error_message("touch outside the frame");
      in.touch = p;
    }
  }
  if (msg.contains("sweep_override")) {
    const Json& s = msg["sweep_override"];
    if (s.is_null()) {
      in.sweep_override.reset();
    } else if (s.is_number()) {
      in.sweep_override = s.get<double>();
    } else {
      return error_message("sweep_override must be radians or null");
    }
  }
  input_ = in;
  return nullptr;
}

std::vector<Json> UiSession::handle_message(const Json& msg) {
  if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) return {error_message("message needs a type")};
  const std::string type = msg["type"].get<std::string>();
  if (type == "input") {
    Json err = handle_input(msg);
    if (err.is_null()) return {};
    return {std::move(err)};
  }
  if (type == "set_destination") {
    if (!msg.contains("node") || !msg["node"].is_number_integer() || msg["node"].get<std::int64_t>() < 0) return {error_message("set_destination needs a node id")};
    const auto r = sim_.set_destination(NodeId{msg["node"].get<std::uint32_t>()});
    if (const auto* f = std::get_if<Failure>(&r)) return {failure_message("destination_rejected", *f)};
    return {Json{{"type", "destination"}, {"node", msg["node"]}, {"session_id", session_to_string(std::get<SessionId>(r))}}};
  }
  if (type == "admin_patch") {
    AdminPatch patch;
    try {
      patch = patch_from_json(msg);
    } catch (const FormatError& e) {
      return {error_message(e.what())};
    }
    const auto r = sim_.admin_patch(patch);
    if (const auto* f = std::get_if<Failure>(&r)) return {failure_message("patch_rejected", *f)};
    return {Json{{"type", "patch_applied"}, {"version", std::get<std::uint64_t>(r)}}};
  }
  if (type == "get_frame") {
    return {Json{{"type", "frame"}, {"frame_id", sim_.frame_id()}, {"png_base64", base64(encode_png(sim_.last_frame()))}}};
  }
  if (type == "get_map") return {Json{{"type", "map"}, {"deployment", deployment_to_json(sim_.world())}}};
  return {error_message("unknown message type '" + type + "'")};
}

std::vector<Json> UiSession::handle_text(const std::string& text) {
  const Json msg = Json::parse(text, nullptr, false);
  if (msg.is_discarded()) return {error_message("message is not JSON")};
  return handle_message(msg);
}

Json UiSession::tick() {
  const TraceRecord rec = sim_.tick_manual(input_);
  input_.turn = 0;
  input_.step = false;
  return tick_message(rec, sim_);
}

// --- WebSocket transport ---

struct UiChannelServer::Impl {
  struct Conn : std::enable_shared_from_this<Conn> {
    Conn(Impl& owner, tcp::socket socket) : owner(owner), ws(std::move(socket)) {}

    void start() {
      ws.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
      ws.async_accept([self = shared_from_this()](beast::error_code ec) {
        if (ec) return;
        self->owner.conns.insert(self);
        self->read();
      });
    }

    void read() {
      ws.async_read(buffer, [self = shared_from_this()](beast::error_code ec, std::size_t) {
        if (ec) {
          self->owner.conns.erase(self);
          return;
        }
        const std::string text = beast::buffers_to_string(self->buffer.data());
        self->buffer.consume(self->buffer.size());
        for (const Json& reply : self->owner.session.handle_text(text)) self->send(reply.dump());
        self->read();
      });
    }

    void send(std::string text) {
      // A client that cannot keep up loses ticks rather than growing the queue.
      if (queue.size() >= 64) return;
      queue.push_back(std::move(text));
      if (!writing) write();
    }

    void write() {
      writing = true;
      ws.text(true);
      ws.async_write(net::buffer(queue.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
        self->queue.pop_front();
        if (ec) {
          self->owner.conns.erase(self);
          return;
        }
        if (self->queue.empty()) {
          self->writing = false;
        } else {
          self->write();
        }
      });
    }

    Impl& owner;
    websocket::stream<beast::tcp_stream> ws;
    beast::flat_buffer buffer;
    std::deque<std::string> queue;
    bool writing{false};
  };

  explicit Impl(Simulation& sim) : session(sim), acceptor(ioc), timer(ioc) {}

  void accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<Conn>(*this, std::move(socket))->start();
      accept();
    });
  }

  void schedule() {
    next += std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(session.sim().config().agent.dt()));
    timer.expires_at(next);
    timer.async_wait([this](beast::error_code ec) {
      if (ec) return;
      if (!conns.empty()) {
        const std::string text = session.tick().dump();
        for (const auto& c : std::vector<std::shared_ptr<Conn>>(conns.begin(), conns.end())) c->send(text);
      }
      schedule();
    });
  }

  UiSession session;
  net::io_context ioc;
  tcp::acceptor acceptor;
  net::steady_timer timer;
  std::chrono::steady_clock::time_point next;
  std::set<std::shared_ptr<Conn>> conns;
  std::thread thread;
};

UiChannelServer::UiChannelServer(Simulation& sim) : impl_(std::make_unique<Impl>(sim)) {}

UiChannelServer::~UiChannelServer() { stop(); }

int UiChannelServer::bind(const std::string& host, int port) {
  const tcp::endpoint endpoint(net::ip::make_address(host), static_cast<unsigned short>(port));
  impl_->acceptor.open(endpoint.protocol());
  impl_->acceptor.set_option(net::socket_base::reuse_address(true));
  impl_->acceptor.bind(endpoint);
  impl_->acceptor.listen();
  return impl_->acceptor.local_endpoint().port();
}

void UiChannelServer::start() {
  impl_->accept();
  impl_->next = std::chrono::steady_clock::now();
  impl_->schedule();
  impl_->thread = std::thread([this] { impl_->ioc.run(); });
}

void UiChannelServer::stop() {
  if (!impl_->thread.joinable()) return;
  impl_->ioc.stop();
  impl_->thread.join();
  impl_->conns.clear();
}

}  // namespace arianna
