#include "telewalk/ws_server.hpp"

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/signal_set.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <chrono>
#include <map>

namespace telewalk {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using json = nlohmann::json;

// ---------------------------------------------------------------- host

SessionHost::SessionHost(ScenarioConfig tmpl, std::size_t queue_capacity,
                         std::function<void(SessionRecord)> on_record)
    : session_(std::move(tmpl)), capacity_(std::max<std::size_t>(1, queue_capacity)) {
  session_.on_record = std::move(on_record);
}

SessionHost::~SessionHost() { stop(); }

bool SessionHost::enqueue(std::uint64_t client, WireCommand cmd, json id) {
  {
    std::lock_guard lk(queue_mu_);
    if (queue_.size() >= capacity_) return false;
    queue_.push_back({client, std::move(cmd), std::move(id)});
  }
  queue_cv_.notify_one();
  return true;
}

void SessionHost::start(bool autostart) {
  if (thread_.joinable()) return;
  stop_ = false;
  thread_ = std::thread([this, autostart] { loop(autostart); });
}

void SessionHost::stop() {
  stop_ = true;
  queue_cv_.notify_all();
  if (thread_.joinable()) thread_.join();
}

std::shared_ptr<const SessionSnapshot> SessionHost::latest() const {
  std::lock_guard lk(cell_mu_);
  return cell_;
}

void SessionHost::publish(double rtf) {
  auto snap = std::make_shared<SessionSnapshot>(session_.snapshot());
  snap->realtime_factor = rtf;
  std::unique_lock lk(cell_mu_, std::try_to_lock);
  if (!lk) {
    ++skipped_;
    return;
  }
  cell_ = std::move(snap);
}

void SessionHost::loop(bool autostart) {
  using clock = std::chrono::steady_clock;
  const auto dt = std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(session_.config().dt));
  constexpr auto kMaxLag = std::chrono::milliseconds(50);
  constexpr auto kIdlePoll = std::chrono::milliseconds(5);

  if (autostart) session_.handle(ControlCommand{ControlAction::Start});
  auto next = clock::now();
  auto window_start = next;
  long long window_ticks = 0;
  double rtf = 0.0;
  publish(rtf);

  while (!stop_) {
    std::deque<Pending> batch;
    {
      std::lock_guard lk(queue_mu_);
      batch.swap(queue_);
    }
    for (Pending& p : batch) {
      json reply = session_.handle(p.cmd, p.id);
      if (reply_) reply_(p.client, std::move(reply));
    }

    if (session_.state() == SessionState::Running) {
      session_.tick();
      ++window_ticks;
      const auto now = clock::now();
      const double wall = std::chrono::duration<double>(now - window_start).count();
      if (wall >= 0.5) {
        rtf = static_cast<double>(window_ticks) * session_.config().dt / wall;
        window_start = now;
        window_ticks = 0;
      }
      publish(rtf);
      next += dt;
      // After a stall (disk write, descheduling) resume from now instead of
      // bursting to catch up.
      if (now - next > kMaxLag) next = now;
      std::this_thread::sleep_until(next);
    } else {
      rtf = 0.0;
      publish(rtf);
      std::unique_lock lk(queue_mu_);
      queue_cv_.wait_for(lk, kIdlePoll, [&] { return stop_ || !queue_.empty(); });
      next = clock::now();
      window_start = next;
      window_ticks = 0;
    }
  }
  session_.shutdown();
}

// ---------------------------------------------------------------- server

struct SessionServer::Impl {
  class Connection;

  Impl(ScenarioConfig tmpl, ServerOptions o, std::function<void(SessionRecord)> on_record)
      : opts(std::move(o)), host(std::move(tmpl), opts.command_queue, std::move(on_record)) {
    host.set_reply([this](std::uint64_t client, json reply) {
      net::post(ioc, [this, client, text = reply.dump()]() mutable { send_to(client, std::move(text)); });
    });
  }

  void open();
  void run();
  void stop();
  void do_accept();
  void schedule_broadcast();
  void on_message(std::uint64_t client, const std::string& text);
  void send_to(std::uint64_t client, std::string text);
  json hello() const;

  ServerOptions opts;
  net::io_context ioc{1};
  tcp::acceptor acceptor{ioc};
  net::steady_timer timer{ioc};
  net::signal_set signals{ioc};
  SessionHost host;
  std::map<std::uint64_t, std::shared_ptr<Connection>> conns;
  std::uint64_t next_id = 1;
  long long seq = 0;
  net::steady_timer::time_point next_broadcast{};
  bool opened = false;
};

class SessionServer::Impl::Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, Impl& srv, std::uint64_t id) : ws_(std::move(socket)), srv_(srv), id_(id) {}

  void start() {
    beast::get_lowest_layer(ws_).expires_after(std::chrono::seconds(10));
    http::async_read(ws_.next_layer(), hbuf_, req_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_request(ec); });
  }

  // Snapshots are droppable: when a slow client already has `backlog` of
  // them queued, the oldest is discarded. Replies are never dropped.
  void send(std::string text, bool droppable) {
    if (closed_) return;
    if (droppable) {
      const std::size_t first = writing_ ? 1 : 0;
      std::size_t queued = 0;
      for (std::size_t i = first; i < out_.size(); ++i) queued += out_[i].droppable ? 1 : 0;
      if (queued >= std::max<std::size_t>(1, srv_.opts.client_backlog)) {
        for (std::size_t i = first; i < out_.size(); ++i) {
          if (out_[i].droppable) {
            out_.erase(out_.begin() + static_cast<std::ptrdiff_t>(i));
            break;
          }
        }
      }
    }
    out_.push_back({std::make_shared<const std::string>(std::move(text)), droppable});
    if (!writing_) do_write();
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().close(ec);
  }

 private:
  struct Outgoing {
    std::shared_ptr<const std::string> text;
    bool droppable;
  };

  void on_request(beast::error_code ec) {
    if (ec) return;
    if (!websocket::is_upgrade(req_) || req_.target() != "/session") {
      auto res = std::make_shared<http::response<http::string_body>>(http::status::not_found, req_.version());
      res->set(http::field::content_type, "application/json");
      res->body() = R"({"error":"not found; connect a WebSocket to /session"})";
      res->keep_alive(false);
      res->prepare_payload();
      http::async_write(ws_.next_layer(), *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
        beast::error_code e;
        self->ws_.next_layer().socket().shutdown(tcp::socket::shutdown_send, e);
      });
      return;
    }
    beast::get_lowest_layer(ws_).expires_never();
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req_, [self = shared_from_this()](beast::error_code e) { self->on_accept(e); });
  }

  void on_accept(beast::error_code ec) {
    if (ec) return;
    srv_.conns[id_] = shared_from_this();
    send(srv_.hello().dump(), false);
    do_read();
  }

  void do_read() {
    ws_.async_read(rbuf_, [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
  }

  void on_read(beast::error_code ec) {
    if (ec) {
      closed_ = true;
      srv_.conns.erase(id_);
      return;
    }
    const std::string text = beast::buffers_to_string(rbuf_.data());
    rbuf_.consume(rbuf_.size());
    srv_.on_message(id_, text);
    do_read();
  }

  void do_write() {
    writing_ = true;
    ws_.text(true);
    ws_.async_write(net::buffer(*out_.front().text), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->out_.pop_front();
      self->writing_ = false;
      if (ec) {
        self->closed_ = true;
        self->srv_.conns.erase(self->id_);
        return;
      }
      if (!self->out_.empty()) self->do_write();
    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  Impl& srv_;
  std::uint64_t id_;
  beast::flat_buffer hbuf_;
  beast::flat_buffer rbuf_;
  http::request<http::string_body> req_;
  std::deque<Outgoing> out_;
  bool writing_ = false;
  bool closed_ = false;
};

json SessionServer::Impl::hello() const {
  const ScenarioConfig& cfg = host.config();
  return {{"type", "hello"},
          {"schema_version", kWireSchemaVersion},
          {"scenario", cfg.name},
          {"dt", cfg.dt},
          {"duration", cfg.duration},
          {"snapshot_rate", opts.snapshot_rate},
          {"commands", {"pilot", "disturb", "control"}}};
}

void SessionServer::Impl::open() {
  const tcp::endpoint ep(net::ip::make_address(opts.address), opts.port);
  acceptor.open(ep.protocol());
  acceptor.set_option(net::socket_base::reuse_address(true));
  acceptor.bind(ep);
  acceptor.listen(net::socket_base::max_listen_connections);
  opened = true;
}

void SessionServer::Impl::do_accept() {
  acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) {
      if (ec == net::error::operation_aborted || !acceptor.is_open()) return;
    } else {
      std::make_shared<Connection>(std::move(socket), *this, next_id++)->start();
    }
    do_accept();
  });
}

void SessionServer::Impl::schedule_broadcast() {
  const double rate = opts.snapshot_rate > 0.0 ? opts.snapshot_rate : 60.0;
  const auto period = std::chrono::duration_cast<net::steady_timer::duration>(std::chrono::duration<double>(1.0 / rate));
  // Absolute deadlines so handler latency does not lower the rate.
  const auto now = net::steady_timer::clock_type::now();
  next_broadcast += period;
  if (next_broadcast < now) next_broadcast = now + period;
  timer.expires_at(next_broadcast);
  timer.async_wait([this](beast::error_code ec) {
    if (ec) return;
    if (!conns.empty()) {
      if (auto snap = host.latest()) {
        const std::string text = snapshot_json(*snap, ++seq).dump();
        // Copy: a failed send may erase from the map.
        auto targets = conns;
        for (auto& [id, c] : targets) c->send(text, true);
      }
    }
    schedule_broadcast();
  });
}

void SessionServer::Impl::on_message(std::uint64_t client, const std::string& text) {
  json id = nullptr;
  WireCommand cmd;
  try {
    const json j = json::parse(text);
    if (j.is_object() && j.contains("id")) id = j["id"];
    cmd = parse_wire_command(j);
  } catch (const json::parse_error&) {
    send_to(client, error_reply("malformed JSON").dump());
    return;
  } catch (const std::exception& e) {
    send_to(client, error_reply(e.what(), id).dump());
    return;
  }
  if (!host.enqueue(client, std::move(cmd), id)) send_to(client, error_reply("command queue full", id).dump());
}

void SessionServer::Impl::send_to(std::uint64_t client, std::string text) {
  auto it = conns.find(client);
  if (it != conns.end()) it->second->send(std::move(text), false);
}

void SessionServer::Impl::run() {
  if (!opened) open();
  if (opts.handle_signals) {
    signals.add(SIGINT);
    signals.add(SIGTERM);
    signals.async_wait([this](beast::error_code ec, int) {
      if (!ec) stop();
    });
  }
  host.start(opts.autostart);
  do_accept();
  next_broadcast = net::steady_timer::clock_type::now();
  schedule_broadcast();
  ioc.run();
  host.stop();
}

void SessionServer::Impl::stop() {
  net::post(ioc, [this] {
    beast::error_code ec;
    acceptor.close(ec);
    timer.cancel();
    signals.cancel(ec);
    auto all = std::move(conns);
    conns.clear();
    for (auto& [id, c] : all) c->close();
    ioc.stop();
  });
}

SessionServer::SessionServer(ScenarioConfig tmpl, ServerOptions opts, std::function<void(SessionRecord)> on_record)
    : impl_(std::make_unique<Impl>(std::move(tmpl), std::move(opts), std::move(on_record))) {}

SessionServer::~SessionServer() = default;

void SessionServer::open() { impl_->open(); }

unsigned short SessionServer::port() const {
  beast::error_code ec;
  const auto ep = impl_->acceptor.local_endpoint(ec);
  return ec ? 0 : ep.port();
}

void SessionServer::run() { impl_->run(); }
void SessionServer::stop() { impl_->stop(); }

}  // namespace telewalk
