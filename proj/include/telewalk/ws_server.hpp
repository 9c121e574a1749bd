// WebSocket bridge for live sessions.
//
// One simulation thread owns the Session and paces it against the wall clock.
// Network I/O runs on a separate io_context thread. The two meet only at a
// bounded command queue (network -> sim) and a latest-snapshot cell
// (sim -> network) that the sim thread updates with try_lock, so it never
// waits on a reader.
#pragma once

#include <nlohmann/json.hpp>

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "telewalk/session.hpp"

namespace telewalk {

struct ServerOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8765;  // 0 binds an ephemeral port
  double snapshot_rate = 60.0;
  std::size_t command_queue = 256;
  std::size_t client_backlog = 4;  // queued snapshots per client before the oldest is dropped
  bool autostart = false;
  bool handle_signals = false;  // stop on SIGINT/SIGTERM
};

/// Runs a Session in real time on its own thread.
class SessionHost {
 public:
  using ReplyFn = std::function<void(std::uint64_t client, nlohmann::json reply)>;

  SessionHost(ScenarioConfig tmpl, std::size_t queue_capacity, std::function<void(SessionRecord)> on_record);
  ~SessionHost();

  SessionHost(const SessionHost&) = delete;
  SessionHost& operator=(const SessionHost&) = delete;

  void set_reply(ReplyFn fn) { reply_ = std::move(fn); }

  /// Queues a command for the next tick boundary; false if the queue is full.
  bool enqueue(std::uint64_t client, WireCommand cmd, nlohmann::json id);

  void start(bool autostart);
  void stop();

  std::shared_ptr<const SessionSnapshot> latest() const;
  /// The session template; immutable, safe from any thread.
  const ScenarioConfig& config() const { return session_.config(); }
  long long snapshots_skipped() const { return skipped_.load(); }

 private:
  struct Pending {
    std::uint64_t client;
    WireCommand cmd;
    nlohmann::json id;
  };

  void loop(bool autostart);
  void publish(double rtf);

  Session session_;
  std::size_t capacity_;
  ReplyFn reply_;

  mutable std::mutex queue_mu_;
  std::condition_variable queue_cv_;
  std::deque<Pending> queue_;

  mutable std::mutex cell_mu_;
  std::shared_ptr<const SessionSnapshot> cell_;
  std::atomic<long long> skipped_{0};

  std::atomic<bool> stop_{false};
  std::thread thread_;
};

/// Accepts WebSocket clients on /session, forwards their commands to the
/// host and broadcasts snapshots at the configured rate.
class SessionServer {
 public:
  SessionServer(ScenarioConfig tmpl, ServerOptions opts, std::function<void(SessionRecord)> on_record = {});
  ~SessionServer();

  /// Binds the listening socket; throws std::system_error if the port is taken.
  void open();
  unsigned short port() const;

  /// Serves until stop() is called. open() must have been called.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace telewalk
