// Live session state machine, independent of any transport.
//
//   Idle --start--> Running <--pause/start--> Paused
//   Running --(duration elapsed, fall, divergence)--> Ended
//   any --reset--> Idle (fresh simulation from the template)
//
// All calls must come from one thread; SessionHost provides that thread.
#pragma once

#include <nlohmann/json.hpp>

#include <functional>
#include <memory>
#include <optional>

#include "telewalk/scenario.hpp"
#include "telewalk/sim.hpp"
#include "telewalk/wire.hpp"

namespace telewalk {

enum class SessionState { Idle, Running, Paused, Ended };
std::string_view to_string(SessionState s);

/// Latest-tick view handed to the network side.
struct SessionSnapshot {
  SessionState state = SessionState::Idle;
  long long tick = 0;
  double session_time = 0.0;
  std::optional<TraceRow> row;
  std::optional<TraceEvent> last_step;
  double lean = 0.0;
  double tempo = 0.0;
  bool stop = false;
  RunStatus status = RunStatus::Running;
  double realtime_factor = 0.0;
};

nlohmann::json snapshot_json(const SessionSnapshot& s, long long seq);

/// A finished (or reset) live session: everything needed to write it out
/// and to replay it in batch.
struct SessionRecord {
  int index = 0;
  ScenarioConfig config;
  SimTrace trace;
  RunSummary summary;
  std::vector<LoggedCommand> commands;
};

/// Batch configuration that replays a recorded live session.
ScenarioConfig replay_config(const SessionRecord& rec);

class Session {
 public:
  /// `tmpl` is used as-is; live sessions want pilot.type = external.
  explicit Session(ScenarioConfig tmpl);

  SessionState state() const { return state_; }
  const Simulation& simulation() const { return *sim_; }
  const ScenarioConfig& config() const { return tmpl_; }

  /// Applies a command at the current tick boundary and returns the reply
  /// message. `id` is echoed back when present.
  nlohmann::json handle(const WireCommand& cmd, const nlohmann::json& id = nullptr);

  /// Advances one tick when running; returns whether a tick was taken.
  bool tick();

  SessionSnapshot snapshot() const;

  /// Ends a running or paused session and records it; used when the host
  /// shuts down mid-session.
  void shutdown();

  /// Called with each session that ends or is reset after starting.
  std::function<void(SessionRecord)> on_record;

 private:
  void record();
  void fresh();

  ScenarioConfig tmpl_;
  std::unique_ptr<Simulation> sim_;
  SessionState state_ = SessionState::Idle;
  bool started_ = false;
  int index_ = 0;
};

nlohmann::json error_reply(const std::string& reason, const nlohmann::json& id = nullptr);

}  // namespace telewalk
