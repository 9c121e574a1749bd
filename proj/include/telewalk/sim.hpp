// Fixed-step simulation of pilot, walking reference, coupling forces, step
// planner and robot plant. One call to step() processes one tick:
//
//   1. pilot observation         4. support FSM; on D->S plan the step and reset
//   2. walking reference update  5. CoP realization + robot integration
//   3. coupling forces           6. pilot plant, 7. trace row
//
// On a D->S tick the reference restarts its step and the forces are
// re-evaluated against the post-reset state before the CoP is computed.
#pragma once

#include <nlohmann/json.hpp>

#include <memory>
#include <optional>
#include <vector>

#include "telewalk/coupling.hpp"
#include "telewalk/pilot.hpp"
#include "telewalk/reference.hpp"
#include "telewalk/robot.hpp"
#include "telewalk/scenario.hpp"
#include "telewalk/trace.hpp"
#include "telewalk/wire.hpp"

namespace telewalk {

enum class RunStatus { Running, Completed, Fell, Diverged };
std::string_view to_string(RunStatus s);

inline constexpr int kSummaryVersion = 1;

struct RunSummary {
  std::string name;
  RunStatus status = RunStatus::Completed;
  long long abort_row = -1;
  double duration = 0.0;
  double distance = 0.0;
  int step_count = 0;
  int clamped_steps = 0;
  double top_speed = 0.0;
  double mean_abs_xdot = 0.0;
  double rms_dcm_error = 0.0;
  double max_abs_dcm_error = 0.0;
  std::vector<std::optional<int>> resync_steps;  // one per disturbance window
  double stop_hold_time = 0.0;  // trailing time with |xdot| below the stop speed
  bool degraded_tracking = false;
  bool timing_available = false;
  double mean_tick_seconds = 0.0;
  double max_tick_seconds = 0.0;
  double realtime_factor = 0.0;
  std::string trace_checksum;
};

nlohmann::json to_json(const RunSummary& s);

/// Everything is derived from the trace; tick timing is not part of it.
RunSummary compute_metrics(const std::vector<TraceRow>& rows, const MetricsConfig& cfg);

std::unique_ptr<PilotSource> make_pilot(const ScenarioConfig& cfg);

class Simulation {
 public:
  explicit Simulation(const ScenarioConfig& cfg);
  Simulation(const ScenarioConfig& cfg, std::unique_ptr<PilotSource> pilot);

  bool done() const { return status_ != RunStatus::Running; }
  void step();

  /// Applies a pilot or disturbance command at the current tick boundary and
  /// logs it. Throws std::invalid_argument for commands the session cannot take.
  void apply(const WireCommand& cmd);

  long long next_tick() const { return tick_; }
  long long tick_count() const { return ticks_; }
  double dt() const { return cfg_.dt; }
  RunStatus status() const { return status_; }
  long long abort_row() const { return abort_row_; }
  const ScenarioConfig& config() const { return cfg_; }
  const SimTrace& trace() const { return trace_; }
  const std::vector<LoggedCommand>& command_log() const { return command_log_; }
  const RobotState& robot() const { return state_; }
  const ExternalPilotSource* external_pilot() const { return external_; }
  std::optional<TraceEvent> last_step_event() const;

 private:
  ForceSet compute_forces(const ReferenceState& ref, double F_ext) const;
  double frontal_reference(const PilotObservation& obs, double step_time) const;
  double ssp_time(double step_time) const;
  double foot_y(Foot f) const;
  void emit(const char* type, nlohmann::json data);

  ScenarioConfig cfg_;
  LipParams<double> human_;
  LipParams<double> robot_;
  double h_ratio_;
  std::unique_ptr<PilotSource> pilot_;
  ExternalPilotSource* external_ = nullptr;
  ReferenceGenerator refgen_;
  GaitFsm fsm_;
  RobotState state_;
  SupportLayout layout_;
  std::optional<Foot> stance_;
  double last_step_length_ = 0.0;
  std::vector<Disturbance> disturbances_;

  long long tick_ = 0;
  long long ticks_ = 0;
  RunStatus status_ = RunStatus::Running;
  long long abort_row_ = -1;
  double sat_run_x_ = 0.0;
  double sat_run_y_ = 0.0;
  bool prev_sat_x_ = false;
  bool prev_sat_y_ = false;
  bool prev_diag_ = false;
  double prev_F_ext_ = 0.0;
  std::optional<std::size_t> last_step_event_;

  SimTrace trace_;
  std::vector<LoggedCommand> command_log_;
};

struct RunResult {
  SimTrace trace;
  RunSummary summary;
  std::vector<LoggedCommand> commands;
};

/// Runs a scenario to completion, applying the logged commands of an
/// external pilot at their ticks.
RunResult run_scenario(const ScenarioConfig& cfg);

}  // namespace telewalk
