// Scenario configuration: a JSON document merged onto built-in defaults.
// Unknown keys are errors, both in files and in dotted-path overrides.
#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "telewalk/coupling.hpp"
#include "telewalk/lip.hpp"
#include "telewalk/pilot.hpp"
#include "telewalk/reference.hpp"
#include "telewalk/robot.hpp"
#include "telewalk/wire.hpp"

namespace telewalk {

inline constexpr int kScenarioSchemaVersion = 1;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BodyConfig {
  double mass = 0.0;
  double com_height = 0.0;
  FootGeometry foot;
};

/// Boxcar force window on the robot CoM; a non-zero ramp gives a trapezoid.
struct Disturbance {
  double start = 0.0;
  double duration = 0.0;
  double force = 0.0;
  double ramp = 0.0;
};

/// Sum of the scheduled forces active at `clock`.
double inject_disturbance(std::span<const Disturbance> schedule, double clock);

struct GaitConfig {
  double dsp_time = 0.05;         // T_DSP, also the minimum double-support dwell
  double max_step_length = 0.30;
  FrontalFootholdLimits frontal;
};

enum class PilotKind { Periodic, LeanWalk, Reactive, External, Replay };

struct PilotConfig {
  PilotKind kind = PilotKind::Periodic;
  SteppingConfig stepping;
  PilotPlantConfig plant;
  LeanProfile lean;
  ReflexConfig reflex;
  double max_lean = 0.08;
  std::vector<LoggedCommand> commands;
  std::string trace_path;
};

struct MetricsConfig {
  double sync_threshold = 0.05;
  double fall_time = 0.5;
  double divergence_limit = 10.0;
  double stop_speed = 0.05;
};

struct InitialState {
  double x = 0.0;
  double xdot = 0.0;
  double y = 0.0;
  double ydot = 0.0;
};

struct ScenarioConfig {
  std::string name = "scenario";
  double duration = 6.0;
  double dt = 0.001;
  std::uint64_t seed = 1;
  double gravity = 9.81;
  BodyConfig human{75.0, 1.20, {0.31, 0.11}};
  BodyConfig robot{20.2, 0.55, {0.06, 0.03}};
  InitialState initial;
  RefGenConfig refgen;
  DbftGains dbft;
  GaitConfig gait;
  PilotConfig pilot;
  std::vector<Disturbance> disturbances;
  MetricsConfig metrics;
  nlohmann::json acceptance = nlohmann::json::object();

  LipParams<double> human_params() const { return LipParams<double>::make(human.mass, human.com_height, gravity); }
  LipParams<double> robot_params() const { return LipParams<double>::make(robot.mass, robot.com_height, gravity); }
  long long tick_count() const;  // duration / dt, rounded
  void validate() const;
};

std::string_view to_string(PilotKind k);

/// The full default document; every accepted key appears here.
const nlohmann::json& default_scenario_json();

/// Merges `doc` onto the defaults, rejecting unknown keys.
nlohmann::json merge_with_defaults(const nlohmann::json& doc);

/// Applies `path.to.key=value`; value is parsed as JSON, else taken as a string.
void apply_override(nlohmann::json& merged, std::string_view assignment);

ScenarioConfig scenario_from_json(const nlohmann::json& merged);
nlohmann::json scenario_to_json(const ScenarioConfig& cfg);

/// Reads, merges and applies overrides. Relative trace paths resolve against
/// the config file's directory.
nlohmann::json load_scenario_json(const std::filesystem::path& path, std::span<const std::string> overrides = {});
ScenarioConfig load_scenario(const std::filesystem::path& path, std::span<const std::string> overrides = {});

}  // namespace telewalk
