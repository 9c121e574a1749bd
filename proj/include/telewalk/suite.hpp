// Pass/fail evaluation of a run against the thresholds embedded in its
// scenario's "acceptance" block, and the multi-scenario suite report.
#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

#include "telewalk/scenario.hpp"
#include "telewalk/sim.hpp"

namespace telewalk {

struct AcceptanceCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Residual of the step-placement consistency condition on a D2S row:
/// post-reset normalized robot DCM minus normalized reference DCM, plus the
/// double-support velocity term. Zero for every unclamped step.
double step_consistency_residual(const TraceRow& row, double h_robot, double h_human, double dsp_time);

/// Supported keys: status, steps_min, steps_max, min_distance, top_speed_min,
/// top_speed_max, max_mean_abs_xdot, max_rms_dcm_error, min_stop_hold,
/// max_resync_steps, step_consistency_tol, max_mean_tick_seconds. Unknown keys
/// produce a failing check so typos cannot pass silently.
std::vector<AcceptanceCheck> evaluate_acceptance(const ScenarioConfig& cfg, const RunResult& run);

nlohmann::json to_json(const AcceptanceCheck& c);

struct SuiteEntry {
  std::filesystem::path path;
  ScenarioConfig config;
  RunResult run;
  std::vector<AcceptanceCheck> checks;
  bool pass() const;
};

/// Scenario files in a directory, sorted by name.
std::vector<std::filesystem::path> scenario_files(const std::filesystem::path& dir);

SuiteEntry run_suite_entry(const std::filesystem::path& path);
nlohmann::json suite_report(const std::vector<SuiteEntry>& entries);

}  // namespace telewalk
