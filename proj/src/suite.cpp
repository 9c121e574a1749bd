#include "telewalk/suite.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace telewalk {

namespace {

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

AcceptanceCheck at_most(const std::string& name, double value, double limit) {
  return {name, value <= limit, fmt(value) + " <= " + fmt(limit)};
}

AcceptanceCheck at_least(const std::string& name, double value, double limit) {
  return {name, value >= limit, fmt(value) + " >= " + fmt(limit)};
}

}  // namespace

double step_consistency_residual(const TraceRow& row, double h_robot, double h_human, double dsp_time) {
  return row.post_xi / h_robot - row.ref_xi_plus / h_human + row.pre_xd * dsp_time / h_robot;
}

std::vector<AcceptanceCheck> evaluate_acceptance(const ScenarioConfig& cfg, const RunResult& run) {
  const RunSummary& s = run.summary;
  std::vector<AcceptanceCheck> out;
  for (const auto& [key, v] : cfg.acceptance.items()) {
    if (key == "status") {
      const std::string want = v.get<std::string>();
      const std::string got(to_string(s.status));
      out.push_back({key, got == want, got + " == " + want});
    } else if (key == "steps_min") {
      out.push_back(at_least(key, s.step_count, v.get<double>()));
    } else if (key == "steps_max") {
      out.push_back(at_most(key, s.step_count, v.get<double>()));
    } else if (key == "min_distance") {
      out.push_back(at_least(key, s.distance, v.get<double>()));
    } else if (key == "top_speed_min") {
      out.push_back(at_least(key, s.top_speed, v.get<double>()));
    } else if (key == "top_speed_max") {
      out.push_back(at_most(key, s.top_speed, v.get<double>()));
    } else if (key == "max_mean_abs_xdot") {
      out.push_back(at_most(key, s.mean_abs_xdot, v.get<double>()));
    } else if (key == "max_rms_dcm_error") {
      out.push_back(at_most(key, s.rms_dcm_error, v.get<double>()));
    } else if (key == "min_stop_hold") {
      out.push_back(at_least(key, s.stop_hold_time, v.get<double>()));
    } else if (key == "max_resync_steps") {
      const int limit = v.get<int>();
      bool ok = !s.resync_steps.empty();
      std::string detail = ok ? "" : "no disturbance window";
      for (const auto& r : s.resync_steps) {
        ok = ok && r && *r <= limit;
        detail += (detail.empty() ? "" : ",") + (r ? std::to_string(*r) : std::string("never"));
      }
      out.push_back({key, ok, detail + " <= " + std::to_string(limit)});
    } else if (key == "step_consistency_tol") {
      const double tol = v.get<double>();
      double worst = 0.0;
      int checked = 0;
      for (const TraceRow& r : run.trace.rows) {
        if (r.event != "D2S" || r.step_clamped) continue;
        worst = std::max(worst, std::abs(step_consistency_residual(r, cfg.robot.com_height, cfg.human.com_height,
                                                                   cfg.gait.dsp_time)));
        ++checked;
      }
      out.push_back({key, checked > 0 && worst <= tol,
                     std::to_string(checked) + " steps, max residual " + fmt(worst) + " <= " + fmt(tol)});
    } else if (key == "max_mean_tick_seconds") {
      out.push_back(s.timing_available ? at_most(key, s.mean_tick_seconds, v.get<double>())
                                       : AcceptanceCheck{key, false, "no timing"});
    } else {
      out.push_back({key, false, "unknown criterion"});
    }
  }
  return out;
}

nlohmann::json to_json(const AcceptanceCheck& c) {
  return {{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}};
}

bool SuiteEntry::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const AcceptanceCheck& c) { return c.pass; });
}

std::vector<std::filesystem::path> scenario_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

SuiteEntry run_suite_entry(const std::filesystem::path& path) {
  SuiteEntry e;
  e.path = path;
  e.config = load_scenario(path);
  e.run = run_scenario(e.config);
  e.checks = evaluate_acceptance(e.config, e.run);
  return e;
}

nlohmann::json suite_report(const std::vector<SuiteEntry>& entries) {
  nlohmann::json list = nlohmann::json::array();
  bool all = true;
  for (const SuiteEntry& e : entries) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : e.checks) checks.push_back(to_json(c));
    list.push_back({{"scenario", e.config.name},
                    {"path", e.path.generic_string()},
                    {"pass", e.pass()},
                    {"checks", checks},
                    {"summary", to_json(e.run.summary)}});
    all = all && e.pass();
  }
  return {{"pass", all}, {"scenarios", list}};
}

}  // namespace telewalk
