// One PASS/FAIL line per acceptance criterion; exit status 0 iff all pass.

#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <random>
#include <string>
#include <thread>

#include "telewalk/coupling.hpp"
#include "telewalk/reference.hpp"
#include "telewalk/scenario.hpp"
#include "telewalk/sim.hpp"
#include "telewalk/suite.hpp"
#include "telewalk/trace.hpp"
#include "telewalk/ws_server.hpp"

using namespace telewalk;
using Clock = std::chrono::steady_clock;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = fs::path(TELEWALK_SOURCE_DIR) / "scenarios";
int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("%s  %2d %-28s %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  failures += pass ? 0 : 1;
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

const auto human = LipParams<double>::make(75.0, 1.20);
const auto robot = LipParams<double>::make(20.2, 0.55);

void closed_form_oracle() {
  const auto t0 = Clock::now();
  const auto init = planar(0.02, 0.1);
  PlanarState<double> s = init;
  double ex = 0.0, ev = 0.0;
  for (int k = 1; k <= 1000; ++k) {
    s = lip_rk4_step(s, 0.0, 0.0, human, 1e-3);
    const auto cf = closed_form_passive(init, human, k * 1e-3);
    ex = std::max(ex, std::abs(s(0) - cf(0)));
    ev = std::max(ev, std::abs(s(1) - cf(1)));
  }
  const double dt = seconds_since(t0);
  report(1, "closed-form oracle", ex <= 1e-8 && ev <= 1e-7 && dt < 1.0,
         fmt("max |dx| %.2e m, |dv| %.2e m/s, %.4f s", ex, ev, dt));
}

void orbit_closure() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ux(0.005, 0.05), uT(0.2, 0.6);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double xm = ux(rng), T = uT(rng);
    const double s1 = orbital_slope(T, human).sigma1;
    const int n = static_cast<int>(std::ceil(T / 1e-3));
    const double h = T / n;
    PlanarState<double> s = planar(-xm, s1 * xm);
    for (int k = 0; k < n; ++k) s = lip_rk4_step(s, 0.0, 0.0, human, h);
    worst = std::max({worst, std::abs(s(0) - xm), std::abs(s(1) - s1 * xm)});
  }
  report(2, "P1 orbit closure", worst <= 1e-9, fmt("100 orbits, max error %.2e", worst));
}

void reference_consistency() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> uT(0.2, 0.8), ux(-0.1, 0.1);
  double e1 = 0.0, e2 = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double T = uT(rng), xi = ux(rng);
    const auto end = end_of_step_state(T, xi, human);
    e1 = std::max(e1, std::abs(dcm(end, human) - xi));
    e2 = std::max(e2, std::abs(dcm(begin_of_step_state(end), human) - xi * std::exp(-human.omega * T)));
  }
  report(3, "reference consistency", e1 <= 1e-10 && e2 <= 1e-10, fmt("max %.2e / %.2e over 1000 draws", e1, e2));
}

void step_invariance() {
  double worst = 0.0, worst_no_dsp = 0.0;
  int steps = 0, no_dsp_steps = 0, clamped = 0;
  for (const auto& path : scenario_files(kScenarios)) {
    const ScenarioConfig cfg = load_scenario(path);
    const RunResult r = run_scenario(cfg);
    for (const TraceRow& row : r.trace.rows) {
      if (row.event != "D2S") continue;
      if (row.step_clamped) {
        ++clamped;
        continue;
      }
      const double e =
          std::abs(step_consistency_residual(row, cfg.robot.com_height, cfg.human.com_height, cfg.gait.dsp_time));
      ++steps;
      worst = std::max(worst, e);
      if (cfg.gait.dsp_time == 0.0) {
        ++no_dsp_steps;
        worst_no_dsp = std::max(worst_no_dsp, e);
      }
    }
  }
  report(4, "step-placement invariance", steps > 0 && no_dsp_steps > 0 && worst <= 1e-12 && worst_no_dsp <= 1e-12,
         fmt("%d steps (%d with no double support, %d clamped skipped), max residual %.2e / %.2e", steps,
             no_dsp_steps, clamped, worst, worst_no_dsp));
}

void disturbance_reflection() {
  const double reflected = hmi_force(0.0, 0.0, 30.0, human, robot);
  const double scale = feedforward_scale(human, robot);
  const double rel = std::abs(scale / (20.2 / 75.0) - 1.0);
  report(5, "disturbance reflection", std::abs(reflected - 111.39) <= 0.1 && rel <= 1e-12,
         fmt("30 N -> %.4f N, feedforward scale %.9f (rel err %.1e)", reflected, scale, rel));
}

RunResult run_named(const char* name, double* seconds = nullptr) {
  const auto t0 = Clock::now();
  RunResult r = run_scenario(load_scenario(kScenarios / name));
  if (seconds) *seconds = seconds_since(t0);
  return r;
}

void stepping_in_place() {
  double secs = 0.0;
  const RunSummary s = run_named("step_in_place.json", &secs).summary;
  const bool pass = s.status == RunStatus::Completed && s.step_count >= 19 && s.step_count <= 21 &&
                    s.mean_abs_xdot <= 0.05 && s.rms_dcm_error <= 0.05 && secs < 5.0;
  report(6, "stepping in place", pass,
         fmt("%d steps, mean |xdot| %.4f m/s, rms dcm err %.4f, %s, %.2f s", s.step_count, s.mean_abs_xdot,
             s.rms_dcm_error, std::string(to_string(s.status)).c_str(), secs));
}

void walking() {
  const RunSummary s = run_named("walk.json").summary;
  const bool pass = s.status == RunStatus::Completed && s.distance >= 1.0 && s.step_count >= 10 &&
                    s.top_speed >= 0.2 && s.top_speed <= 0.5 && s.stop_hold_time >= 1.0;
  report(7, "walking", pass,
         fmt("%.3f m over %d steps, top speed %.3f m/s, stopped for the last %.2f s", s.distance, s.step_count,
             s.top_speed, s.stop_hold_time));
}

void disturbance_rejection() {
  const RunSummary s = run_named("disturbance.json").summary;
  bool ok = s.status == RunStatus::Completed && !s.resync_steps.empty();
  std::string steps;
  for (const auto& r : s.resync_steps) {
    ok = ok && r && *r <= 4;
    steps += (steps.empty() ? "" : ",") + (r ? std::to_string(*r) : std::string("never"));
  }
  report(8, "disturbance rejection", ok,
         fmt("resynchronized at step %s after the kick, %s", steps.c_str(), std::string(to_string(s.status)).c_str()));
}

void determinism() {
  int n = 0;
  bool all = true;
  for (const auto& path : scenario_files(kScenarios)) {
    const ScenarioConfig cfg = load_scenario(path);
    const std::string a = trace_csv_string(run_scenario(cfg).trace.rows);
    const std::string b = trace_csv_string(run_scenario(cfg).trace.rows);
    all = all && a == b;
    ++n;
  }
  report(9, "determinism", all && n > 0, fmt("%d scenarios run twice, traces byte-identical: %s", n, all ? "yes" : "no"));
}

void performance() {
  double worst_mean = 0.0, min_rtf = 1e300;
  for (const auto& path : scenario_files(kScenarios)) {
    const RunSummary s = run_scenario(load_scenario(path)).summary;
    worst_mean = std::max(worst_mean, s.mean_tick_seconds);
    min_rtf = std::min(min_rtf, s.realtime_factor);
  }
  report(10, "performance", worst_mean < 1e-3,
         fmt("worst mean tick %.2f us, lowest realtime factor %.0fx", worst_mean * 1e6, min_rtf));
}

void replay_equivalence() {
  nlohmann::json m = merge_with_defaults(nlohmann::json{{"name", "live"}, {"duration", 2.5}});
  apply_override(m, "pilot.type=external");
  std::mutex mu;
  std::condition_variable cv;
  std::optional<SessionRecord> rec;
  SessionHost host(scenario_from_json(m), 64, [&](SessionRecord r) {
    std::lock_guard lk(mu);
    rec = std::move(r);
    cv.notify_all();
  });
  host.start(false);
  using namespace std::chrono_literals;
  auto send = [&](WireCommand c) { host.enqueue(0, std::move(c), nullptr); };
  send(ControlCommand{ControlAction::Start});
  std::this_thread::sleep_for(200ms);
  send(PilotCommand{{}, 3.0, {}});
  std::this_thread::sleep_for(500ms);
  send(PilotCommand{0.7, {}, {}});
  send(ControlCommand{ControlAction::Pause});
  std::this_thread::sleep_for(100ms);
  send(DisturbCommand{30.0, 0.3});
  send(ControlCommand{ControlAction::Start});
  std::this_thread::sleep_for(600ms);
  send(PilotCommand{{}, {}, true});
  std::unique_lock lk(mu);
  const bool ended = cv.wait_for(lk, 10s, [&] { return rec.has_value(); });
  host.stop();
  if (!ended) {
    report(11, "replay equivalence", false, "live session did not end");
    return;
  }
  const std::string live = trace_csv_string(rec->trace.rows);
  const std::string replay = trace_csv_string(run_scenario(replay_config(*rec)).trace.rows);
  report(11, "replay equivalence", live == replay,
         fmt("%zu live ticks, %zu logged commands, replay byte-identical: %s", rec->trace.rows.size(),
             rec->commands.size(), live == replay ? "yes" : "no"));
}

}  // namespace

int main() {
  try {
    closed_form_oracle();
    orbit_closure();
    reference_consistency();
    step_invariance();
    disturbance_reflection();
    stepping_in_place();
    walking();
    disturbance_rejection();
    determinism();
    performance();
    replay_equivalence();
  } catch (const std::exception& e) {
    std::printf("FAIL  acceptance run aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%s: %d failing\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
