#include "telewalk/sim.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "telewalk/step_planner.hpp"

namespace telewalk {

namespace {

constexpr double kClockEps = 1e-9;
constexpr double kMinSspTime = 0.05;

std::vector<PilotObservation> observations_from_trace(const std::vector<TraceRow>& rows) {
  std::vector<PilotObservation> out;
  out.reserve(rows.size());
  for (const TraceRow& r : rows) {
    PilotObservation o;
    o.timestamp = r.time;
    o.com_x = r.pilot_x;
    o.com_xdot = r.pilot_xd;
    o.contact_left = r.pilot_contact_l;
    o.contact_right = r.pilot_contact_r;
    o.force_x = r.pilot_fx;
    o.com_y = r.pilot_y;
    o.com_ydot = r.pilot_yd;
    o.cop_y = r.pilot_cop_y;
    o.foot_left_y = r.pilot_foot_l_y;
    o.foot_right_y = r.pilot_foot_r_y;
    o.target_com_x = r.pilot_target_x;
    out.push_back(o);
  }
  return out;
}

}  // namespace

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Running: return "running";
    case RunStatus::Completed: return "completed";
    case RunStatus::Fell: return "fell";
    case RunStatus::Diverged: return "diverged";
  }
  return "?";
}

std::unique_ptr<PilotSource> make_pilot(const ScenarioConfig& cfg) {
  const auto human = cfg.human_params();
  const PilotConfig& p = cfg.pilot;
  switch (p.kind) {
    case PilotKind::Periodic:
      return std::make_unique<PeriodicStepper>(human, p.stepping, p.plant, cfg.seed);
    case PilotKind::LeanWalk:
      return std::make_unique<LeanWalkPilot>(human, p.stepping, p.plant, p.lean, cfg.seed);
    case PilotKind::Reactive:
      return std::make_unique<ReactiveBalancePilot>(human, p.stepping, p.plant, p.reflex, cfg.seed);
    case PilotKind::External:
      return std::make_unique<ExternalPilotSource>(human, p.stepping, p.plant, p.max_lean, cfg.seed);
    case PilotKind::Replay:
      return std::make_unique<TraceReplaySource>(observations_from_trace(read_trace_csv(p.trace_path)));
  }
  throw std::invalid_argument("unknown pilot kind");
}

Simulation::Simulation(const ScenarioConfig& cfg) : Simulation(cfg, make_pilot(cfg)) {}

Simulation::Simulation(const ScenarioConfig& cfg, std::unique_ptr<PilotSource> pilot)
    : cfg_(cfg),
      human_(cfg.human_params()),
      robot_(cfg.robot_params()),
      h_ratio_(robot_.com_height / human_.com_height),
      pilot_(std::move(pilot)),
      refgen_(human_, cfg.refgen),
      fsm_(cfg.gait.dsp_time),
      disturbances_(cfg.disturbances),
      ticks_(cfg.tick_count()) {
  cfg_.validate();
  if (!pilot_) throw std::invalid_argument("Simulation: no pilot source");
  external_ = dynamic_cast<ExternalPilotSource*>(pilot_.get());
  state_.com << cfg.initial.x, cfg.initial.xdot, cfg.initial.y, cfg.initial.ydot;
  trace_.rows.reserve(static_cast<std::size_t>(ticks_ + 1));
}

void Simulation::emit(const char* type, nlohmann::json data) {
  trace_.events.push_back(TraceEvent{tick_, static_cast<double>(tick_) * cfg_.dt, type, std::move(data)});
}

std::optional<TraceEvent> Simulation::last_step_event() const {
  if (!last_step_event_) return std::nullopt;
  return trace_.events[*last_step_event_];
}

void Simulation::apply(const WireCommand& cmd) {
  if (done()) throw std::invalid_argument("simulation has ended");
  if (const auto* pc = std::get_if<PilotCommand>(&cmd)) {
    if (!external_) throw std::invalid_argument("pilot commands need an external pilot");
    const bool clamped = external_->push(*pc);
    command_log_.push_back({tick_, cmd});
    emit("command", {{"command", to_json(cmd)}, {"clamped", clamped}});
    return;
  }
  if (const auto* dc = std::get_if<DisturbCommand>(&cmd)) {
    disturbances_.push_back({static_cast<double>(tick_) * cfg_.dt, dc->duration, dc->force, 0.0});
    command_log_.push_back({tick_, cmd});
    emit("command", {{"command", to_json(cmd)}, {"clamped", false}});
    return;
  }
  throw std::invalid_argument("session control commands are not simulation inputs");
}

ForceSet Simulation::compute_forces(const ReferenceState& ref, double F_ext) const {
  ForceSet f;
  f.F_ref = reference_contact_force(ref.x, human_);
  f.F_ff = feedforward_force(f.F_ref, human_, robot_);
  f.F_fb = feedback_force(ref.xi, dcm(state_.sagittal(), robot_), human_, robot_, cfg_.dbft.K_x);
  f.F_ext = F_ext;
  f.F_hmi = hmi_force(state_.com(1), ref.xdot, cfg_.dbft.reflect_disturbance ? F_ext : 0.0, human_, robot_);
  f.F_s = virtual_spring_force(ref.boundary.x_plus, human_);
  return f;
}

double Simulation::ssp_time(double step_time) const {
  return std::max(step_time - cfg_.gait.dsp_time, kMinSspTime);
}

double Simulation::foot_y(Foot f) const { return f == Foot::Left ? layout_.left_y : layout_.right_y; }

double Simulation::frontal_reference(const PilotObservation& obs, double step_time) const {
  const double T = ssp_time(step_time);
  const double w = robot_.omega;
  if (state_.phase != SupportPhase::Double) {
    const Foot swing = other(*stance_);
    const double nominal = h_ratio_ * (swing == Foot::Left ? obs.foot_left_y : obs.foot_right_y);
    const double target = frontal_transfer_dcm(nominal, foot_y(*stance_), T, w);
    return frontal_ssp_dcm(foot_y(*stance_), target, state_.phase_time, T, w);
  }
  // Double support: hold the transfer DCM onto the next stance foot, which is
  // the one just landed, or before the first step the one the pilot loads.
  if (stance_) return frontal_transfer_dcm(foot_y(other(*stance_)), foot_y(*stance_), T, w);
  if (obs.cop_y > 0.0) return frontal_transfer_dcm(layout_.left_y, layout_.right_y, T, w);
  if (obs.cop_y < 0.0) return frontal_transfer_dcm(layout_.right_y, layout_.left_y, T, w);
  return (layout_.left_y + layout_.right_y) / 2.0;
}

void Simulation::step() {
  if (done()) return;
  const double dt = cfg_.dt;
  const double clock = static_cast<double>(tick_) * dt;

  // 1-3
  const PilotObservation obs = pilot_->observe(clock);
  ReferenceState ref = refgen_.update(obs, clock);
  const double F_ext = inject_disturbance(disturbances_, clock);
  ForceSet forces = compute_forces(ref, F_ext);

  if (tick_ == 0) {
    layout_.left_y = h_ratio_ * obs.foot_left_y;
    layout_.right_y = h_ratio_ * obs.foot_right_y;
  }
  const double xi_y = dcm(state_.frontal(), robot_);

  TraceRow row;

  // 4
  const GaitFsm::Output fsm = fsm_.update(obs.contact_left, obs.contact_right, clock);
  row.fsm_diag = fsm.diagnostic;
  if (fsm.diagnostic && !prev_diag_) emit("fsm_diagnostic", {{"contact_left", obs.contact_left},
                                                             {"contact_right", obs.contact_right}});
  prev_diag_ = fsm.diagnostic;

  if (fsm.event && fsm.event->kind == TransitionKind::DoubleToSingle) {
    const StepPlanInput<double> in{dcm(state_.sagittal(), robot_), state_.com(1), ref.boundary.xi_plus, h_ratio_,
                                   cfg_.gait.dsp_time};
    const StepPlan<double> plan = closed_loop_step_length(in, cfg_.gait.max_step_length);
    row.event = "D2S";
    row.pre_xi = in.xi_robot;
    row.pre_xd = in.xdot_robot;
    row.step_length = plan.length;
    row.step_raw = plan.raw_length;
    row.step_clamped = plan.clamped;

    state_ = apply_reset(state_, plan.length);
    stance_ = fsm.event->stance;
    state_.phase = fsm_.phase();
    state_.phase_time = 0.0;
    last_step_length_ = plan.length;
    layout_.front_x = 0.0;
    row.post_xi = dcm(state_.sagittal(), robot_);

    ref = refgen_.restart_step(clock);
    forces = compute_forces(ref, F_ext);

    last_step_event_ = trace_.events.size();
    emit("step", {{"kind", "D2S"},
                  {"stance", std::string(to_string(*stance_))},
                  {"length", plan.length},
                  {"raw_length", plan.raw_length},
                  {"clamped", plan.clamped},
                  {"stance_x", state_.stance_x_world}});
    if (plan.clamped) emit("planner_clamp", {{"raw_length", plan.raw_length}, {"length", plan.length}});
  } else if (fsm.event) {
    const StepPlanInput<double> in{dcm(state_.sagittal(), robot_), state_.com(1), ref.boundary.xi_plus, h_ratio_,
                                   cfg_.gait.dsp_time};
    layout_.front_x = closed_loop_step_length(in, cfg_.gait.max_step_length).length;
    const Foot landed = other(fsm.event->stance);
    const double nominal = h_ratio_ * (landed == Foot::Left ? obs.foot_left_y : obs.foot_right_y);
    const double y = frontal_foothold(xi_y, foot_y(fsm.event->stance), nominal, ssp_time(ref.boundary.step_time),
                                      robot_.omega, cfg_.gait.frontal);
    (landed == Foot::Left ? layout_.left_y : layout_.right_y) = y;
    state_.phase = SupportPhase::Double;
    state_.phase_time = 0.0;
    row.event = "S2D";
    emit("touchdown", {{"stance", std::string(to_string(fsm.event->stance))},
                       {"front_x", layout_.front_x},
                       {"foot_y", y},
                       {"nominal_foot_y", nominal}});
  }

  const double ref_xi_y = frontal_reference(obs, ref.boundary.step_time);
  forces.F_y_fb = cfg_.dbft.K_y * (ref_xi_y - xi_y) / robot_.com_height;

  // 5: CoP realization
  const double cop_cmd_x = force_to_cop(forces.F_ff + forces.F_fb, state_.sagittal(), robot_);
  const double cop_ff_y = map_frontal_cop(obs.cop_y, obs.foot_left_y, obs.foot_right_y, layout_.left_y,
                                          layout_.right_y, h_ratio_);
  const double cop_cmd_y = cop_ff_y - forces.F_y_fb / (robot_.mass * robot_.omega_sq());
  const CopBounds bounds = support_bounds(state_.phase, layout_, cfg_.robot.foot);
  const CopSaturation sat = saturate_cop(Eigen::Vector2d(cop_cmd_x, cop_cmd_y), bounds);
  forces.F_contact = contact_force(state_.sagittal(), sat.cop.x(), robot_);

  // swing foot bookkeeping
  if (state_.phase == SupportPhase::Double) {
    row.swing_x = layout_.front_x;
    row.swing_y = stance_ ? (*stance_ == Foot::Left ? layout_.right_y : layout_.left_y) : 0.0;
  } else {
    const StepPlanInput<double> in{dcm(state_.sagittal(), robot_), state_.com(1), ref.boundary.xi_plus, h_ratio_,
                                   cfg_.gait.dsp_time};
    const double predicted = closed_loop_step_length(in, cfg_.gait.max_step_length).length;
    const double pilot_swing_y = *stance_ == Foot::Left ? obs.foot_right_y : obs.foot_left_y;
    const Eigen::Vector2d target = swing_foot_target(pilot_swing_y, h_ratio_, -last_step_length_, predicted,
                                                     state_.phase_time, ref.boundary.step_time);
    row.swing_x = target.x();
    // lateral: where the foot would land if touchdown came now
    row.swing_y = frontal_foothold(xi_y, foot_y(*stance_), target.y(), ssp_time(ref.boundary.step_time),
                                   robot_.omega, cfg_.gait.frontal);
  }

  // 7: the row records the state at this tick and the inputs applied over it
  row.tick = tick_;
  row.time = clock;
  row.phase = std::string(to_string(state_.phase));
  row.phase_time = state_.phase_time;
  row.stance = stance_ ? std::string(to_string(*stance_)) : "none";
  row.stance_x = state_.stance_x_world;
  row.x = state_.com(0);
  row.xd = state_.com(1);
  row.y = state_.com(2);
  row.yd = state_.com(3);
  row.com_x_world = state_.com_x_world();
  row.xi_y = xi_y;
  row.ref_xi_y = ref_xi_y;
  row.xi = dcm(state_.sagittal(), robot_);
  row.xi_norm = row.xi / robot_.com_height;
  row.ref_x = ref.x;
  row.ref_xd = ref.xdot;
  row.ref_xi = ref.xi;
  row.ref_xi_norm = ref.xi / human_.com_height;
  row.ref_phase_time = ref.phase_time;
  row.ref_elongated = ref.elongated;
  row.step_time = ref.boundary.step_time;
  row.xi_pilot = ref.xi_pilot;
  row.ref_x_minus = ref.boundary.x_minus;
  row.ref_x_plus = ref.boundary.x_plus;
  row.ref_xi_plus = ref.boundary.xi_plus;
  row.dcm_err = normalized_dcm_gap(ref.xi, human_, row.xi, robot_);
  row.pilot_x = obs.com_x;
  row.pilot_xd = obs.com_xdot;
  row.pilot_target_x = obs.target_com_x;
  row.pilot_contact_l = obs.contact_left;
  row.pilot_contact_r = obs.contact_right;
  row.pilot_fx = obs.force_x;
  row.pilot_y = obs.com_y;
  row.pilot_yd = obs.com_ydot;
  row.pilot_cop_y = obs.cop_y;
  row.pilot_foot_l_y = obs.foot_left_y;
  row.pilot_foot_r_y = obs.foot_right_y;
  row.F_ref = forces.F_ref;
  row.F_ff = forces.F_ff;
  row.F_fb = forces.F_fb;
  row.F_hmi = forces.F_hmi;
  row.F_s = forces.F_s;
  row.F_ext = forces.F_ext;
  row.F_contact = forces.F_contact;
  row.F_y_fb = forces.F_y_fb;
  row.cop_cmd_x = cop_cmd_x;
  row.cop_cmd_y = cop_cmd_y;
  row.cop_x = sat.cop.x();
  row.cop_y = sat.cop.y();
  row.sat_x = sat.x_saturated;
  row.sat_y = sat.y_saturated;
  row.cop_lb_x = bounds.x_lb;
  row.cop_ub_x = bounds.x_ub;
  row.cop_lb_y = bounds.y_lb;
  row.cop_ub_y = bounds.y_ub;
  row.foot_l_y = layout_.left_y;
  row.foot_r_y = layout_.right_y;
  trace_.rows.push_back(row);

  if ((F_ext != 0.0) != (prev_F_ext_ != 0.0)) emit("disturbance", {{"active", F_ext != 0.0}, {"force", F_ext}});
  prev_F_ext_ = F_ext;
  if (sat.x_saturated != prev_sat_x_) emit("saturation", {{"axis", "x"}, {"active", sat.x_saturated}});
  if (sat.y_saturated != prev_sat_y_) emit("saturation", {{"axis", "y"}, {"active", sat.y_saturated}});
  prev_sat_x_ = sat.x_saturated;
  prev_sat_y_ = sat.y_saturated;

  sat_run_x_ = sat.x_saturated ? sat_run_x_ + dt : 0.0;
  sat_run_y_ = sat.y_saturated ? sat_run_y_ + dt : 0.0;
  if (std::max(sat_run_x_, sat_run_y_) > cfg_.metrics.fall_time + kClockEps) {
    status_ = RunStatus::Fell;
    abort_row_ = tick_;
    emit("fall", {{"axis", sat_run_x_ >= sat_run_y_ ? "x" : "y"}});
    ++tick_;
    return;
  }

  if (tick_ >= ticks_) {
    status_ = RunStatus::Completed;
    ++tick_;
    return;
  }

  // 5-6: integrate robot and pilot over [t_k, t_k+1)
  state_ = integrate_tick(state_, sat.cop, F_ext, robot_, dt);
  pilot_->advance(PilotFeedback{forces.F_s, forces.F_hmi}, dt);
  ++tick_;

  const double limit = cfg_.metrics.divergence_limit;
  if (!state_.com.allFinite() || std::abs(state_.com(0)) > limit || std::abs(state_.com(2)) > limit) {
    status_ = RunStatus::Diverged;
    abort_row_ = tick_ - 1;
    emit("divergence", {{"row", abort_row_}});
  }
}

RunResult run_scenario(const ScenarioConfig& cfg) {
  Simulation sim(cfg);
  std::size_t next_cmd = 0;
  const auto& cmds = cfg.pilot.commands;
  double total = 0.0;
  double worst = 0.0;
  long long timed = 0;
  while (!sim.done()) {
    const auto t0 = std::chrono::steady_clock::now();
    while (next_cmd < cmds.size() && cmds[next_cmd].tick <= sim.next_tick()) {
      if (cmds[next_cmd].tick == sim.next_tick()) sim.apply(cmds[next_cmd].command);
      ++next_cmd;
    }
    sim.step();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    total += secs;
    worst = std::max(worst, secs);
    ++timed;
  }
  RunResult out;
  out.summary = compute_metrics(sim.trace().rows, cfg.metrics);
  out.summary.name = cfg.name;
  out.summary.status = sim.status();
  out.summary.abort_row = sim.abort_row();
  out.summary.timing_available = timed > 0;
  if (timed > 0) {
    out.summary.mean_tick_seconds = total / static_cast<double>(timed);
    out.summary.max_tick_seconds = worst;
    out.summary.realtime_factor = out.summary.mean_tick_seconds > 0.0 ? cfg.dt / out.summary.mean_tick_seconds : 0.0;
  }
  out.trace = sim.trace();
  out.commands = sim.command_log();
  return out;
}

RunSummary compute_metrics(const std::vector<TraceRow>& rows, const MetricsConfig& cfg) {
  if (rows.empty()) throw std::invalid_argument("compute_metrics: empty trace");
  RunSummary s;
  s.duration = rows.back().time - rows.front().time;
  s.distance = rows.back().com_x_world - rows.front().com_x_world;

  double sum_abs = 0.0;
  double sum_sq = 0.0;
  std::vector<std::size_t> steps;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const TraceRow& r = rows[i];
    s.top_speed = std::max(s.top_speed, std::abs(r.xd));
    sum_abs += std::abs(r.xd);
    sum_sq += r.dcm_err * r.dcm_err;
    s.max_abs_dcm_error = std::max(s.max_abs_dcm_error, std::abs(r.dcm_err));
    if (r.event == "D2S") {
      steps.push_back(i);
      if (r.step_clamped) ++s.clamped_steps;
    }
  }
  const double n = static_cast<double>(rows.size());
  s.mean_abs_xdot = sum_abs / n;
  s.rms_dcm_error = std::sqrt(sum_sq / n);
  s.step_count = static_cast<int>(steps.size());
  s.degraded_tracking = s.rms_dcm_error > cfg.sync_threshold;

  // Disturbance windows are the runs of non-zero F_ext.
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].F_ext == 0.0 || (i > 0 && rows[i - 1].F_ext != 0.0)) continue;
    std::size_t end = i;
    while (end + 1 < rows.size() && rows[end + 1].F_ext != 0.0) ++end;
    std::optional<int> resync;
    int index = 0;
    for (std::size_t j = 0; j < steps.size(); ++j) {
      if (steps[j] <= end) continue;
      ++index;
      const std::size_t stop = j + 1 < steps.size() ? steps[j + 1] : rows.size();
      double sq = 0.0;
      for (std::size_t k = steps[j]; k < stop; ++k) sq += rows[k].dcm_err * rows[k].dcm_err;
      if (std::sqrt(sq / static_cast<double>(stop - steps[j])) < cfg.sync_threshold) {
        resync = index;
        break;
      }
    }
    s.resync_steps.push_back(resync);
  }

  std::size_t first_still = rows.size();
  while (first_still > 0 && std::abs(rows[first_still - 1].xd) < cfg.stop_speed) --first_still;
  s.stop_hold_time = first_still < rows.size() ? rows.back().time - rows[first_still].time : 0.0;
  s.trace_checksum = trace_checksum(rows);
  return s;
}

nlohmann::json to_json(const RunSummary& s) {
  nlohmann::json resync = nlohmann::json::array();
  for (const auto& r : s.resync_steps) resync.push_back(r ? nlohmann::json(*r) : nlohmann::json(nullptr));
  nlohmann::json j{{"summary_version", kSummaryVersion},
                   {"name", s.name},
                   {"status", std::string(to_string(s.status))},
                   {"abort_row", s.abort_row},
                   {"duration", s.duration},
                   {"distance", s.distance},
                   {"steps", s.step_count},
                   {"clamped_steps", s.clamped_steps},
                   {"top_speed", s.top_speed},
                   {"mean_abs_xdot", s.mean_abs_xdot},
                   {"rms_dcm_error", s.rms_dcm_error},
                   {"max_abs_dcm_error", s.max_abs_dcm_error},
                   {"resync_steps", resync},
                   {"stop_hold_time", s.stop_hold_time},
                   {"degraded_tracking", s.degraded_tracking},
                   {"trace_checksum", s.trace_checksum}};
  if (s.timing_available) {
    j["timing"] = {{"mean_tick_seconds", s.mean_tick_seconds},
                   {"max_tick_seconds", s.max_tick_seconds},
                   {"realtime_factor", s.realtime_factor}};
  } else {
    j["timing"] = nullptr;
  }
  return j;
}

}  // namespace telewalk
