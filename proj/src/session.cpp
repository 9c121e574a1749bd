#include "telewalk/session.hpp"

#include <stdexcept>

namespace telewalk {

std::string_view to_string(SessionState s) {
  switch (s) {
    case SessionState::Idle: return "idle";
    case SessionState::Running: return "running";
    case SessionState::Paused: return "paused";
    case SessionState::Ended: return "ended";
  }
  return "?";
}

nlohmann::json error_reply(const std::string& reason, const nlohmann::json& id) {
  nlohmann::json j{{"type", "error"}, {"reason", reason}};
  if (!id.is_null()) j["id"] = id;
  return j;
}

namespace {

nlohmann::json ack(const WireCommand& cmd, const nlohmann::json& id, long long tick, SessionState state) {
  nlohmann::json j{{"type", "ack"}, {"command", to_json(cmd)}, {"tick", tick}, {"state", to_string(state)}};
  if (!id.is_null()) j["id"] = id;
  return j;
}

}  // namespace

Session::Session(ScenarioConfig tmpl) : tmpl_(std::move(tmpl)) {
  tmpl_.validate();
  fresh();
}

void Session::fresh() {
  sim_ = std::make_unique<Simulation>(tmpl_);
  state_ = SessionState::Idle;
  started_ = false;
}

void Session::record() {
  if (!started_) return;
  ++index_;
  if (!on_record) return;
  SessionRecord rec;
  rec.index = index_;
  rec.config = tmpl_;
  rec.trace = sim_->trace();
  rec.commands = sim_->command_log();
  if (!rec.trace.rows.empty()) {
    rec.summary = compute_metrics(rec.trace.rows, tmpl_.metrics);
    rec.summary.name = tmpl_.name;
    rec.summary.status = sim_->status();
    rec.summary.abort_row = sim_->abort_row();
  }
  on_record(std::move(rec));
}

nlohmann::json Session::handle(const WireCommand& cmd, const nlohmann::json& id) {
  const long long tick = sim_->next_tick();
  if (const auto* ctl = std::get_if<ControlCommand>(&cmd)) {
    switch (ctl->action) {
      case ControlAction::Start:
        if (state_ != SessionState::Idle && state_ != SessionState::Paused) {
          return error_reply(std::string("cannot start a session that is ") + std::string(to_string(state_)), id);
        }
        state_ = SessionState::Running;
        started_ = true;
        break;
      case ControlAction::Pause:
        if (state_ != SessionState::Running) {
          return error_reply(std::string("cannot pause a session that is ") + std::string(to_string(state_)), id);
        }
        state_ = SessionState::Paused;
        break;
      case ControlAction::Reset:
        if (state_ == SessionState::Idle) {
          auto j = ack(cmd, id, tick, state_);
          j["noop"] = true;
          return j;
        }
        if (state_ != SessionState::Ended) record();
        fresh();
        break;
    }
    return ack(cmd, id, sim_->next_tick(), state_);
  }
  if (state_ != SessionState::Running && state_ != SessionState::Paused) {
    return error_reply(std::string("session is ") + std::string(to_string(state_)) + "; send start first", id);
  }
  try {
    sim_->apply(cmd);
  } catch (const std::invalid_argument& e) {
    return error_reply(e.what(), id);
  }
  return ack(cmd, id, tick, state_);
}

bool Session::tick() {
  if (state_ != SessionState::Running) return false;
  sim_->step();
  if (sim_->done()) {
    state_ = SessionState::Ended;
    record();
  }
  return true;
}

void Session::shutdown() {
  if (state_ != SessionState::Running && state_ != SessionState::Paused) return;
  state_ = SessionState::Ended;
  record();
}

SessionSnapshot Session::snapshot() const {
  SessionSnapshot s;
  s.state = state_;
  s.tick = sim_->next_tick();
  s.session_time = static_cast<double>(s.tick) * sim_->dt();
  if (!sim_->trace().rows.empty()) s.row = sim_->trace().rows.back();
  s.last_step = sim_->last_step_event();
  if (const ExternalPilotSource* p = sim_->external_pilot()) {
    s.lean = p->lean();
    s.tempo = p->commanded_tempo();
    s.stop = p->stop();
  }
  s.status = sim_->status();
  return s;
}

nlohmann::json snapshot_json(const SessionSnapshot& s, long long seq) {
  nlohmann::json j{{"type", "snapshot"},
                   {"schema_version", kWireSchemaVersion},
                   {"seq", seq},
                   {"state", to_string(s.state)},
                   {"tick", s.tick},
                   {"session_time", s.session_time},
                   {"realtime_factor", s.realtime_factor},
                   {"fall", s.status == RunStatus::Fell},
                   {"divergence", s.status == RunStatus::Diverged},
                   {"pilot_command", {{"lean", s.lean}, {"tempo", s.tempo}, {"stop", s.stop}}}};
  if (s.row) {
    const TraceRow& r = *s.row;
    j["time"] = r.time;
    j["robot"] = {{"com_x", r.com_x_world}, {"com_y", r.y},        {"xd", r.xd},
                  {"yd", r.yd},             {"stance", r.stance},  {"stance_x", r.stance_x},
                  {"phase", r.phase},       {"cop_x", r.stance_x + r.cop_x}, {"cop_y", r.cop_y},
                  {"foot_l_y", r.foot_l_y}, {"foot_r_y", r.foot_r_y}};
    j["dcm"] = {{"ref_norm", r.ref_xi_norm}, {"robot_norm", r.xi_norm}, {"error", r.dcm_err}};
    j["forces"] = {{"F_hmi", r.F_hmi}, {"F_s", r.F_s}, {"F_ext", r.F_ext}, {"F_ff", r.F_ff}, {"F_fb", r.F_fb}};
    j["pilot"] = {{"x", r.pilot_x},
                  {"xd", r.pilot_xd},
                  {"target_x", r.pilot_target_x},
                  {"y", r.pilot_y},
                  {"contact_l", r.pilot_contact_l},
                  {"contact_r", r.pilot_contact_r}};
    j["saturated"] = {{"x", r.sat_x}, {"y", r.sat_y}};
  } else {
    j["time"] = nullptr;
  }
  if (s.last_step) {
    j["last_step"] = {{"tick", s.last_step->tick}, {"time", s.last_step->time}, {"data", s.last_step->data}};
  } else {
    j["last_step"] = nullptr;
  }
  return j;
}

ScenarioConfig replay_config(const SessionRecord& rec) {
  ScenarioConfig cfg = rec.config;
  cfg.pilot.commands = rec.commands;
  // A session reset before its end covers ticks 0..n-1 only.
  if (rec.summary.status == RunStatus::Running && !rec.trace.rows.empty()) {
    cfg.duration = static_cast<double>(rec.trace.rows.size() - 1) * cfg.dt;
  }
  return cfg;
}

}  // namespace telewalk
