#include "telewalk/pilot.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace telewalk {

namespace {
constexpr double kClockEps = 1e-9;

double smoothstep(double s) {
  s = std::clamp(s, 0.0, 1.0);
  return s * s * (3.0 - 2.0 * s);
}
}  // namespace

PilotPlantState pilot_plant_tick(const PilotPlantState& s, double F_xH, double F_s, double F_hmi, double mass,
                                 double workspace, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("pilot_plant_tick: dt must be positive");
  const double accel = (F_xH - F_s + F_hmi) / mass;
  const Eigen::Vector2d next = rk4_step(
      Eigen::Vector2d(s.x, s.xdot), [&](const Eigen::Vector2d& q) { return Eigen::Vector2d(q(1), accel); }, dt);
  PilotPlantState out = s;
  out.x = next(0);
  out.xdot = next(1);
  if (std::abs(out.x) > workspace) {
    out.x = std::copysign(workspace, out.x);
    out.xdot = 0.0;
  }
  return out;
}

double NormalSampler::uniform() {
  // 53 random bits in (0, 1].
  return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double NormalSampler::operator()(double sigma) {
  if (sigma == 0.0) return 0.0;
  if (spare_) {
    const double z = *spare_;
    spare_.reset();
    return sigma * z;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double theta = 2.0 * std::numbers::pi * uniform();
  spare_ = r * std::sin(theta);
  return sigma * r * std::cos(theta);
}

ContactScheduler::ContactScheduler(const SteppingConfig& cfg, const LipParams<double>& human, std::uint64_t seed)
    : cfg_(cfg), human_(human), noise_(seed), dsp_required_(cfg.start_delay) {
  if (!(cfg.tempo >= 0.0)) throw std::invalid_argument("stepping.tempo must be >= 0");
  if (!(cfg.dsp_time >= 0.0)) throw std::invalid_argument("stepping.dsp_time must be >= 0");
}

void ContactScheduler::update(double clock) {
  if (!swing_) {
    if (!stepping() && !weight_shifted_ && clock - phase_start_ + kClockEps >= dsp_required_) {
      // Standing still; a restart begins with a fresh preparatory shift.
      resting_ = true;
      phase_start_ = clock;
      dsp_required_ = std::max(cfg_.dsp_time, cfg_.first_shift_lead);
    }
    if (stepping()) {
      const double elapsed = clock - phase_start_;
      // From standing the weight shift is a slower preparatory one.
      const double lead = resting_ ? std::max(cfg_.first_shift_lead, cfg_.dsp_time / 2.0) : cfg_.dsp_time / 2.0;
      const double shift_at = std::max(0.0, dsp_required_ - lead);
      if (!weight_shifted_ && elapsed + kClockEps >= shift_at) {
        weight_shifted_ = true;
        sway_start_ = clock;
        sway_sign_ = other(next_lift_) == Foot::Left ? 1.0 : -1.0;
        sway_period_ = (dsp_required_ - elapsed) + period() - cfg_.dsp_time / 2.0;
      }
      if (elapsed + kClockEps >= dsp_required_) {
        resting_ = false;
        swing_ = next_lift_;
        phase_start_ = clock;
        swing_duration_ = std::max(cfg_.min_swing, period() - cfg_.dsp_time + noise_(cfg_.jitter_sigma));
      }
    }
  } else if (clock - phase_start_ + kClockEps >= swing_duration_) {
    force_touchdown(clock);
  }
  evaluate_sway(clock);
}

bool ContactScheduler::force_touchdown(double clock) {
  if (!swing_ || clock - phase_start_ + kClockEps < std::min(cfg_.min_swing, swing_duration_)) return false;
  next_lift_ = other(*swing_);
  swing_.reset();
  phase_start_ = clock;
  dsp_required_ = cfg_.dsp_time;
  weight_shifted_ = false;
  ++touchdowns_;
  return true;
}

void ContactScheduler::evaluate_sway(double clock) {
  if (!sway_start_) {
    y_ = ydot_ = cop_y_ = 0.0;
    return;
  }
  const double tau = clock - *sway_start_;
  const double half = sway_period_ / 2.0;
  if (tau > sway_period_ + kClockEps) {
    // Standing between the feet once the planned weight transfer is overdue.
    y_ = ydot_ = cop_y_ = 0.0;
    return;
  }
  const double w = human_.omega;
  const double d = sway_sign_ * cfg_.stance_half_width;
  const double c = std::cosh(w * half);
  y_ = d * (1.0 - std::cosh(w * (tau - half)) / c);
  ydot_ = -d * w * std::sinh(w * (tau - half)) / c;
  cop_y_ = d;
}

SyntheticPilot::SyntheticPilot(const LipParams<double>& human, const SteppingConfig& stepping,
                               const PilotPlantConfig& plant, std::uint64_t seed)
    : human_(human), plant_cfg_(plant), scheduler_(stepping, human, seed) {
  plant_.foot_left_y = scheduler_.foot_y(Foot::Left);
  plant_.foot_right_y = scheduler_.foot_y(Foot::Right);
}

PilotObservation SyntheticPilot::observe(double clock) {
  clock_ = clock;
  before_observe(clock);
  scheduler_.update(clock);
  target_ = target(clock);
  plant_.contact_left = scheduler_.contact_left();
  plant_.contact_right = scheduler_.contact_right();

  PilotObservation obs;
  obs.timestamp = clock;
  obs.com_x = plant_.x;
  obs.com_xdot = plant_.xdot;
  obs.contact_left = plant_.contact_left;
  obs.contact_right = plant_.contact_right;
  obs.force_x = force_x_;
  obs.com_y = scheduler_.com_y();
  obs.com_ydot = scheduler_.com_ydot();
  obs.cop_y = scheduler_.cop_y();
  obs.foot_left_y = plant_.foot_left_y;
  obs.foot_right_y = plant_.foot_right_y;
  obs.target_com_x = target_;
  return obs;
}

void SyntheticPilot::advance(const PilotFeedback& fb, double dt) {
  const PilotGains& g = plant_cfg_.gains;
  force_x_ = g.kp * (target_ - plant_.x) - g.kd * plant_.xdot + (plant_cfg_.compensate_spring ? fb.F_s : 0.0);
  plant_ = pilot_plant_tick(plant_, force_x_, fb.F_s, fb.F_hmi, human_.mass, plant_cfg_.workspace, dt);
  last_hmi_ = fb.F_hmi;
}

LeanWalkPilot::LeanWalkPilot(const LipParams<double>& human, const SteppingConfig& stepping,
                             const PilotPlantConfig& plant, const LeanProfile& lean, std::uint64_t seed)
    : SyntheticPilot(human, stepping, plant, seed), lean_(lean) {}

double LeanWalkPilot::lean_target(double clock) const {
  const double up_end = lean_.start + lean_.ramp;
  const double down_start = up_end + lean_.hold;
  if (clock <= lean_.start) return 0.0;
  if (clock < up_end) return lean_.amplitude * smoothstep((clock - lean_.start) / lean_.ramp);
  if (clock <= down_start) return lean_.amplitude;
  return lean_.amplitude * (1.0 - smoothstep((clock - down_start) / lean_.ramp));
}

ReactiveBalancePilot::ReactiveBalancePilot(const LipParams<double>& human, const SteppingConfig& stepping,
                                           const PilotPlantConfig& plant, const ReflexConfig& reflex,
                                           std::uint64_t seed)
    : SyntheticPilot(human, stepping, plant, seed), reflex_(reflex) {}

void ReactiveBalancePilot::before_observe(double clock) {
  const double push = std::abs(last_hmi_);
  if (armed_ && push > reflex_.threshold) {
    armed_ = false;
    pending_ = true;
  } else if (!armed_ && !pending_ && push < reflex_.threshold / 2.0) {
    armed_ = true;
  }
  if (pending_ && scheduler_.force_touchdown(clock)) {
    pending_ = false;
    ++reflex_steps_;
  }
}

ExternalPilotSource::ExternalPilotSource(const LipParams<double>& human, const SteppingConfig& stepping,
                                         const PilotPlantConfig& plant, double max_lean, std::uint64_t seed)
    : SyntheticPilot(human, stepping, plant, seed), max_lean_(max_lean) {
  scheduler_.set_tempo(0.0);
}

bool ExternalPilotSource::push(const PilotCommand& cmd) {
  bool clamped = false;
  if (cmd.lean) {
    const double v = std::isfinite(*cmd.lean) ? *cmd.lean : 0.0;
    lean_ = std::clamp(v, -1.0, 1.0);
    clamped |= lean_ != *cmd.lean;
  }
  if (cmd.tempo) {
    const double v = std::isfinite(*cmd.tempo) ? *cmd.tempo : 0.0;
    tempo_ = std::clamp(v, 0.0, kMaxTempo);
    clamped |= tempo_ != *cmd.tempo;
  }
  if (cmd.stop) stop_ = *cmd.stop;
  scheduler_.set_tempo(tempo_);
  scheduler_.set_stop(stop_);
  return clamped;
}

TraceReplaySource::TraceReplaySource(std::vector<PilotObservation> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw std::invalid_argument("TraceReplaySource: empty trace");
}

PilotObservation TraceReplaySource::observe(double clock) {
  if (index_ < rows_.size()) return rows_[index_];
  PilotObservation obs = rows_.back();
  obs.timestamp = clock;
  return obs;
}

}  // namespace telewalk
