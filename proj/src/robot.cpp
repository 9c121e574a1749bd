#include "telewalk/robot.hpp"

#include <algorithm>
#include <stdexcept>

namespace telewalk {

namespace {
// Ticks are k * dt, so phase durations carry rounding noise.
constexpr double kClockEps = 1e-9;
}  // namespace

std::string_view to_string(SupportPhase p) {
  switch (p) {
    case SupportPhase::Double: return "DSP";
    case SupportPhase::SingleLeft: return "SSP_L";
    case SupportPhase::SingleRight: return "SSP_R";
  }
  return "?";
}

std::string_view to_string(Foot f) { return f == Foot::Left ? "left" : "right"; }

std::optional<SupportPhase> parse_support_phase(std::string_view s) {
  if (s == "DSP") return SupportPhase::Double;
  if (s == "SSP_L") return SupportPhase::SingleLeft;
  if (s == "SSP_R") return SupportPhase::SingleRight;
  return std::nullopt;
}

CopBounds support_bounds(SupportPhase phase, const SupportLayout& feet, const FootGeometry& geom) {
  const double hl = geom.length / 2.0;
  const double hw = geom.width / 2.0;
  CopBounds b;
  switch (phase) {
    case SupportPhase::Double:
      b.x_lb = std::min(0.0, feet.front_x) - hl;
      b.x_ub = std::max(0.0, feet.front_x) + hl;
      b.y_lb = std::min(feet.left_y, feet.right_y) - hw;
      b.y_ub = std::max(feet.left_y, feet.right_y) + hw;
      break;
    case SupportPhase::SingleLeft:
    case SupportPhase::SingleRight: {
      const double y = phase == SupportPhase::SingleLeft ? feet.left_y : feet.right_y;
      b.x_lb = -hl;
      b.x_ub = hl;
      b.y_lb = y - hw;
      b.y_ub = y + hw;
      break;
    }
  }
  return b;
}

CopSaturation saturate_cop(const Eigen::Vector2d& cmd, const CopBounds& bounds) {
  CopSaturation out;
  out.cop.x() = std::clamp(cmd.x(), bounds.x_lb, bounds.x_ub);
  out.cop.y() = std::clamp(cmd.y(), bounds.y_lb, bounds.y_ub);
  out.x_saturated = out.cop.x() != cmd.x();
  out.y_saturated = out.cop.y() != cmd.y();
  return out;
}

RobotState integrate_tick(const RobotState& state, const Eigen::Vector2d& cop, double F_ext,
                          const LipParams<double>& robot, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_tick: dt must be positive");
  const double w2 = robot.omega_sq();
  const double bias = F_ext / robot.mass;
  RobotState next = state;
  next.com = rk4_step(
      state.com,
      [&](const Eigen::Vector4d& q) {
        return Eigen::Vector4d(q(1), w2 * (q(0) - cop.x()) + bias, q(3), w2 * (q(2) - cop.y()));
      },
      dt);
  next.phase_time = state.phase_time + dt;
  return next;
}

RobotState apply_reset(const RobotState& state, double step_length) {
  RobotState next = state;
  next.com(0) = state.com(0) - step_length;
  next.stance_x_world = state.stance_x_world + step_length;
  return next;
}

GaitFsm::GaitFsm(double dsp_time) : dsp_time_(dsp_time) {
  if (!(dsp_time >= 0.0)) throw std::invalid_argument("GaitFsm: dsp_time must be >= 0");
}

GaitFsm::Output GaitFsm::update(bool pilot_left, bool pilot_right, double clock) {
  Output out;
  if (!pilot_left && !pilot_right) {
    out.diagnostic = true;
    return out;
  }

  if (phase_ == SupportPhase::Double) {
    if (pilot_left && pilot_right) return out;
    if (clock - phase_start_ + kClockEps < dsp_time_) return out;
    const Foot lifted = pilot_left ? Foot::Right : Foot::Left;
    if (last_stance_ && lifted != *last_stance_) {
      // The foot that just landed lifted again before weight transfer.
      out.diagnostic = true;
      return out;
    }
    const Foot stance = other(lifted);
    phase_ = stance == Foot::Left ? SupportPhase::SingleLeft : SupportPhase::SingleRight;
    phase_start_ = clock;
    last_stance_ = stance;
    out.event = StepEvent{TransitionKind::DoubleToSingle, 0.0, clock, stance};
    return out;
  }

  const Foot stance = phase_ == SupportPhase::SingleLeft ? Foot::Left : Foot::Right;
  const bool swing_down = stance == Foot::Left ? pilot_right : pilot_left;
  if (swing_down) {
    phase_ = SupportPhase::Double;
    phase_start_ = clock;
    out.event = StepEvent{TransitionKind::SingleToDouble, 0.0, clock, stance};
  }
  return out;
}

Eigen::Vector2d swing_foot_target(double pilot_swing_y, double h_ratio, double from_x, double step_length,
                                  double phase_time, double step_time) {
  const double s = step_time > 0.0 ? std::clamp(phase_time / step_time, 0.0, 1.0) : 1.0;
  const double blend = s * s * (3.0 - 2.0 * s);
  return {from_x + (step_length - from_x) * blend, pilot_swing_y * h_ratio};
}

}  // namespace telewalk
