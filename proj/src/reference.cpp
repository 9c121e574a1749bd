#include "telewalk/reference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace telewalk {

namespace {
constexpr std::size_t kTouchdownHistory = 8;
}

void RefGenConfig::validate() const {
  if (!(deadband >= 0.0)) throw std::invalid_argument("refgen.deadband must be >= 0");
  if (!(step_time_min > 0.0 && step_time_min <= step_time_default && step_time_default <= step_time_max)) {
    throw std::invalid_argument("refgen: require 0 < Ts_min <= Ts_default <= Ts_max");
  }
}

double pilot_dcm_surrogate(const PilotObservation& obs, const RefGenConfig& cfg) {
  return std::abs(obs.com_x) <= cfg.deadband ? 0.0 : obs.com_x;
}

double step_time_estimate(std::span<const double> touchdowns, const RefGenConfig& cfg) {
  if (touchdowns.size() < 2) return cfg.step_time_default;
  const double last = touchdowns[touchdowns.size() - 1] - touchdowns[touchdowns.size() - 2];
  return std::clamp(last, cfg.step_time_min, cfg.step_time_max);
}

StepBoundary make_step_boundary(double step_time, double xi_pilot, const LipParams<double>& human) {
  const PlanarState<double> end = end_of_step_state(step_time, xi_pilot, human);
  const PlanarState<double> begin = begin_of_step_state(end);
  StepBoundary b;
  b.x_minus = end(0);
  b.xdot_minus = end(1);
  b.x_plus = begin(0);
  b.xdot_plus = begin(1);
  b.xi_minus = dcm(end, human);
  b.xi_plus = dcm(begin, human);
  b.step_time = step_time;
  return b;
}

ReferenceGenerator::ReferenceGenerator(const LipParams<double>& human, const RefGenConfig& cfg)
    : human_(human), cfg_(cfg) {
  cfg_.validate();
  state_.boundary = make_step_boundary(cfg_.step_time_default, 0.0, human_);
}

const ReferenceState& ReferenceGenerator::update(const PilotObservation& obs, double clock) {
  if (have_obs_) {
    const bool left_down = obs.contact_left && !last_obs_.contact_left;
    const bool right_down = obs.contact_right && !last_obs_.contact_right;
    if (left_down || right_down) {
      touchdowns_.push_back(obs.timestamp);
      if (touchdowns_.size() > kTouchdownHistory) touchdowns_.erase(touchdowns_.begin());
    }
  }
  last_obs_ = obs;
  have_obs_ = true;
  evaluate(clock);
  return state_;
}

const ReferenceState& ReferenceGenerator::restart_step(double clock) {
  step_start_ = clock;
  evaluate(clock);
  return state_;
}

void ReferenceGenerator::evaluate(double clock) {
  const double step_time = step_time_estimate(touchdowns_, cfg_);
  const double xi_pilot = have_obs_ ? pilot_dcm_surrogate(last_obs_, cfg_) : 0.0;
  const StepBoundary b = make_step_boundary(step_time, xi_pilot, human_);
  const double t = std::max(0.0, clock - step_start_);

  // Past the assumed step time the same exponential keeps running (elongation);
  // the boundary above already follows the live pilot DCM.
  const PlanarState<double> s = closed_form_passive(planar(b.x_plus, b.xdot_plus), human_, t);
  state_.x = s(0);
  state_.xdot = s(1);
  state_.xi = dcm(s, human_);
  state_.phase_time = t;
  state_.elongated = t > step_time;
  state_.xi_pilot = xi_pilot;
  state_.boundary = b;
}

}  // namespace telewalk
