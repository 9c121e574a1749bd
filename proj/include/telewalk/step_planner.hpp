// Robot step length chosen at the double- to single-support transition so
// that normalized DCM tracking survives the reset map x+ = x- - l.
#pragma once

#include <algorithm>
#include <cmath>

namespace telewalk {

template <typename Scalar = double>
struct StepPlanInput {
  Scalar xi_robot{};      // robot sagittal DCM, stance frame
  Scalar xdot_robot{};    // robot sagittal CoM velocity
  Scalar xi_ref_plus{};   // beginning-of-step DCM of the walking reference
  Scalar h_ratio{};       // h_R / h_H
  Scalar dsp_time{};      // assumed double-support duration
};

template <typename Scalar = double>
struct StepPlan {
  Scalar length{};
  Scalar raw_length{};
  bool clamped = false;
};

template <typename Scalar>
Scalar nominal_step_length(Scalar xi_robot_minus, Scalar xi_ref_plus, Scalar h_ratio) {
  return xi_robot_minus - xi_ref_plus * h_ratio;
}

template <typename Scalar>
Scalar unclamped_step_length(const StepPlanInput<Scalar>& in) {
  return nominal_step_length(in.xi_robot, in.xi_ref_plus, in.h_ratio) + in.xdot_robot * in.dsp_time;
}

/// Nominal law at the live DCM plus the double-support drift x_dot * T_DSP,
/// limited to +-max_length.
template <typename Scalar>
StepPlan<Scalar> closed_loop_step_length(const StepPlanInput<Scalar>& in, Scalar max_length) {
  const Scalar raw = unclamped_step_length(in);
  const Scalar len = std::clamp(raw, -max_length, max_length);
  return {len, raw, len != raw};
}

}  // namespace telewalk
