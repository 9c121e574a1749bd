// Force laws of the bilateral coupling between the human walking reference,
// the robot and the pilot. All laws are linear in their state arguments.
#pragma once

#include <algorithm>

#include "telewalk/lip.hpp"

namespace telewalk {

struct DbftGains {
  double K_x = 150.0;  // N per unit normalized sagittal DCM error
  double K_y = 600.0;  // N per unit normalized frontal DCM error
  bool reflect_disturbance = true;
};

/// Every coupling force active over one tick, in N.
struct ForceSet {
  double F_ref = 0.0;      // reference contact force, CoP at the reference stance foot
  double F_ff = 0.0;       // robot feedforward
  double F_fb = 0.0;       // robot feedback on the normalized DCM gap
  double F_hmi = 0.0;      // haptic force on the pilot
  double F_s = 0.0;        // virtual spring on the pilot
  double F_ext = 0.0;      // disturbance on the robot CoM
  double F_contact = 0.0;  // achieved robot sagittal contact force (after CoP saturation)
  double F_y_fb = 0.0;     // frontal synchronization force realized through the CoP
};

template <typename Scalar>
Scalar reference_contact_force(Scalar ref_x, const LipParams<Scalar>& human) {
  return human.mass * human.omega_sq() * ref_x;
}

/// m_R h_R w_R^2 / (m_H h_H w_H^2); equals m_R / m_H because h w^2 = g.
template <typename Scalar>
Scalar feedforward_scale(const LipParams<Scalar>& human, const LipParams<Scalar>& robot) {
  return (robot.mass * robot.com_height * robot.omega_sq()) / (human.mass * human.com_height * human.omega_sq());
}

template <typename Scalar>
Scalar feedforward_force(Scalar F_ref, const LipParams<Scalar>& human, const LipParams<Scalar>& robot) {
  return feedforward_scale(human, robot) * F_ref;
}

template <typename Scalar>
Scalar feedback_force(Scalar xi_ref, Scalar xi_robot, const LipParams<Scalar>& human,
                      const LipParams<Scalar>& robot, Scalar gain) {
  return gain * normalized_dcm_gap(xi_ref, human, xi_robot, robot);
}

/// Ratio applied to F_ext when it is reflected to the pilot (m_H / m_R).
template <typename Scalar>
Scalar reflection_scale(const LipParams<Scalar>& human, const LipParams<Scalar>& robot) {
  return (human.mass * human.com_height * human.omega_sq()) / (robot.mass * robot.com_height * robot.omega_sq());
}

template <typename Scalar>
Scalar hmi_force(Scalar robot_xdot, Scalar ref_xdot, Scalar F_ext, const LipParams<Scalar>& human,
                 const LipParams<Scalar>& robot) {
  const Scalar weight = human.mass * human.com_height * human.omega_sq();
  const Scalar velocity_term =
      weight * (robot_xdot / (robot.com_height * robot.omega) - ref_xdot / (human.com_height * human.omega));
  return velocity_term + reflection_scale(human, robot) * F_ext;
}

template <typename Scalar>
Scalar virtual_spring_force(Scalar x_plus, const LipParams<Scalar>& human) {
  return human.mass * human.omega_sq() * x_plus;
}

/// Robot frontal CoP from the pilot CoP, scaled by h_R / h_H.
template <typename Scalar>
Scalar frontal_cop_sync(Scalar pilot_cop_y, const LipParams<Scalar>& human, const LipParams<Scalar>& robot) {
  return pilot_cop_y * robot.com_height / human.com_height;
}

template <typename Scalar>
Scalar frontal_cop_sync(Scalar pilot_cop_y, const LipParams<Scalar>& human, const LipParams<Scalar>& robot,
                        Scalar lb, Scalar ub) {
  return std::clamp(frontal_cop_sync(pilot_cop_y, human, robot), lb, ub);
}

}  // namespace telewalk
