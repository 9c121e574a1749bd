// Reduced-order biped: two decoupled non-passive LIP planes, an admissible
// CoP box spanning the supporting feet, the D->S reset map and the
// support-phase state machine driven by the pilot's foot contacts.
#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string_view>

#include "telewalk/lip.hpp"

namespace telewalk {

enum class Foot { Left, Right };
enum class SupportPhase { Double, SingleLeft, SingleRight };

constexpr Foot other(Foot f) { return f == Foot::Left ? Foot::Right : Foot::Left; }
std::string_view to_string(SupportPhase p);
std::string_view to_string(Foot f);
std::optional<SupportPhase> parse_support_phase(std::string_view s);

struct FootGeometry {
  double length = 0.06;
  double width = 0.03;
};

struct RobotState {
  /// [x_R, xdot_R, y_R, ydot_R]; x_R is relative to the stance foot, y_R is world frame.
  Eigen::Vector4d com = Eigen::Vector4d::Zero();
  double stance_x_world = 0.0;
  SupportPhase phase = SupportPhase::Double;
  double phase_time = 0.0;

  PlanarState<double> sagittal() const { return com.head<2>(); }
  PlanarState<double> frontal() const { return com.tail<2>(); }
  double com_x_world() const { return stance_x_world + com(0); }
};

struct CopBounds {
  double x_lb = 0.0;
  double x_ub = 0.0;
  double y_lb = 0.0;
  double y_ub = 0.0;
};

struct CopSaturation {
  Eigen::Vector2d cop = Eigen::Vector2d::Zero();
  bool x_saturated = false;
  bool y_saturated = false;
};

/// Feet positions the support polygon is built from. Sagittal positions are
/// in the stance frame, lateral positions in the world frame.
struct SupportLayout {
  double left_y = 0.0;
  double right_y = 0.0;
  double front_x = 0.0;  // landed swing foot during double support
};

CopBounds support_bounds(SupportPhase phase, const SupportLayout& feet, const FootGeometry& geom);

CopSaturation saturate_cop(const Eigen::Vector2d& cmd, const CopBounds& bounds);

/// CoP that realizes a commanded contact force: p = x - F / (m w^2).
template <typename Scalar>
Scalar force_to_cop(Scalar force, const PlanarState<Scalar>& s, const LipParams<Scalar>& p) {
  return s(0) - force / (p.mass * p.omega_sq());
}

// Frontal stepping. With the CoP held on each stance foot for T seconds, the
// periodic gait between feet at a and b has its DCM at
//   a (1 + tanh(wT/2)) / 2 + b (1 - tanh(wT/2)) / 2
// when weight moves onto foot a.

/// Frontal DCM at the moment weight moves onto `next_stance_y`.
template <typename Scalar>
Scalar frontal_transfer_dcm(Scalar next_stance_y, Scalar other_y, Scalar ssp_time, Scalar omega) {
  using std::tanh;
  const Scalar t = tanh(omega * ssp_time / Scalar(2));
  return (next_stance_y * (Scalar(1) + t) + other_y * (Scalar(1) - t)) / Scalar(2);
}

/// Single-support frontal DCM reference: the CoP-on-foot trajectory that
/// reaches `touchdown_dcm` at tau = T; tau is clamped to [0, T].
template <typename Scalar>
Scalar frontal_ssp_dcm(Scalar stance_y, Scalar touchdown_dcm, Scalar tau, Scalar ssp_time, Scalar omega) {
  using std::clamp;
  using std::exp;
  const Scalar t = clamp(tau, Scalar(0), ssp_time);
  return stance_y + (touchdown_dcm - stance_y) * exp(-omega * (ssp_time - t));
}

struct FrontalFootholdLimits {
  double min_separation = 0.04;  // from the stance foot, m
  double max_adjust = 0.08;      // from the nominal foothold, m
};

/// Lateral foothold that makes the current frontal DCM the transfer DCM of
/// the new layout, limited around the nominal foothold and kept on the
/// nominal side of the stance foot.
inline double frontal_foothold(double xi_y, double stance_y, double nominal_y, double ssp_time, double omega,
                               const FrontalFootholdLimits& lim) {
  const double t = std::tanh(omega * ssp_time / 2.0);
  double y = (2.0 * xi_y - stance_y * (1.0 - t)) / (1.0 + t);
  y = std::clamp(y, nominal_y - lim.max_adjust, nominal_y + lim.max_adjust);
  return nominal_y >= stance_y ? std::max(y, stance_y + lim.min_separation)
                               : std::min(y, stance_y - lim.min_separation);
}

/// Maps a pilot frontal CoP through the affine map that takes the pilot's
/// feet onto the robot's feet. For robot feet at h_R/h_H times the pilot's
/// this is the plain height-ratio scaling.
inline double map_frontal_cop(double pilot_cop_y, double pilot_left_y, double pilot_right_y, double robot_left_y,
                              double robot_right_y, double h_ratio) {
  const double span = pilot_left_y - pilot_right_y;
  if (std::abs(span) < 1e-9) return h_ratio * pilot_cop_y;
  const double s = (pilot_cop_y - pilot_right_y) / span;
  return robot_right_y + s * (robot_left_y - robot_right_y);
}

/// One RK4 tick of both planes; F_ext acts on the sagittal plane only.
RobotState integrate_tick(const RobotState& state, const Eigen::Vector2d& cop, double F_ext,
                          const LipParams<double>& robot, double dt);

/// D->S reset: translate the stance frame forward by `step_length`.
RobotState apply_reset(const RobotState& state, double step_length);

enum class TransitionKind { DoubleToSingle, SingleToDouble };

struct StepEvent {
  TransitionKind kind = TransitionKind::DoubleToSingle;
  double step_length = 0.0;
  double timestamp = 0.0;
  Foot stance = Foot::Left;  // stance foot after the transition (D->S) or before it (S->D)
};

/// Support-phase machine. D->S requires the double-support dwell and a lift
/// of the foot that was the stance foot before touchdown, so stance labels
/// always alternate. S->D fires on touchdown of the swing foot.
class GaitFsm {
 public:
  struct Output {
    std::optional<StepEvent> event;
    bool diagnostic = false;  // contradictory contacts (pilot in flight, wrong foot lifted)
  };

  explicit GaitFsm(double dsp_time = 0.05);

  Output update(bool pilot_left, bool pilot_right, double clock);

  SupportPhase phase() const { return phase_; }
  double phase_start() const { return phase_start_; }
  std::optional<Foot> last_stance() const { return last_stance_; }
  double dsp_time() const { return dsp_time_; }

 private:
  double dsp_time_;
  SupportPhase phase_ = SupportPhase::Double;
  double phase_start_ = 0.0;
  std::optional<Foot> last_stance_;
};

/// Swing-foot target: lateral position is the pilot's swing foot scaled by
/// h_R / h_H, sagittal position blends from `from_x` to `step_length` with a
/// smoothstep over the assumed step time.
Eigen::Vector2d swing_foot_target(double pilot_swing_y, double h_ratio, double from_x, double step_length,
                                  double phase_time, double step_time);

}  // namespace telewalk
