// Human walking reference: a passive LIP on a P1 orbit whose end-of-step DCM
// is pinned to the pilot's (surrogate) DCM and whose step time is the pilot's
// previous step time. Recomputed every tick.
#pragma once

#include <span>
#include <vector>

#include "telewalk/lip.hpp"

namespace telewalk {

/// One sample of what the cockpit measures on the pilot.
struct PilotObservation {
  double timestamp = 0.0;
  double com_x = 0.0;
  double com_xdot = 0.0;
  bool contact_left = true;
  bool contact_right = true;
  double force_x = 0.0;  // pilot contact force on the force plate, N
  double com_y = 0.0;
  double com_ydot = 0.0;
  double cop_y = 0.0;
  double foot_left_y = 0.0;
  double foot_right_y = 0.0;
  double target_com_x = 0.0;  // what the pilot is trying to hold (synthetic and live pilots)
};

struct RefGenConfig {
  double deadband = 0.01;
  double step_time_default = 0.4;
  double step_time_min = 0.2;
  double step_time_max = 0.8;

  void validate() const;
};

struct StepBoundary {
  double x_minus = 0.0;
  double xdot_minus = 0.0;
  double x_plus = 0.0;
  double xdot_plus = 0.0;
  double xi_minus = 0.0;
  double xi_plus = 0.0;
  double step_time = 0.0;
};

struct ReferenceState {
  double x = 0.0;
  double xdot = 0.0;
  double xi = 0.0;
  double phase_time = 0.0;
  bool elongated = false;
  double xi_pilot = 0.0;
  StepBoundary boundary;
};

/// Pilot CoM used in place of the pilot DCM: zero inside the dead-band,
/// raw CoM outside it.
double pilot_dcm_surrogate(const PilotObservation& obs, const RefGenConfig& cfg);

/// Previous inter-touchdown interval, clamped; the default before two
/// touchdowns have been seen.
double step_time_estimate(std::span<const double> touchdowns, const RefGenConfig& cfg);

/// End-of-step CoM state on the positive orbital line whose DCM equals xi_pilot.
template <typename Scalar>
PlanarState<Scalar> end_of_step_state(Scalar step_time, Scalar xi_pilot, const LipParams<Scalar>& p) {
  const Scalar sigma1 = orbital_slope(step_time, p).sigma1;
  const Scalar x_minus = xi_pilot / (Scalar(1) + sigma1 / p.omega);
  return PlanarState<Scalar>(x_minus, p.omega * (xi_pilot - x_minus));
}

template <typename Scalar>
PlanarState<Scalar> begin_of_step_state(const PlanarState<Scalar>& end) {
  return PlanarState<Scalar>(-end(0), end(1));
}

template <typename Scalar>
Scalar reference_dcm_traj(Scalar xi_plus, Scalar t, const LipParams<Scalar>& p) {
  using std::exp;
  if (t < Scalar(0)) throw std::invalid_argument("reference_dcm_traj: t must be >= 0");
  return xi_plus * exp(p.omega * t);
}

StepBoundary make_step_boundary(double step_time, double xi_pilot, const LipParams<double>& human);

class ReferenceGenerator {
 public:
  ReferenceGenerator(const LipParams<double>& human, const RefGenConfig& cfg);

  /// Ingests one observation and re-evaluates the reference at `clock`.
  const ReferenceState& update(const PilotObservation& obs, double clock);

  /// Restarts the reference step at `clock` (robot D->S transition) and
  /// re-evaluates with the last observation.
  const ReferenceState& restart_step(double clock);

  const ReferenceState& state() const { return state_; }
  std::span<const double> touchdowns() const { return touchdowns_; }

 private:
  void evaluate(double clock);

  LipParams<double> human_;
  RefGenConfig cfg_;
  PilotObservation last_obs_;
  bool have_obs_ = false;
  std::vector<double> touchdowns_;
  double step_start_ = 0.0;
  ReferenceState state_;
};

}  // namespace telewalk
