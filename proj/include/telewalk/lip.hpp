// Linear inverted pendulum (LIP) math: closed-form passive solution, DCM,
// P1 orbit slope and scale/time normalization between two LIP systems.
//
// Everything here is stateless and templated on the scalar type so the same
// expressions can be evaluated in double, long double or an autodiff type.
#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>

namespace telewalk {

/// Mass, CoM height and gravity of one LIP. The natural frequency is always
/// derived as sqrt(g/h), so h * omega^2 == g holds to rounding.
template <typename Scalar = double>
struct LipParams {
  Scalar mass{};
  Scalar com_height{};
  Scalar gravity{};
  Scalar omega{};

  static LipParams make(Scalar mass, Scalar com_height, Scalar gravity = Scalar(9.81)) {
    using std::isfinite;
    using std::sqrt;
    if (!(mass > Scalar(0)) || !(com_height > Scalar(0)) || !(gravity > Scalar(0)) ||
        !isfinite(mass) || !isfinite(com_height) || !isfinite(gravity)) {
      throw std::invalid_argument("LipParams: mass, com_height and gravity must be positive");
    }
    return LipParams{mass, com_height, gravity, sqrt(gravity / com_height)};
  }

  Scalar omega_sq() const { return omega * omega; }
};

/// (position, velocity) of the CoM along one plane.
template <typename Scalar = double>
using PlanarState = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
PlanarState<Scalar> planar(Scalar x, Scalar xdot) {
  return PlanarState<Scalar>(x, xdot);
}

/// Step time and the slope of the orbital lines xdot = +-sigma1 * x.
template <typename Scalar = double>
struct OrbitSpec {
  Scalar step_time{};
  Scalar sigma1{};
};

/// x(t) = c1 e^{wt} + c2 e^{-wt}
template <typename Scalar = double>
struct ClosedFormCoeffs {
  Scalar c1{};
  Scalar c2{};
};

template <typename Scalar>
Scalar lip_accel(const PlanarState<Scalar>& s, Scalar cop, const LipParams<Scalar>& p) {
  return p.omega_sq() * (s(0) - cop);
}

template <typename Scalar>
Scalar contact_force(const PlanarState<Scalar>& s, Scalar cop, const LipParams<Scalar>& p) {
  return p.mass * p.omega_sq() * (s(0) - cop);
}

template <typename Scalar>
ClosedFormCoeffs<Scalar> closed_form_coeffs(const PlanarState<Scalar>& init, const LipParams<Scalar>& p) {
  const Scalar v = init(1) / p.omega;
  return {Scalar(0.5) * (init(0) + v), Scalar(0.5) * (init(0) - v)};
}

template <typename Scalar>
PlanarState<Scalar> from_coeffs(const ClosedFormCoeffs<Scalar>& c, const LipParams<Scalar>& p) {
  return PlanarState<Scalar>(c.c1 + c.c2, p.omega * (c.c1 - c.c2));
}

/// Passive (p = 0) LIP evaluated at time t from init.
template <typename Scalar>
PlanarState<Scalar> closed_form_passive(const PlanarState<Scalar>& init, const LipParams<Scalar>& p, Scalar t) {
  using std::exp;
  if (t < Scalar(0)) throw std::invalid_argument("closed_form_passive: t must be >= 0");
  const auto c = closed_form_coeffs(init, p);
  const Scalar grow = exp(p.omega * t);
  const Scalar decay = exp(-p.omega * t);
  return PlanarState<Scalar>(c.c1 * grow + c.c2 * decay, p.omega * (c.c1 * grow - c.c2 * decay));
}

/// Divergent component of motion, xi = x + xdot / omega.
template <typename Scalar>
Scalar dcm(const PlanarState<Scalar>& s, const LipParams<Scalar>& p) {
  return s(0) + s(1) / p.omega;
}

/// xdot^2 - omega^2 x^2, conserved by the passive LIP.
template <typename Scalar>
Scalar orbital_energy(const PlanarState<Scalar>& s, const LipParams<Scalar>& p) {
  return s(1) * s(1) - p.omega_sq() * s(0) * s(0);
}

/// coth(z) for z >= 1e-9, written in terms of expm1 so it stays accurate
/// for small z and does not overflow for large z.
template <typename Scalar>
Scalar stable_coth(Scalar z) {
  using std::exp;
  using std::expm1;
  if (!(z >= Scalar(1e-9))) throw std::invalid_argument("stable_coth: argument below 1e-9");
  const Scalar e = exp(Scalar(-2) * z);
  return -(Scalar(1) + e) / expm1(Scalar(-2) * z);
}

template <typename Scalar>
OrbitSpec<Scalar> orbital_slope(Scalar step_time, const LipParams<Scalar>& p) {
  if (!(step_time > Scalar(0))) throw std::invalid_argument("orbital_slope: step time must be positive");
  return {step_time, p.omega * stable_coth(step_time * p.omega / Scalar(2))};
}

/// xi_a / h_a - xi_b / h_b; zero when the two systems are kinematically similar.
template <typename Scalar>
Scalar normalized_dcm_gap(const PlanarState<Scalar>& a, const LipParams<Scalar>& pa,
                          const PlanarState<Scalar>& b, const LipParams<Scalar>& pb) {
  return dcm(a, pa) / pa.com_height - dcm(b, pb) / pb.com_height;
}

template <typename Scalar>
Scalar normalized_dcm_gap(Scalar xi_a, const LipParams<Scalar>& pa, Scalar xi_b, const LipParams<Scalar>& pb) {
  return xi_a / pa.com_height - xi_b / pb.com_height;
}

/// DCM rates normalized by length and time scale.
template <typename Scalar>
Scalar normalized_dcm_rate_gap(Scalar rate_a, const LipParams<Scalar>& pa, Scalar rate_b,
                               const LipParams<Scalar>& pb) {
  return rate_a / (pa.com_height * pa.omega) - rate_b / (pb.com_height * pb.omega);
}

/// One classical RK4 step of xdot = f(x) for fixed-size Eigen states.
template <typename Derived, typename F>
typename Derived::PlainObject rk4_step(const Eigen::MatrixBase<Derived>& x, const F& f,
                                       typename Derived::Scalar dt) {
  using Plain = typename Derived::PlainObject;
  using Scalar = typename Derived::Scalar;
  const Plain k1 = f(x);
  const Plain k2 = f(Plain(x + (dt / Scalar(2)) * k1));
  const Plain k3 = f(Plain(x + (dt / Scalar(2)) * k2));
  const Plain k4 = f(Plain(x + dt * k3));
  return x + (dt / Scalar(6)) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4);
}

/// RK4 step of xddot = omega^2 (x - cop) + accel_bias with cop and bias held
/// constant over the step.
template <typename Scalar>
PlanarState<Scalar> lip_rk4_step(const PlanarState<Scalar>& s, Scalar cop, Scalar accel_bias,
                                 const LipParams<Scalar>& p, Scalar dt) {
  const Scalar w2 = p.omega_sq();
  return rk4_step(
      s,
      [&](const PlanarState<Scalar>& q) {
        return PlanarState<Scalar>(q(1), w2 * (q(0) - cop) + accel_bias);
      },
      dt);
}

}  // namespace telewalk
