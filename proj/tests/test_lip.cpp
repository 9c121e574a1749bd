#include <doctest.h>

#include <random>

#include "oracle.hpp"
#include "telewalk/lip.hpp"

using namespace telewalk;
using doctest::Approx;

namespace {
const auto human = LipParams<double>::make(75.0, 1.20);
const auto robot = LipParams<double>::make(20.2, 0.55);
}  // namespace

TEST_CASE("omega derives from g and h") {
  CHECK(human.omega == Approx(oracle::kOmegaH).epsilon(1e-15));
  CHECK(robot.omega == Approx(oracle::kOmegaR).epsilon(1e-15));
  CHECK(human.com_height * human.omega_sq() == Approx(9.81).epsilon(1e-15));
  CHECK_THROWS_AS(LipParams<double>::make(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(LipParams<double>::make(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("acceleration and contact force") {
  CHECK(lip_accel(planar(0.1, 0.0), 0.0, human) == Approx(0.8175).epsilon(1e-14));
  CHECK(lip_accel(planar(0.0, 0.0), 0.05, robot) == Approx(-0.89181818181818182).epsilon(1e-14));
  CHECK(lip_accel(planar(0.3, 1.0), 0.3, robot) == 0.0);
  CHECK(contact_force(planar(0.05, 0.0), 0.0, human) == Approx(30.65625).epsilon(1e-14));
  CHECK(contact_force(planar(0.02, 0.0), 0.01, robot) == Approx(3.6029454545454545).epsilon(1e-14));
}

TEST_CASE("closed-form passive solution") {
  CHECK(closed_form_passive(planar(0.0, 0.0), human, 0.7).isZero());
  SUBCASE("pure stable mode") {
    const auto s = closed_form_passive(planar(0.1, -0.1 * human.omega), human, 0.5);
    CHECK(s(0) == Approx(0.1 * std::exp(-human.omega * 0.5)).epsilon(1e-14));
    CHECK(s(1) == Approx(-0.1 * human.omega * std::exp(-human.omega * 0.5)).epsilon(1e-14));
  }
  SUBCASE("matches high-precision value and RK4") {
    const auto init = planar(oracle::kXMinus, oracle::kXdotMinus);
    const auto s = closed_form_passive(init, human, 0.3);
    CHECK(s(0) == Approx(oracle::kPassiveX).epsilon(1e-13));
    CHECK(s(1) == Approx(oracle::kPassiveXd).epsilon(1e-13));
    PlanarState<double> q = init;
    for (int i = 0; i < 300; ++i) q = lip_rk4_step(q, 0.0, 0.0, human, 1e-3);
    CHECK(std::abs(q(0) - oracle::kPassiveX) < 1e-8);
    CHECK(std::abs(q(1) - oracle::kPassiveXd) < 1e-7);
  }
  CHECK_THROWS_AS(closed_form_passive(planar(0.1, 0.0), human, -1.0), std::invalid_argument);
}

TEST_CASE("dcm") {
  CHECK(dcm(planar(0.1, 0.2), robot) == Approx(oracle::kDcmRobot).epsilon(1e-14));
  CHECK(dcm(planar(0.1, -0.1 * robot.omega), robot) == Approx(0.0).epsilon(1e-15));
  CHECK(dcm(planar(0.0, 0.0), robot) == 0.0);
}

TEST_CASE("orbital slope") {
  CHECK(orbital_slope(0.3, human).sigma1 == Approx(oracle::kSigma1_03).epsilon(1e-14));
  CHECK(orbital_slope(0.4, human).sigma1 == Approx(oracle::kSigma1_04).epsilon(1e-14));
  // The four-digit values quoted for the rounded omega agree to display precision.
  CHECK(orbital_slope(0.3, human).sigma1 == Approx(7.0703).epsilon(5e-5));
  CHECK(orbital_slope(0.4, human).sigma1 == Approx(5.5336).epsilon(5e-5));
  CHECK(orbital_slope(200.0, human).sigma1 == Approx(human.omega).epsilon(1e-15));
  CHECK(orbital_slope(1e-6, human).sigma1 == Approx(2.0 / 1e-6).epsilon(1e-6));
  CHECK_THROWS_AS(orbital_slope(0.0, human), std::invalid_argument);
}

TEST_CASE("stable coth against the textbook form") {
  for (double z : {1e-6, 1e-3, 0.1, 0.5, 1.0, 3.0, 10.0}) {
    CHECK(stable_coth(z) == Approx(std::cosh(z) / std::sinh(z)).epsilon(1e-12));
  }
  CHECK(stable_coth(800.0) == 1.0);
}

TEST_CASE("orbital energy is conserved by the passive LIP") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  for (int i = 0; i < 50; ++i) {
    const auto s0 = planar(u(rng), u(rng));
    const auto s1 = closed_form_passive(s0, human, 0.4);
    CHECK(orbital_energy(s1, human) == Approx(orbital_energy(s0, human)).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("P1 orbit boundary states map onto each other") {
  const double T = 0.35, xm = 0.03;
  const double s1 = orbital_slope(T, human).sigma1;
  const auto end = closed_form_passive(planar(-xm, s1 * xm), human, T);
  CHECK(end(0) == Approx(xm).epsilon(1e-12));
  CHECK(end(1) == Approx(s1 * xm).epsilon(1e-12));
}

TEST_CASE("normalized gaps") {
  CHECK(normalized_dcm_gap(0.0, human, 0.0, robot) == 0.0);
  CHECK(normalized_dcm_gap(0.05, human, 0.05 * 0.55 / 1.2, robot) == Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(normalized_dcm_gap(0.05, human, 0.0, robot) == Approx(0.041666666666666667).epsilon(1e-14));
  CHECK(normalized_dcm_rate_gap(0.0, human, 0.0, robot) == 0.0);
  const double k = 0.37;
  CHECK(normalized_dcm_rate_gap(1.2 * human.omega * k, human, 0.55 * robot.omega * k, robot) ==
        Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(normalized_dcm_rate_gap(0.2, human, 0.0, robot) == Approx(oracle::kRateGap).epsilon(1e-14));
}

TEST_CASE("templated core evaluates in long double") {
  const auto h = LipParams<long double>::make(75.0L, 1.20L, 9.81L);
  const long double s1 = orbital_slope(0.3L, h).sigma1;
  CHECK(static_cast<double>(s1) == Approx(oracle::kSigma1_03).epsilon(1e-15));
}
