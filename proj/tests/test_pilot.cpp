#include <doctest.h>

#include "telewalk/pilot.hpp"

using namespace telewalk;
using doctest::Approx;

namespace {
const auto human = LipParams<double>::make(75.0, 1.20);
constexpr double dt = 1e-3;

int count_touchdowns(PilotSource& p, double duration, const PilotFeedback& fb = {}) {
  int n = 0;
  PilotObservation prev = p.observe(0.0);
  p.advance(fb, dt);
  const long long ticks = std::llround(duration / dt);
  for (long long k = 1; k <= ticks; ++k) {
    const PilotObservation o = p.observe(k * dt);
    n += (o.contact_left && !prev.contact_left) + (o.contact_right && !prev.contact_right);
    prev = o;
    p.advance(fb, dt);
  }
  return n;
}
}  // namespace

TEST_CASE("pilot plant") {
  PilotPlantState s;
  const auto same = pilot_plant_tick(s, 0.0, 0.0, 0.0, 75.0, 0.1, dt);
  CHECK(same.x == 0.0);
  CHECK(same.xdot == 0.0);

  PilotPlantState q;
  for (int i = 0; i < 100; ++i) q = pilot_plant_tick(q, 10.0, 0.0, 0.0, 75.0, 1.0, dt);
  CHECK(q.xdot == Approx(0.013333333333333333).epsilon(1e-12));

  PilotPlantState r;
  r.xdot = 0.01;
  for (int i = 0; i < 500; ++i) r = pilot_plant_tick(r, 4.0, -2.0, 1.5, 75.0, 1.0, dt);
  const double a = (4.0 + 2.0 + 1.5) / 75.0;
  CHECK(std::abs(r.x - (0.01 * 0.5 + 0.5 * a * 0.25)) < 1e-9);

  PilotPlantState b;
  b.xdot = 0.3;
  const auto balanced = pilot_plant_tick(b, 12.0, 12.0, 0.0, 75.0, 1.0, dt);
  CHECK(balanced.xdot == Approx(0.3).epsilon(1e-15));

  PilotPlantState w;
  w.x = 0.099;
  w.xdot = 2.0;
  const auto clamped = pilot_plant_tick(w, 0.0, 0.0, 0.0, 75.0, 0.1, dt);
  CHECK(clamped.x == 0.1);
  CHECK(clamped.xdot == 0.0);
}

TEST_CASE("normal sampler is reproducible") {
  NormalSampler a(42), b(42), c(43);
  double sum = 0.0, sq = 0.0;
  bool differs = false;
  for (int i = 0; i < 20000; ++i) {
    const double x = a(1.0);
    CHECK(x == b(1.0));
    differs |= x != c(1.0);
    sum += x;
    sq += x * x;
  }
  CHECK(differs);
  CHECK(std::abs(sum / 20000) < 0.03);
  CHECK(sq / 20000 == Approx(1.0).epsilon(0.05));
  CHECK(a(0.0) == 0.0);
}

TEST_CASE("periodic stepper: about 20 touchdowns in 6 s at 3.33 steps/s") {
  SteppingConfig st;
  PeriodicStepper p(human, st, PilotPlantConfig{}, 1);
  const int n = count_touchdowns(p, 6.0);
  CHECK(n >= 19);
  CHECK(n <= 21);
}

TEST_CASE("tempo 0 stands in double support") {
  SteppingConfig st;
  st.tempo = 0.0;
  PeriodicStepper p(human, st, PilotPlantConfig{}, 1);
  for (int k = 0; k < 2000; ++k) {
    const auto o = p.observe(k * dt);
    REQUIRE(o.contact_left);
    REQUIRE(o.contact_right);
    p.advance({}, dt);
  }
}

TEST_CASE("observations carry strictly increasing timestamps") {
  SteppingConfig st;
  PeriodicStepper p(human, st, PilotPlantConfig{}, 1);
  double last = -1.0;
  for (int k = 0; k < 1000; ++k) {
    const auto o = p.observe(k * dt);
    CHECK(o.timestamp > last);
    last = o.timestamp;
    p.advance({}, dt);
  }
}

TEST_CASE("frontal sway alternates sides") {
  SteppingConfig st;
  PeriodicStepper p(human, st, PilotPlantConfig{}, 1);
  double lo = 0.0, hi = 0.0;
  for (int k = 0; k < 3000; ++k) {
    const auto o = p.observe(k * dt);
    lo = std::min(lo, o.cop_y);
    hi = std::max(hi, o.cop_y);
    p.advance({}, dt);
  }
  CHECK(lo < -0.05);
  CHECK(hi > 0.05);
}

TEST_CASE("lean walk with zero amplitude is the periodic stepper") {
  SteppingConfig st;
  LeanProfile lean;
  lean.amplitude = 0.0;
  PeriodicStepper a(human, st, PilotPlantConfig{}, 9);
  LeanWalkPilot b(human, st, PilotPlantConfig{}, lean, 9);
  for (int k = 0; k < 3000; ++k) {
    const auto oa = a.observe(k * dt);
    const auto ob = b.observe(k * dt);
    REQUIRE(oa.com_x == ob.com_x);
    REQUIRE(oa.contact_left == ob.contact_left);
    REQUIRE(oa.cop_y == ob.cop_y);
    a.advance({1.0, -2.0}, dt);
    b.advance({1.0, -2.0}, dt);
  }
}

TEST_CASE("lean walk profile ramps up, holds and returns") {
  LeanProfile lean{0.05, 0.5, 0.4, 3.0};
  LeanWalkPilot p(human, SteppingConfig{}, PilotPlantConfig{}, lean, 1);
  CHECK(p.lean_target(0.2) == 0.0);
  CHECK(p.lean_target(0.7) > 0.0);
  CHECK(p.lean_target(0.7) < 0.05);
  CHECK(p.lean_target(2.0) == Approx(0.05));
  CHECK(p.lean_target(10.0) == Approx(0.0).scale(1.0));
}

TEST_CASE("reactive pilot: steady bias settles at F / kp") {
  ReflexConfig reflex;
  SteppingConfig st;
  st.tempo = 0.0;
  ReactiveBalancePilot p(human, st, PilotPlantConfig{}, reflex, 1);
  for (int k = 0; k < 5000; ++k) {
    p.observe(k * dt);
    p.advance({0.0, 20.0}, dt);
  }
  CHECK(p.plant().x == Approx(20.0 / 3000.0).epsilon(0.05));
}

TEST_CASE("reactive pilot: a push above the threshold takes one early step") {
  SteppingConfig st;
  ReactiveBalancePilot p(human, st, PilotPlantConfig{}, ReflexConfig{}, 1);
  ReactiveBalancePilot calm(human, st, PilotPlantConfig{}, ReflexConfig{}, 1);
  int early = 0;
  for (int k = 0; k < 4000; ++k) {
    const double t = k * dt;
    const auto o = p.observe(t);
    const auto c = calm.observe(t);
    if (o.contact_left != c.contact_left || o.contact_right != c.contact_right) ++early;
    const double push = (t >= 2.0 && t < 2.1) ? 100.0 : 0.0;
    p.advance({0.0, push}, dt);
    calm.advance({}, dt);
  }
  CHECK(p.reflex_steps() == 1);
  CHECK(calm.reflex_steps() == 0);
  CHECK(early > 0);
}

TEST_CASE("external pilot") {
  ExternalPilotSource p(human, SteppingConfig{}, PilotPlantConfig{}, 0.08, 1);
  for (int k = 0; k < 500; ++k) {
    const auto o = p.observe(k * dt);
    REQUIRE(o.contact_left);
    REQUIRE(o.contact_right);
    REQUIRE(o.com_x == 0.0);
    p.advance({}, dt);
  }
  CHECK_FALSE(p.push(PilotCommand{1.0, {}, {}}));
  CHECK(p.observe(0.5).target_com_x == Approx(0.08));
  CHECK(p.push(PilotCommand{2.0, 9.0, {}}));
  CHECK(p.lean() == 1.0);
  CHECK(p.commanded_tempo() == ExternalPilotSource::kMaxTempo);
  CHECK_FALSE(p.push(PilotCommand{{}, 3.0, {}}));
  CHECK(p.lean() == 1.0);  // untouched fields keep their value

  SUBCASE("stop finishes the current step, then stands") {
    double t = 0.501;
    bool in_swing = false;
    for (; t < 3.0 && !in_swing; t += dt) {
      const auto o = p.observe(t);
      in_swing = !(o.contact_left && o.contact_right);
      p.advance({}, dt);
    }
    REQUIRE(in_swing);
    p.push(PilotCommand{{}, {}, true});
    int lifts = 0;
    bool prev_both = false;
    for (int k = 0; k < 2000; ++k, t += dt) {
      const auto o = p.observe(t);
      const bool both = o.contact_left && o.contact_right;
      if (prev_both && !both) ++lifts;
      prev_both = both;
      p.advance({}, dt);
    }
    CHECK(prev_both);
    CHECK(lifts == 0);
  }
}

TEST_CASE("trace replay re-emits rows") {
  std::vector<PilotObservation> rows(3);
  for (int i = 0; i < 3; ++i) {
    rows[i].timestamp = i * dt;
    rows[i].com_x = 0.01 * i;
  }
  TraceReplaySource r(rows);
  for (int i = 0; i < 3; ++i) {
    CHECK(r.observe(i * dt).com_x == rows[i].com_x);
    r.advance({}, dt);
  }
}
