#include <doctest.h>

#include "telewalk/session.hpp"
#include "telewalk/trace.hpp"

using namespace telewalk;
using json = nlohmann::json;

namespace {
ScenarioConfig live(double duration = 3.0) {
  json m = merge_with_defaults(json::object());
  apply_override(m, "pilot.type=external");
  m["duration"] = duration;
  return scenario_from_json(m);
}

const WireCommand kStart = ControlCommand{ControlAction::Start};
const WireCommand kPause = ControlCommand{ControlAction::Pause};
const WireCommand kReset = ControlCommand{ControlAction::Reset};
}  // namespace

TEST_CASE("lifecycle") {
  Session s(live());
  CHECK(s.state() == SessionState::Idle);
  CHECK_FALSE(s.tick());

  const json noop = s.handle(kReset, 5);
  CHECK(noop["type"] == "ack");
  CHECK(noop["noop"] == true);
  CHECK(noop["id"] == 5);

  CHECK(s.handle(kPause)["type"] == "error");
  CHECK(s.state() == SessionState::Idle);
  CHECK(s.handle(PilotCommand{0.3, {}, {}})["type"] == "error");

  CHECK(s.handle(kStart)["type"] == "ack");
  CHECK(s.state() == SessionState::Running);
  CHECK(s.handle(kStart)["type"] == "error");
  for (int i = 0; i < 100; ++i) CHECK(s.tick());
  CHECK(s.handle(kPause)["state"] == "paused");
  const long long paused_at = s.simulation().next_tick();
  CHECK_FALSE(s.tick());
  CHECK(s.simulation().next_tick() == paused_at);
  CHECK(s.handle(kStart)["tick"] == paused_at);
  CHECK(s.tick());
  CHECK(s.simulation().next_tick() == paused_at + 1);
}

TEST_CASE("commands while paused are applied at the resume tick") {
  Session s(live());
  s.handle(kStart);
  for (int i = 0; i < 10; ++i) s.tick();
  s.handle(kPause);
  const json a = s.handle(PilotCommand{0.5, {}, {}}, "x");
  CHECK(a["type"] == "ack");
  CHECK(a["tick"] == 10);
  CHECK(a["id"] == "x");
  s.handle(kStart);
  s.tick();
  CHECK(s.snapshot().row->pilot_target_x == doctest::Approx(0.5 * s.config().pilot.max_lean));
}

TEST_CASE("session ends and is recorded, reset starts fresh") {
  std::vector<SessionRecord> records;
  Session s(live(0.05));
  s.on_record = [&](SessionRecord r) { records.push_back(std::move(r)); };
  s.handle(kStart);
  while (s.tick()) {
  }
  CHECK(s.state() == SessionState::Ended);
  REQUIRE(records.size() == 1);
  CHECK(records[0].index == 1);
  CHECK(records[0].trace.rows.size() == 51);
  CHECK(s.handle(PilotCommand{0.1, {}, {}})["type"] == "error");
  CHECK(s.handle(kReset)["state"] == "idle");
  CHECK(records.size() == 1);  // an ended session is recorded once
  CHECK(s.simulation().next_tick() == 0);
}

TEST_CASE("replay of a recorded session is byte-identical") {
  std::vector<SessionRecord> records;
  Session s(live(3.0));
  s.on_record = [&](SessionRecord r) { records.push_back(std::move(r)); };
  s.handle(kStart);
  for (int i = 0; i < 300; ++i) s.tick();
  s.handle(PilotCommand{{}, 3.0, {}});
  for (int i = 0; i < 400; ++i) s.tick();
  s.handle(PilotCommand{0.6, {}, {}});
  s.handle(kPause);
  s.handle(DisturbCommand{30.0, 0.3});
  s.handle(kStart);
  for (int i = 0; i < 900; ++i) s.tick();
  s.handle(PilotCommand{{}, {}, true});
  for (int i = 0; i < 200; ++i) s.tick();
  s.handle(kReset);  // reset before the end records a truncated session
  REQUIRE(records.size() == 1);
  const SessionRecord& rec = records[0];
  CHECK(rec.commands.size() == 4);
  CHECK(rec.trace.rows.size() == 1800);

  const auto replay = run_scenario(replay_config(rec));
  CHECK(trace_csv_string(replay.trace.rows) == trace_csv_string(rec.trace.rows));
}

TEST_CASE("shutdown records an unfinished session once") {
  std::vector<SessionRecord> records;
  Session s(live(3.0));
  s.on_record = [&](SessionRecord r) { records.push_back(std::move(r)); };
  s.shutdown();
  CHECK(records.empty());  // nothing started, nothing to keep
  s.handle(kStart);
  for (int i = 0; i < 250; ++i) s.tick();
  s.handle(PilotCommand{0.4, {}, {}});
  for (int i = 0; i < 250; ++i) s.tick();
  s.handle(kPause);
  s.shutdown();
  CHECK(s.state() == SessionState::Ended);
  s.shutdown();
  REQUIRE(records.size() == 1);
  CHECK(records[0].trace.rows.size() == 500);
  const auto replay = run_scenario(replay_config(records[0]));
  CHECK(trace_csv_string(replay.trace.rows) == trace_csv_string(records[0].trace.rows));
}

TEST_CASE("snapshot json") {
  Session s(live());
  const json idle = snapshot_json(s.snapshot(), 1);
  CHECK(idle["type"] == "snapshot");
  CHECK(idle["state"] == "idle");
  CHECK(idle["time"].is_null());
  CHECK(idle["last_step"].is_null());

  s.handle(kStart);
  s.handle(PilotCommand{0.5, 2.0, {}});
  s.handle(DisturbCommand{30.0, 0.3});
  s.tick();
  const json j = snapshot_json(s.snapshot(), 2);
  CHECK(j["seq"] == 2);
  CHECK(j["tick"] == 1);
  CHECK(j["forces"]["F_ext"] == 30.0);
  CHECK(j["pilot_command"]["lean"] == 0.5);
  CHECK(j["pilot_command"]["tempo"] == 2.0);
  CHECK(j["pilot"]["target_x"] == doctest::Approx(0.5 * s.config().pilot.max_lean));
  CHECK(j["fall"] == false);
  for (const char* key : {"robot", "dcm", "forces", "pilot", "saturated"}) CHECK(j.contains(key));
  CHECK(j.dump().size() < 4096);
}
