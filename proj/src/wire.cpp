#include "telewalk/wire.hpp"

#include <cmath>
#include <set>

namespace telewalk {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed) {
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) throw WireError("unknown field '" + key + "'");
  }
}

double finite_number(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw WireError(std::string("missing field '") + key + "'");
  if (!it->is_number()) throw WireError(std::string("field '") + key + "' must be a number");
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw WireError(std::string("field '") + key + "' must be finite");
  return v;
}

}  // namespace

std::string_view to_string(ControlAction a) {
  switch (a) {
    case ControlAction::Start: return "start";
    case ControlAction::Pause: return "pause";
    case ControlAction::Reset: return "reset";
  }
  return "?";
}

WireCommand parse_wire_command(const json& j) {
  if (!j.is_object()) throw WireError("command must be a JSON object");
  const auto type_it = j.find("type");
  if (type_it == j.end() || !type_it->is_string()) throw WireError("missing string field 'type'");
  const std::string type = type_it->get<std::string>();

  if (type == "pilot") {
    reject_unknown(j, {"type", "id", "lean", "tempo", "stop"});
    PilotCommand cmd;
    if (j.contains("lean")) cmd.lean = finite_number(j, "lean");
    if (j.contains("tempo")) cmd.tempo = finite_number(j, "tempo");
    if (j.contains("stop")) {
      if (!j["stop"].is_boolean()) throw WireError("field 'stop' must be a boolean");
      cmd.stop = j["stop"].get<bool>();
    }
    if (!cmd.lean && !cmd.tempo && !cmd.stop) throw WireError("pilot command needs lean, tempo or stop");
    return cmd;
  }
  if (type == "disturb") {
    reject_unknown(j, {"type", "id", "force", "duration"});
    DisturbCommand cmd{finite_number(j, "force"), finite_number(j, "duration")};
    if (cmd.duration <= 0.0) throw WireError("disturb duration must be positive");
    return cmd;
  }
  if (type == "control") {
    reject_unknown(j, {"type", "id", "action"});
    const auto it = j.find("action");
    if (it == j.end() || !it->is_string()) throw WireError("missing string field 'action'");
    const std::string action = it->get<std::string>();
    if (action == "start") return ControlCommand{ControlAction::Start};
    if (action == "pause") return ControlCommand{ControlAction::Pause};
    if (action == "reset") return ControlCommand{ControlAction::Reset};
    throw WireError("unknown control action '" + action + "'");
  }
  throw WireError("unknown command type '" + type + "'");
}

WireCommand parse_wire_command(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw WireError("malformed JSON");
  return parse_wire_command(j);
}

json to_json(const WireCommand& cmd) {
  return std::visit(
      [](const auto& c) -> json {
        using T = std::decay_t<decltype(c)>;
        json j;
        if constexpr (std::is_same_v<T, PilotCommand>) {
          j["type"] = "pilot";
          if (c.lean) j["lean"] = *c.lean;
          if (c.tempo) j["tempo"] = *c.tempo;
          if (c.stop) j["stop"] = *c.stop;
        } else if constexpr (std::is_same_v<T, DisturbCommand>) {
          j["type"] = "disturb";
          j["force"] = c.force;
          j["duration"] = c.duration;
        } else {
          j["type"] = "control";
          j["action"] = std::string(to_string(c.action));
        }
        return j;
      },
      cmd);
}

json to_json(const LoggedCommand& cmd) {
  return json{{"tick", cmd.tick}, {"command", to_json(cmd.command)}};
}

LoggedCommand parse_logged_command(const json& j) {
  if (!j.is_object() || !j.contains("tick") || !j.contains("command") || !j["tick"].is_number_integer()) {
    throw WireError("logged command needs integer 'tick' and object 'command'");
  }
  return LoggedCommand{j["tick"].get<long long>(), parse_wire_command(j["command"])};
}

}  // namespace telewalk
