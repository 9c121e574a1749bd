// Messages exchanged with live cockpit clients, and the command log format
// shared by live sessions and batch replay.
#pragma once

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>
#include <variant>

#include "telewalk/pilot.hpp"

namespace telewalk {

inline constexpr int kWireSchemaVersion = 1;

struct DisturbCommand {
  double force = 0.0;     // N, on the robot CoM
  double duration = 0.0;  // s
};

enum class ControlAction { Start, Pause, Reset };

struct ControlCommand {
  ControlAction action = ControlAction::Start;
};

using WireCommand = std::variant<PilotCommand, DisturbCommand, ControlCommand>;

/// A command applied at the boundary before tick `tick`.
struct LoggedCommand {
  long long tick = 0;
  WireCommand command;
};

class WireError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Validates and decodes {"type": "pilot"|"disturb"|"control", ...}.
WireCommand parse_wire_command(const nlohmann::json& j);
WireCommand parse_wire_command(const std::string& text);

nlohmann::json to_json(const WireCommand& cmd);
nlohmann::json to_json(const LoggedCommand& cmd);
LoggedCommand parse_logged_command(const nlohmann::json& j);

std::string_view to_string(ControlAction a);

}  // namespace telewalk
