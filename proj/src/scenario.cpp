#include "telewalk/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace telewalk {

namespace {

using nlohmann::json;

constexpr double kClockEps = 1e-9;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

json disturbance_json(const Disturbance& d) {
  return json{{"start", d.start}, {"duration", d.duration}, {"force", d.force}, {"ramp", d.ramp}};
}

json merge_node(const json& def, const json& doc, const std::string& path) {
  if (path == "acceptance") {
    if (!doc.is_object()) throw ConfigError("'acceptance' must be an object");
    return doc;
  }
  if (def.is_object()) {
    if (!doc.is_object()) throw ConfigError("'" + path + "' must be an object");
    json out = def;
    for (const auto& [key, value] : doc.items()) {
      const std::string sub = join(path, key);
      if (!def.contains(key)) throw ConfigError("unknown config key '" + sub + "'");
      out[key] = merge_node(def[key], value, sub);
    }
    return out;
  }
  if (def.is_array()) {
    if (!doc.is_array()) throw ConfigError("'" + path + "' must be an array");
    json out = json::array();
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const std::string sub = path + "." + std::to_string(i);
      if (path == "disturbances") {
        out.push_back(merge_node(disturbance_json(Disturbance{}), doc[i], sub));
      } else if (path == "pilot.commands") {
        try {
          out.push_back(to_json(parse_logged_command(doc[i])));
        } catch (const WireError& e) {
          throw ConfigError("'" + sub + "': " + e.what());
        }
      } else {
        out.push_back(doc[i]);
      }
    }
    return out;
  }
  if (def.is_number()) {
    if (!doc.is_number()) throw ConfigError("'" + path + "' must be a number");
    if (def.is_number_integer() && !doc.is_number_integer()) throw ConfigError("'" + path + "' must be an integer");
    return doc;
  }
  if (def.is_boolean() && !doc.is_boolean()) throw ConfigError("'" + path + "' must be a boolean");
  if (def.is_string() && !doc.is_string()) throw ConfigError("'" + path + "' must be a string");
  return doc;
}

PilotKind parse_pilot_kind(const std::string& s) {
  if (s == "periodic") return PilotKind::Periodic;
  if (s == "lean_walk") return PilotKind::LeanWalk;
  if (s == "reactive") return PilotKind::Reactive;
  if (s == "external") return PilotKind::External;
  if (s == "replay") return PilotKind::Replay;
  throw ConfigError("unknown pilot.type '" + s + "'");
}

}  // namespace

std::string_view to_string(PilotKind k) {
  switch (k) {
    case PilotKind::Periodic: return "periodic";
    case PilotKind::LeanWalk: return "lean_walk";
    case PilotKind::Reactive: return "reactive";
    case PilotKind::External: return "external";
    case PilotKind::Replay: return "replay";
  }
  return "?";
}

double inject_disturbance(std::span<const Disturbance> schedule, double clock) {
  double total = 0.0;
  for (const Disturbance& d : schedule) {
    const double end = d.start + d.duration;
    if (clock <= d.start - kClockEps || clock >= end - kClockEps) continue;
    double scale = 1.0;
    if (d.ramp > 0.0) scale = std::min({1.0, (clock - d.start) / d.ramp, (end - clock) / d.ramp});
    total += d.force * std::max(0.0, scale);
  }
  return total;
}

long long ScenarioConfig::tick_count() const { return std::llround(duration / dt); }

void ScenarioConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  if (!(duration >= 0.0) || !std::isfinite(duration)) throw ConfigError("duration must be >= 0");
  try {
    (void)human_params();
    (void)robot_params();
    refgen.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (dbft.K_x < 0.0 || dbft.K_y < 0.0) throw ConfigError("dbft gains must be >= 0");
  if (gait.dsp_time < 0.0) throw ConfigError("gait.T_dsp must be >= 0");
  if (!(gait.max_step_length > 0.0)) throw ConfigError("gait.max_step_length must be positive");
  if (!(gait.frontal.min_separation >= 0.0)) throw ConfigError("gait.min_foot_separation must be >= 0");
  if (!(gait.frontal.max_adjust >= 0.0)) throw ConfigError("gait.max_lateral_adjust must be >= 0");
  if (pilot.stepping.tempo < 0.0) throw ConfigError("pilot.tempo must be >= 0");
  if (!(pilot.plant.workspace > 0.0)) throw ConfigError("pilot.workspace must be positive");
  for (const Disturbance& d : disturbances) {
    if (!(d.start >= 0.0) || !(d.duration >= 0.0) || !(d.ramp >= 0.0) || !std::isfinite(d.force)) {
      throw ConfigError("disturbance windows need start, duration, ramp >= 0 and a finite force");
    }
  }
  if (pilot.kind == PilotKind::Replay && pilot.trace_path.empty()) throw ConfigError("replay pilot needs pilot.trace");
  if (pilot.kind != PilotKind::External && !pilot.commands.empty()) {
    for (const LoggedCommand& c : pilot.commands) {
      if (std::holds_alternative<PilotCommand>(c.command)) {
        throw ConfigError("pilot commands require pilot.type = external");
      }
    }
  }
}

json scenario_to_json(const ScenarioConfig& c) {
  json j;
  j["schema_version"] = kScenarioSchemaVersion;
  j["name"] = c.name;
  j["duration"] = c.duration;
  j["dt"] = c.dt;
  j["seed"] = c.seed;
  j["gravity"] = c.gravity;
  auto body = [](const BodyConfig& b) {
    return json{{"mass", b.mass}, {"com_height", b.com_height}, {"foot_length", b.foot.length},
                {"foot_width", b.foot.width}};
  };
  j["human"] = body(c.human);
  j["robot"] = body(c.robot);
  j["initial"] = {{"x", c.initial.x}, {"xd", c.initial.xdot}, {"y", c.initial.y}, {"yd", c.initial.ydot}};
  j["refgen"] = {{"deadband", c.refgen.deadband},
                 {"Ts_default", c.refgen.step_time_default},
                 {"Ts_min", c.refgen.step_time_min},
                 {"Ts_max", c.refgen.step_time_max}};
  j["dbft"] = {{"K_x", c.dbft.K_x}, {"K_y", c.dbft.K_y}, {"reflect_disturbance", c.dbft.reflect_disturbance}};
  j["gait"] = {{"T_dsp", c.gait.dsp_time},
               {"max_step_length", c.gait.max_step_length},
               {"min_foot_separation", c.gait.frontal.min_separation},
               {"max_lateral_adjust", c.gait.frontal.max_adjust}};
  const PilotConfig& p = c.pilot;
  json commands = json::array();
  for (const LoggedCommand& lc : p.commands) commands.push_back(to_json(lc));
  j["pilot"] = {{"type", std::string(to_string(p.kind))},
                {"tempo", p.stepping.tempo},
                {"dsp_time", p.stepping.dsp_time},
                {"start_delay", p.stepping.start_delay},
                {"first_shift_lead", p.stepping.first_shift_lead},
                {"stance_half_width", p.stepping.stance_half_width},
                {"min_swing", p.stepping.min_swing},
                {"jitter_sigma", p.stepping.jitter_sigma},
                {"workspace", p.plant.workspace},
                {"kp", p.plant.gains.kp},
                {"kd", p.plant.gains.kd},
                {"compensate_spring", p.plant.compensate_spring},
                {"lean",
                 {{"amplitude", p.lean.amplitude},
                  {"start", p.lean.start},
                  {"ramp", p.lean.ramp},
                  {"hold", p.lean.hold}}},
                {"reflex_threshold", p.reflex.threshold},
                {"max_lean", p.max_lean},
                {"commands", commands},
                {"trace", p.trace_path}};
  json dist = json::array();
  for (const Disturbance& d : c.disturbances) dist.push_back(disturbance_json(d));
  j["disturbances"] = dist;
  j["metrics"] = {{"sync_threshold", c.metrics.sync_threshold},
                  {"fall_time", c.metrics.fall_time},
                  {"divergence_limit", c.metrics.divergence_limit},
                  {"stop_speed", c.metrics.stop_speed}};
  j["acceptance"] = c.acceptance;
  return j;
}

const json& default_scenario_json() {
  static const json defaults = scenario_to_json(ScenarioConfig{});
  return defaults;
}

json merge_with_defaults(const json& doc) { return merge_node(default_scenario_json(), doc, ""); }

void apply_override(json& merged, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) throw ConfigError("override must look like key.path=value");
  const std::string path(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));

  json* node = &merged;
  std::string walked;
  std::stringstream ss(path);
  std::string key;
  bool free_form = false;
  std::vector<std::string> keys;
  while (std::getline(ss, key, '.')) keys.push_back(key);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const std::string& k = keys[i];
    walked = join(walked, k);
    const bool last = i + 1 == keys.size();
    if (node->is_object()) {
      if (!node->contains(k) && !(free_form && last)) throw ConfigError("unknown config key '" + walked + "'");
      node = &(*node)[k];
      if (walked == "acceptance") free_form = true;
    } else if (node->is_array()) {
      std::size_t idx = 0;
      try {
        std::size_t used = 0;
        idx = std::stoul(k, &used);
        if (used != k.size()) throw std::invalid_argument(k);
      } catch (const std::exception&) {
        throw ConfigError("unknown config key '" + walked + "'");
      }
      if (idx >= node->size()) throw ConfigError("index out of range in '" + walked + "'");
      node = &(*node)[idx];
    } else {
      throw ConfigError("unknown config key '" + walked + "'");
    }
  }
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  *node = value;
  merged = merge_with_defaults(merged);
}

ScenarioConfig scenario_from_json(const json& m) {
  ScenarioConfig c;
  try {
    if (m.at("schema_version").get<int>() != kScenarioSchemaVersion) throw ConfigError("unsupported schema_version");
    c.name = m.at("name").get<std::string>();
    c.duration = m.at("duration").get<double>();
    c.dt = m.at("dt").get<double>();
    c.seed = m.at("seed").get<std::uint64_t>();
    c.gravity = m.at("gravity").get<double>();
    auto body = [](const json& b) {
      return BodyConfig{b.at("mass").get<double>(), b.at("com_height").get<double>(),
                        FootGeometry{b.at("foot_length").get<double>(), b.at("foot_width").get<double>()}};
    };
    c.human = body(m.at("human"));
    c.robot = body(m.at("robot"));
    const json& init = m.at("initial");
    c.initial = {init.at("x").get<double>(), init.at("xd").get<double>(), init.at("y").get<double>(),
                 init.at("yd").get<double>()};
    const json& rg = m.at("refgen");
    c.refgen.deadband = rg.at("deadband").get<double>();
    c.refgen.step_time_default = rg.at("Ts_default").get<double>();
    c.refgen.step_time_min = rg.at("Ts_min").get<double>();
    c.refgen.step_time_max = rg.at("Ts_max").get<double>();
    const json& db = m.at("dbft");
    c.dbft.K_x = db.at("K_x").get<double>();
    c.dbft.K_y = db.at("K_y").get<double>();
    c.dbft.reflect_disturbance = db.at("reflect_disturbance").get<bool>();
    c.gait.dsp_time = m.at("gait").at("T_dsp").get<double>();
    c.gait.max_step_length = m.at("gait").at("max_step_length").get<double>();
    c.gait.frontal.min_separation = m.at("gait").at("min_foot_separation").get<double>();
    c.gait.frontal.max_adjust = m.at("gait").at("max_lateral_adjust").get<double>();

    const json& p = m.at("pilot");
    c.pilot.kind = parse_pilot_kind(p.at("type").get<std::string>());
    c.pilot.stepping.tempo = p.at("tempo").get<double>();
    c.pilot.stepping.dsp_time = p.at("dsp_time").get<double>();
    c.pilot.stepping.start_delay = p.at("start_delay").get<double>();
    c.pilot.stepping.first_shift_lead = p.at("first_shift_lead").get<double>();
    c.pilot.stepping.stance_half_width = p.at("stance_half_width").get<double>();
    c.pilot.stepping.min_swing = p.at("min_swing").get<double>();
    c.pilot.stepping.jitter_sigma = p.at("jitter_sigma").get<double>();
    c.pilot.plant.workspace = p.at("workspace").get<double>();
    c.pilot.plant.gains.kp = p.at("kp").get<double>();
    c.pilot.plant.gains.kd = p.at("kd").get<double>();
    c.pilot.plant.compensate_spring = p.at("compensate_spring").get<bool>();
    const json& lean = p.at("lean");
    c.pilot.lean = {lean.at("amplitude").get<double>(), lean.at("start").get<double>(),
                    lean.at("ramp").get<double>(), lean.at("hold").get<double>()};
    c.pilot.reflex.threshold = p.at("reflex_threshold").get<double>();
    c.pilot.max_lean = p.at("max_lean").get<double>();
    for (const json& lc : p.at("commands")) c.pilot.commands.push_back(parse_logged_command(lc));
    c.pilot.trace_path = p.at("trace").get<std::string>();

    for (const json& d : m.at("disturbances")) {
      c.disturbances.push_back({d.at("start").get<double>(), d.at("duration").get<double>(),
                                d.at("force").get<double>(), d.at("ramp").get<double>()});
    }
    const json& mt = m.at("metrics");
    c.metrics = {mt.at("sync_threshold").get<double>(), mt.at("fall_time").get<double>(),
                 mt.at("divergence_limit").get<double>(), mt.at("stop_speed").get<double>()};
    c.acceptance = m.at("acceptance");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid scenario: ") + e.what());
  } catch (const WireError& e) {
    throw ConfigError(std::string("invalid command log: ") + e.what());
  }
  c.validate();
  return c;
}

json load_scenario_json(const std::filesystem::path& path, std::span<const std::string> overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("config '" + path.string() + "' is not valid JSON");
  json merged = merge_with_defaults(doc);
  for (const std::string& o : overrides) apply_override(merged, o);
  std::string& trace = merged["pilot"]["trace"].get_ref<std::string&>();
  if (!trace.empty() && std::filesystem::path(trace).is_relative()) {
    trace = (path.parent_path() / trace).lexically_normal().string();
  }
  return merged;
}

ScenarioConfig load_scenario(const std::filesystem::path& path, std::span<const std::string> overrides) {
  return scenario_from_json(load_scenario_json(path, overrides));
}

}  // namespace telewalk
