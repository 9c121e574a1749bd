#include "telewalk/trace.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace telewalk {

namespace {

using R = TraceRow;

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view s) {
  double v = 0.0;
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw std::runtime_error("bad number '" + std::string(s) + "'");
  return v;
}

long long parse_int(std::string_view s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw std::runtime_error("bad integer '" + std::string(s) + "'");
  return v;
}

}  // namespace

const std::vector<TraceColumn>& trace_columns() {
  static const std::vector<TraceColumn> cols = {
      {"tick", &R::tick, "-", "tick index k"},
      {"time", &R::time, "s", "k * dt"},
      {"phase", &R::phase, "-", "robot support phase: DSP, SSP_L, SSP_R"},
      {"phase_time", &R::phase_time, "s", "time since the last robot phase change"},
      {"stance", &R::stance, "-", "robot stance foot of the current step: left, right, none"},
      {"stance_x", &R::stance_x, "m", "world x of the robot stance frame"},
      {"x", &R::x, "m", "robot sagittal CoM, stance frame"},
      {"xd", &R::xd, "m/s", "robot sagittal CoM velocity"},
      {"y", &R::y, "m", "robot frontal CoM, world frame"},
      {"yd", &R::yd, "m/s", "robot frontal CoM velocity"},
      {"com_x_world", &R::com_x_world, "m", "robot sagittal CoM, world frame"},
      {"xi", &R::xi, "m", "robot sagittal DCM, stance frame"},
      {"xi_norm", &R::xi_norm, "-", "xi / h_R"},
      {"ref_x", &R::ref_x, "m", "walking reference CoM"},
      {"ref_xd", &R::ref_xd, "m/s", "walking reference CoM velocity"},
      {"ref_xi", &R::ref_xi, "m", "walking reference DCM"},
      {"ref_xi_norm", &R::ref_xi_norm, "-", "ref_xi / h_H"},
      {"ref_phase_time", &R::ref_phase_time, "s", "time since the reference step began"},
      {"ref_elongated", &R::ref_elongated, "-", "reference running past its assumed step time"},
      {"step_time", &R::step_time, "s", "assumed step time T_s"},
      {"xi_pilot", &R::xi_pilot, "m", "dead-banded pilot DCM surrogate"},
      {"ref_x_minus", &R::ref_x_minus, "m", "reference end-of-step CoM"},
      {"ref_x_plus", &R::ref_x_plus, "m", "reference beginning-of-step CoM"},
      {"ref_xi_plus", &R::ref_xi_plus, "m", "reference beginning-of-step DCM"},
      {"dcm_err", &R::dcm_err, "-", "ref_xi_norm - xi_norm"},
      {"xi_y", &R::xi_y, "m", "robot frontal DCM"},
      {"ref_xi_y", &R::ref_xi_y, "m", "robot frontal stepping-orbit DCM reference"},
      {"pilot_x", &R::pilot_x, "m", "pilot sagittal CoM"},
      {"pilot_xd", &R::pilot_xd, "m/s", "pilot sagittal CoM velocity"},
      {"pilot_target_x", &R::pilot_target_x, "m", "pilot intended CoM"},
      {"pilot_contact_l", &R::pilot_contact_l, "-", "pilot left foot in contact"},
      {"pilot_contact_r", &R::pilot_contact_r, "-", "pilot right foot in contact"},
      {"pilot_fx", &R::pilot_fx, "N", "pilot sagittal contact force"},
      {"pilot_y", &R::pilot_y, "m", "pilot frontal CoM"},
      {"pilot_yd", &R::pilot_yd, "m/s", "pilot frontal CoM velocity"},
      {"pilot_cop_y", &R::pilot_cop_y, "m", "pilot frontal CoP"},
      {"pilot_foot_l_y", &R::pilot_foot_l_y, "m", "pilot left foot lateral position"},
      {"pilot_foot_r_y", &R::pilot_foot_r_y, "m", "pilot right foot lateral position"},
      {"F_ref", &R::F_ref, "N", "reference contact force"},
      {"F_ff", &R::F_ff, "N", "robot feedforward force"},
      {"F_fb", &R::F_fb, "N", "robot feedback force"},
      {"F_hmi", &R::F_hmi, "N", "haptic force on the pilot"},
      {"F_s", &R::F_s, "N", "virtual spring force on the pilot"},
      {"F_ext", &R::F_ext, "N", "disturbance on the robot CoM"},
      {"F_contact", &R::F_contact, "N", "achieved robot sagittal contact force"},
      {"F_y_fb", &R::F_y_fb, "N", "robot frontal synchronization force"},
      {"cop_cmd_x", &R::cop_cmd_x, "m", "commanded sagittal CoP, stance frame"},
      {"cop_cmd_y", &R::cop_cmd_y, "m", "commanded frontal CoP, world frame"},
      {"cop_x", &R::cop_x, "m", "applied sagittal CoP"},
      {"cop_y", &R::cop_y, "m", "applied frontal CoP"},
      {"sat_x", &R::sat_x, "-", "sagittal CoP saturated"},
      {"sat_y", &R::sat_y, "-", "frontal CoP saturated"},
      {"cop_lb_x", &R::cop_lb_x, "m", "admissible CoP box"},
      {"cop_ub_x", &R::cop_ub_x, "m", "admissible CoP box"},
      {"cop_lb_y", &R::cop_lb_y, "m", "admissible CoP box"},
      {"cop_ub_y", &R::cop_ub_y, "m", "admissible CoP box"},
      {"swing_x", &R::swing_x, "m", "swing (or landed) foot target, stance frame"},
      {"swing_y", &R::swing_y, "m", "swing (or landed) foot lateral target"},
      {"foot_l_y", &R::foot_l_y, "m", "robot left foot lateral position"},
      {"foot_r_y", &R::foot_r_y, "m", "robot right foot lateral position"},
      {"event", &R::event, "-", "D2S, S2D or empty"},
      {"step_length", &R::step_length, "m", "applied step length on D2S"},
      {"step_raw", &R::step_raw, "m", "step length before the kinematic clamp"},
      {"step_clamped", &R::step_clamped, "-", "step length was clamped"},
      {"pre_xi", &R::pre_xi, "m", "robot DCM just before the reset (D2S)"},
      {"pre_xd", &R::pre_xd, "m/s", "robot velocity at the reset (D2S)"},
      {"post_xi", &R::post_xi, "m", "robot DCM just after the reset (D2S)"},
      {"fsm_diag", &R::fsm_diag, "-", "contradictory pilot contacts this tick"},
  };
  return cols;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // also folds -0
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows) {
  const auto& cols = trace_columns();
  out << "#telewalk_trace_version=" << kTraceVersion << '\n';
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i].name;
  out << '\n';
  std::string line;
  for (const TraceRow& r : rows) {
    line.clear();
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) line += ',';
      std::visit(
          [&](auto member) {
            using M = std::decay_t<decltype(r.*member)>;
            if constexpr (std::is_same_v<M, double>) {
              line += format_number(r.*member);
            } else if constexpr (std::is_same_v<M, bool>) {
              line += (r.*member) ? '1' : '0';
            } else if constexpr (std::is_same_v<M, long long>) {
              line += std::to_string(r.*member);
            } else {
              line += r.*member;
            }
          },
          cols[i].field);
    }
    line += '\n';
    out << line;
  }
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  write_trace_csv(out, rows);
}

std::string trace_csv_string(const std::vector<TraceRow>& rows) {
  std::ostringstream ss;
  write_trace_csv(ss, rows);
  return ss.str();
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
  std::string line;
  std::vector<std::string_view> header;
  std::string header_line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    header_line = line;
    break;
  }
  if (header_line.empty()) throw std::runtime_error("trace has no header");
  header = split(header_line, ',');

  const auto& cols = trace_columns();
  std::unordered_map<std::string_view, const TraceColumn*> by_name;
  for (const auto& c : cols) by_name.emplace(c.name, &c);
  std::vector<const TraceColumn*> mapping;
  for (std::string_view h : header) {
    const auto it = by_name.find(h);
    mapping.push_back(it == by_name.end() ? nullptr : it->second);
  }

  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) throw std::runtime_error("trace row has wrong column count");
    TraceRow r;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (!mapping[i]) continue;
      std::visit(
          [&](auto member) {
            using M = std::decay_t<decltype(r.*member)>;
            if constexpr (std::is_same_v<M, double>) {
              r.*member = parse_double(cells[i]);
            } else if constexpr (std::is_same_v<M, bool>) {
              r.*member = cells[i] == "1";
            } else if constexpr (std::is_same_v<M, long long>) {
              r.*member = parse_int(cells[i]);
            } else {
              r.*member = std::string(cells[i]);
            }
          },
          mapping[i]->field);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read trace '" + path.string() + "'");
  return read_trace_csv(in);
}

void write_events_jsonl(std::ostream& out, const std::vector<TraceEvent>& events) {
  for (const TraceEvent& e : events) {
    nlohmann::json j{{"tick", e.tick}, {"time", e.time}, {"type", e.type}, {"data", e.data}};
    out << j.dump() << '\n';
  }
}

void write_events_jsonl(const std::filesystem::path& path, const std::vector<TraceEvent>& events) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  write_events_jsonl(out, events);
}

std::string trace_checksum(const std::vector<TraceRow>& rows) {
  const std::string csv = trace_csv_string(rows);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : csv) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace telewalk
