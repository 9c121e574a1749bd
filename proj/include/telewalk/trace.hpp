// Per-tick simulation record and its CSV / JSONL serializations.
//
// CSV numbers use the shortest representation that round-trips to the same
// double, so a trace read back is bit-identical to the one written.
#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace telewalk {

inline constexpr int kTraceVersion = 1;

struct TraceRow {
  long long tick = 0;
  double time = 0.0;
  // robot
  std::string phase = "DSP";
  double phase_time = 0.0;
  std::string stance = "none";
  double stance_x = 0.0;
  double x = 0.0;
  double xd = 0.0;
  double y = 0.0;
  double yd = 0.0;
  double com_x_world = 0.0;
  double xi = 0.0;
  double xi_norm = 0.0;
  // walking reference
  double ref_x = 0.0;
  double ref_xd = 0.0;
  double ref_xi = 0.0;
  double ref_xi_norm = 0.0;
  double ref_phase_time = 0.0;
  bool ref_elongated = false;
  double step_time = 0.0;
  double xi_pilot = 0.0;
  double ref_x_minus = 0.0;
  double ref_x_plus = 0.0;
  double ref_xi_plus = 0.0;
  double dcm_err = 0.0;  // ref_xi / h_H - xi / h_R
  double xi_y = 0.0;
  double ref_xi_y = 0.0;
  // pilot
  double pilot_x = 0.0;
  double pilot_xd = 0.0;
  double pilot_target_x = 0.0;
  bool pilot_contact_l = true;
  bool pilot_contact_r = true;
  double pilot_fx = 0.0;
  double pilot_y = 0.0;
  double pilot_yd = 0.0;
  double pilot_cop_y = 0.0;
  double pilot_foot_l_y = 0.0;
  double pilot_foot_r_y = 0.0;
  // forces
  double F_ref = 0.0;
  double F_ff = 0.0;
  double F_fb = 0.0;
  double F_hmi = 0.0;
  double F_s = 0.0;
  double F_ext = 0.0;
  double F_contact = 0.0;
  double F_y_fb = 0.0;
  // CoP
  double cop_cmd_x = 0.0;
  double cop_cmd_y = 0.0;
  double cop_x = 0.0;
  double cop_y = 0.0;
  bool sat_x = false;
  bool sat_y = false;
  double cop_lb_x = 0.0;
  double cop_ub_x = 0.0;
  double cop_lb_y = 0.0;
  double cop_ub_y = 0.0;
  // feet
  double swing_x = 0.0;
  double swing_y = 0.0;
  double foot_l_y = 0.0;
  double foot_r_y = 0.0;
  // events at this tick
  std::string event;  // "", "D2S", "S2D"
  double step_length = 0.0;
  double step_raw = 0.0;
  bool step_clamped = false;
  double pre_xi = 0.0;
  double pre_xd = 0.0;
  double post_xi = 0.0;
  bool fsm_diag = false;
};

using TraceField = std::variant<long long TraceRow::*, double TraceRow::*, bool TraceRow::*, std::string TraceRow::*>;

struct TraceColumn {
  std::string_view name;
  TraceField field;
  std::string_view unit;
  std::string_view doc;
};

/// Fixed column order of trace.csv.
const std::vector<TraceColumn>& trace_columns();

struct TraceEvent {
  long long tick = 0;
  double time = 0.0;
  std::string type;
  nlohmann::json data = nlohmann::json::object();
};

struct SimTrace {
  std::vector<TraceRow> rows;
  std::vector<TraceEvent> events;
};

std::string format_number(double v);

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows);
void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& rows);
std::string trace_csv_string(const std::vector<TraceRow>& rows);
std::vector<TraceRow> read_trace_csv(std::istream& in);
std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path);

void write_events_jsonl(std::ostream& out, const std::vector<TraceEvent>& events);
void write_events_jsonl(const std::filesystem::path& path, const std::vector<TraceEvent>& events);

/// FNV-1a 64 over the serialized CSV, as 16 hex digits.
std::string trace_checksum(const std::vector<TraceRow>& rows);

}  // namespace telewalk
