// Pilot sources. Each emits one PilotObservation per tick (observe) and then
// receives the haptic and spring forces of that tick (advance).
//
// The synthetic pilots integrate the sagittal H-LIPM plant
//   m_H xddot_H = F_xH - F_s + F_HMI
// where F_xH is the pilot's own effort: a PD hold on a target CoM plus
// compensation of the spring. Contacts and the frontal sway are scripted.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "telewalk/lip.hpp"
#include "telewalk/reference.hpp"
#include "telewalk/robot.hpp"

namespace telewalk {

struct PilotPlantState {
  double x = 0.0;
  double xdot = 0.0;
  bool contact_left = true;
  bool contact_right = true;
  double foot_left_y = 0.10;
  double foot_right_y = -0.10;
};

/// One tick of the pilot CoM under constant forces. Leaving the workspace
/// clamps the position and zeroes the velocity.
PilotPlantState pilot_plant_tick(const PilotPlantState& s, double F_xH, double F_s, double F_hmi, double mass,
                                 double workspace, double dt);

struct PilotFeedback {
  double F_s = 0.0;
  double F_hmi = 0.0;
};

class PilotSource {
 public:
  virtual ~PilotSource() = default;
  virtual PilotObservation observe(double clock) = 0;
  virtual void advance(const PilotFeedback& fb, double dt) = 0;
};

/// Latest-wins pilot intent from the cockpit.
struct PilotCommand {
  std::optional<double> lean;   // -1..1
  std::optional<double> tempo;  // steps/s
  std::optional<bool> stop;
};

/// Deterministic normal deviates (Box-Muller on mt19937_64) so traces do not
/// depend on the standard library's distribution implementation.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}
  double operator()(double sigma);

 private:
  double uniform();
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

struct SteppingConfig {
  double tempo = 10.0 / 3.0;       // steps/s
  double dsp_time = 0.06;          // pilot double support per step, s
  double start_delay = 0.0;        // standing time before the first lift-off
  double first_shift_lead = 0.15;  // weight shift ahead of the first lift-off, s
  double stance_half_width = 0.10; // lateral foot position, m
  double min_swing = 0.08;
  double jitter_sigma = 0.0;       // swing-duration jitter, s
};

/// Alternating contact schedule plus a scripted frontal sway that follows a
/// symmetric P1 orbit of the pilot's frontal LIP between weight transfers.
class ContactScheduler {
 public:
  ContactScheduler(const SteppingConfig& cfg, const LipParams<double>& human, std::uint64_t seed);

  void update(double clock);
  /// Ends the current swing now if it has lasted at least min_swing.
  bool force_touchdown(double clock);

  void set_tempo(double tempo) { cfg_.tempo = tempo; }
  void set_stop(bool stop) { stop_ = stop; }
  double tempo() const { return cfg_.tempo; }
  bool stopped() const { return stop_; }

  bool contact_left() const { return !swing_ || *swing_ != Foot::Left; }
  bool contact_right() const { return !swing_ || *swing_ != Foot::Right; }
  bool in_swing() const { return swing_.has_value(); }
  int touchdowns() const { return touchdowns_; }
  double foot_y(Foot f) const { return f == Foot::Left ? cfg_.stance_half_width : -cfg_.stance_half_width; }

  // Frontal sway at the last update.
  double com_y() const { return y_; }
  double com_ydot() const { return ydot_; }
  double cop_y() const { return cop_y_; }

 private:
  bool stepping() const { return cfg_.tempo > 0.0 && !stop_; }
  double period() const { return 1.0 / cfg_.tempo; }
  void evaluate_sway(double clock);

  SteppingConfig cfg_;
  LipParams<double> human_;
  NormalSampler noise_;
  bool stop_ = false;
  std::optional<Foot> swing_;
  Foot next_lift_ = Foot::Left;
  double phase_start_ = 0.0;
  double dsp_required_ = 0.0;
  double swing_duration_ = 0.0;
  int touchdowns_ = 0;

  bool resting_ = true;
  bool weight_shifted_ = false;
  std::optional<double> sway_start_;
  double sway_sign_ = 0.0;
  double sway_period_ = 0.0;
  double y_ = 0.0;
  double ydot_ = 0.0;
  double cop_y_ = 0.0;
};

struct PilotGains {
  double kp = 3000.0;  // N/m
  double kd = 900.0;   // N s/m
};

struct PilotPlantConfig {
  double workspace = 0.10;
  PilotGains gains;
  bool compensate_spring = true;
};

/// Common machinery of the synthetic pilots.
class SyntheticPilot : public PilotSource {
 public:
  SyntheticPilot(const LipParams<double>& human, const SteppingConfig& stepping, const PilotPlantConfig& plant,
                 std::uint64_t seed);

  PilotObservation observe(double clock) override;
  void advance(const PilotFeedback& fb, double dt) override;

  const PilotPlantState& plant() const { return plant_; }
  ContactScheduler& scheduler() { return scheduler_; }

 protected:
  virtual double target(double clock) const = 0;
  virtual void before_observe(double /*clock*/) {}

  LipParams<double> human_;
  PilotPlantConfig plant_cfg_;
  ContactScheduler scheduler_;
  PilotPlantState plant_;
  double clock_ = 0.0;
  double target_ = 0.0;
  double force_x_ = 0.0;
  double last_hmi_ = 0.0;
};

/// Steps in place at a fixed tempo while holding the CoM at the origin.
class PeriodicStepper final : public SyntheticPilot {
 public:
  using SyntheticPilot::SyntheticPilot;

 protected:
  double target(double) const override { return 0.0; }
};

struct LeanProfile {
  double amplitude = 0.05;  // m
  double start = 0.5;       // ramp-up begins, s
  double ramp = 0.4;        // ramp duration, s
  double hold = 3.0;        // time at full lean, s
};

/// Leans past the dead-band to walk, holds, then returns upright to stop.
class LeanWalkPilot final : public SyntheticPilot {
 public:
  LeanWalkPilot(const LipParams<double>& human, const SteppingConfig& stepping, const PilotPlantConfig& plant,
                const LeanProfile& lean, std::uint64_t seed);

  double lean_target(double clock) const;

 protected:
  double target(double clock) const override { return lean_target(clock); }

 private:
  LeanProfile lean_;
};

struct ReflexConfig {
  double threshold = 60.0;  // |F_HMI| that triggers a reflex step, N
};

/// Recenters against haptic pushes and takes an early step when pushed hard.
class ReactiveBalancePilot final : public SyntheticPilot {
 public:
  ReactiveBalancePilot(const LipParams<double>& human, const SteppingConfig& stepping,
                       const PilotPlantConfig& plant, const ReflexConfig& reflex, std::uint64_t seed);

  int reflex_steps() const { return reflex_steps_; }

 protected:
  double target(double) const override { return 0.0; }
  void before_observe(double clock) override;

 private:
  ReflexConfig reflex_;
  bool armed_ = true;
  bool pending_ = false;
  int reflex_steps_ = 0;
};

/// Live pilot driven by cockpit commands. Lean maps onto a target CoM in
/// [-max_lean, max_lean]; tempo onto the contact schedule; stop finishes the
/// current step and then stands.
class ExternalPilotSource final : public SyntheticPilot {
 public:
  static constexpr double kMaxTempo = 5.0;

  ExternalPilotSource(const LipParams<double>& human, const SteppingConfig& stepping,
                      const PilotPlantConfig& plant, double max_lean, std::uint64_t seed);

  /// Applies a command at the next observe(); returns true if any field had
  /// to be clamped into range.
  bool push(const PilotCommand& cmd);

  double lean() const { return lean_; }
  double commanded_tempo() const { return tempo_; }
  bool stop() const { return stop_; }

 protected:
  double target(double) const override { return lean_ * max_lean_; }

 private:
  double max_lean_;
  double lean_ = 0.0;
  double tempo_ = 0.0;
  bool stop_ = false;
};

/// Re-emits recorded observations, one per tick; forces are ignored.
class TraceReplaySource final : public PilotSource {
 public:
  explicit TraceReplaySource(std::vector<PilotObservation> rows);

  PilotObservation observe(double clock) override;
  void advance(const PilotFeedback&, double) override { ++index_; }

 private:
  std::vector<PilotObservation> rows_;
  std::size_t index_ = 0;
};

}  // namespace telewalk
