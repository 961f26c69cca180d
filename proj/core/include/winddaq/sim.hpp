#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "winddaq/config.hpp"
#include "winddaq/model.hpp"
#include "winddaq/rng.hpp"

namespace winddaq {

// ---------------------------------------------------------------------------
// Fault schedule: `start_s end_s KIND [channel]` per line, '#' comments.
// Intervals are [start, end). Kinds:
//   POWER_OUTAGE   mains lost; battery bridges up to its capacity
//   MAINTENANCE    deliberate power-down; battery intentionally not used
//   SD_FAIL        storage medium rejects writes
//   NET_OUTAGE     network unreachable (NTP and telemetry)
//   SENSOR_STUCK   named channel repeats its last value
// ---------------------------------------------------------------------------

enum class FaultKind {
  kPowerOutage,
  kMaintenance,
  kSdFail,
  kNetOutage,
  kSensorStuck,
};

std::string_view fault_kind_name(FaultKind kind);

struct FaultEvent {
  double start_s = 0;
  double end_s = 0;
  FaultKind kind = FaultKind::kPowerOutage;
  std::optional<SensorChannel> channel;  // SENSOR_STUCK only
};

struct FaultSchedule {
  std::vector<FaultEvent> events;
  // POWER_OUTAGE/MAINTENANCE intervals merged where they touch, so battery
  // depletion is computed against the true unpowered span.
  std::vector<std::pair<double, double>> outage_spans;
  std::vector<std::pair<double, double>> maintenance_spans;
};

struct FaultParseResult {
  std::optional<FaultSchedule> schedule;
  std::vector<std::string> errors;  // one per offending line
  bool ok() const { return schedule.has_value(); }
};
FaultParseResult parse_fault_schedule(std::string_view text);
FaultSchedule empty_fault_schedule();

struct ActiveFaults {
  bool sd_fail = false;
  bool net_outage = false;
  bool maintenance = false;
  bool power_outage = false;
  double outage_elapsed_s = 0;  // time since the containing outage span began
  std::array<bool, kChannelCount> stuck{};
};

ActiveFaults faults_active(const FaultSchedule& sched, double t_s);

// ---------------------------------------------------------------------------
// Environment truth
// ---------------------------------------------------------------------------

// Mean-reverting gust model (Ornstein-Uhlenbeck), discretized exactly so the
// statistics do not depend on the tick rate:
//   v' = mean + phi (v - mean) + eps,  phi = exp(-dt/tau),
//   eps ~ N(0, sigma_st^2 (1 - phi^2)).
// volatility_mps is the stationary standard deviation. Negative excursions
// clamp to zero (an anemometer cannot report negative speed).
class WindProcess {
 public:
  explicit WindProcess(const WindModelConfig& cfg);
  double step(double dt_s, RngStream& rng);  // one draw per call
  double current() const { return v_; }

 private:
  WindModelConfig cfg_;
  double v_;
};

struct EnvState {
  double wind_mps = 0;
  double temp_c = 15;
  double pressure_pa = 101325;
  double humidity_pct = 70;
};

// Wind plus slow deterministic diurnal cycles for the thermodynamic channels.
class EnvSimulator {
 public:
  EnvSimulator(const WindModelConfig& wind, const EnvCycleConfig& cycles,
               RngStream wind_rng);
  EnvState step(double dt_s);
  const EnvState& current() const { return state_; }

 private:
  WindProcess wind_;
  EnvCycleConfig cycles_;
  RngStream rng_;
  double t_ = 0;
  EnvState state_;
};

// ---------------------------------------------------------------------------
// Turbine truth
// ---------------------------------------------------------------------------

struct TurbineTruth {
  double omega_rad_s = 0;
  double lambda = 0;
  double cp = 0;
  double power_w = 0;
};

// Commissioning-style tip-speed-ratio sweep: the load controller walks the
// target lambda along a triangle wave instead of holding the optimum, so a
// single run characterizes the whole cp(lambda) curve.
struct LambdaSweep {
  double lambda_min = 0.75;
  double lambda_max = 4.25;
  double period_s = 1800;
};

// Rotor tracks the curve's optimum tip-speed ratio through a first-order lag
// (inertia); extracted power follows the cp(lambda) truth curve at standard
// air density. Below cut-in the rotor spins down and produces nothing.
class TurbineModel {
 public:
  TurbineModel(const TurbineGeometry& geom, const CpCurve& curve,
               double tau_s, double cutin_mps);
  void set_sweep(const LambdaSweep& sweep) { sweep_ = sweep; }
  TurbineTruth step(double wind_mps, double dt_s);
  const TurbineTruth& current() const { return truth_; }

 private:
  double lambda_target(double t_s) const;

  TurbineGeometry geom_;
  CpCurve curve_;
  double tau_s_;
  double cutin_mps_;
  double lambda_opt_;
  std::optional<LambdaSweep> sweep_;
  double t_ = 0;
  TurbineTruth truth_;
};

// Hall-effect pulse source: accumulates rotor phase and emits whole pulses,
// conserving total count over any window split (no pulse is lost or double
// counted across tick boundaries).
class HallPulser {
 public:
  explicit HallPulser(int pulses_per_revolution)
      : ppr_(pulses_per_revolution) {}
  uint64_t step(double omega_rad_s, double dt_s);
  void reset() { phase_pulses_ = 0; }

 private:
  int ppr_;
  double phase_pulses_ = 0;  // fractional pulses carried across ticks
};

// ---------------------------------------------------------------------------
// Sensor measurement
// ---------------------------------------------------------------------------

// Measurement chain for one channel: truth -> bias -> gaussian noise ->
// ADC quantization over [valid_min, valid_max] -> calibration correction.
// The noise draw happens on every call (even when the output is replaced by
// a stuck value) so the stream consumption per tick is constant and fault
// scenarios stay sample-aligned with their fault-free twins.
class SensorModel {
 public:
  explicit SensorModel(const SensorSpec& spec) : spec_(spec) {}
  double read(double truth, RngStream& rng, bool stuck);
  std::optional<double> last() const { return last_; }

 private:
  SensorSpec spec_;
  std::optional<double> last_;
};

double quantize(double value, const SensorSpec& spec);

}  // namespace winddaq
