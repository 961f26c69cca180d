#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace winddaq {

// ---------------------------------------------------------------------------
// Quality flags
//
// A record is never silently dropped at acquisition time: anything suspect is
// flagged and logged, and downstream analysis decides what to keep. Bit
// positions are part of the on-disk format; do not renumber.
// ---------------------------------------------------------------------------

enum QualityFlag : uint32_t {
  kFlagRangeWind = 1u << 0,      // wind speed outside physical range
  kFlagRangeRpm = 1u << 1,       // rotor speed outside physical range
  kFlagReverseCurrent = 1u << 2, // negative power / current backfeed
  kFlagSensorFault = 1u << 3,    // a channel read failed; stale value used
  kFlagDupTimestamp = 1u << 4,   // (t, seq) collides with predecessor
  kFlagOutOfSequence = 1u << 5,  // (t, seq) went backwards
  kFlagBelowCutin = 1u << 6,     // wind below cut-in; cp/tsr not meaningful
  kFlagBetzExceeded = 1u << 7,   // cp above the Betz limit; physically suspect
  kFlagClockUnsynced = 1u << 8,  // stamped before any successful time sync
};

inline constexpr uint32_t kAllFlagsMask = 0x1ffu;
inline constexpr int kFlagCount = 9;

// Canonical names, in bit order.
std::string_view flag_name(QualityFlag flag);
std::optional<uint32_t> flag_from_name(std::string_view name);

// Encode a list of names into a mask. Unknown names are reported back by
// value; the returned mask covers the recognized subset.
struct FlagEncodeResult {
  uint32_t mask = 0;
  std::vector<std::string> unknown;
  bool ok() const { return unknown.empty(); }
};
FlagEncodeResult flags_encode(const std::vector<std::string>& names);
std::vector<std::string> flags_decode(uint32_t mask);

// ---------------------------------------------------------------------------
// Time
// ---------------------------------------------------------------------------

// Logger stamps have 1 s resolution; seq disambiguates samples inside one
// second (2 Hz operation) and makes the pair strictly ordered.
struct Timestamp {
  int64_t t_utc_s = 0;
  uint32_t seq = 0;
  auto operator<=>(const Timestamp&) const = default;
};

std::string iso8601_utc(int64_t t_utc_s);
std::optional<int64_t> parse_iso8601_utc(std::string_view text);

// Civil date of a UTC instant, for day-keyed log segment names.
struct CivilDate {
  int year = 1970;
  unsigned month = 1;
  unsigned day = 1;
};
CivilDate civil_from_utc(int64_t t_utc_s);

// ---------------------------------------------------------------------------
// Turbine and sensors
// ---------------------------------------------------------------------------

// Helical vertical-axis rotor: the swept area is the rectangle the blades
// trace, A = 2 * R * H.
struct TurbineGeometry {
  double rotor_radius_m = 0.5;
  double rotor_height_m = 2.0;
  double swept_area_m2 = 2.0;
  int pulses_per_revolution = 4;
};
TurbineGeometry make_geometry(double radius_m, double height_m,
                              int pulses_per_revolution);

struct SensorSpec {
  double noise_std = 0.0;          // additive gaussian, in channel units
  double bias = 0.0;               // constant offset before correction
  double gain_correction = 1.0;    // applied as gain * x + offset
  double offset_correction = 0.0;
  int quantization_bits = 12;      // ADC resolution over [valid_min, valid_max]
  double valid_min = 0.0;
  double valid_max = 1.0;
};

enum class SensorChannel : int {
  kWind = 0,
  kVoltage = 1,
  kCurrent = 2,
  kPower = 3,
  kTemp = 4,
  kPressure = 5,
  kHumidity = 6,
};
inline constexpr int kChannelCount = 7;
std::string_view channel_name(SensorChannel ch);
std::optional<SensorChannel> channel_from_name(std::string_view name);

// ---------------------------------------------------------------------------
// The record: one acquisition tick, as logged
// ---------------------------------------------------------------------------

struct Record {
  Timestamp ts;
  double wind_speed_mps = 0.0;   // raw measured (pre-filter)
  double rotor_rpm = 0.0;
  double rotor_omega_rad_s = 0.0;
  double voltage_v = 0.0;
  double current_a = 0.0;
  double power_w = 0.0;          // raw measured (pre-filter)
  double temp_c = 0.0;
  double pressure_pa = 0.0;
  double humidity_pct = 0.0;
  // Derived quantities are absent when they cannot be computed (below
  // cut-in, density unavailable); absent serializes as an empty CSV field.
  std::optional<double> air_density_kg_m3;
  std::optional<double> cp;
  std::optional<double> tsr;
  uint32_t flags = 0;

  bool operator==(const Record&) const = default;
};

// ---------------------------------------------------------------------------
// Physics
// ---------------------------------------------------------------------------

inline constexpr double kBetzLimit = 0.593;
inline constexpr double kGasConstantDryAir = 287.05;  // J/(kg*K)
inline constexpr double kStandardAirDensity = 1.225;  // kg/m^3 at 15 C, 1 atm

// Dry-air ideal gas law, rho = p / (R_d * T). Humidity is measured and
// logged but deliberately excluded from the density estimate; the moist-air
// correction is below the pressure sensor's own error at site conditions.
// Returns nullopt outside plausible ambient conditions (T in [-60, 80] C,
// p in [30, 120] kPa) so callers can flag the sample instead of dividing
// by garbage.
std::optional<double> air_density(double temp_c, double pressure_pa);

// cp = P / (0.5 * rho * A * v^3). Requires rho, A, v > 0.
double compute_cp(double power_w, double air_density_kg_m3, double area_m2,
                  double wind_mps);

// Tip-speed ratio lambda = omega * R / v. Requires v > 0.
double compute_lambda(double omega_rad_s, double radius_m, double wind_mps);

inline double rpm_to_omega(double rpm) { return rpm * 2.0 * M_PI / 60.0; }
inline double omega_to_rpm(double omega) { return omega * 60.0 / (2.0 * M_PI); }

}  // namespace winddaq
