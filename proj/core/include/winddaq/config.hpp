#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "winddaq/model.hpp"

namespace winddaq {

// ---------------------------------------------------------------------------
// Flat `key = value` config text. '#' starts a comment anywhere on a line.
// Validation never stops at the first problem: a bad file is reported with
// every violation at once so a field deployment fails exactly one round trip.
// ---------------------------------------------------------------------------

struct ConfigError {
  std::string key;      // offending key, or "" for file-level problems
  std::string message;
};

struct KeyValueDoc {
  // Insertion-ordered so snapshots echo the author's layout.
  std::vector<std::pair<std::string, std::string>> entries;
  std::vector<ConfigError> syntax_errors;

  const std::string* find(std::string_view key) const;
};

KeyValueDoc parse_key_values(std::string_view text);

// Piecewise-linear cp(lambda) curve used as simulation ground truth.
// Points must be strictly increasing in lambda; evaluation clamps outside
// the covered span.
struct CpCurve {
  std::vector<std::pair<double, double>> points;  // (lambda, cp)
  double value(double lambda) const;
  double peak_lambda() const;
  double peak_cp() const;
};

struct WindModelConfig {
  double mean_mps = 6.0;
  double volatility_mps = 0.8;     // stationary standard deviation
  double reversion_time_s = 60.0;  // mean-reversion time constant
};

struct EnvCycleConfig {
  double temp_mean_c = 15.0;
  double temp_amplitude_c = 1.5;
  double pressure_mean_pa = 101325.0;
  double pressure_amplitude_pa = 150.0;
  double humidity_mean_pct = 70.0;
  double humidity_amplitude_pct = 8.0;
};

struct TelemetryConfig {
  bool enabled = false;
  double rate_limit_per_s = 2.0;
  uint64_t queue_capacity = 7200;
  double backoff_base_s = 5.0;
  double backoff_cap_s = 300.0;
  double backoff_jitter_frac = 0.1;
  std::string site_id = "site0";
};

struct ClockConfig {
  double drift_ppm = 2.0;          // RTC rate error; positive runs fast
  int64_t sync_interval_s = 3600;  // periodic NTP cadence
  double step_threshold_s = 1.0;   // offsets above this step, below slew
  int64_t start_utc_s = 1767225600;  // 2026-01-01T00:00:00Z
};

struct UncertaintyInputs {
  double u_wind_mps = 0.3;       // anemometer, absolute, at reference speed
  double u_power_rel = 0.02;     // power channel, relative
  double u_density_rel = 0.005;  // from temp/pressure sensor budget
  double u_area_rel = 0.0;       // geometry taken as exact unless stated
  double u_omega_rel = 0.005;    // pulse-count quantization at 1 s windows
  double u_radius_rel = 0.0;
};

struct ValidationLimits {
  double wind_min_mps = 0.0;
  double wind_max_mps = 25.0;
  double rpm_min = 0.0;
  double rpm_max = 500.0;
};

struct Config {
  TurbineGeometry geometry;
  std::array<SensorSpec, kChannelCount> sensors;

  int sample_rate_hz = 1;          // 1 or 2
  double ema_alpha = 0.2;
  double cutin_wind_mps = 1.0;

  int64_t flush_interval_s = 60;
  uint64_t buffer_capacity = 240;  // per RAM buffer, records
  uint64_t ring_capacity = 3600;   // buffer-only fallback ring, records
  int sd_retry_max = 3;
  int64_t remount_interval_s = 60;

  TelemetryConfig telemetry;
  ClockConfig clock;
  WindModelConfig wind;
  EnvCycleConfig env;
  CpCurve cp_curve;
  double rotor_tau_s = 8.0;        // rotor speed first-order lag
  double nominal_bus_voltage_v = 24.0;

  double invalid_rate = 0.0;       // injected invalid-sample fraction
  double battery_capacity_s = 4.0 * 3600.0;

  double bin_width_lambda = 0.25;
  int min_bin_count = 30;
  UncertaintyInputs uncertainty;
  ValidationLimits limits;

  // Free-form dataset metadata (title, creator, keywords, coordinates, ...).
  std::map<std::string, std::string> metadata;

  double tick_dt_s() const { return 1.0 / sample_rate_hz; }
};

// Defaults model the reference deployment: 0.5 m x 2.0 m helical rotor,
// 4 pulses/rev hall sensor, 12/16-bit sensor budget.
Config default_config();

struct ConfigParseResult {
  std::optional<Config> config;
  std::vector<ConfigError> errors;
  bool ok() const { return config.has_value(); }
};

// Validates a parsed doc against the full rule set (types, ranges,
// cross-field constraints, unknown keys) and returns either a complete
// Config or the list of everything wrong with it.
ConfigParseResult validate_config(const KeyValueDoc& doc);
ConfigParseResult load_config_text(std::string_view text);

// Canonical snapshot of an in-memory config, parseable by load_config_text.
std::string render_config(const Config& cfg);

}  // namespace winddaq
