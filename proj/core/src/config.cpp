#include "winddaq/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace winddaq {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

const std::string* KeyValueDoc::find(std::string_view key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return &v;
  }
  return nullptr;
}

KeyValueDoc parse_key_values(std::string_view text) {
  KeyValueDoc doc;
  size_t line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? std::string_view::npos
                                           : eol - pos);
    ++line_no;
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    if (const size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      doc.syntax_errors.push_back(
          {std::string(line),
           "line " + std::to_string(line_no) + ": expected `key = value`"});
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) {
      doc.syntax_errors.push_back(
          {"", "line " + std::to_string(line_no) + ": empty key"});
      continue;
    }
    doc.entries.emplace_back(key, value);
  }
  return doc;
}

// --- cp curve ----------------------------------------------------------------

double CpCurve::value(double lambda) const {
  if (points.empty()) return 0.0;
  if (lambda <= points.front().first) return points.front().second;
  if (lambda >= points.back().first) return points.back().second;
  for (size_t i = 1; i < points.size(); ++i) {
    if (lambda <= points[i].first) {
      const auto& [l0, c0] = points[i - 1];
      const auto& [l1, c1] = points[i];
      const double f = (lambda - l0) / (l1 - l0);
      return c0 + f * (c1 - c0);
    }
  }
  return points.back().second;
}

double CpCurve::peak_lambda() const {
  double best_l = 0.0, best_c = -1.0;
  for (const auto& [l, c] : points) {
    if (c > best_c) {
      best_c = c;
      best_l = l;
    }
  }
  return best_l;
}

double CpCurve::peak_cp() const {
  double best = 0.0;
  for (const auto& [l, c] : points) best = std::max(best, c);
  return best;
}

// --- defaults ----------------------------------------------------------------

Config default_config() {
  Config cfg;
  cfg.geometry = make_geometry(0.5, 2.0, 4);

  auto spec = [](double noise, int bits, double lo, double hi) {
    SensorSpec s;
    s.noise_std = noise;
    s.quantization_bits = bits;
    s.valid_min = lo;
    s.valid_max = hi;
    return s;
  };
  cfg.sensors[static_cast<int>(SensorChannel::kWind)] = spec(0.3, 12, 0, 50);
  cfg.sensors[static_cast<int>(SensorChannel::kVoltage)] =
      spec(0.02, 16, 0, 36);
  cfg.sensors[static_cast<int>(SensorChannel::kCurrent)] =
      spec(0.01, 16, -15, 15);
  cfg.sensors[static_cast<int>(SensorChannel::kPower)] =
      spec(2.0, 16, -200, 2000);
  cfg.sensors[static_cast<int>(SensorChannel::kTemp)] = spec(0.3, 12, -20, 60);
  cfg.sensors[static_cast<int>(SensorChannel::kPressure)] =
      spec(60.0, 16, 80000, 110000);
  cfg.sensors[static_cast<int>(SensorChannel::kHumidity)] =
      spec(1.5, 12, 0, 100);

  cfg.cp_curve.points = {{0.0, 0.0},  {0.5, 0.02}, {1.0, 0.08}, {1.5, 0.18},
                         {2.0, 0.32}, {2.5, 0.42}, {3.0, 0.36}, {3.5, 0.26},
                         {4.0, 0.15}, {4.5, 0.06}, {5.0, 0.0}};

  cfg.metadata["title"] = "Wind turbine acquisition campaign";
  cfg.metadata["creator"] = "winddaq";
  cfg.metadata["keywords"] = "wind energy;vertical axis;power curve;data quality";
  cfg.metadata["license"] = "CC-BY-4.0";
  return cfg;
}

// --- validation ---------------------------------------------------------------

namespace {

struct Validator {
  const KeyValueDoc& doc;
  std::vector<ConfigError> errors;
  std::set<std::string> seen;

  explicit Validator(const KeyValueDoc& d) : doc(d) {}

  void fail(const std::string& key, const std::string& msg) {
    errors.push_back({key, msg});
  }

  const std::string* take(const std::string& key) {
    seen.insert(key);
    return doc.find(key);
  }

  bool number(const std::string& key, double* out) {
    const std::string* v = take(key);
    if (!v) return false;
    char* end = nullptr;
    const double x = std::strtod(v->c_str(), &end);
    if (end == v->c_str() || *trimmed_end(v->c_str(), end) != '\0' ||
        !std::isfinite(x)) {
      fail(key, "not a number: `" + *v + "`");
      return false;
    }
    *out = x;
    return true;
  }

  static const char* trimmed_end(const char*, const char* end) {
    while (*end == ' ' || *end == '\t') ++end;
    return end;
  }

  bool integer(const std::string& key, int64_t* out) {
    double x;
    if (!number(key, &x)) return false;
    if (x != std::floor(x) || std::abs(x) > 9.0e15) {
      fail(key, "not an integer");
      return false;
    }
    *out = static_cast<int64_t>(x);
    return true;
  }

  bool boolean(const std::string& key, bool* out) {
    const std::string* v = take(key);
    if (!v) return false;
    if (*v == "true" || *v == "1") {
      *out = true;
    } else if (*v == "false" || *v == "0") {
      *out = false;
    } else {
      fail(key, "not a boolean (use true/false): `" + *v + "`");
      return false;
    }
    return true;
  }

  bool text(const std::string& key, std::string* out) {
    const std::string* v = take(key);
    if (!v) return false;
    *out = *v;
    return true;
  }

  // Range-checked setters; the check runs whether or not the key is present
  // (defaults must satisfy the same rules).
  void set_num(const std::string& key, double* slot, double lo, double hi,
               const char* why) {
    double x;
    if (number(key, &x)) *slot = x;
    if (*slot < lo || *slot > hi) {
      char buf[128];
      std::snprintf(buf, sizeof(buf), "%s (got %g, want [%g, %g])", why, *slot,
                    lo, hi);
      fail(key, buf);
    }
  }

  void set_int(const std::string& key, int64_t* slot, int64_t lo, int64_t hi,
               const char* why) {
    int64_t x;
    if (integer(key, &x)) *slot = x;
    if (*slot < lo || *slot > hi) {
      char buf[128];
      std::snprintf(buf, sizeof(buf),
                    "%s (got %lld, want [%lld, %lld])", why,
                    static_cast<long long>(*slot), static_cast<long long>(lo),
                    static_cast<long long>(hi));
      fail(key, buf);
    }
  }
};

bool parse_strict_double(const std::string& s, double* out) {
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || !std::isfinite(x)) return false;
  while (*end == ' ' || *end == '\t') ++end;
  if (*end != '\0') return false;
  *out = x;
  return true;
}

bool parse_curve(const std::string& text, CpCurve* out, std::string* err) {
  CpCurve curve;
  std::stringstream ss{text};
  std::string part;
  while (std::getline(ss, part, ',')) {
    const size_t colon = part.find(':');
    double l, c;
    if (colon == std::string::npos ||
        !parse_strict_double(part.substr(0, colon), &l) ||
        !parse_strict_double(part.substr(colon + 1), &c)) {
      *err = "expected `lambda:cp` pairs separated by commas";
      return false;
    }
    curve.points.emplace_back(l, c);
  }
  if (curve.points.size() < 2) {
    *err = "needs at least two points";
    return false;
  }
  for (size_t i = 0; i < curve.points.size(); ++i) {
    const auto& [l, c] = curve.points[i];
    if (l < 0) {
      *err = "lambda values must be nonnegative";
      return false;
    }
    if (i > 0 && l <= curve.points[i - 1].first) {
      *err = "lambda values must be strictly increasing";
      return false;
    }
    if (c < 0 || c > kBetzLimit) {
      *err = "cp values must lie in [0, 0.593]";
      return false;
    }
  }
  *out = std::move(curve);
  return true;
}

const std::array<std::string, 5> kMetadataKeys = {
    "title", "creator", "keywords", "site_coordinates", "license"};

}  // namespace

ConfigParseResult validate_config(const KeyValueDoc& doc) {
  Config cfg = default_config();
  Validator v(doc);
  v.errors = doc.syntax_errors;

  // Duplicate keys are almost always a stale-edit mistake; reject them.
  {
    std::set<std::string> keys;
    for (const auto& [k, _] : doc.entries) {
      if (!keys.insert(k).second) v.fail(k, "duplicate key");
    }
  }

  // Geometry.
  double radius = cfg.geometry.rotor_radius_m;
  double height = cfg.geometry.rotor_height_m;
  int64_t ppr = cfg.geometry.pulses_per_revolution;
  v.set_num("rotor_radius_m", &radius, 0.05, 20.0, "rotor radius out of range");
  v.set_num("rotor_height_m", &height, 0.05, 50.0, "rotor height out of range");
  v.set_int("pulses_per_revolution", &ppr, 1, 360,
            "pulses per revolution out of range");
  if (v.take("swept_area_m2")) {
    v.fail("swept_area_m2",
           "derived from rotor_radius_m and rotor_height_m; do not set");
  }

  // Acquisition.
  int64_t rate = cfg.sample_rate_hz;
  v.set_int("sample_rate_hz", &rate, 1, 2, "supported rates are 1 and 2 Hz");
  cfg.sample_rate_hz = static_cast<int>(rate);
  v.set_num("ema_alpha", &cfg.ema_alpha, 1e-6, 1.0,
            "filter coefficient must lie in (0, 1]");
  v.set_num("cutin_wind_mps", &cfg.cutin_wind_mps, 0.0, 10.0,
            "cut-in speed out of range");

  // Storage.
  v.set_int("flush_interval_s", &cfg.flush_interval_s, 1, 86400,
            "flush interval out of range");
  int64_t bufcap = static_cast<int64_t>(cfg.buffer_capacity);
  int64_t ringcap = static_cast<int64_t>(cfg.ring_capacity);
  int64_t retries = cfg.sd_retry_max;
  v.set_int("buffer_capacity", &bufcap, 2, 1 << 20, "buffer capacity out of range");
  v.set_int("ring_capacity", &ringcap, 1, 1 << 24, "ring capacity out of range");
  v.set_int("sd_retry_max", &retries, 0, 100, "retry count out of range");
  v.set_int("remount_interval_s", &cfg.remount_interval_s, 1, 86400,
            "remount interval out of range");
  cfg.buffer_capacity = static_cast<uint64_t>(bufcap);
  cfg.ring_capacity = static_cast<uint64_t>(ringcap);
  cfg.sd_retry_max = static_cast<int>(retries);

  // Telemetry.
  v.boolean("telemetry_enabled", &cfg.telemetry.enabled);
  v.set_num("telemetry_rate_limit", &cfg.telemetry.rate_limit_per_s, 0.1, 1000,
            "rate limit out of range");
  int64_t qcap = static_cast<int64_t>(cfg.telemetry.queue_capacity);
  v.set_int("telemetry_queue_capacity", &qcap, 1, 1 << 24,
            "queue capacity out of range");
  cfg.telemetry.queue_capacity = static_cast<uint64_t>(qcap);
  v.set_num("telemetry_backoff_base_s", &cfg.telemetry.backoff_base_s, 0.1,
            3600, "backoff base out of range");
  v.set_num("telemetry_backoff_cap_s", &cfg.telemetry.backoff_cap_s, 0.1,
            86400, "backoff cap out of range");
  if (cfg.telemetry.backoff_cap_s < cfg.telemetry.backoff_base_s) {
    v.fail("telemetry_backoff_cap_s", "cap must be >= base");
  }
  v.set_num("telemetry_backoff_jitter", &cfg.telemetry.backoff_jitter_frac,
            0.0, 0.5, "jitter fraction out of range");
  v.text("site_id", &cfg.telemetry.site_id);
  if (cfg.telemetry.site_id.empty() ||
      cfg.telemetry.site_id.find('/') != std::string::npos) {
    v.fail("site_id", "must be nonempty and contain no '/'");
  }

  // Clock.
  v.set_num("clock_drift_ppm", &cfg.clock.drift_ppm, -1000, 1000,
            "drift out of range");
  v.set_int("sync_interval_s", &cfg.clock.sync_interval_s, 1, 7 * 86400,
            "sync interval out of range");
  v.set_num("step_threshold_s", &cfg.clock.step_threshold_s, 0.001, 60,
            "step threshold out of range");
  if (const std::string* s = v.take("start_utc")) {
    if (auto t = parse_iso8601_utc(*s)) {
      cfg.clock.start_utc_s = *t;
    } else {
      v.fail("start_utc", "not an ISO-8601 UTC instant (YYYY-MM-DDThh:mm:ssZ)");
    }
  }

  // Wind process and environment cycles.
  v.set_num("wind_mean_mps", &cfg.wind.mean_mps, 0.0, 30.0,
            "mean wind out of range");
  v.set_num("wind_volatility_mps", &cfg.wind.volatility_mps, 0.0, 10.0,
            "volatility out of range");
  v.set_num("wind_reversion_s", &cfg.wind.reversion_time_s, 0.5, 86400,
            "reversion time out of range");
  v.set_num("temp_mean_c", &cfg.env.temp_mean_c, -40, 60, "temperature mean");
  v.set_num("temp_amplitude_c", &cfg.env.temp_amplitude_c, 0, 30,
            "temperature amplitude");
  v.set_num("pressure_mean_pa", &cfg.env.pressure_mean_pa, 30000, 120000,
            "pressure mean");
  v.set_num("pressure_amplitude_pa", &cfg.env.pressure_amplitude_pa, 0, 5000,
            "pressure amplitude");
  v.set_num("humidity_mean_pct", &cfg.env.humidity_mean_pct, 0, 100,
            "humidity mean");
  v.set_num("humidity_amplitude_pct", &cfg.env.humidity_amplitude_pct, 0, 50,
            "humidity amplitude");

  // Truth model.
  if (const std::string* s = v.take("cp_curve")) {
    std::string err;
    if (!parse_curve(*s, &cfg.cp_curve, &err)) v.fail("cp_curve", err);
  }
  v.set_num("rotor_tau_s", &cfg.rotor_tau_s, 0.1, 3600, "rotor time constant");
  v.set_num("nominal_bus_voltage_v", &cfg.nominal_bus_voltage_v, 1, 1000,
            "bus voltage");
  v.set_num("invalid_rate", &cfg.invalid_rate, 0.0, 0.5,
            "invalid-sample injection rate");
  v.set_num("battery_capacity_s", &cfg.battery_capacity_s, 0.0, 30 * 86400.0,
            "battery capacity");

  // Analysis.
  v.set_num("bin_width_lambda", &cfg.bin_width_lambda, 0.01, 2.0, "bin width");
  int64_t minbin = cfg.min_bin_count;
  v.set_int("min_bin_count", &minbin, 1, 1 << 20, "minimum bin population");
  cfg.min_bin_count = static_cast<int>(minbin);
  v.set_num("u_wind_mps", &cfg.uncertainty.u_wind_mps, 0, 5,
            "wind uncertainty");
  v.set_num("u_power_rel", &cfg.uncertainty.u_power_rel, 0, 1,
            "power uncertainty");
  v.set_num("u_density_rel", &cfg.uncertainty.u_density_rel, 0, 1,
            "density uncertainty");
  v.set_num("u_area_rel", &cfg.uncertainty.u_area_rel, 0, 1,
            "area uncertainty");
  v.set_num("u_omega_rel", &cfg.uncertainty.u_omega_rel, 0, 1,
            "rotor speed uncertainty");
  v.set_num("u_radius_rel", &cfg.uncertainty.u_radius_rel, 0, 1,
            "radius uncertainty");

  // Validation limits.
  v.set_num("wind_min_mps", &cfg.limits.wind_min_mps, -10, 100, "wind floor");
  v.set_num("wind_max_mps", &cfg.limits.wind_max_mps, -10, 100, "wind ceiling");
  v.set_num("rpm_min", &cfg.limits.rpm_min, -1000, 10000, "rpm floor");
  v.set_num("rpm_max", &cfg.limits.rpm_max, -1000, 10000, "rpm ceiling");
  if (cfg.limits.wind_max_mps <= cfg.limits.wind_min_mps) {
    v.fail("wind_max_mps", "ceiling must exceed floor");
  }
  if (cfg.limits.rpm_max <= cfg.limits.rpm_min) {
    v.fail("rpm_max", "ceiling must exceed floor");
  }

  // Per-channel sensor overrides.
  for (int i = 0; i < kChannelCount; ++i) {
    const std::string ch = std::string(channel_name(static_cast<SensorChannel>(i)));
    SensorSpec& s = cfg.sensors[i];
    v.set_num(ch + "_noise_std", &s.noise_std, 0, 1e6, "noise level");
    double bias = s.bias;
    if (v.number(ch + "_bias", &bias)) s.bias = bias;
    double gain = s.gain_correction;
    if (v.number(ch + "_gain", &gain)) s.gain_correction = gain;
    if (s.gain_correction == 0) v.fail(ch + "_gain", "must be nonzero");
    double off = s.offset_correction;
    if (v.number(ch + "_offset", &off)) s.offset_correction = off;
    int64_t bits = s.quantization_bits;
    v.set_int(ch + "_bits", &bits, 1, 24, "ADC resolution out of range");
    s.quantization_bits = static_cast<int>(bits);
    double lo = s.valid_min, hi = s.valid_max;
    if (v.number(ch + "_min", &lo)) s.valid_min = lo;
    if (v.number(ch + "_max", &hi)) s.valid_max = hi;
    if (s.valid_max <= s.valid_min) {
      v.fail(ch + "_max", "sensor span must be positive");
    }
  }

  // Dataset metadata passthrough.
  for (const auto& key : kMetadataKeys) {
    std::string val;
    if (v.text(key, &val)) cfg.metadata[key] = val;
  }

  // Anything left is a typo or an unsupported knob; say so per key.
  for (const auto& [k, _] : doc.entries) {
    if (!v.seen.count(k)) v.fail(k, "unknown key");
  }

  if (radius > 0 && height > 0 && ppr >= 1 && v.errors.empty()) {
    cfg.geometry = make_geometry(radius, height, static_cast<int>(ppr));
  }

  ConfigParseResult out;
  out.errors = std::move(v.errors);
  if (out.errors.empty()) out.config = std::move(cfg);
  return out;
}

ConfigParseResult load_config_text(std::string_view text) {
  return validate_config(parse_key_values(text));
}

// --- rendering ----------------------------------------------------------------

namespace {

void put(std::string& out, const char* key, double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  out += key;
  out += " = ";
  out += buf;
  out += '\n';
}

void put(std::string& out, const char* key, int64_t x) {
  out += key;
  out += " = ";
  out += std::to_string(x);
  out += '\n';
}

void put(std::string& out, const char* key, const std::string& x) {
  out += key;
  out += " = ";
  out += x;
  out += '\n';
}

}  // namespace

std::string render_config(const Config& cfg) {
  std::string out;
  out += "# turbine\n";
  put(out, "rotor_radius_m", cfg.geometry.rotor_radius_m);
  put(out, "rotor_height_m", cfg.geometry.rotor_height_m);
  put(out, "pulses_per_revolution",
      static_cast<int64_t>(cfg.geometry.pulses_per_revolution));

  out += "\n# acquisition\n";
  put(out, "sample_rate_hz", static_cast<int64_t>(cfg.sample_rate_hz));
  put(out, "ema_alpha", cfg.ema_alpha);
  put(out, "cutin_wind_mps", cfg.cutin_wind_mps);

  out += "\n# storage\n";
  put(out, "flush_interval_s", cfg.flush_interval_s);
  put(out, "buffer_capacity", static_cast<int64_t>(cfg.buffer_capacity));
  put(out, "ring_capacity", static_cast<int64_t>(cfg.ring_capacity));
  put(out, "sd_retry_max", static_cast<int64_t>(cfg.sd_retry_max));
  put(out, "remount_interval_s", cfg.remount_interval_s);

  out += "\n# telemetry\n";
  put(out, "telemetry_enabled", std::string(cfg.telemetry.enabled ? "true" : "false"));
  put(out, "telemetry_rate_limit", cfg.telemetry.rate_limit_per_s);
  put(out, "telemetry_queue_capacity",
      static_cast<int64_t>(cfg.telemetry.queue_capacity));
  put(out, "telemetry_backoff_base_s", cfg.telemetry.backoff_base_s);
  put(out, "telemetry_backoff_cap_s", cfg.telemetry.backoff_cap_s);
  put(out, "telemetry_backoff_jitter", cfg.telemetry.backoff_jitter_frac);
  put(out, "site_id", cfg.telemetry.site_id);

  out += "\n# clock\n";
  put(out, "clock_drift_ppm", cfg.clock.drift_ppm);
  put(out, "sync_interval_s", cfg.clock.sync_interval_s);
  put(out, "step_threshold_s", cfg.clock.step_threshold_s);
  put(out, "start_utc", iso8601_utc(cfg.clock.start_utc_s));

  out += "\n# environment\n";
  put(out, "wind_mean_mps", cfg.wind.mean_mps);
  put(out, "wind_volatility_mps", cfg.wind.volatility_mps);
  put(out, "wind_reversion_s", cfg.wind.reversion_time_s);
  put(out, "temp_mean_c", cfg.env.temp_mean_c);
  put(out, "temp_amplitude_c", cfg.env.temp_amplitude_c);
  put(out, "pressure_mean_pa", cfg.env.pressure_mean_pa);
  put(out, "pressure_amplitude_pa", cfg.env.pressure_amplitude_pa);
  put(out, "humidity_mean_pct", cfg.env.humidity_mean_pct);
  put(out, "humidity_amplitude_pct", cfg.env.humidity_amplitude_pct);

  out += "\n# truth model\n";
  {
    std::string curve;
    char buf[64];
    for (const auto& [l, c] : cfg.cp_curve.points) {
      if (!curve.empty()) curve += ',';
      std::snprintf(buf, sizeof(buf), "%.10g:%.10g", l, c);
      curve += buf;
    }
    put(out, "cp_curve", curve);
  }
  put(out, "rotor_tau_s", cfg.rotor_tau_s);
  put(out, "nominal_bus_voltage_v", cfg.nominal_bus_voltage_v);
  put(out, "invalid_rate", cfg.invalid_rate);
  put(out, "battery_capacity_s", cfg.battery_capacity_s);

  out += "\n# analysis\n";
  put(out, "bin_width_lambda", cfg.bin_width_lambda);
  put(out, "min_bin_count", static_cast<int64_t>(cfg.min_bin_count));
  put(out, "u_wind_mps", cfg.uncertainty.u_wind_mps);
  put(out, "u_power_rel", cfg.uncertainty.u_power_rel);
  put(out, "u_density_rel", cfg.uncertainty.u_density_rel);
  put(out, "u_area_rel", cfg.uncertainty.u_area_rel);
  put(out, "u_omega_rel", cfg.uncertainty.u_omega_rel);
  put(out, "u_radius_rel", cfg.uncertainty.u_radius_rel);

  out += "\n# validation limits\n";
  put(out, "wind_min_mps", cfg.limits.wind_min_mps);
  put(out, "wind_max_mps", cfg.limits.wind_max_mps);
  put(out, "rpm_min", cfg.limits.rpm_min);
  put(out, "rpm_max", cfg.limits.rpm_max);

  out += "\n# sensors\n";
  for (int i = 0; i < kChannelCount; ++i) {
    const std::string ch =
        std::string(channel_name(static_cast<SensorChannel>(i)));
    const SensorSpec& s = cfg.sensors[i];
    put(out, (ch + "_noise_std").c_str(), s.noise_std);
    put(out, (ch + "_bias").c_str(), s.bias);
    put(out, (ch + "_gain").c_str(), s.gain_correction);
    put(out, (ch + "_offset").c_str(), s.offset_correction);
    put(out, (ch + "_bits").c_str(),
        static_cast<int64_t>(s.quantization_bits));
    put(out, (ch + "_min").c_str(), s.valid_min);
    put(out, (ch + "_max").c_str(), s.valid_max);
  }

  out += "\n# dataset metadata\n";
  for (const auto& [k, val] : cfg.metadata) put(out, k.c_str(), val);
  return out;
}

}  // namespace winddaq
