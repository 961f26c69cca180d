#include "winddaq/model.hpp"

#include <array>
#include <cstdio>
#include <stdexcept>

namespace winddaq {

namespace {

constexpr std::array<std::string_view, kFlagCount> kFlagNames = {
    "RANGE_WIND",      "RANGE_RPM",       "REVERSE_CURRENT",
    "SENSOR_FAULT",    "DUP_TIMESTAMP",   "OUT_OF_SEQUENCE",
    "BELOW_CUTIN",     "BETZ_EXCEEDED",   "CLOCK_UNSYNCED",
};

constexpr std::array<std::string_view, kChannelCount> kChannelNames = {
    "wind", "voltage", "current", "power", "temp", "pressure", "humidity",
};

}  // namespace

std::string_view flag_name(QualityFlag flag) {
  for (int i = 0; i < kFlagCount; ++i) {
    if (flag == (1u << i)) return kFlagNames[i];
  }
  throw std::invalid_argument("flag_name: not a single flag bit");
}

std::optional<uint32_t> flag_from_name(std::string_view name) {
  for (int i = 0; i < kFlagCount; ++i) {
    if (kFlagNames[i] == name) return 1u << i;
  }
  return std::nullopt;
}

FlagEncodeResult flags_encode(const std::vector<std::string>& names) {
  FlagEncodeResult out;
  for (const auto& n : names) {
    if (auto bit = flag_from_name(n)) {
      out.mask |= *bit;
    } else {
      out.unknown.push_back(n);
    }
  }
  return out;
}

std::vector<std::string> flags_decode(uint32_t mask) {
  std::vector<std::string> out;
  for (int i = 0; i < kFlagCount; ++i) {
    if (mask & (1u << i)) out.emplace_back(kFlagNames[i]);
  }
  return out;
}

// --- time ------------------------------------------------------------------

namespace {

// Days-from-civil / civil-from-days, Howard Hinnant's algorithm.
int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

}  // namespace

CivilDate civil_from_utc(int64_t t_utc_s) {
  int64_t z = t_utc_s / 86400;
  if (t_utc_s % 86400 < 0) --z;
  z += 719468;
  const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int64_t y = static_cast<int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return CivilDate{static_cast<int>(y + (m <= 2)), m, d};
}

std::string iso8601_utc(int64_t t_utc_s) {
  if (t_utc_s < 0) throw std::invalid_argument("iso8601_utc: pre-epoch time");
  const CivilDate cd = civil_from_utc(t_utc_s);
  const int64_t sod = t_utc_s % 86400;
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02lld:%02lld:%02lldZ",
                cd.year, cd.month, cd.day,
                static_cast<long long>(sod / 3600),
                static_cast<long long>(sod / 60 % 60),
                static_cast<long long>(sod % 60));
  return buf;
}

std::optional<int64_t> parse_iso8601_utc(std::string_view text) {
  int y = 0;
  unsigned mo = 0, d = 0, h = 0, mi = 0, s = 0;
  char z = 0;
  if (text.size() != 20) return std::nullopt;
  if (std::sscanf(std::string(text).c_str(), "%4d-%2u-%2uT%2u:%2u:%2u%c", &y,
                  &mo, &d, &h, &mi, &s, &z) != 7) {
    return std::nullopt;
  }
  if (z != 'Z' || mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 ||
      s > 60) {
    return std::nullopt;
  }
  return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
}

// --- turbine / sensors ------------------------------------------------------

TurbineGeometry make_geometry(double radius_m, double height_m,
                              int pulses_per_revolution) {
  if (radius_m <= 0 || height_m <= 0 || pulses_per_revolution < 1) {
    throw std::invalid_argument("make_geometry: nonpositive dimension");
  }
  TurbineGeometry g;
  g.rotor_radius_m = radius_m;
  g.rotor_height_m = height_m;
  g.swept_area_m2 = 2.0 * radius_m * height_m;
  g.pulses_per_revolution = pulses_per_revolution;
  return g;
}

std::string_view channel_name(SensorChannel ch) {
  return kChannelNames[static_cast<int>(ch)];
}

std::optional<SensorChannel> channel_from_name(std::string_view name) {
  for (int i = 0; i < kChannelCount; ++i) {
    if (kChannelNames[i] == name) return static_cast<SensorChannel>(i);
  }
  return std::nullopt;
}

// --- physics ----------------------------------------------------------------

std::optional<double> air_density(double temp_c, double pressure_pa) {
  if (temp_c < -60.0 || temp_c > 80.0) return std::nullopt;
  if (pressure_pa < 30000.0 || pressure_pa > 120000.0) return std::nullopt;
  return pressure_pa / (kGasConstantDryAir * (temp_c + 273.15));
}

double compute_cp(double power_w, double air_density_kg_m3, double area_m2,
                  double wind_mps) {
  if (air_density_kg_m3 <= 0 || area_m2 <= 0 || wind_mps <= 0) {
    throw std::invalid_argument("compute_cp: nonpositive denominator term");
  }
  return power_w /
         (0.5 * air_density_kg_m3 * area_m2 * wind_mps * wind_mps * wind_mps);
}

double compute_lambda(double omega_rad_s, double radius_m, double wind_mps) {
  if (radius_m <= 0 || wind_mps <= 0) {
    throw std::invalid_argument("compute_lambda: nonpositive denominator term");
  }
  return omega_rad_s * radius_m / wind_mps;
}

}  // namespace winddaq
