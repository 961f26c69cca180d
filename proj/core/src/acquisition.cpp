#include "winddaq/acquisition.hpp"

#include <cmath>
#include <stdexcept>

namespace winddaq {

RotorSpeed compute_rotor_speed(uint64_t pulses, double window_s,
                               int pulses_per_revolution) {
  if (window_s <= 0 || pulses_per_revolution < 1) {
    throw std::invalid_argument("compute_rotor_speed: bad window or ppr");
  }
  RotorSpeed out;
  const double revs = static_cast<double>(pulses) / pulses_per_revolution;
  out.rpm = revs / window_s * 60.0;
  out.omega_rad_s = revs / window_s * 2.0 * M_PI;
  return out;
}

uint32_t validate_sample(const Record& rec, const ValidationLimits& limits) {
  uint32_t flags = 0;
  if (rec.wind_speed_mps < limits.wind_min_mps ||
      rec.wind_speed_mps > limits.wind_max_mps) {
    flags |= kFlagRangeWind;
  }
  if (rec.rotor_rpm < limits.rpm_min || rec.rotor_rpm > limits.rpm_max) {
    flags |= kFlagRangeRpm;
  }
  if (rec.power_w < 0 || rec.current_a < 0) {
    flags |= kFlagReverseCurrent;
  }
  if (rec.cp && *rec.cp > kBetzLimit) {
    flags |= kFlagBetzExceeded;
  }
  return flags;
}

AcquisitionPath::AcquisitionPath(const Config& cfg)
    : cfg_(cfg), wind_ema_(cfg.ema_alpha), power_ema_(cfg.ema_alpha) {}

double AcquisitionPath::channel_or_last(const SensorFrame& frame,
                                        SensorChannel ch, uint32_t* flags) {
  const int i = static_cast<int>(ch);
  if (frame.values[i]) {
    last_good_[i] = frame.values[i];
    return *frame.values[i];
  }
  *flags |= kFlagSensorFault;
  // No good value yet (failure on the very first tick): report zero rather
  // than inventing one; the flag marks the record either way.
  return last_good_[i].value_or(0.0);
}

Record AcquisitionPath::acquire_tick(const SensorFrame& frame,
                                     ClockState& clock) {
  Record rec;
  rec.ts = next_stamp(clock);

  uint32_t flags = 0;
  rec.wind_speed_mps = channel_or_last(frame, SensorChannel::kWind, &flags);
  rec.voltage_v = channel_or_last(frame, SensorChannel::kVoltage, &flags);
  rec.current_a = channel_or_last(frame, SensorChannel::kCurrent, &flags);
  rec.power_w = channel_or_last(frame, SensorChannel::kPower, &flags);
  rec.temp_c = channel_or_last(frame, SensorChannel::kTemp, &flags);
  rec.pressure_pa = channel_or_last(frame, SensorChannel::kPressure, &flags);
  rec.humidity_pct = channel_or_last(frame, SensorChannel::kHumidity, &flags);

  const RotorSpeed rotor =
      compute_rotor_speed(pulses_.take_window(), cfg_.tick_dt_s(),
                          cfg_.geometry.pulses_per_revolution);
  rec.rotor_rpm = rotor.rpm;
  rec.rotor_omega_rad_s = rotor.omega_rad_s;

  // Derived quantities use the smoothed wind and power: cp divides by v^3,
  // so unfiltered anemometer noise would blow up its variance ninefold.
  const double wind_f = wind_ema_.step(rec.wind_speed_mps);
  const double power_f = power_ema_.step(rec.power_w);

  rec.air_density_kg_m3 = air_density(rec.temp_c, rec.pressure_pa);
  if (!rec.air_density_kg_m3) flags |= kFlagSensorFault;

  if (wind_f < cfg_.cutin_wind_mps) {
    flags |= kFlagBelowCutin;
  } else if (rec.air_density_kg_m3) {
    rec.cp = compute_cp(power_f, *rec.air_density_kg_m3,
                        cfg_.geometry.swept_area_m2, wind_f);
    rec.tsr = compute_lambda(rec.rotor_omega_rad_s,
                             cfg_.geometry.rotor_radius_m, wind_f);
  }

  if (!clock.synced) flags |= kFlagClockUnsynced;
  rec.flags = flags | validate_sample(rec, cfg_.limits);
  return rec;
}

}  // namespace winddaq
