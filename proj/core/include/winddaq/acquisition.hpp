#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <optional>

#include "winddaq/config.hpp"
#include "winddaq/model.hpp"
#include "winddaq/timekeeping.hpp"

namespace winddaq {

// Interrupt-style pulse accumulator. isr_on_pulse() is safe to call from any
// thread concurrently with the window read; take_window() atomically drains
// the count so no pulse is lost or counted twice across window boundaries.
class PulseCounter {
 public:
  void isr_on_pulse() { count_.fetch_add(1, std::memory_order_relaxed); }
  void add(uint64_t n) { count_.fetch_add(n, std::memory_order_relaxed); }
  uint64_t take_window() { return count_.exchange(0, std::memory_order_acq_rel); }
  uint64_t pending() const { return count_.load(std::memory_order_relaxed); }

 private:
  std::atomic<uint64_t> count_{0};
};

struct RotorSpeed {
  double rpm = 0;
  double omega_rad_s = 0;
};
RotorSpeed compute_rotor_speed(uint64_t pulses, double window_s,
                               int pulses_per_revolution);

// Exponential moving average, y = alpha x + (1 - alpha) y_prev; the first
// sample initializes the state. At alpha = 0.2 the steady-state output noise
// is sqrt(alpha / (2 - alpha)) = 1/3 of the input noise and a step settles
// to 95% in 14 samples.
class EmaFilter {
 public:
  explicit EmaFilter(double alpha) : alpha_(alpha) {}
  double step(double x) {
    y_ = y_ ? alpha_ * x + (1.0 - alpha_) * *y_ : x;
    return *y_;
  }
  std::optional<double> value() const { return y_; }
  void reset() { y_.reset(); }

 private:
  double alpha_;
  std::optional<double> y_;
};

// Range/physics screening of one raw record. Returns flag bits; the record
// itself is never altered — suspect data is preserved and marked.
uint32_t validate_sample(const Record& rec, const ValidationLimits& limits);

// One tick's raw sensor values. A disengaged optional means the channel read
// failed (bus error, dropout); the path substitutes the last known good
// value and raises SENSOR_FAULT.
struct SensorFrame {
  std::array<std::optional<double>, kChannelCount> values{};
};

// Assembles the logged record for one acquisition tick: rotor speed from the
// pulse window, EMA smoothing of wind and power for the derived quantities
// (raw values are what get logged), air density, cp, tip-speed ratio, and
// the full flag screen.
class AcquisitionPath {
 public:
  explicit AcquisitionPath(const Config& cfg);

  PulseCounter& pulses() { return pulses_; }

  // `clock` provides the stamp; window length is the configured tick.
  Record acquire_tick(const SensorFrame& frame, ClockState& clock);

  // Smoothed values behind the most recent record's derived fields.
  std::optional<double> filtered_wind() const { return wind_ema_.value(); }
  std::optional<double> filtered_power() const { return power_ema_.value(); }

 private:
  double channel_or_last(const SensorFrame& frame, SensorChannel ch,
                         uint32_t* flags);

  Config cfg_;
  PulseCounter pulses_;
  EmaFilter wind_ema_;
  EmaFilter power_ema_;
  std::array<std::optional<double>, kChannelCount> last_good_{};
};

}  // namespace winddaq
