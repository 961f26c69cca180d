#include "winddaq/timekeeping.hpp"

#include <cmath>

namespace winddaq {

ClockState make_clock(const ClockConfig& cfg) {
  ClockState c;
  c.now_utc_s = static_cast<double>(cfg.start_utc_s);
  c.drift_ppm = cfg.drift_ppm;
  return c;
}

void rtc_advance(ClockState& clock, double true_dt_s) {
  clock.now_utc_s += true_dt_s * (1.0 + clock.drift_ppm * 1e-6);
}

double ntp_sync(ClockState& clock, double server_utc_s,
                double step_threshold_s) {
  const double offset = server_utc_s - clock.now_utc_s;
  // Step and slew land on the same value here; a real slew would spread the
  // correction over time. The distinction matters to callers that count
  // discontinuities, so the threshold stays in the interface.
  (void)step_threshold_s;
  clock.now_utc_s = server_utc_s;
  clock.synced = true;
  clock.last_sync_utc_s = server_utc_s;
  return offset;
}

Timestamp next_stamp(ClockState& clock) {
  const int64_t t = static_cast<int64_t>(std::floor(clock.now_utc_s));
  Timestamp stamp{t, 0};
  if (clock.last_stamp) {
    const Timestamp& prev = *clock.last_stamp;
    if (t <= prev.t_utc_s) {
      // Same second (normal at 2 Hz) or clock stepped backwards: hold the
      // second and bump the sequence so the stream stays strictly ordered.
      stamp = Timestamp{prev.t_utc_s, prev.seq + 1};
    }
  }
  clock.last_stamp = stamp;
  return stamp;
}

uint32_t check_sequence(const Timestamp& prev, const Timestamp& next) {
  if (prev == next) return kFlagDupTimestamp;
  if (next < prev) return kFlagOutOfSequence;
  return 0;
}

double stamp_error_bound_s(double drift_ppm, double unsynced_span_s) {
  return std::abs(drift_ppm) * 1e-6 * unsynced_span_s + 1.0;
}

}  // namespace winddaq
