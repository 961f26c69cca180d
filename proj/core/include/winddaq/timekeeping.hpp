#pragma once

#include <cstdint>
#include <optional>

#include "winddaq/config.hpp"
#include "winddaq/model.hpp"

namespace winddaq {

// Model of the logger's battery-backed RTC plus the stamping discipline
// layered on top of it. The RTC runs at (1 + drift_ppm * 1e-6) of true rate
// and is corrected by NTP when the network allows; between corrections the
// stamping layer guarantees that emitted (t, seq) pairs are strictly
// increasing even if a correction steps the clock backwards.
struct ClockState {
  double now_utc_s = 0.0;     // what the RTC currently believes
  double drift_ppm = 0.0;
  bool synced = false;        // false until the first successful sync
  double last_sync_utc_s = 0; // RTC reading at the last successful sync
  std::optional<Timestamp> last_stamp;
};

ClockState make_clock(const ClockConfig& cfg);

// Advance the RTC by `true_dt_s` of real time (the drift scales it).
void rtc_advance(ClockState& clock, double true_dt_s);

// Apply a sync against an authoritative server reading. Offsets at or above
// `step_threshold_s` are stepped (the clock jumps); smaller offsets are
// corrected in full as a slew (at our resolution the two are equivalent, but
// the threshold is kept so step events can be counted by callers).
// Returns the offset that was corrected (server - local).
double ntp_sync(ClockState& clock, double server_utc_s, double step_threshold_s);

// Produce the next record stamp: floor(now) plus an intra-second sequence
// number. Never goes backwards; if the clock stepped below the last stamp,
// the stamp holds at (last.t, last.seq + 1) until real time catches up.
Timestamp next_stamp(ClockState& clock);

// Anomaly classification for a stamp pair in stream order. Returns a mask of
// kFlagDupTimestamp / kFlagOutOfSequence (0 when prev < next).
uint32_t check_sequence(const Timestamp& prev, const Timestamp& next);

// Worst-case stamp error from drift after `unsynced_span_s` without a sync,
// plus the 1 s stamping resolution.
double stamp_error_bound_s(double drift_ppm, double unsynced_span_s);

}  // namespace winddaq
