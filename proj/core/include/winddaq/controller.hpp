#pragma once

#include <cstdint>
#include <ostream>

#include "winddaq/acquisition.hpp"
#include "winddaq/config.hpp"
#include "winddaq/sim.hpp"
#include "winddaq/statemachine.hpp"
#include "winddaq/storage.hpp"
#include "winddaq/telemetry.hpp"
#include "winddaq/timekeeping.hpp"

namespace winddaq {

struct ControllerStats {
  uint64_t ticks = 0;
  uint64_t records_acquired = 0;
  uint64_t sensor_fault_records = 0;
  uint64_t flush_attempts = 0;
  uint64_t flush_failures = 0;
  uint64_t write_retry_events = 0;
  uint64_t buffer_only_entries = 0;
  uint64_t remount_successes = 0;
  uint64_t ring_dropped = 0;
  uint64_t records_lost_power = 0;   // RAM contents wiped by power loss
  uint64_t records_lost_shutdown = 0;  // could not be flushed at shutdown
  uint64_t telemetry_enqueued = 0;
  uint64_t telemetry_sent = 0;
  uint64_t telemetry_dropped = 0;
  uint64_t telemetry_lost_power = 0;
  uint64_t sync_attempts = 0;
  uint64_t sync_successes = 0;
  uint64_t clock_steps = 0;
  uint64_t transitions = 0;
};

// One boot's worth of firmware. RAM state (buffers, filters, queue, stamp
// guard) lives and dies with this object; the RTC (ClockState) and the
// storage medium persist across boots and are owned by the caller.
class FirmwareController {
 public:
  FirmwareController(const Config& cfg, Medium& medium, Broker& broker,
                     ClockState& clock, uint64_t campaign_seed,
                     std::ostream* transitions_log = nullptr,
                     std::ostream* events_log = nullptr);

  // INIT sequence: storage recovery (tail repair, stamp-guard reseed),
  // BOOT_OK, then the boot-time sync attempt.
  void boot(double t, double true_utc_s, bool net_up);

  // One acquisition tick. `t` is campaign time (true seconds since start),
  // `true_utc_s` the authoritative time an NTP exchange would return.
  void tick(double t, double true_utc_s, const SensorFrame& frame,
            const ActiveFaults& faults);

  // Mains gone with no battery margin: RAM is wiped, medium may hold a torn
  // write. Safe to destroy the controller afterwards.
  void power_loss(double t);

  // Graceful end of campaign: drain the ring and buffers to the medium.
  void shutdown(double t);

  PulseCounter& pulses() { return acq_.pulses(); }
  Mode mode() const { return sm_.state().mode; }
  bool buffer_only() const { return sm_.state().buffer_only; }
  uint64_t committed_records() const { return writer_.committed_records(); }
  const RecoverReport& mount_report() const { return mount_report_; }
  const ControllerStats& stats() const { return stats_; }
  TelemetryQueue& telemetry() { return tq_; }
  SegmentWriter& writer() { return writer_; }

 private:
  void log_event(double t, const std::string& line);
  // Runs the flush/retry/degrade protocol, delivering WRITE_OK/WRITE_ERR to
  // the state machine. Returns once the machine settled (success, or
  // buffer-only entered).
  void flush_cycle(double t);
  void maybe_periodic_sync(double t, double true_utc_s, bool net_up);
  void attempt_remount(double t);
  void finalize_stats();

  Config cfg_;
  Medium& medium_;
  Broker& broker_;
  ClockState& clock_;
  StateMachine sm_;
  AcquisitionPath acq_;
  LogBufferPair buffers_;
  RamRing ring_;
  SegmentWriter writer_;
  TelemetryQueue tq_;
  RecoverReport mount_report_;
  ControllerStats stats_;
  std::ostream* transitions_log_;
  std::ostream* events_log_;
  double next_sync_clock_s_ = 0;
  double last_flush_clock_s_ = 0;
  double last_remount_t_ = -1e18;
  bool halted_ = false;
};

}  // namespace winddaq
