#include "winddaq/controller.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace winddaq {

FirmwareController::FirmwareController(const Config& cfg, Medium& medium,
                                       Broker& broker, ClockState& clock,
                                       uint64_t campaign_seed,
                                       std::ostream* transitions_log,
                                       std::ostream* events_log)
    : cfg_(cfg),
      medium_(medium),
      broker_(broker),
      clock_(clock),
      sm_(StateMachineConfig{cfg.telemetry.enabled, cfg.sd_retry_max}),
      acq_(cfg),
      buffers_(cfg.buffer_capacity),
      ring_(cfg.ring_capacity),
      writer_(medium),
      tq_(cfg.telemetry, campaign_seed),
      transitions_log_(transitions_log),
      events_log_(events_log) {
  if (transitions_log_) {
    sm_.set_observer([this](double t, Mode from, Event ev, Mode to,
                            const std::vector<Action>& actions) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "t=%.1f %s --%s--> %s", t,
                    std::string(mode_name(from)).c_str(),
                    std::string(event_name(ev)).c_str(),
                    std::string(mode_name(to)).c_str());
      *transitions_log_ << buf;
      for (const Action a : actions) *transitions_log_ << ' ' << action_name(a);
      *transitions_log_ << '\n';
    });
  }
}

void FirmwareController::log_event(double t, const std::string& line) {
  if (events_log_) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "t=%.1f ", t);
    *events_log_ << buf << line << '\n';
  }
}

void FirmwareController::boot(double t, double true_utc_s, bool net_up) {
  // The RTC kept counting through the outage, but RAM state did not: the
  // stamp monotonic guard restarts from what the medium can prove.
  clock_.synced = false;
  clock_.last_stamp.reset();

  mount_report_ = recover_mount(medium_);
  if (mount_report_.last_stamp) clock_.last_stamp = mount_report_.last_stamp;
  {
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "boot: segments=%llu records=%llu tails_truncated=%llu "
                  "discarded_bytes=%llu quarantined=%llu",
                  static_cast<unsigned long long>(mount_report_.segments),
                  static_cast<unsigned long long>(
                      mount_report_.committed_records),
                  static_cast<unsigned long long>(
                      mount_report_.truncation_events),
                  static_cast<unsigned long long>(mount_report_.discarded_bytes),
                  static_cast<unsigned long long>(
                      mount_report_.quarantined_segments));
    log_event(t, buf);
  }

  sm_.deliver(Event::kBootOk, t);

  ++stats_.sync_attempts;
  if (net_up) {
    const double offset =
        ntp_sync(clock_, true_utc_s, cfg_.clock.step_threshold_s);
    ++stats_.sync_successes;
    if (std::abs(offset) >= cfg_.clock.step_threshold_s) ++stats_.clock_steps;
    char buf[80];
    std::snprintf(buf, sizeof(buf), "time sync ok, offset=%+.6fs", offset);
    log_event(t, buf);
    sm_.deliver(Event::kSyncOk, t);
  } else {
    log_event(t, "time sync failed (network down); continuing unsynced");
    sm_.deliver(Event::kSyncFail, t);
  }

  next_sync_clock_s_ =
      clock_.now_utc_s + static_cast<double>(cfg_.clock.sync_interval_s);
  last_flush_clock_s_ = clock_.now_utc_s;
}

void FirmwareController::maybe_periodic_sync(double t, double true_utc_s,
                                             bool net_up) {
  if (clock_.now_utc_s < next_sync_clock_s_) return;
  next_sync_clock_s_ =
      clock_.now_utc_s + static_cast<double>(cfg_.clock.sync_interval_s);
  ++stats_.sync_attempts;
  if (!net_up) {
    log_event(t, "periodic time sync failed (network down)");
    return;
  }
  const double offset =
      ntp_sync(clock_, true_utc_s, cfg_.clock.step_threshold_s);
  ++stats_.sync_successes;
  if (std::abs(offset) >= cfg_.clock.step_threshold_s) {
    ++stats_.clock_steps;
    char buf[80];
    std::snprintf(buf, sizeof(buf), "clock stepped by %+.6fs", offset);
    log_event(t, buf);
  }
}

void FirmwareController::flush_cycle(double t) {
  last_flush_clock_s_ = clock_.now_utc_s;
  // Deliver WRITE_OK/WRITE_ERR until the machine settles: either the staged
  // records are on the medium, or retries ran out and we are buffer-only.
  while (true) {
    const std::vector<Record>& staged = buffers_.stage_for_flush();
    if (staged.empty()) {
      sm_.deliver(Event::kWriteOk, t);
      return;
    }
    ++stats_.flush_attempts;
    const FlushOutcome fo = writer_.flush(staged);
    if (fo.records > 0) buffers_.drop_staged_prefix(fo.records);
    if (fo.ok) {
      sm_.deliver(Event::kWriteOk, t);
      return;
    }
    ++stats_.flush_failures;
    sm_.deliver(Event::kWriteErr, t);
    if (sm_.state().buffer_only) {
      ++stats_.buffer_only_entries;
      const std::vector<Record> leftovers = buffers_.take_all();
      ring_.push_all(leftovers);
      char buf[120];
      std::snprintf(buf, sizeof(buf),
                    "storage down (%s); buffer-only with %llu records staged",
                    fo.error.c_str(),
                    static_cast<unsigned long long>(ring_.size()));
      log_event(t, buf);
      return;
    }
    ++stats_.write_retry_events;
  }
}

void FirmwareController::attempt_remount(double t) {
  if (t - last_remount_t_ < static_cast<double>(cfg_.remount_interval_s)) {
    return;
  }
  last_remount_t_ = t;
  if (!medium_.available()) return;
  std::vector<Record> drained = ring_.drain();
  const FlushOutcome fo = writer_.flush(drained);
  if (fo.ok) {
    sm_.clear_buffer_only();
    ++stats_.remount_successes;
    char buf[96];
    std::snprintf(buf, sizeof(buf),
                  "storage remounted; %llu buffered records flushed",
                  static_cast<unsigned long long>(drained.size()));
    log_event(t, buf);
  } else {
    // Put back whatever did not land; order is preserved.
    if (fo.records > 0) {
      drained.erase(drained.begin(),
                    drained.begin() + static_cast<long>(fo.records));
    }
    for (const Record& r : drained) ring_.push(r);
  }
}

void FirmwareController::tick(double t, double true_utc_s,
                              const SensorFrame& frame,
                              const ActiveFaults& faults) {
  if (halted_) return;
  rtc_advance(clock_, cfg_.tick_dt_s());
  maybe_periodic_sync(t, true_utc_s, !faults.net_outage);

  ++stats_.ticks;
  sm_.deliver(Event::kTick, t);

  const Record rec = acq_.acquire_tick(frame, clock_);
  ++stats_.records_acquired;
  const bool sensor_err = rec.flags & kFlagSensorFault;
  if (sensor_err) ++stats_.sensor_fault_records;
  sm_.deliver(sensor_err ? Event::kSensorErr : Event::kSampleOk, t);
  // The machine is now in LOG (possibly via FAULT_SENSOR) expecting a write
  // outcome for this tick.

  if (sm_.state().buffer_only) {
    ring_.push(rec);
    attempt_remount(t);
    sm_.deliver(Event::kWriteOk, t);  // RAM append; degradation already noted
  } else {
    if (!buffers_.append(rec)) {
      // Active side full: flush now to make room. If that fails into
      // buffer-only, the record follows the others into the ring.
      flush_cycle(t);
      if (!buffers_.append(rec)) ring_.push(rec);
      // flush_cycle already delivered the write outcome for this tick.
    } else {
      const bool interval_due =
          clock_.now_utc_s - last_flush_clock_s_ >=
          static_cast<double>(cfg_.flush_interval_s);
      const bool high_water =
          buffers_.active_size() >= cfg_.buffer_capacity * 3 / 4;
      if (interval_due || high_water || buffers_.flush_pending()) {
        flush_cycle(t);
      } else {
        sm_.deliver(Event::kWriteOk, t);
      }
    }
  }

  if (sm_.state().mode == Mode::kTransmit) {
    tq_.enqueue(rec);
    ++stats_.telemetry_enqueued;
    const TransmitResult res =
        tq_.try_transmit(!faults.net_outage, t, cfg_.tick_dt_s(), broker_);
    stats_.telemetry_sent += res.sent;
    const bool net_down =
        faults.net_outage || (res.attempted && !res.link_ok);
    sm_.deliver(net_down ? Event::kNetDown : Event::kNetUp, t);
  }
}

void FirmwareController::power_loss(double t) {
  if (halted_) return;
  const std::vector<Record> in_ram = buffers_.take_all();
  stats_.records_lost_power += in_ram.size() + ring_.size();
  stats_.telemetry_lost_power += tq_.size();
  finalize_stats();
  char buf[120];
  std::snprintf(buf, sizeof(buf),
                "power lost; %llu unflushed records and %llu queued "
                "telemetry messages gone",
                static_cast<unsigned long long>(in_ram.size() + ring_.size()),
                static_cast<unsigned long long>(tq_.size()));
  log_event(t, buf);
  sm_.deliver(Event::kPowerLoss, t);
  halted_ = true;
}

void FirmwareController::shutdown(double t) {
  if (halted_) return;
  std::vector<Record> leftovers = ring_.drain();
  const std::vector<Record> in_ram = buffers_.take_all();
  leftovers.insert(leftovers.end(), in_ram.begin(), in_ram.end());
  if (!leftovers.empty()) {
    const FlushOutcome fo = writer_.flush(leftovers);
    if (!fo.ok) {
      const uint64_t lost = leftovers.size() - fo.records;
      stats_.records_lost_shutdown += lost;
      char buf[96];
      std::snprintf(buf, sizeof(buf),
                    "shutdown flush failed (%s); %llu records lost",
                    fo.error.c_str(), static_cast<unsigned long long>(lost));
      log_event(t, buf);
    }
  }
  finalize_stats();
  log_event(t, "shutdown complete");
  halted_ = true;
}

void FirmwareController::finalize_stats() {
  stats_.ring_dropped = ring_.dropped();
  stats_.telemetry_dropped = tq_.dropped_overflow();
  stats_.transitions = sm_.transitions_taken();
}

}  // namespace winddaq
