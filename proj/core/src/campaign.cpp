#include "winddaq/campaign.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>

namespace winddaq {

const char* const kTruthCsvHeader =
    "t_s,true_wind_mps,true_temp_c,true_pressure_pa,true_humidity_pct,"
    "true_omega_rad_s,true_lambda,true_cp,true_power_w,powered";

namespace {

// Forwards deliveries and mirrors accepted payloads to a transcript stream.
class TeeBroker : public Broker {
 public:
  TeeBroker(Broker& inner, std::ostream* transcript)
      : inner_(inner), transcript_(transcript) {}
  bool deliver(const TelemetryMessage& msg) override {
    const bool ok = inner_.deliver(msg);
    if (ok && transcript_) {
      *transcript_ << msg.topic << ' ' << msg.payload << '\n';
    }
    return ok;
  }

 private:
  Broker& inner_;
  std::ostream* transcript_;
};

// SD_FAIL gate. While closed the medium reports unavailable and rejects
// appends — a card whose controller stopped answering. Reads are left alone:
// nothing in the firmware reads during an outage (recovery runs at boot, and
// the remount path checks available() first).
class GatedMedium : public Medium {
 public:
  explicit GatedMedium(Medium& inner) : inner_(inner) {}
  void set_open(bool v) { open_ = v; }
  bool available() const override { return open_ && inner_.available(); }
  std::vector<std::string> list() override { return inner_.list(); }
  std::optional<uint64_t> size(const std::string& n) override {
    return inner_.size(n);
  }
  bool read(const std::string& n, std::string* out) override {
    return inner_.read(n, out);
  }
  AppendStatus append(const std::string& n, std::string_view b) override {
    return open_ ? inner_.append(n, b) : AppendStatus::kUnavailable;
  }
  bool truncate(const std::string& n, uint64_t s) override {
    return open_ ? inner_.truncate(n, s) : false;
  }

 private:
  Medium& inner_;
  bool open_ = true;
};

void emit_truth(const CampaignSinks& sinks, const TruthSample& s) {
  if (sinks.truth_csv) {
    char buf[224];
    std::snprintf(buf, sizeof(buf),
                  "%.1f,%.4f,%.3f,%.2f,%.2f,%.5f,%.5f,%.5f,%.3f,%d\n", s.t_s,
                  s.env.wind_mps, s.env.temp_c, s.env.pressure_pa,
                  s.env.humidity_pct, s.turbine.omega_rad_s, s.turbine.lambda,
                  s.turbine.cp, s.turbine.power_w, s.powered ? 1 : 0);
    *sinks.truth_csv << buf;
  }
  if (sinks.truth_cb) sinks.truth_cb(s);
}

}  // namespace

void accumulate(ControllerStats& into, const ControllerStats& s) {
  into.ticks += s.ticks;
  into.records_acquired += s.records_acquired;
  into.sensor_fault_records += s.sensor_fault_records;
  into.flush_attempts += s.flush_attempts;
  into.flush_failures += s.flush_failures;
  into.write_retry_events += s.write_retry_events;
  into.buffer_only_entries += s.buffer_only_entries;
  into.remount_successes += s.remount_successes;
  into.ring_dropped += s.ring_dropped;
  into.records_lost_power += s.records_lost_power;
  into.records_lost_shutdown += s.records_lost_shutdown;
  into.telemetry_enqueued += s.telemetry_enqueued;
  into.telemetry_sent += s.telemetry_sent;
  into.telemetry_dropped += s.telemetry_dropped;
  into.telemetry_lost_power += s.telemetry_lost_power;
  into.sync_attempts += s.sync_attempts;
  into.sync_successes += s.sync_successes;
  into.clock_steps += s.clock_steps;
  into.transitions += s.transitions;
}

CampaignResult run_campaign(const CampaignOptions& opts, Medium& medium,
                            Broker& broker, const CampaignSinks& sinks) {
  const Config& cfg = opts.config;
  const double dt = cfg.tick_dt_s();
  const uint64_t n_ticks =
      static_cast<uint64_t>(opts.duration_s) * cfg.sample_rate_hz;

  CampaignResult res;
  res.ticks_expected = n_ticks;

  ClockState clock = make_clock(cfg.clock);
  EnvSimulator env(cfg.wind, cfg.env,
                   RngStream(opts.seed, RngStreamId::kEnvWind));
  TurbineModel turbine(cfg.geometry, cfg.cp_curve, cfg.rotor_tau_s,
                       cfg.cutin_wind_mps);
  if (opts.sweep) turbine.set_sweep(*opts.sweep);
  HallPulser hall(cfg.geometry.pulses_per_revolution);

  std::array<SensorModel, kChannelCount> sensors = {
      SensorModel(cfg.sensors[0]), SensorModel(cfg.sensors[1]),
      SensorModel(cfg.sensors[2]), SensorModel(cfg.sensors[3]),
      SensorModel(cfg.sensors[4]), SensorModel(cfg.sensors[5]),
      SensorModel(cfg.sensors[6])};
  std::array<RngStream, kChannelCount> sensor_rng = {
      RngStream(opts.seed, RngStreamId::kSensorWind),
      RngStream(opts.seed, RngStreamId::kSensorVoltage),
      RngStream(opts.seed, RngStreamId::kSensorCurrent),
      RngStream(opts.seed, RngStreamId::kSensorPower),
      RngStream(opts.seed, RngStreamId::kSensorTemp),
      RngStream(opts.seed, RngStreamId::kSensorPressure),
      RngStream(opts.seed, RngStreamId::kSensorHumidity)};
  RngStream inj_rng(opts.seed, RngStreamId::kInvalidInjection);

  TeeBroker tee(broker, sinks.telemetry_transcript);
  GatedMedium gated(medium);

  if (sinks.truth_csv) *sinks.truth_csv << kTruthCsvHeader << '\n';

  std::optional<FirmwareController> fw;
  auto retire = [&](double t, bool graceful) {
    if (!fw) return;
    if (graceful) {
      fw->shutdown(t);
    } else {
      fw->power_loss(t);
    }
    accumulate(res.totals, fw->stats());
    res.records_committed += fw->committed_records();
    fw.reset();
  };

  using WallClock = std::chrono::steady_clock;
  const auto wall_start = WallClock::now();
  const bool paced = opts.accel > 0;
  const std::chrono::duration<double> period{paced ? dt / opts.accel : 0};

  for (uint64_t k = 0; k < n_ticks; ++k) {
    const double t = static_cast<double>(k) * dt;

    const EnvState e = env.step(dt);
    const TurbineTruth truth = turbine.step(e.wind_mps, dt);
    const uint64_t pulses = hall.step(truth.omega_rad_s, dt);
    const ActiveFaults faults = faults_active(opts.faults, t);
    gated.set_open(!faults.sd_fail);
    const bool off =
        faults.maintenance ||
        (faults.power_outage &&
         faults.outage_elapsed_s >= cfg.battery_capacity_s);

    emit_truth(sinks, TruthSample{t, e, truth, !off});

    if (off) {
      retire(t, /*graceful=*/false);
      // The battery-backed RTC keeps counting (and drifting) while the
      // logger itself is dark.
      rtc_advance(clock, dt);
      ++res.ticks_off;
    } else {
      if (!fw) {
        fw.emplace(cfg, gated, tee, clock, opts.seed, sinks.transitions,
                   sinks.events);
        fw->boot(t, static_cast<double>(cfg.clock.start_utc_s) + t,
                 !faults.net_outage);
        ++res.boots;
      }

      SensorFrame frame;
      const std::array<double, kChannelCount> truth_vals = {
          e.wind_mps,
          cfg.nominal_bus_voltage_v,
          truth.power_w / cfg.nominal_bus_voltage_v,
          truth.power_w,
          e.temp_c,
          e.pressure_pa,
          e.humidity_pct};
      for (int i = 0; i < kChannelCount; ++i) {
        frame.values[i] = sensors[i].read(truth_vals[i], sensor_rng[i],
                                          faults.stuck[i]);
      }

      // Invalid-sample injection: spikes beyond physical range, rotor pulse
      // bursts, and channel dropouts. Two draws per tick regardless of
      // outcome, so the stream stays aligned across variant scenarios.
      const double u_kind = inj_rng.uniform01();
      const double u_mag = inj_rng.uniform01();
      uint64_t extra_pulses = 0;
      if (cfg.invalid_rate > 0 && u_kind < cfg.invalid_rate) {
        const int kind =
            std::min(2, static_cast<int>(u_kind / cfg.invalid_rate * 3.0));
        switch (kind) {
          case 0:  // anemometer spike far beyond the validity ceiling
            frame.values[static_cast<int>(SensorChannel::kWind)] =
                cfg.limits.wind_max_mps + 1.0 + 14.0 * u_mag;
            break;
          case 1: {  // EMI burst on the hall line: impossible rotor speed
            const double rpm_target =
                cfg.limits.rpm_max * 1.05 + 200.0 * u_mag;
            extra_pulses = static_cast<uint64_t>(
                std::ceil(rpm_target / 60.0 *
                          cfg.geometry.pulses_per_revolution * dt));
            break;
          }
          case 2:  // transient bus failure: one channel reads nothing
            frame.values[std::min(kChannelCount - 1,
                                  static_cast<int>(u_mag * kChannelCount))] =
                std::nullopt;
            break;
        }
      }

      fw->pulses().add(pulses + extra_pulses);
      fw->tick(t, static_cast<double>(cfg.clock.start_utc_s) +
                      static_cast<double>(k + 1) * dt,
               frame, faults);
      ++res.ticks_run;
    }

    if (paced) {
      const auto deadline =
          wall_start + std::chrono::duration_cast<WallClock::duration>(
                           period * static_cast<double>(k + 1));
      if (WallClock::now() > deadline) {
        ++res.missed_deadlines;
      } else {
        std::this_thread::sleep_until(deadline);
      }
    }
  }

  retire(static_cast<double>(opts.duration_s), /*graceful=*/true);
  res.completeness =
      n_ticks == 0 ? 1.0
                   : static_cast<double>(res.records_committed) /
                         static_cast<double>(n_ticks);
  return res;
}

std::string campaign_summary(const CampaignOptions& opts,
                             const CampaignResult& res) {
  std::string out;
  char buf[96];
  auto put = [&](const char* key, uint64_t v) {
    std::snprintf(buf, sizeof(buf), "%s=%llu\n", key,
                  static_cast<unsigned long long>(v));
    out += buf;
  };
  put("duration_s", static_cast<uint64_t>(opts.duration_s));
  put("sample_rate_hz", static_cast<uint64_t>(opts.config.sample_rate_hz));
  put("seed", opts.seed);
  put("ticks_expected", res.ticks_expected);
  put("ticks_run", res.ticks_run);
  put("ticks_off", res.ticks_off);
  put("boots", res.boots);
  put("records_committed", res.records_committed);
  std::snprintf(buf, sizeof(buf), "completeness=%.6f\n", res.completeness);
  out += buf;
  put("records_lost_power", res.totals.records_lost_power);
  put("records_lost_shutdown", res.totals.records_lost_shutdown);
  put("ring_dropped", res.totals.ring_dropped);
  put("sensor_fault_records", res.totals.sensor_fault_records);
  put("flush_attempts", res.totals.flush_attempts);
  put("flush_failures", res.totals.flush_failures);
  put("write_retries", res.totals.write_retry_events);
  put("buffer_only_entries", res.totals.buffer_only_entries);
  put("remounts", res.totals.remount_successes);
  put("telemetry_enqueued", res.totals.telemetry_enqueued);
  put("telemetry_sent", res.totals.telemetry_sent);
  put("telemetry_dropped", res.totals.telemetry_dropped);
  put("telemetry_lost_power", res.totals.telemetry_lost_power);
  put("sync_attempts", res.totals.sync_attempts);
  put("sync_successes", res.totals.sync_successes);
  put("clock_steps", res.totals.clock_steps);
  put("transitions", res.totals.transitions);
  put("missed_deadlines", res.missed_deadlines);
  return out;
}

}  // namespace winddaq
