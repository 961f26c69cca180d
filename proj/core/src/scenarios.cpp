#include "winddaq/scenarios.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>
#include <utility>

namespace winddaq {

namespace {

constexpr double kHour = 3600.0;
constexpr double kDay = 86400.0;

std::string fault_line(double start, double end, FaultKind kind,
                       std::optional<SensorChannel> ch = std::nullopt) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%.0f %.0f %s", start, end,
                std::string(fault_kind_name(kind)).c_str());
  std::string line = buf;
  if (ch) {
    line += ' ';
    line += channel_name(*ch);
  }
  line += '\n';
  return line;
}

FaultSchedule parse_or_die(const std::string& text) {
  auto parsed = parse_fault_schedule(text);
  if (!parsed.ok()) {
    std::string msg = "internal scenario schedule rejected:";
    for (const auto& e : parsed.errors) msg += " " + e;
    throw std::logic_error(msg);
  }
  return std::move(*parsed.schedule);
}

std::string fmt_u64(const char* key, uint64_t v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s=%llu", key, (unsigned long long)v);
  return buf;
}

std::string fmt_f(const char* key, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s=%.6f", key, v);
  return buf;
}

struct Checker {
  bool pass = true;
  std::vector<std::string>* lines;
  void check(bool ok, const std::string& what) {
    lines->push_back("check " + what + (ok ? ": PASS" : ": FAIL"));
    pass = pass && ok;
  }
};

}  // namespace

std::string render_fault_schedule(const FaultSchedule& sched) {
  std::string out;
  for (const auto& e : sched.events)
    out += fault_line(e.start_s, e.end_s, e.kind, e.channel);
  return out;
}

Scenario scenario_endurance_72h(uint64_t seed) {
  Scenario sc;
  sc.name = "endurance72h";
  sc.description =
      "72 h fault-free continuous acquisition at 1 Hz; every second must be "
      "logged with zero integrity events";
  sc.options.config = default_config();
  sc.options.config.telemetry.enabled = false;
  sc.options.faults = empty_fault_schedule();
  sc.options.duration_s = 259200;
  sc.options.seed = seed;
  return sc;
}

Scenario scenario_shakedown_week(uint64_t seed) {
  Scenario sc;
  sc.name = "shakedown";
  sc.description =
      "7-day commissioning run with one maintenance window, one storm outage "
      "and assorted short faults; completeness target > 0.95";
  Config cfg = default_config();
  cfg.telemetry.enabled = true;
  cfg.invalid_rate = 0.06;
  sc.options.config = cfg;

  std::string faults;
  // Day 2: planned 4 h maintenance power-down.
  faults += fault_line(2 * kDay + 8 * kHour, 2 * kDay + 12 * kHour,
                       FaultKind::kMaintenance);
  // Day 3: storage controller wedge, 30 min (ring buffer bridges it).
  faults += fault_line(3 * kDay + 6 * kHour, 3 * kDay + 6.5 * kHour,
                       FaultKind::kSdFail);
  // Day 4: 5 h grid outage; the 4 h battery covers all but the last hour.
  faults += fault_line(4 * kDay, 4 * kDay + 5 * kHour,
                       FaultKind::kPowerOutage);
  // Day 5: half-hour backhaul outage.
  faults += fault_line(5 * kDay + 12 * kHour, 5 * kDay + 12.5 * kHour,
                       FaultKind::kNetOutage);
  // Day 6: anemometer ices up for two hours.
  faults += fault_line(6 * kDay + 2 * kHour, 6 * kDay + 4 * kHour,
                       FaultKind::kSensorStuck, SensorChannel::kWind);
  sc.options.faults = parse_or_die(faults);
  sc.options.duration_s = 7 * 86400;
  sc.options.seed = seed;
  return sc;
}

Scenario scenario_nominal_six_month(uint64_t seed) {
  Scenario sc;
  sc.name = "nominal6mo";
  sc.description =
      "180-day campaign under the nominal fault profile; downtime sized for "
      "completeness in [0.90, 0.95]";
  Config cfg = default_config();
  cfg.telemetry.enabled = true;
  cfg.invalid_rate = 0.06;
  sc.options.config = cfg;

  std::string faults;
  // Monthly maintenance power-down, 28 h (inspection + brake service).
  for (int k = 0; k < 6; ++k) {
    const double start = (15 + 30 * k) * kDay + 8 * kHour;
    faults += fault_line(start, start + 28 * kHour, FaultKind::kMaintenance);
  }
  // Two multi-day storm outages (82 h); battery bridges the first 4 h.
  for (double day : {60.0, 150.0}) {
    faults += fault_line(day * kDay, day * kDay + 82 * kHour,
                         FaultKind::kPowerOutage);
  }
  // Weekly 30 min backhaul outage.
  for (int k = 0; 3 + 7 * k < 180; ++k) {
    const double start = (3 + 7 * k) * kDay + 12 * kHour;
    faults += fault_line(start, start + 0.5 * kHour, FaultKind::kNetOutage);
  }
  // Monthly storage hiccup, 30 min; the RAM ring carries it.
  for (int k = 0; k < 6; ++k) {
    const double start = (20 + 30 * k) * kDay + 6 * kHour;
    faults += fault_line(start, start + 0.5 * kHour, FaultKind::kSdFail);
  }
  // Occasional stuck sensors.
  faults += fault_line(30 * kDay + 2 * kHour, 30 * kDay + 4 * kHour,
                       FaultKind::kSensorStuck, SensorChannel::kWind);
  faults += fault_line(90 * kDay + 1 * kHour, 90 * kDay + 3 * kHour,
                       FaultKind::kSensorStuck, SensorChannel::kTemp);
  faults += fault_line(120 * kDay + 5 * kHour, 120 * kDay + 6 * kHour,
                       FaultKind::kSensorStuck, SensorChannel::kPower);
  sc.options.faults = parse_or_die(faults);
  sc.options.duration_s = 180 * 86400;
  sc.options.seed = seed;
  return sc;
}

Scenario scenario_curve_recovery(uint64_t seed) {
  Scenario sc;
  sc.name = "curve";
  sc.description =
      "2 h commissioning sweep of the lambda target across the curve on a "
      "calm day; binned cp must recover the ground-truth cp(lambda)";
  Config cfg = default_config();
  cfg.telemetry.enabled = false;
  // Calm, slowly-varying wind: the sweep supplies the lambda variation, the
  // steadier inflow keeps the v^3 term well conditioned.
  cfg.wind.mean_mps = 7.0;
  cfg.wind.volatility_mps = 0.4;
  cfg.wind.reversion_time_s = 120.0;
  sc.options.config = cfg;
  sc.options.faults = empty_fault_schedule();
  sc.options.duration_s = 7200;
  sc.options.seed = seed;
  sc.options.sweep = LambdaSweep{0.75, 4.25, 1800.0};
  return sc;
}

Scenario scenario_retention(uint64_t seed) {
  Scenario sc;
  sc.name = "retention";
  sc.description =
      "24 h fault-free run with 6% invalid-sample injection; validity "
      "filtering must retain 92-95% of raw samples";
  Config cfg = default_config();
  cfg.telemetry.enabled = false;
  cfg.invalid_rate = 0.06;
  sc.options.config = cfg;
  sc.options.faults = empty_fault_schedule();
  sc.options.duration_s = 86400;
  sc.options.seed = seed;
  return sc;
}

// --- benchtest profiles ------------------------------------------------------

BenchtestResult benchtest_endurance72h(uint64_t seed) {
  BenchtestResult out;
  out.profile = "endurance72h";
  Scenario sc = scenario_endurance_72h(seed);

  MemMedium medium;
  NullBroker broker;
  CampaignResult res = run_campaign(sc.options, medium, broker);

  std::function<void(const Record&)> noop = [](const Record&) {};
  RecoverReport rep = scan_committed(medium, noop);
  const uint64_t integrity = rep.quarantined_segments + rep.truncation_events;

  out.lines.push_back(fmt_u64("seed", seed));
  out.lines.push_back(fmt_u64("ticks", res.ticks_run));
  out.lines.push_back(fmt_u64("records_committed", res.records_committed));
  out.lines.push_back(fmt_u64("records_on_medium", rep.committed_records));
  out.lines.push_back(fmt_f("completeness", res.completeness));
  out.lines.push_back(fmt_u64("integrity_events", integrity));

  Checker c{true, &out.lines};
  c.check(res.records_committed == 259200, "exactly 259200 records committed");
  c.check(rep.committed_records == res.records_committed,
          "medium holds every committed record");
  c.check(res.completeness == 1.0, "completeness 1.000");
  c.check(integrity == 0, "zero integrity events");
  out.pass = c.pass;
  return out;
}

BenchtestResult benchtest_powercycle50(uint64_t seed,
                                       bool omit_commit_marker) {
  BenchtestResult out;
  out.profile = "powercycle50";

  Config cfg = default_config();
  cfg.telemetry.enabled = false;
  cfg.flush_interval_s = 10;  // dense flush activity to crash into

  MemMedium medium;
  NullBroker broker;
  ClockState clock = make_clock(cfg.clock);
  const double utc0 = static_cast<double>(cfg.clock.start_utc_s);
  const double dt = cfg.tick_dt_s();

  WindProcess wind(cfg.wind);
  RngStream wind_rng(seed, RngStreamId::kEnvWind);
  RngStream crash_rng(seed, RngStreamId::kCrashPoints);
  TurbineModel turbine(cfg.geometry, cfg.cp_curve, cfg.rotor_tau_s,
                       cfg.cutin_wind_mps);
  HallPulser hall(cfg.geometry.pulses_per_revolution);

  double t = 0;
  uint64_t believed = 0;       // records some writer reported as committed
  uint64_t regressions = 0;    // boots that recovered fewer than believed
  uint64_t crashes = 0;
  const ActiveFaults no_faults{};

  auto one_tick = [&](FirmwareController& fw) {
    const double v = wind.step(dt, wind_rng);
    const TurbineTruth tr = turbine.step(v, dt);
    SensorFrame frame;
    frame.values = {v,
                    cfg.nominal_bus_voltage_v,
                    tr.power_w / cfg.nominal_bus_voltage_v,
                    tr.power_w,
                    15.0,
                    101325.0,
                    70.0};
    fw.pulses().add(hall.step(tr.omega_rad_s, dt));
    fw.tick(t, utc0 + t + dt, frame, no_faults);
    t += dt;
  };

  for (int iter = 0; iter < 50; ++iter) {
    FirmwareController fw(cfg, medium, broker, clock, seed);
    if (omit_commit_marker) fw.writer().set_omit_commit_marker(true);
    fw.boot(t, utc0 + t, true);
    if (fw.mount_report().committed_records < believed) ++regressions;

    const uint64_t pre = 120 + crash_rng.below(240);
    for (uint64_t k = 0; k < pre; ++k) one_tick(fw);

    // Power dies somewhere inside the next few kilobytes of flush writes.
    medium.arm_crash_after(crash_rng.below(2500) + 1);
    for (int guard = 0; !medium.dead() && guard < 600; ++guard) one_tick(fw);
    if (medium.dead()) ++crashes;

    believed += fw.committed_records();
    fw.power_loss(t);
    medium.reboot();
  }

  // One clean life to mount, repair and drain.
  FirmwareController fin(cfg, medium, broker, clock, seed);
  if (omit_commit_marker) fin.writer().set_omit_commit_marker(true);
  fin.boot(t, utc0 + t, true);
  if (fin.mount_report().committed_records < believed) ++regressions;
  for (int k = 0; k < 30; ++k) one_tick(fin);
  fin.shutdown(t);
  believed += fin.committed_records();

  std::set<std::pair<int64_t, uint32_t>> stamps;
  uint64_t dup_stamps = 0;
  std::function<void(const Record&)> sink = [&](const Record& r) {
    if (!stamps.insert({r.ts.t_utc_s, r.ts.seq}).second) ++dup_stamps;
  };
  RecoverReport rep = scan_committed(medium, sink);

  out.lines.push_back(fmt_u64("seed", seed));
  out.lines.push_back(fmt_u64("iterations", 50));
  out.lines.push_back(fmt_u64("crashes_injected", crashes));
  out.lines.push_back(fmt_u64("believed_committed", believed));
  out.lines.push_back(fmt_u64("recovered", rep.committed_records));
  out.lines.push_back(fmt_u64("boot_regressions", regressions));
  out.lines.push_back(fmt_u64("duplicate_stamps", dup_stamps));
  out.lines.push_back(fmt_u64("quarantined_segments", rep.quarantined_segments));

  Checker c{true, &out.lines};
  c.check(crashes == 50, "all 50 crash points fired");
  c.check(regressions == 0, "no boot ever lost a committed record");
  c.check(rep.committed_records >= believed,
          "final log holds every record reported committed");
  c.check(dup_stamps == 0, "no duplicate (t, seq) after recovery");
  c.check(rep.quarantined_segments == 0, "no segment quarantined");
  out.pass = c.pass;
  return out;
}

BenchtestResult benchtest_shakedown(uint64_t seed) {
  BenchtestResult out;
  out.profile = "shakedown";
  Scenario sc = scenario_shakedown_week(seed);

  MemMedium medium;
  NullBroker broker;
  CampaignResult res = run_campaign(sc.options, medium, broker);

  std::function<void(const Record&)> noop = [](const Record&) {};
  RecoverReport rep = scan_committed(medium, noop);
  const uint64_t integrity = rep.quarantined_segments + rep.truncation_events;

  out.lines.push_back(fmt_u64("seed", seed));
  out.lines.push_back(fmt_u64("records_committed", res.records_committed));
  out.lines.push_back(fmt_u64("ticks_off", res.ticks_off));
  out.lines.push_back(fmt_u64("boots", res.boots));
  out.lines.push_back(fmt_f("completeness", res.completeness));
  out.lines.push_back(fmt_u64("integrity_events", integrity));
  out.lines.push_back(fmt_u64("ring_dropped", res.totals.ring_dropped));

  Checker c{true, &out.lines};
  c.check(res.completeness > 0.95, "completeness above 0.95");
  c.check(integrity == 0, "zero integrity events");
  out.pass = c.pass;
  return out;
}

const std::vector<std::string> kBenchtestProfiles = {
    "endurance72h", "powercycle50", "shakedown"};

std::optional<BenchtestResult> run_benchtest(std::string_view profile,
                                             uint64_t seed) {
  if (profile == "endurance72h") return benchtest_endurance72h(seed);
  if (profile == "powercycle50") return benchtest_powercycle50(seed);
  if (profile == "shakedown") return benchtest_shakedown(seed);
  return std::nullopt;
}

}  // namespace winddaq
