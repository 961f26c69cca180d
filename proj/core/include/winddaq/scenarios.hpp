#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "winddaq/campaign.hpp"

namespace winddaq {

// Named verification scenarios. Each is a complete, self-contained campaign
// recipe (config + fault schedule + duration) with a documented target band,
// so the same run backs the CLI profiles and the test suite.

struct Scenario {
  std::string name;
  std::string description;
  CampaignOptions options;
};

// 72 h, 1 Hz, fault-free. Target: every tick logged, zero integrity events.
Scenario scenario_endurance_72h(uint64_t seed = 1);

// 7 days with one maintenance window, one long power outage, short network,
// storage and sensor faults, 6% invalid injection. Target: completeness
// above 0.95.
Scenario scenario_shakedown_week(uint64_t seed = 1);

// 180 days with monthly maintenance, two multi-day storm outages, weekly
// network outages, monthly storage hiccups, occasional stuck sensors, 6%
// invalid injection. Downtime is sized so completeness lands inside the
// design band [0.90, 0.95].
Scenario scenario_nominal_six_month(uint64_t seed = 1);

// 2 h commissioning sweep: the load controller walks lambda from 0.75 to
// 4.25 on a calm day, so the binned curve can be compared bin-by-bin
// against the simulation's ground-truth cp(lambda).
Scenario scenario_curve_recovery(uint64_t seed = 1);

// 24 h, fault-free, 6% invalid injection. Target: filter_valid retention in
// [0.92, 0.95].
Scenario scenario_retention(uint64_t seed = 1);

// Schedule text in the parser's `start end KIND [channel]` format.
std::string render_fault_schedule(const FaultSchedule& sched);

// ---------------------------------------------------------------------------
// benchtest profiles: self-checking runs with a pass/fail verdict
// ---------------------------------------------------------------------------

struct BenchtestResult {
  std::string profile;
  bool pass = false;
  std::vector<std::string> lines;  // key=value facts plus one line per check
};

BenchtestResult benchtest_endurance72h(uint64_t seed = 1);
// 50 power cuts landed byte-accurately inside flush writes; after each
// reboot the recovered record count must never regress and the final log
// must hold no duplicate (t, seq). `omit_commit_marker` is the negative
// control: a writer that skips the commit marker must make this fail.
BenchtestResult benchtest_powercycle50(uint64_t seed = 1,
                                       bool omit_commit_marker = false);
BenchtestResult benchtest_shakedown(uint64_t seed = 1);

// Dispatch by profile name; nullopt for unknown names.
std::optional<BenchtestResult> run_benchtest(std::string_view profile,
                                             uint64_t seed);
extern const std::vector<std::string> kBenchtestProfiles;

}  // namespace winddaq
