#include "winddaq/scenarios.hpp"

#include "doctest.h"

using namespace winddaq;

TEST_CASE("endurance profile holds every tick and passes its own checks") {
  const BenchtestResult r = benchtest_endurance72h(1);
  CHECK(r.pass);
  CHECK(r.profile == "endurance72h");
  bool saw_records = false;
  for (const std::string& line : r.lines) {
    if (line.find("records_committed=259200") != std::string::npos) {
      saw_records = true;
    }
  }
  CHECK(saw_records);
}

TEST_CASE("fifty byte-accurate power cuts lose nothing that was committed") {
  const BenchtestResult r = benchtest_powercycle50(1);
  CHECK(r.pass);
  bool saw_crashes = false;
  for (const std::string& line : r.lines) {
    if (line.find("crashes_injected=50") != std::string::npos)
      saw_crashes = true;
  }
  CHECK(saw_crashes);
}

TEST_CASE("the crash oracle detects a writer that skips commit markers") {
  // Negative control: remove the commit protocol's final step and the same
  // harness must fail, proving it can actually see durability loss.
  const BenchtestResult r = benchtest_powercycle50(1, true);
  CHECK(!r.pass);
}

TEST_CASE("shakedown week stays above its completeness floor") {
  const BenchtestResult r = benchtest_shakedown(1);
  CHECK(r.pass);
}

TEST_CASE("benchtest dispatch knows exactly the published profiles") {
  CHECK(kBenchtestProfiles.size() == 3);
  for (const std::string& name : kBenchtestProfiles) {
    CAPTURE(name);
    CHECK(run_benchtest(name, 1).has_value());
  }
  CHECK(!run_benchtest("bogus", 1).has_value());
}

TEST_CASE("scenario recipes carry coherent durations and schedules") {
  const Scenario endurance = scenario_endurance_72h();
  CHECK(endurance.options.duration_s == 72 * 3600);
  CHECK(endurance.options.faults.events.empty());

  const Scenario week = scenario_shakedown_week();
  CHECK(week.options.duration_s == 7 * 86400);
  CHECK(!week.options.faults.events.empty());
  CHECK(week.options.config.invalid_rate == doctest::Approx(0.06));

  const Scenario six = scenario_nominal_six_month();
  CHECK(six.options.duration_s == 180LL * 86400);
  // Downtime must be monthly-maintenance plus storms, all inside the run.
  uint64_t maintenance = 0, outages = 0;
  for (const FaultEvent& ev : six.options.faults.events) {
    CHECK(ev.start_s >= 0);
    CHECK(ev.end_s > ev.start_s);
    CHECK(ev.end_s <= six.options.duration_s);
    if (ev.kind == FaultKind::kMaintenance) ++maintenance;
    if (ev.kind == FaultKind::kPowerOutage) ++outages;
  }
  CHECK(maintenance == 6);
  CHECK(outages == 2);

  const Scenario curve = scenario_curve_recovery();
  CHECK(curve.options.sweep.has_value());
  CHECK(curve.options.sweep->lambda_min < curve.options.sweep->lambda_max);

  const Scenario retention = scenario_retention();
  CHECK(retention.options.duration_s == 86400);
  CHECK(retention.options.config.invalid_rate == doctest::Approx(0.06));
}

TEST_CASE("fault schedules render back to text the parser accepts") {
  const Scenario six = scenario_nominal_six_month();
  const std::string text = render_fault_schedule(six.options.faults);
  const FaultParseResult back = parse_fault_schedule(text);
  REQUIRE(back.ok());
  const std::vector<FaultEvent>& got = back.schedule->events;
  REQUIRE(got.size() == six.options.faults.events.size());
  for (size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i].kind == six.options.faults.events[i].kind);
    CHECK(got[i].start_s == six.options.faults.events[i].start_s);
    CHECK(got[i].end_s == six.options.faults.events[i].end_s);
    CHECK(got[i].channel == six.options.faults.events[i].channel);
  }
}
