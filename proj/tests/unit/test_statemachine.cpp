#include "winddaq/statemachine.hpp"

#include <algorithm>

#include "doctest.h"

using namespace winddaq;

namespace {

const Mode kAllModes[] = {Mode::kInit,      Mode::kTimeSync, Mode::kAcquire,
                          Mode::kLog,       Mode::kTransmit, Mode::kFaultSensor,
                          Mode::kFaultSd,   Mode::kFaultNet, Mode::kOff};
const Event kAllEvents[] = {Event::kBootOk,   Event::kSyncOk,
                            Event::kSyncFail, Event::kTick,
                            Event::kSampleOk, Event::kSensorErr,
                            Event::kWriteOk,  Event::kWriteErr,
                            Event::kNetUp,    Event::kNetDown,
                            Event::kPowerLoss, Event::kPowerRestored};

bool has_action(const std::vector<Action>& actions, Action a) {
  return std::find(actions.begin(), actions.end(), a) != actions.end();
}

}  // namespace

TEST_CASE("transition is total over every state, event and flag combination") {
  for (bool telemetry : {false, true}) {
    const StateMachineConfig cfg{telemetry, 3};
    for (Mode m : kAllModes) {
      for (int retries : {0, 1, 3}) {
        for (bool buf : {false, true}) {
          for (Event e : kAllEvents) {
            const DaqState s{m, retries, buf};
            const Transition t = transition(s, e, cfg);
            // Unlisted pairs are explicit no-ops: same state, no actions.
            if (!t.changed) {
              CHECK(t.next.mode == s.mode);
              CHECK(t.next.sd_retries == s.sd_retries);
              CHECK(t.next.buffer_only == s.buffer_only);
              CHECK(t.actions.empty());
            }
            CHECK(!mode_name(t.next.mode).empty());
          }
        }
      }
    }
  }
}

TEST_CASE("power loss preempts every powered mode") {
  const StateMachineConfig cfg{true, 3};
  for (Mode m : kAllModes) {
    if (m == Mode::kOff) continue;
    const Transition t = transition(DaqState{m, 2, true}, Event::kPowerLoss, cfg);
    CHECK(t.changed);
    CHECK(t.next.mode == Mode::kOff);
    CHECK(has_action(t.actions, Action::kHalt));
  }
  // Already off: no double-halt.
  const Transition t =
      transition(DaqState{Mode::kOff, 0, false}, Event::kPowerLoss, cfg);
  CHECK(!t.changed);
}

TEST_CASE("power restore boots through storage recovery") {
  const StateMachineConfig cfg{false, 3};
  const Transition t =
      transition(DaqState{Mode::kOff, 0, false}, Event::kPowerRestored, cfg);
  CHECK(t.next.mode == Mode::kInit);
  CHECK(has_action(t.actions, Action::kRecoverStorage));
}

TEST_CASE("sensor error detours through the fault mode and still logs") {
  StateMachine sm(StateMachineConfig{false, 3});
  sm.deliver(Event::kBootOk);
  sm.deliver(Event::kSyncOk);
  sm.deliver(Event::kTick);
  const auto actions = sm.deliver(Event::kSensorErr);
  // Pass-through: FAULT_SENSOR resolves to LOG, record appended flagged.
  CHECK(sm.state().mode == Mode::kLog);
  CHECK(has_action(actions, Action::kFlagSensorFault));
  CHECK(has_action(actions, Action::kAppendRecord));
}

TEST_CASE("write retries exhaust into buffer-only after N+1 failures") {
  StateMachine sm(StateMachineConfig{false, 3});
  sm.deliver(Event::kBootOk);
  sm.deliver(Event::kSyncOk);
  sm.deliver(Event::kTick);
  sm.deliver(Event::kSampleOk);
  REQUIRE(sm.state().mode == Mode::kLog);

  for (int i = 0; i < 3; ++i) {
    const auto actions = sm.deliver(Event::kWriteErr);
    CHECK(sm.state().mode == Mode::kFaultSd);
    CHECK(sm.state().sd_retries == i + 1);
    CHECK(has_action(actions, Action::kRetryWrite));
    CHECK(!sm.state().buffer_only);
  }
  const auto final_actions = sm.deliver(Event::kWriteErr);
  CHECK(has_action(final_actions, Action::kEnterBufferOnly));
  CHECK(sm.state().buffer_only);
  CHECK(sm.state().mode == Mode::kAcquire);
  CHECK(sm.state().sd_retries == 0);
}

TEST_CASE("a successful write clears the retry episode") {
  StateMachine sm(StateMachineConfig{false, 3});
  sm.deliver(Event::kBootOk);
  sm.deliver(Event::kSyncOk);
  sm.deliver(Event::kTick);
  sm.deliver(Event::kSampleOk);
  sm.deliver(Event::kWriteErr);
  CHECK(sm.state().sd_retries == 1);
  sm.deliver(Event::kWriteOk);
  CHECK(sm.state().sd_retries == 0);
  CHECK(sm.state().mode == Mode::kAcquire);
}

TEST_CASE("telemetry path engages only when enabled") {
  StateMachine off(StateMachineConfig{false, 3});
  off.deliver(Event::kBootOk);
  off.deliver(Event::kSyncOk);
  off.deliver(Event::kTick);
  off.deliver(Event::kSampleOk);
  off.deliver(Event::kWriteOk);
  CHECK(off.state().mode == Mode::kAcquire);

  StateMachine on(StateMachineConfig{true, 3});
  on.deliver(Event::kBootOk);
  on.deliver(Event::kSyncOk);
  on.deliver(Event::kTick);
  on.deliver(Event::kSampleOk);
  const auto actions = on.deliver(Event::kWriteOk);
  CHECK(on.state().mode == Mode::kTransmit);
  CHECK(has_action(actions, Action::kEnqueueTelemetry));
  CHECK(has_action(actions, Action::kTryTransmit));
}

TEST_CASE("network loss returns to acquisition without touching the log path") {
  StateMachine sm(StateMachineConfig{true, 3});
  sm.deliver(Event::kBootOk);
  sm.deliver(Event::kSyncOk);
  sm.deliver(Event::kTick);
  sm.deliver(Event::kSampleOk);
  sm.deliver(Event::kWriteOk);
  REQUIRE(sm.state().mode == Mode::kTransmit);
  const bool buffer_before = sm.state().buffer_only;
  sm.deliver(Event::kNetDown);
  // FAULT_NET is a pass-through observation point.
  CHECK(sm.state().mode == Mode::kAcquire);
  CHECK(sm.state().buffer_only == buffer_before);
  CHECK(sm.state().sd_retries == 0);
}

TEST_CASE("sync failure continues unsynced instead of blocking") {
  StateMachine sm(StateMachineConfig{false, 3});
  sm.deliver(Event::kBootOk);
  CHECK(sm.state().mode == Mode::kTimeSync);
  sm.deliver(Event::kSyncFail);
  CHECK(sm.state().mode == Mode::kAcquire);
}

TEST_CASE("observer sees every hop including pass-through resolution") {
  StateMachine sm(StateMachineConfig{false, 3});
  int hops = 0;
  Mode last_to = Mode::kInit;
  sm.set_observer([&](double, Mode, Event, Mode to,
                      const std::vector<Action>&) {
    ++hops;
    last_to = to;
  });
  sm.deliver(Event::kBootOk);
  sm.deliver(Event::kSyncOk);
  sm.deliver(Event::kTick);
  sm.deliver(Event::kSensorErr);  // two hops: ->FAULT_SENSOR, ->LOG
  CHECK(hops == 5);
  CHECK(last_to == Mode::kLog);
  CHECK(sm.transitions_taken() == 5);
}
