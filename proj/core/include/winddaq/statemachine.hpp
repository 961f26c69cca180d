#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

namespace winddaq {

// ---------------------------------------------------------------------------
// Firmware operating modes. Faults are modes, not errors: a sensor failure,
// a lost SD mount or a dead uplink each degrade one path while the others
// keep running. Only power loss halts the loop.
// ---------------------------------------------------------------------------

enum class Mode {
  kInit,
  kTimeSync,
  kAcquire,
  kLog,
  kTransmit,
  kFaultSensor,
  kFaultSd,
  kFaultNet,
  kOff,
};
std::string_view mode_name(Mode m);

enum class Event {
  kBootOk,
  kSyncOk,
  kSyncFail,
  kTick,
  kSampleOk,
  kSensorErr,
  kWriteOk,
  kWriteErr,
  kNetUp,
  kNetDown,
  kPowerLoss,
  kPowerRestored,
};
std::string_view event_name(Event e);

// Side effects requested by a transition; the controller executes them.
enum class Action {
  kRecoverStorage,   // mount + repair the medium
  kSyncClock,        // attempt NTP
  kAcquireSample,    // run the acquisition path for this tick
  kFlagSensorFault,  // record carries SENSOR_FAULT; continue with last-good
  kAppendRecord,     // hand the record to the logging path
  kRetryWrite,       // re-attempt the failed flush
  kEnterBufferOnly,  // storage declared down; divert to the RAM ring
  kEnqueueTelemetry, // copy the record into the uplink queue
  kTryTransmit,      // drain the uplink queue as rate allows
  kHalt,             // power lost; stop the loop
};
std::string_view action_name(Action a);

struct StateMachineConfig {
  bool telemetry_enabled = false;
  int sd_retry_max = 3;
};

struct DaqState {
  Mode mode = Mode::kInit;
  int sd_retries = 0;      // consecutive WRITE_ERR count in this episode
  bool buffer_only = false;
};

struct Transition {
  DaqState next;
  std::vector<Action> actions;
  bool changed = false;  // false for no-op (unlisted) pairs
};

// Pure and total: defined for every (state, event) pair; unlisted pairs
// return the state unchanged with no actions.
Transition transition(const DaqState& state, Event event,
                      const StateMachineConfig& cfg);

// Wrapper that owns the current state, resolves pass-through modes
// (FAULT_SENSOR and FAULT_NET exist to be observed in the transition log,
// not to be waited in), and reports every hop to an optional observer.
class StateMachine {
 public:
  using Observer = std::function<void(double t, Mode from, Event ev, Mode to,
                                      const std::vector<Action>& actions)>;

  explicit StateMachine(const StateMachineConfig& cfg) : cfg_(cfg) {}

  // Deliver an event; returns every action requested, in order, including
  // those from pass-through resolution.
  std::vector<Action> deliver(Event ev, double t = 0);

  const DaqState& state() const { return state_; }
  void set_observer(Observer obs) { observer_ = std::move(obs); }
  void clear_buffer_only() { state_.buffer_only = false; }
  uint64_t transitions_taken() const { return transitions_; }

 private:
  StateMachineConfig cfg_;
  DaqState state_;
  Observer observer_;
  uint64_t transitions_ = 0;
};

}  // namespace winddaq
