#include "winddaq/statemachine.hpp"

namespace winddaq {

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::kInit: return "INIT";
    case Mode::kTimeSync: return "TIME_SYNC";
    case Mode::kAcquire: return "ACQUIRE";
    case Mode::kLog: return "LOG";
    case Mode::kTransmit: return "TRANSMIT";
    case Mode::kFaultSensor: return "FAULT_SENSOR";
    case Mode::kFaultSd: return "FAULT_SD";
    case Mode::kFaultNet: return "FAULT_NET";
    case Mode::kOff: return "OFF";
  }
  return "?";
}

std::string_view event_name(Event e) {
  switch (e) {
    case Event::kBootOk: return "BOOT_OK";
    case Event::kSyncOk: return "SYNC_OK";
    case Event::kSyncFail: return "SYNC_FAIL";
    case Event::kTick: return "TICK";
    case Event::kSampleOk: return "SAMPLE_OK";
    case Event::kSensorErr: return "SENSOR_ERR";
    case Event::kWriteOk: return "WRITE_OK";
    case Event::kWriteErr: return "WRITE_ERR";
    case Event::kNetUp: return "NET_UP";
    case Event::kNetDown: return "NET_DOWN";
    case Event::kPowerLoss: return "POWER_LOSS";
    case Event::kPowerRestored: return "POWER_RESTORED";
  }
  return "?";
}

std::string_view action_name(Action a) {
  switch (a) {
    case Action::kRecoverStorage: return "RECOVER_STORAGE";
    case Action::kSyncClock: return "SYNC_CLOCK";
    case Action::kAcquireSample: return "ACQUIRE_SAMPLE";
    case Action::kFlagSensorFault: return "FLAG_SENSOR_FAULT";
    case Action::kAppendRecord: return "APPEND_RECORD";
    case Action::kRetryWrite: return "RETRY_WRITE";
    case Action::kEnterBufferOnly: return "ENTER_BUFFER_ONLY";
    case Action::kEnqueueTelemetry: return "ENQUEUE_TELEMETRY";
    case Action::kTryTransmit: return "TRY_TRANSMIT";
    case Action::kHalt: return "HALT";
  }
  return "?";
}

namespace {

Transition go(const DaqState& from, Mode to, std::vector<Action> actions) {
  Transition t;
  t.next = from;
  t.next.mode = to;
  t.actions = std::move(actions);
  t.changed = true;
  return t;
}

Transition no_op(const DaqState& state) {
  Transition t;
  t.next = state;
  return t;
}

// Successful log step: hand off to telemetry when enabled, otherwise straight
// back to acquisition. Clears any write-retry episode.
Transition after_write_ok(const DaqState& state, const StateMachineConfig& cfg) {
  Transition t = cfg.telemetry_enabled
                     ? go(state, Mode::kTransmit,
                          {Action::kEnqueueTelemetry, Action::kTryTransmit})
                     : go(state, Mode::kAcquire, {});
  t.next.sd_retries = 0;
  return t;
}

Transition after_write_err(const DaqState& state,
                           const StateMachineConfig& cfg) {
  Transition t;
  const int failures = state.sd_retries + 1;
  if (failures > cfg.sd_retry_max) {
    // Retries exhausted: storage is declared down. Keep acquiring; records
    // divert to the RAM ring until a remount succeeds.
    t = go(state, Mode::kAcquire, {Action::kEnterBufferOnly});
    t.next.buffer_only = true;
    t.next.sd_retries = 0;
  } else {
    t = go(state, Mode::kFaultSd, {Action::kRetryWrite});
    t.next.sd_retries = failures;
  }
  return t;
}

}  // namespace

Transition transition(const DaqState& state, Event event,
                      const StateMachineConfig& cfg) {
  // Power loss preempts everything except being already off.
  if (event == Event::kPowerLoss && state.mode != Mode::kOff) {
    Transition t = go(state, Mode::kOff, {Action::kHalt});
    t.next.sd_retries = 0;
    return t;
  }

  switch (state.mode) {
    case Mode::kInit:
      if (event == Event::kBootOk) {
        return go(state, Mode::kTimeSync, {Action::kSyncClock});
      }
      break;

    case Mode::kTimeSync:
      // Sync failure is flag-and-continue: acquisition must not wait on the
      // network; records carry CLOCK_UNSYNCED until a sync lands.
      if (event == Event::kSyncOk || event == Event::kSyncFail) {
        return go(state, Mode::kAcquire, {});
      }
      break;

    case Mode::kAcquire:
      if (event == Event::kTick) {
        return go(state, Mode::kAcquire, {Action::kAcquireSample});
      }
      if (event == Event::kSampleOk) {
        return go(state, Mode::kLog, {Action::kAppendRecord});
      }
      if (event == Event::kSensorErr) {
        return go(state, Mode::kFaultSensor, {Action::kFlagSensorFault});
      }
      break;

    case Mode::kLog:
      if (event == Event::kWriteOk) return after_write_ok(state, cfg);
      if (event == Event::kWriteErr) return after_write_err(state, cfg);
      break;

    case Mode::kFaultSd:
      if (event == Event::kWriteOk) return after_write_ok(state, cfg);
      if (event == Event::kWriteErr) return after_write_err(state, cfg);
      break;

    case Mode::kTransmit:
      if (event == Event::kNetUp) return go(state, Mode::kAcquire, {});
      if (event == Event::kNetDown) return go(state, Mode::kFaultNet, {});
      break;

    case Mode::kFaultSensor:
    case Mode::kFaultNet:
      // Transient observation points; deliver() resolves them immediately,
      // so no external event is ever handled here.
      break;

    case Mode::kOff:
      if (event == Event::kPowerRestored) {
        return go(state, Mode::kInit, {Action::kRecoverStorage});
      }
      break;
  }
  return no_op(state);
}

std::vector<Action> StateMachine::deliver(Event ev, double t) {
  Transition tr = transition(state_, ev, cfg_);
  std::vector<Action> actions = tr.actions;
  if (tr.changed) {
    ++transitions_;
    if (observer_) observer_(t, state_.mode, ev, tr.next.mode, tr.actions);
  }
  state_ = tr.next;

  // Resolve pass-through fault modes so the loop never stalls in them: a
  // sensor fault still logs its (flagged) record; a network fault returns
  // to acquisition with the record safely queued.
  while (state_.mode == Mode::kFaultSensor || state_.mode == Mode::kFaultNet) {
    const Mode from = state_.mode;
    std::vector<Action> hop_actions;
    Mode to;
    if (from == Mode::kFaultSensor) {
      to = Mode::kLog;
      hop_actions = {Action::kAppendRecord};
    } else {
      to = Mode::kAcquire;
    }
    ++transitions_;
    if (observer_) observer_(t, from, ev, to, hop_actions);
    state_.mode = to;
    actions.insert(actions.end(), hop_actions.begin(), hop_actions.end());
  }
  return actions;
}

}  // namespace winddaq
