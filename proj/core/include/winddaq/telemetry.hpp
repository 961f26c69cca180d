#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "winddaq/config.hpp"
#include "winddaq/model.hpp"
#include "winddaq/rng.hpp"

namespace winddaq {

// Telemetry is strictly best-effort: it consumes copies of records after
// they are locally committed and must never be able to block or reorder the
// logging path. Loss here is acceptable and counted; loss in the log is not.

struct TelemetryMessage {
  std::string topic;
  std::string payload;  // one CSV record row (no newline)
  Timestamp ts;
};

// Delivery endpoint. The simulator's broker records what it accepts so tests
// can compare the uplinked stream against the local log.
class Broker {
 public:
  virtual ~Broker() = default;
  virtual bool deliver(const TelemetryMessage& msg) = 0;
};

// Accepts everything, keeps nothing. For campaigns where only the counters
// matter.
class NullBroker : public Broker {
 public:
  bool deliver(const TelemetryMessage&) override { return true; }
};

class TranscriptBroker : public Broker {
 public:
  bool deliver(const TelemetryMessage& msg) override {
    delivered_.push_back(msg);
    return true;
  }
  const std::vector<TelemetryMessage>& delivered() const { return delivered_; }

 private:
  std::vector<TelemetryMessage> delivered_;
};

struct TransmitResult {
  uint64_t sent = 0;
  bool attempted = false;   // a send slot was due this call
  bool link_ok = false;     // the attempt succeeded (link up, broker took it)
};

// Bounded FIFO with drop-oldest overflow, token-bucket rate limiting and
// exponential backoff with seeded jitter. All timing comes from the caller's
// clock; the queue never sleeps.
class TelemetryQueue {
 public:
  TelemetryQueue(const TelemetryConfig& cfg, uint64_t campaign_seed);

  void enqueue(const Record& rec);

  // One scheduler slice of length dt_s at time now_s. Sends as many queued
  // messages as rate tokens allow while the link cooperates; on failure
  // schedules the next attempt with exponential backoff.
  TransmitResult try_transmit(bool link_up, double now_s, double dt_s,
                              Broker& broker);

  // Deterministic backoff delay for the given consecutive failure count
  // (1-based): min(base * 2^(n-1), cap) +- jitter.
  double backoff_delay_s(int failure_count);

  uint64_t size() const { return queue_.size(); }
  uint64_t enqueued() const { return enqueued_; }
  uint64_t sent() const { return sent_; }
  uint64_t dropped_overflow() const { return dropped_overflow_; }
  int consecutive_failures() const { return failures_; }
  std::optional<double> next_attempt_s() const { return next_attempt_s_; }
  const std::string& topic() const { return topic_; }

 private:
  TelemetryConfig cfg_;
  std::string topic_;
  RngStream jitter_;
  std::deque<TelemetryMessage> queue_;
  double tokens_ = 0;  // token bucket, capped at one second of budget
  int failures_ = 0;
  std::optional<double> next_attempt_s_;
  uint64_t enqueued_ = 0;
  uint64_t sent_ = 0;
  uint64_t dropped_overflow_ = 0;
};

}  // namespace winddaq
