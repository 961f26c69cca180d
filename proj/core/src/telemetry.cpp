#include "winddaq/telemetry.hpp"

#include <algorithm>
#include <cmath>

#include "winddaq/storage.hpp"

namespace winddaq {

TelemetryQueue::TelemetryQueue(const TelemetryConfig& cfg,
                               uint64_t campaign_seed)
    : cfg_(cfg),
      topic_("winddaq/" + cfg.site_id + "/records"),
      jitter_(campaign_seed, RngStreamId::kTelemetryJitter) {}

void TelemetryQueue::enqueue(const Record& rec) {
  if (queue_.size() >= cfg_.queue_capacity) {
    queue_.pop_front();
    ++dropped_overflow_;
  }
  std::string row = serialize_record(rec);
  if (!row.empty() && row.back() == '\n') row.pop_back();
  queue_.push_back(TelemetryMessage{topic_, std::move(row), rec.ts});
  ++enqueued_;
}

double TelemetryQueue::backoff_delay_s(int failure_count) {
  const double exponent = std::min(failure_count - 1, 30);
  const double base = cfg_.backoff_base_s * std::pow(2.0, exponent);
  const double capped = std::min(base, cfg_.backoff_cap_s);
  return capped * (1.0 + cfg_.backoff_jitter_frac * jitter_.uniform(-1.0, 1.0));
}

TransmitResult TelemetryQueue::try_transmit(bool link_up, double now_s,
                                            double dt_s, Broker& broker) {
  TransmitResult out;

  // Rate budget accrues with time whether or not we get to send; cap at one
  // second's worth so an idle stretch cannot bank a burst.
  tokens_ = std::min(tokens_ + cfg_.rate_limit_per_s * dt_s,
                     std::max(cfg_.rate_limit_per_s, 1.0));

  if (queue_.empty()) return out;
  if (next_attempt_s_ && now_s < *next_attempt_s_) return out;  // backing off
  if (tokens_ < 1.0) return out;

  out.attempted = true;
  if (!link_up) {
    ++failures_;
    next_attempt_s_ = now_s + backoff_delay_s(failures_);
    return out;
  }

  while (!queue_.empty() && tokens_ >= 1.0) {
    if (!broker.deliver(queue_.front())) {
      ++failures_;
      next_attempt_s_ = now_s + backoff_delay_s(failures_);
      return out;
    }
    queue_.pop_front();
    tokens_ -= 1.0;
    ++sent_;
    ++out.sent;
  }
  failures_ = 0;
  next_attempt_s_.reset();
  out.link_ok = true;
  return out;
}

}  // namespace winddaq
