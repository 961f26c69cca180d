#pragma once

#include <cstdint>
#include <random>

namespace winddaq {

// Every stochastic consumer in a campaign pulls from its own stream so that
// enabling/disabling one subsystem (say, telemetry) cannot shift the draws
// seen by another. Stream ids are part of the reproducibility contract:
// renumbering them changes campaign output for a given seed.
enum class RngStreamId : uint64_t {
  kEnvWind = 1,
  kEnvThermal = 2,
  kSensorWind = 3,
  kSensorVoltage = 4,
  kSensorCurrent = 5,
  kSensorPower = 6,
  kSensorTemp = 7,
  kSensorPressure = 8,
  kSensorHumidity = 9,
  kInvalidInjection = 10,
  kTelemetryJitter = 11,
  kCrashPoints = 12,
  kTest = 99,
};

// splitmix64 of (campaign_seed, stream_id); decorrelates nearby seeds.
uint64_t mix_seed(uint64_t campaign_seed, uint64_t stream_id);

// Deterministic across platforms: mt19937_64 output is fixed by the
// standard, and the uniform/normal mappings below are our own (the
// distributions in <random> are implementation-defined, which would break
// cross-toolchain reproducibility of logged data).
class RngStream {
 public:
  explicit RngStream(uint64_t raw_seed) : gen_(raw_seed) {}
  RngStream(uint64_t campaign_seed, RngStreamId id)
      : gen_(mix_seed(campaign_seed, static_cast<uint64_t>(id))) {}

  uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01();
  double uniform(double lo, double hi);

  // Unbiased integer on [0, n); n > 0.
  uint64_t below(uint64_t n);

  // Standard normal via Box-Muller (polar form avoided to keep the draw
  // count per call fixed at two uniforms per pair).
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace winddaq
