#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>

#include "winddaq/config.hpp"
#include "winddaq/controller.hpp"
#include "winddaq/sim.hpp"
#include "winddaq/storage.hpp"
#include "winddaq/telemetry.hpp"

namespace winddaq {

// A campaign is one simulated deployment: environment truth, the turbine,
// the sensor chain, a fault schedule, and however many firmware boots the
// power profile forces. Identical (config, schedule, seed) triples produce
// byte-identical log segments.

struct CampaignOptions {
  Config config;
  FaultSchedule faults;
  int64_t duration_s = 600;
  uint64_t seed = 1;
  // Pacing: 0 runs as fast as possible; otherwise logical seconds per wall
  // second (1 = true real time).
  double accel = 0;
  // Commissioning sweep: walk the load controller's lambda target instead of
  // holding the curve optimum.
  std::optional<LambdaSweep> sweep;
};

struct TruthSample {
  double t_s = 0;
  EnvState env;
  TurbineTruth turbine;
  bool powered = true;
};

struct CampaignSinks {
  std::ostream* transitions = nullptr;
  std::ostream* events = nullptr;
  std::ostream* truth_csv = nullptr;
  std::ostream* telemetry_transcript = nullptr;
  std::function<void(const TruthSample&)> truth_cb;
};

struct CampaignResult {
  uint64_t ticks_expected = 0;
  uint64_t ticks_run = 0;
  uint64_t ticks_off = 0;        // unpowered (outage beyond battery, maintenance)
  uint64_t missed_deadlines = 0; // paced mode: ticks that overran their slot
  uint64_t boots = 0;
  uint64_t records_committed = 0;
  double completeness = 0;       // committed / expected
  ControllerStats totals;        // accumulated across boots
};

extern const char* const kTruthCsvHeader;

CampaignResult run_campaign(const CampaignOptions& opts, Medium& medium,
                            Broker& broker, const CampaignSinks& sinks = {});

// Flat key=value summary, stable across runs with equal inputs.
std::string campaign_summary(const CampaignOptions& opts,
                             const CampaignResult& res);

void accumulate(ControllerStats& into, const ControllerStats& s);

}  // namespace winddaq
