// Microbenchmarks for the hot paths: row serialization/parsing, CRC, batch
// flush, committed-scan throughput, and the per-tick acquisition cost. These
// are informational (no pass/fail); the acceptance battery owns the budgets.

#include <benchmark/benchmark.h>

#include <functional>
#include <string>
#include <vector>

#include "winddaq/acquisition.hpp"
#include "winddaq/storage.hpp"
#include "winddaq/timekeeping.hpp"

namespace {

using namespace winddaq;

Record sample_record(int64_t t) {
  Record r;
  r.ts = {t, 0};
  r.wind_speed_mps = 6.137;
  r.rotor_rpm = 137.4;
  r.rotor_omega_rad_s = 14.389;
  r.voltage_v = 24.71;
  r.current_a = 2.113;
  r.power_w = 52.21;
  r.temp_c = 14.6;
  r.pressure_pa = 101217.0;
  r.humidity_pct = 71.2;
  r.air_density_kg_m3 = 1.2214;
  r.cp = 0.2971;
  r.tsr = 2.391;
  r.flags = kFlagBetzExceeded;
  return r;
}

void BM_SerializeRecord(benchmark::State& state) {
  const Record rec = sample_record(1767225600);
  size_t bytes = 0;
  for (auto _ : state) {
    const std::string row = serialize_record(rec);
    bytes += row.size();
    benchmark::DoNotOptimize(row);
  }
  state.SetBytesProcessed(static_cast<int64_t>(bytes));
}
BENCHMARK(BM_SerializeRecord);

void BM_ParseRecord(benchmark::State& state) {
  const std::string row = serialize_record(sample_record(1767225600));
  for (auto _ : state) {
    RecordParseResult res = parse_record(row);
    benchmark::DoNotOptimize(res);
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(row.size()));
}
BENCHMARK(BM_ParseRecord);

void BM_Crc32_64KiB(benchmark::State& state) {
  const std::string data(64 * 1024, 'w');
  for (auto _ : state) {
    const uint32_t crc = crc32_bytes(data);
    benchmark::DoNotOptimize(crc);
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(data.size()));
}
BENCHMARK(BM_Crc32_64KiB);

// One flush of a 60-record batch (the default buffer cadence).
void BM_FlushBatch60(benchmark::State& state) {
  std::vector<Record> batch;
  for (int i = 0; i < 60; ++i) batch.push_back(sample_record(1767225600 + i));
  MemMedium medium;
  SegmentWriter writer(medium);
  uint64_t records = 0;
  for (auto _ : state) {
    const FlushOutcome out = writer.flush(batch);
    benchmark::DoNotOptimize(out.ok);
    records += out.records;
  }
  state.SetItemsProcessed(static_cast<int64_t>(records));
}
BENCHMARK(BM_FlushBatch60);

// Full committed scan of a day-scale segment (86,400 records).
void BM_ScanCommittedDay(benchmark::State& state) {
  MemMedium medium;
  {
    SegmentWriter writer(medium);
    std::vector<Record> batch;
    batch.reserve(240);
    for (int64_t t = 1767225600; t < 1767225600 + 86400; t += 240) {
      batch.clear();
      for (int64_t i = 0; i < 240; ++i) batch.push_back(sample_record(t + i));
      writer.flush(batch);
    }
  }
  uint64_t seen = 0;
  const std::function<void(const Record&)> sink = [&](const Record&) {
    ++seen;
  };
  for (auto _ : state) {
    const RecoverReport rep = scan_committed(medium, sink);
    benchmark::DoNotOptimize(rep.committed_records);
  }
  state.SetItemsProcessed(static_cast<int64_t>(seen));
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(medium.total_bytes()));
}
BENCHMARK(BM_ScanCommittedDay);

// Per-tick acquisition: pulse window, smoothing, derivation, validation.
void BM_AcquireTick(benchmark::State& state) {
  const Config cfg = default_config();
  AcquisitionPath path(cfg);
  ClockState clock = make_clock(cfg.clock);
  clock.synced = true;

  SensorFrame frame;
  frame.values = {6.1, 24.3, 2.1, 51.0, 14.8, 101300.0, 70.5};
  uint64_t ticks = 0;
  for (auto _ : state) {
    path.pulses().add(9);
    rtc_advance(clock, 1.0);
    Record rec = path.acquire_tick(frame, clock);
    benchmark::DoNotOptimize(rec);
    ++ticks;
  }
  state.SetItemsProcessed(static_cast<int64_t>(ticks));
}
BENCHMARK(BM_AcquireTick);

}  // namespace

BENCHMARK_MAIN();
