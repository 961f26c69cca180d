#include "winddaq/storage.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "winddaq/rng.hpp"

using namespace winddaq;

namespace {

double rounded(RngStream& rng, double lo, double hi, double scale) {
  return std::round(rng.uniform(lo, hi) * scale) / scale;
}

// Random record whose fields are exactly representable at the column
// precisions, so serialization is lossless by construction.
Record random_record(RngStream& rng) {
  Record r;
  r.ts.t_utc_s = static_cast<int64_t>(rng.below(4102444800ull));  // < 2100
  r.ts.seq = static_cast<uint32_t>(rng.below(3));
  r.wind_speed_mps = rounded(rng, 0, 30, 100);
  r.rotor_rpm = rounded(rng, 0, 500, 100);
  r.rotor_omega_rad_s = rounded(rng, 0, 52, 10000);
  r.voltage_v = rounded(rng, 0, 36, 1000);
  r.current_a = rounded(rng, -15, 15, 1000);
  r.power_w = rounded(rng, -200, 2000, 10);
  r.temp_c = rounded(rng, -20, 60, 100);
  r.pressure_pa = rounded(rng, 80000, 110000, 10);
  r.humidity_pct = rounded(rng, 0, 100, 10);
  if (rng.uniform01() < 0.8) r.air_density_kg_m3 = rounded(rng, 0.9, 1.4, 10000);
  if (rng.uniform01() < 0.8) r.cp = rounded(rng, 0, 0.7, 10000);
  if (rng.uniform01() < 0.8) r.tsr = rounded(rng, 0, 6, 10000);
  r.flags = static_cast<uint32_t>(rng.below(kAllFlagsMask + 1));
  return r;
}

Record simple_record(int64_t t, uint32_t seq = 0) {
  Record r;
  r.ts = {t, seq};
  r.wind_speed_mps = 6.0;
  r.rotor_rpm = 60.0;
  r.rotor_omega_rad_s = 6.2832;
  r.voltage_v = 24.0;
  r.current_a = 2.0;
  r.power_w = 48.0;
  r.temp_c = 15.0;
  r.pressure_pa = 101325.0;
  r.humidity_pct = 70.0;
  r.air_density_kg_m3 = 1.225;
  r.cp = 0.3;
  r.tsr = 2.5;
  return r;
}

std::vector<Record> batch_of(int n, int64_t t0) {
  std::vector<Record> v;
  for (int i = 0; i < n; ++i) v.push_back(simple_record(t0 + i));
  return v;
}

}  // namespace

TEST_CASE("serialization round-trips ten thousand random records") {
  RngStream rng(99, RngStreamId::kTest);
  for (int i = 0; i < 10000; ++i) {
    const Record r = random_record(rng);
    const std::string row = serialize_record(r);
    CHECK(row.back() == '\n');
    const RecordParseResult back = parse_record(row);
    REQUIRE(back.ok());
    CHECK(*back.record == r);
  }
}

TEST_CASE("rows carry exactly the header's columns") {
  const std::string header(kCsvHeader);
  const size_t header_cols = std::count(header.begin(), header.end(), ',') + 1;
  CHECK(header_cols == 15);
  const std::string row = serialize_record(simple_record(1767225600));
  const size_t row_cols = std::count(row.begin(), row.end(), ',') + 1;
  CHECK(row_cols == header_cols);
  CHECK(header.substr(0, 13) == "timestamp_utc");
}

TEST_CASE("absent derived values serialize as empty fields") {
  Record r = simple_record(1767225600);
  r.air_density_kg_m3.reset();
  r.cp.reset();
  r.tsr.reset();
  const std::string row = serialize_record(r);
  CHECK(row.find(",,,") != std::string::npos);
  const RecordParseResult back = parse_record(row);
  REQUIRE(back.ok());
  CHECK(!back.record->air_density_kg_m3.has_value());
  CHECK(!back.record->cp.has_value());
  CHECK(!back.record->tsr.has_value());
}

TEST_CASE("truncated rows name their missing columns") {
  std::string row = serialize_record(simple_record(1767225600));
  row.pop_back();  // strip newline
  // Drop the last two fields (tsr, flags).
  row.resize(row.rfind(','));
  row.resize(row.rfind(','));
  const RecordParseResult r = parse_record(row);
  CHECK(!r.ok());
  CHECK(r.error.message.find("13") != std::string::npos);
  CHECK(r.error.message.find("tsr") != std::string::npos);
  CHECK(r.error.message.find("flags") != std::string::npos);
}

TEST_CASE("field-level parse errors carry column name and offender") {
  std::string row = serialize_record(simple_record(1767225600));
  const size_t at = row.find("6.00");
  row.replace(at, 4, "wxyz");
  const RecordParseResult r = parse_record(row);
  CHECK(!r.ok());
  CHECK(r.error.column == 2);
  CHECK(r.error.column_name == "wind_speed_mps");
  CHECK(r.error.message.find("wxyz") != std::string::npos);
  CHECK(!parse_record("").ok());
  // Flags above the defined mask are rejected, not truncated.
  std::string bad_flags = serialize_record(simple_record(1767225600));
  bad_flags.replace(bad_flags.rfind(",0\n"), 3, ",4096\n");
  CHECK(!parse_record(bad_flags).ok());
}

TEST_CASE("segment names encode the civil date") {
  CHECK(segment_name({2026, 1, 7}) == "winddaq_2026-01-07.csv");
  const auto d = date_from_segment_name("winddaq_2026-01-07.csv");
  REQUIRE(d.has_value());
  CHECK(d->year == 2026);
  CHECK(d->month == 1);
  CHECK(d->day == 7);
  CHECK(date_from_segment_name("winddaq_2026-01-07_r1.csv").has_value());
  CHECK(!date_from_segment_name("other.csv").has_value());
  CHECK(!date_from_segment_name("winddaq_2026-13-07.csv").has_value());
}

TEST_CASE("flush commits a batch under footer and marker") {
  MemMedium medium;
  SegmentWriter writer(medium);
  const FlushOutcome fo = writer.flush(batch_of(60, 1767225600));
  CHECK(fo.ok);
  CHECK(fo.records == 60);
  CHECK(writer.committed_records() == 60);

  REQUIRE(medium.files().size() == 1);
  const std::string& data = medium.files().begin()->second;
  // Layout: header, 60 rows, footer, marker.
  std::istringstream ss(data);
  std::string line;
  std::getline(ss, line);
  CHECK(line == kCsvHeader);
  int rows = 0;
  while (std::getline(ss, line)) {
    if (line.rfind("# crc32=", 0) == 0) {
      CHECK(line.find("count=60") != std::string::npos);
      std::getline(ss, line);
      CHECK(line == "# committed");
      break;
    }
    ++rows;
  }
  CHECK(rows == 60);

  const RecoverResult rec = recover(medium);
  CHECK(rec.records.size() == 60);
  CHECK(rec.report.committed_batches == 1);
  CHECK(rec.report.quarantined_segments == 0);
}

TEST_CASE("a batch spanning midnight splits per day segment") {
  MemMedium medium;
  SegmentWriter writer(medium);
  // 2026-01-01 ends at utc 1767312000.
  const FlushOutcome fo = writer.flush(batch_of(10, 1767312000 - 5));
  CHECK(fo.ok);
  CHECK(fo.records == 10);
  REQUIRE(medium.files().size() == 2);
  CHECK(medium.files().count("winddaq_2026-01-01.csv") == 1);
  CHECK(medium.files().count("winddaq_2026-01-02.csv") == 1);
  const RecoverResult rec = recover(medium);
  CHECK(rec.records.size() == 10);
  for (size_t i = 1; i < rec.records.size(); ++i) {
    CHECK(rec.records[i - 1].ts < rec.records[i].ts);
  }
}

TEST_CASE("recovery truncates an uncommitted tail exactly") {
  MemMedium medium;
  SegmentWriter writer(medium);
  writer.flush(batch_of(5, 1767225600));
  const std::string name = medium.files().begin()->first;
  const uint64_t committed_size = medium.files().at(name).size();

  // Unflushed tail: rows appended without footer/marker (torn flush).
  medium.append(name, serialize_record(simple_record(1767225700)));
  medium.append(name, "partial row without newline");

  const RecoverResult rec = recover(medium);
  CHECK(rec.records.size() == 5);
  CHECK(rec.report.truncation_events == 1);
  CHECK(rec.report.discarded_bytes > 0);
  CHECK(medium.files().at(name).size() == committed_size);  // repaired in place

  // Idempotent: a second recovery finds nothing left to do.
  const RecoverResult again = recover(medium);
  CHECK(again.report.truncation_events == 0);
  CHECK(again.records.size() == 5);
}

TEST_CASE("every byte boundary crash leaves the committed prefix intact") {
  // Reference run to learn the byte cost of one flush.
  MemMedium ref;
  SegmentWriter ref_writer(ref);
  ref_writer.flush(batch_of(5, 1767225600));
  const uint64_t first_flush_bytes = ref.total_bytes();
  ref_writer.flush(batch_of(5, 1767225700));
  const uint64_t second_flush_bytes = ref.total_bytes() - first_flush_bytes;

  for (uint64_t cut = 0; cut < second_flush_bytes; ++cut) {
    MemMedium medium;
    SegmentWriter writer(medium);
    CHECK(writer.flush(batch_of(5, 1767225600)).ok);
    medium.arm_crash_after(cut);
    const FlushOutcome fo = writer.flush(batch_of(5, 1767225700));
    const bool crashed = medium.dead();
    CHECK(crashed);
    CHECK(!fo.ok);

    medium.reboot();
    const RecoverResult rec = recover(medium);
    CHECK(rec.report.quarantined_segments == 0);
    // Prefix durability: exactly the first five records, byte-for-byte.
    REQUIRE(rec.records.size() == 5);
    for (int i = 0; i < 5; ++i) {
      CHECK(rec.records[i] == simple_record(1767225600 + i));
    }
  }
}

TEST_CASE("a flush whose final marker byte lands is committed") {
  // Boundary complement to the sweep: if power holds through the last byte
  // of the marker, recovery must keep the whole batch.
  MemMedium medium;
  SegmentWriter writer(medium);
  writer.flush(batch_of(5, 1767225600));
  const uint64_t before = medium.total_bytes();
  writer.flush(batch_of(5, 1767225700));
  const uint64_t flush_bytes = medium.total_bytes() - before;

  MemMedium medium2;
  SegmentWriter writer2(medium2);
  writer2.flush(batch_of(5, 1767225600));
  medium2.arm_crash_after(flush_bytes);  // budget covers the flush exactly
  const FlushOutcome fo = writer2.flush(batch_of(5, 1767225700));
  CHECK(fo.ok);
  CHECK(!medium2.dead());
  const RecoverResult rec = recover(medium2);
  CHECK(rec.records.size() == 10);
}

TEST_CASE("single bit flip in a committed batch quarantines the segment") {
  MemMedium medium;
  SegmentWriter writer(medium);
  writer.flush(batch_of(20, 1767225600));
  const std::string name = medium.files().begin()->first;
  std::string& data = medium.files_mutable().at(name);
  // Flip one payload bit inside a row (not in header or footer).
  const size_t target = data.find("6.00");
  REQUIRE(target != std::string::npos);
  data[target] ^= 0x01;

  const VerifyReport vr = verify(medium);
  CHECK(!vr.all_ok);
  const RecoverResult rec = recover(medium);
  CHECK(rec.report.quarantined_segments == 1);
  CHECK(rec.records.empty());  // nothing trusted from the bad segment
}

TEST_CASE("writes divert to a sibling when the segment is quarantined") {
  MemMedium medium;
  {
    SegmentWriter writer(medium);
    writer.flush(batch_of(5, 1767225600));
  }
  const std::string name = medium.files().begin()->first;
  std::string& data = medium.files_mutable().at(name);
  data[data.find("6.00")] ^= 0x01;

  SegmentWriter writer2(medium);
  const FlushOutcome fo = writer2.flush(batch_of(5, 1767225700));
  CHECK(fo.ok);
  REQUIRE(medium.files().size() == 2);
  CHECK(medium.files().count("winddaq_2026-01-01_r1.csv") == 1);

  // The quarantined original is preserved as evidence; the sibling holds the
  // new records.
  const RecoverResult rec = recover(medium);
  CHECK(rec.report.quarantined_segments == 1);
  CHECK(rec.records.size() == 5);
  CHECK(rec.records[0].ts.t_utc_s == 1767225700);
}

TEST_CASE("a writer that skips the commit marker commits nothing") {
  MemMedium medium;
  SegmentWriter writer(medium);
  writer.set_omit_commit_marker(true);
  const FlushOutcome fo = writer.flush(batch_of(30, 1767225600));
  CHECK(fo.records == 30);  // writer believes it wrote them
  const RecoverResult rec = recover(medium);
  CHECK(rec.records.empty());  // nothing is trusted without the marker
  CHECK(rec.report.truncation_events == 1);
}

TEST_CASE("unparseable row inside a valid batch is skipped and located") {
  MemMedium medium;
  SegmentWriter writer(medium);
  // Handcraft a batch whose CRC covers a malformed row: the writer itself
  // was broken, not the disk.
  const std::string good1 = serialize_record(simple_record(1767225600));
  const std::string bad = "this is not a record\n";
  const std::string good2 = serialize_record(simple_record(1767225601));
  const std::string payload = good1 + bad + good2;
  char footer[64];
  std::snprintf(footer, sizeof(footer), "# crc32=%08x count=3\n",
                crc32_bytes(payload));
  const std::string name = "winddaq_2026-01-01.csv";
  medium.append(name, std::string(kCsvHeader) + "\n");
  medium.append(name, payload);
  medium.append(name, footer);
  medium.append(name, "# committed\n");

  std::string data;
  medium.read(name, &data);
  const SegmentScan scan = scan_segment(name, data, nullptr);
  CHECK(!scan.quarantined);
  CHECK(scan.records == 2);
  REQUIRE(scan.row_errors.size() == 1);
  CHECK(scan.row_errors[0].line == 3);  // header is line 1

  const RecoverResult rec = recover(medium);
  CHECK(rec.records.size() == 2);
  CHECK(rec.report.quarantined_segments == 0);
}

TEST_CASE("empty medium recovers and verifies clean") {
  MemMedium medium;
  const RecoverResult rec = recover(medium);
  CHECK(rec.records.empty());
  CHECK(rec.report.segments == 0);
  const VerifyReport vr = verify(medium);
  CHECK(vr.all_ok);
  CHECK(vr.records == 0);
}

TEST_CASE("verify passes freshly flushed segments") {
  MemMedium medium;
  SegmentWriter writer(medium);
  writer.flush(batch_of(10, 1767225600));
  writer.flush(batch_of(10, 1767312000));  // next day
  const VerifyReport vr = verify(medium);
  CHECK(vr.all_ok);
  CHECK(vr.records == 20);
  CHECK(vr.segments.size() == 2);
}

TEST_CASE("mem medium crash injection dies mid-append until reboot") {
  MemMedium m;
  m.arm_crash_after(10);
  CHECK(m.append("f.csv", "0123456789ABCDEF") == AppendStatus::kCrashed);
  CHECK(m.files().at("f.csv") == "0123456789");  // prefix landed
  CHECK(m.dead());
  CHECK(!m.available());
  CHECK(m.append("f.csv", "more") == AppendStatus::kUnavailable);
  m.reboot();
  CHECK(m.available());
  CHECK(m.append("f.csv", "more") == AppendStatus::kOk);
}

TEST_CASE("unavailable medium rejects writes without data loss") {
  MemMedium m;
  m.set_available(false);
  CHECK(m.append("f.csv", "data") == AppendStatus::kUnavailable);
  CHECK(m.files().empty());
  m.set_available(true);
  SegmentWriter w(m);
  m.set_available(false);
  const FlushOutcome fo = w.flush(batch_of(5, 1767225600));
  CHECK(!fo.ok);
  CHECK(fo.records == 0);
  CHECK(w.committed_records() == 0);
}

TEST_CASE("log buffer pair stages, retries and drops exactly what landed") {
  LogBufferPair buf(4);
  CHECK(buf.append(simple_record(100)));
  CHECK(buf.append(simple_record(101)));
  CHECK(buf.active_size() == 2);
  CHECK(!buf.flush_pending());

  const std::vector<Record>& staged = buf.stage_for_flush();
  CHECK(staged.size() == 2);
  // New appends land on the other side while a flush is in flight.
  CHECK(buf.append(simple_record(102)));
  CHECK(buf.active_size() == 1);

  // Flush failed: records stay staged for retry.
  SUBCASE("retry path preserves order") {
    const std::vector<Record>& retry = buf.stage_for_flush();
    REQUIRE(retry.size() == 2);
    CHECK(retry[0].ts.t_utc_s == 100);
    buf.mark_flushed();
    const std::vector<Record>& next = buf.stage_for_flush();
    REQUIRE(next.size() == 1);
    CHECK(next[0].ts.t_utc_s == 102);
  }

  SUBCASE("partial landing drops only the committed prefix") {
    buf.drop_staged_prefix(1);
    const std::vector<Record>& retry = buf.stage_for_flush();
    REQUIRE(retry.size() == 1);
    CHECK(retry[0].ts.t_utc_s == 101);
  }

  SUBCASE("take_all drains both sides in order") {
    const std::vector<Record> all = buf.take_all();
    REQUIRE(all.size() == 3);
    CHECK(all[0].ts.t_utc_s == 100);
    CHECK(all[2].ts.t_utc_s == 102);
    CHECK(buf.active_size() == 0);
    CHECK(!buf.flush_pending());
  }
}

TEST_CASE("log buffer refuses appends past capacity") {
  LogBufferPair buf(3);
  CHECK(buf.append(simple_record(1)));
  CHECK(buf.append(simple_record(2)));
  CHECK(buf.append(simple_record(3)));
  CHECK(!buf.append(simple_record(4)));  // full: caller must flush
}

TEST_CASE("ram ring drops oldest first and counts every drop") {
  RamRing ring(3);
  for (int i = 0; i < 5; ++i) ring.push(simple_record(100 + i));
  CHECK(ring.size() == 3);
  CHECK(ring.dropped() == 2);
  const std::vector<Record> out = ring.drain();
  REQUIRE(out.size() == 3);
  CHECK(out[0].ts.t_utc_s == 102);  // 100 and 101 were sacrificed
  CHECK(out[2].ts.t_utc_s == 104);
  CHECK(ring.size() == 0);
}

TEST_CASE("crc32 matches the zlib reference values") {
  // Published check value for the IEEE polynomial.
  CHECK(crc32_bytes("123456789") == 0xCBF43926u);
  CHECK(crc32_bytes("") == 0x00000000u);
  // Incremental equals one-shot.
  uint32_t crc = crc32_init();
  crc = crc32_update(crc, "1234", 4);
  crc = crc32_update(crc, "56789", 5);
  CHECK(crc == 0xCBF43926u);
}

TEST_CASE("dir medium round-trips through the filesystem") {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("winddaq_test_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  {
    DirMedium m(dir);
    SegmentWriter w(m);
    CHECK(w.flush(batch_of(10, 1767225600)).ok);
    CHECK(m.list().size() == 1);
  }
  {
    DirMedium m(dir);
    const RecoverResult rec = recover(m);
    CHECK(rec.records.size() == 10);
    std::string data;
    CHECK(m.read("winddaq_2026-01-01.csv", &data));
    CHECK(data.find("# committed") != std::string::npos);
    CHECK(m.size("winddaq_2026-01-01.csv").value() == data.size());
    CHECK(!m.read("missing.csv", &data));
  }
  std::filesystem::remove_all(dir);
}
