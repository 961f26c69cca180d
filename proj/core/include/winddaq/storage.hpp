#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "winddaq/model.hpp"

namespace winddaq {

// ---------------------------------------------------------------------------
// On-disk format
//
// One CSV segment per UTC day, `winddaq_YYYY-MM-DD.csv`. Rows are appended in
// batches; each batch is followed by a CRC footer and a commit marker:
//
//   <row>\n ... <row>\n
//   # crc32=xxxxxxxx count=N\n
//   # committed\n
//
// The commit point is the complete marker line. Recovery truncates anything
// after the last marker, so a power cut at any byte boundary costs at most
// the unflushed tail and never corrupts earlier data. The CRC covers the
// batch's row bytes and turns silent corruption inside a committed region
// into a detected integrity failure (the segment is quarantined, not
// trusted).
// ---------------------------------------------------------------------------

extern const char* const kCsvHeader;  // column names, no newline

std::string segment_name(const CivilDate& date);
std::optional<CivilDate> date_from_segment_name(std::string_view name);

// Row text includes the trailing newline (it is the unit the CRC covers).
std::string serialize_record(const Record& rec);

struct RecordParseError {
  int column = -1;          // 0-based; -1 for row-level problems
  std::string column_name;  // empty for row-level problems
  std::string message;
};
struct RecordParseResult {
  std::optional<Record> record;
  RecordParseError error;
  bool ok() const { return record.has_value(); }
};
RecordParseResult parse_record(std::string_view row);

// ---------------------------------------------------------------------------
// Storage medium
// ---------------------------------------------------------------------------

enum class AppendStatus {
  kOk,
  kUnavailable,  // mount lost / medium rejecting writes; nothing written
  kCrashed,      // power died mid-write; a prefix of the bytes landed
};

class Medium {
 public:
  virtual ~Medium() = default;
  virtual bool available() const = 0;
  virtual std::vector<std::string> list() = 0;  // sorted segment names
  virtual std::optional<uint64_t> size(const std::string& name) = 0;
  virtual bool read(const std::string& name, std::string* out) = 0;
  virtual AppendStatus append(const std::string& name,
                              std::string_view bytes) = 0;
  virtual bool truncate(const std::string& name, uint64_t new_size) = 0;
};

// In-memory medium with fault hooks: availability toggling (SD mount loss)
// and byte-accurate crash injection (power cut mid-write). Used by the
// simulator and by the crash-safety tests.
class MemMedium : public Medium {
 public:
  bool available() const override { return available_ && !dead_; }
  std::vector<std::string> list() override;
  std::optional<uint64_t> size(const std::string& name) override;
  bool read(const std::string& name, std::string* out) override;
  AppendStatus append(const std::string& name, std::string_view bytes) override;
  bool truncate(const std::string& name, uint64_t new_size) override;

  void set_available(bool v) { available_ = v; }
  // After `bytes` more appended bytes the medium dies mid-write: the
  // crossing append keeps only its prefix and everything later fails until
  // reboot().
  void arm_crash_after(uint64_t bytes) { crash_after_ = bytes; }
  void disarm_crash() { crash_after_.reset(); }
  bool dead() const { return dead_; }
  void reboot() { dead_ = false; crash_after_.reset(); }

  uint64_t total_bytes() const;
  const std::map<std::string, std::string>& files() const { return files_; }
  std::map<std::string, std::string>& files_mutable() { return files_; }

 private:
  std::map<std::string, std::string> files_;
  bool available_ = true;
  bool dead_ = false;
  std::optional<uint64_t> crash_after_;
};

// Directory-backed medium for real runs. Keeps append handles open; no
// crash injection (the process itself is the crash domain here).
class DirMedium : public Medium {
 public:
  explicit DirMedium(std::filesystem::path root);
  ~DirMedium() override;
  bool available() const override { return true; }
  std::vector<std::string> list() override;
  std::optional<uint64_t> size(const std::string& name) override;
  bool read(const std::string& name, std::string* out) override;
  AppendStatus append(const std::string& name, std::string_view bytes) override;
  bool truncate(const std::string& name, uint64_t new_size) override;
  const std::filesystem::path& root() const { return root_; }

 private:
  void close_handle(const std::string& name);
  std::filesystem::path root_;
  std::map<std::string, std::FILE*> handles_;
};

// ---------------------------------------------------------------------------
// Segment writer (the firmware side)
// ---------------------------------------------------------------------------

struct FlushOutcome {
  bool ok = false;
  uint64_t records = 0;
  uint64_t bytes = 0;
  std::string error;
};

// Appends record batches under the commit protocol. Before first use of a
// segment it scans what is already there, truncating any uncommitted tail
// (self-healing after an unclean reboot). A segment whose committed region
// fails its CRC is never appended to; writes divert to a `_rN` sibling.
class SegmentWriter {
 public:
  explicit SegmentWriter(Medium& medium) : medium_(medium) {}

  // Batch may span a date boundary; it is split per segment. Rows must be in
  // stamp order.
  FlushOutcome flush(const std::vector<Record>& batch);

  uint64_t committed_records() const { return committed_records_; }
  uint64_t repair_truncations() const { return repair_truncations_; }
  uint64_t repair_bytes_discarded() const { return repair_bytes_; }

  // Test hook: omit the commit marker on subsequent flushes, simulating a
  // firmware that forgets the protocol's final step.
  void set_omit_commit_marker(bool v) { omit_commit_marker_ = v; }

 private:
  bool ensure_segment_ready(const std::string& name, std::string* use_name,
                            std::string* error);

  Medium& medium_;
  std::map<std::string, uint64_t> committed_size_;  // name -> byte offset
  std::map<std::string, std::string> redirect_;     // quarantined -> sibling
  uint64_t committed_records_ = 0;
  uint64_t repair_truncations_ = 0;
  uint64_t repair_bytes_ = 0;
  bool omit_commit_marker_ = false;
};

// ---------------------------------------------------------------------------
// Recovery / verification (the mount side)
// ---------------------------------------------------------------------------

struct SegmentScan {
  std::string name;
  uint64_t committed_size = 0;   // byte length of the trusted prefix
  uint64_t total_size = 0;
  uint64_t records = 0;
  uint64_t batches = 0;
  bool quarantined = false;      // committed region failed CRC/structure
  std::string error;
  std::optional<Timestamp> first_stamp;
  std::optional<Timestamp> last_stamp;
  // A CRC-valid batch can still hold a row the parser rejects (writer-side
  // defect, not disk rot). Such rows are skipped and located here; the rest
  // of the segment stays trusted.
  struct RowError {
    uint64_t line = 0;  // 1-based within the segment
    std::string message;
  };
  std::vector<RowError> row_errors;
};

// Scans one segment's bytes. If `sink` is nonnull it receives each record of
// every committed batch, in file order. Quarantined segments emit nothing.
SegmentScan scan_segment(std::string_view name, std::string_view data,
                         const std::function<void(const Record&)>* sink);

struct RecoverReport {
  uint64_t segments = 0;
  uint64_t quarantined_segments = 0;
  uint64_t committed_records = 0;
  uint64_t committed_batches = 0;
  uint64_t truncation_events = 0;  // segments that had an uncommitted tail
  uint64_t discarded_bytes = 0;
  std::optional<Timestamp> last_stamp;
  std::vector<std::string> notes;  // human-readable anomaly log
};

// Stream every committed record (in segment-name order, file order within a
// segment) into `sink`. Read-only.
RecoverReport scan_committed(Medium& medium,
                             const std::function<void(const Record&)>& sink);

// Mount-time recovery: scan, truncate uncommitted tails in place, report.
// Quarantined segments are left untouched as evidence.
RecoverReport recover_mount(Medium& medium);

struct RecoverResult {
  std::vector<Record> records;
  RecoverReport report;
};
// recover_mount plus materialized records; convenience for tests and small
// campaigns.
RecoverResult recover(Medium& medium);

struct VerifyReport {
  std::vector<SegmentScan> segments;
  bool all_ok = true;
  uint64_t records = 0;
};
VerifyReport verify(Medium& medium);

// ---------------------------------------------------------------------------
// RAM buffering between acquisition and the medium
// ---------------------------------------------------------------------------

// Double buffer: appends go to the active side under a short lock; flushing
// swaps sides and serializes outside the lock, so an acquisition tick never
// waits on the medium. A failed flush keeps its records staged for retry.
class LogBufferPair {
 public:
  explicit LogBufferPair(uint64_t capacity_per_side)
      : capacity_(capacity_per_side) {}

  bool append(const Record& rec);  // false if the active side is full
  uint64_t active_size() const;
  bool flush_pending() const;      // a failed flush is staged

  // Returns the records to write: the staged side if a retry is pending,
  // otherwise swaps and returns the previously active side. Empty result
  // means nothing to do.
  const std::vector<Record>& stage_for_flush();
  void mark_flushed();             // staged records are on the medium
  // A flush can land a prefix of the staged records before the medium goes
  // away (a batch per day boundary); drop exactly what was committed so the
  // retry cannot duplicate rows.
  void drop_staged_prefix(uint64_t n);
  std::vector<Record> take_all();  // drain both sides (buffer-only migration)

 private:
  mutable std::mutex mu_;
  std::vector<Record> active_;
  std::vector<Record> staged_;
  uint64_t capacity_;
};

// Bounded fallback ring for buffer-only operation (storage down): oldest
// records are dropped first once full, and every drop is counted.
class RamRing {
 public:
  explicit RamRing(uint64_t capacity) : capacity_(capacity) {}
  void push(const Record& rec);
  void push_all(const std::vector<Record>& recs);
  std::vector<Record> drain();
  uint64_t size() const { return ring_.size(); }
  uint64_t dropped() const { return dropped_; }

 private:
  std::deque<Record> ring_;
  uint64_t capacity_;
  uint64_t dropped_ = 0;
};

uint32_t crc32_bytes(std::string_view bytes);
uint32_t crc32_init();
uint32_t crc32_update(uint32_t crc, const void* data, size_t len);

}  // namespace winddaq
