#include "winddaq/storage.hpp"

#include <zlib.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace winddaq {

const char* const kCsvHeader =
    "timestamp_utc,seq,wind_speed_mps,rotor_rpm,rotor_omega_rad_s,voltage_v,"
    "current_a,power_w,temp_c,pressure_pa,humidity_pct,air_density_kg_m3,cp,"
    "tsr,flags";

namespace {

constexpr const char* kCommitMarker = "# committed";
constexpr const char* kFooterPrefix = "# crc32=";

constexpr std::array<const char*, 15> kColumnNames = {
    "timestamp_utc", "seq",       "wind_speed_mps", "rotor_rpm",
    "rotor_omega_rad_s", "voltage_v", "current_a",  "power_w",
    "temp_c",        "pressure_pa", "humidity_pct", "air_density_kg_m3",
    "cp",            "tsr",       "flags"};

}  // namespace

uint32_t crc32_init() { return static_cast<uint32_t>(::crc32(0L, Z_NULL, 0)); }

uint32_t crc32_update(uint32_t crc, const void* data, size_t len) {
  return static_cast<uint32_t>(::crc32(
      crc, reinterpret_cast<const Bytef*>(data), static_cast<uInt>(len)));
}

uint32_t crc32_bytes(std::string_view bytes) {
  return crc32_update(crc32_init(), bytes.data(), bytes.size());
}

std::string segment_name(const CivilDate& date) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "winddaq_%04d-%02u-%02u.csv", date.year,
                date.month, date.day);
  return buf;
}

std::optional<CivilDate> date_from_segment_name(std::string_view name) {
  // winddaq_YYYY-MM-DD.csv, optionally with an _rN suffix before .csv.
  if (name.size() < 22 || name.substr(0, 8) != "winddaq_") return std::nullopt;
  const std::string_view d = name.substr(8, 10);
  if (d[4] != '-' || d[7] != '-') return std::nullopt;
  CivilDate out;
  auto num = [&](int at, int len, auto* slot) {
    int v = 0;
    for (int i = at; i < at + len; ++i) {
      if (d[i] < '0' || d[i] > '9') return false;
      v = v * 10 + (d[i] - '0');
    }
    *slot = v;
    return true;
  };
  int y, m, dd;
  if (!num(0, 4, &y) || !num(5, 2, &m) || !num(8, 2, &dd)) return std::nullopt;
  if (m < 1 || m > 12 || dd < 1 || dd > 31) return std::nullopt;
  out.year = y;
  out.month = static_cast<unsigned>(m);
  out.day = static_cast<unsigned>(dd);
  return out;
}

// --- record serialization ------------------------------------------------------

std::string serialize_record(const Record& r) {
  char rho[32] = "", cp[32] = "", tsr[32] = "";
  if (r.air_density_kg_m3) std::snprintf(rho, sizeof(rho), "%.4f", *r.air_density_kg_m3);
  if (r.cp) std::snprintf(cp, sizeof(cp), "%.4f", *r.cp);
  if (r.tsr) std::snprintf(tsr, sizeof(tsr), "%.4f", *r.tsr);
  char buf[352];
  std::snprintf(buf, sizeof(buf),
                "%s,%u,%.2f,%.2f,%.4f,%.3f,%.3f,%.1f,%.2f,%.1f,%.1f,%s,%s,%s,%u\n",
                iso8601_utc(r.ts.t_utc_s).c_str(), r.ts.seq, r.wind_speed_mps,
                r.rotor_rpm, r.rotor_omega_rad_s, r.voltage_v, r.current_a,
                r.power_w, r.temp_c, r.pressure_pa, r.humidity_pct, rho, cp,
                tsr, r.flags);
  return buf;
}

namespace {

bool parse_double_field(std::string_view f, double* out) {
  if (f.empty()) return false;
  const std::string s(f);
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(x)) return false;
  *out = x;
  return true;
}

bool parse_u32_field(std::string_view f, uint32_t* out) {
  if (f.empty() || f.size() > 10) return false;
  uint64_t v = 0;
  for (char c : f) {
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  if (v > UINT32_MAX) return false;
  *out = static_cast<uint32_t>(v);
  return true;
}

}  // namespace

RecordParseResult parse_record(std::string_view row) {
  RecordParseResult out;
  while (!row.empty() && (row.back() == '\n' || row.back() == '\r')) {
    row.remove_suffix(1);
  }

  std::array<std::string_view, 15> fields;
  size_t n = 0, pos = 0;
  while (true) {
    const size_t comma = row.find(',', pos);
    const std::string_view f =
        comma == std::string_view::npos ? row.substr(pos)
                                        : row.substr(pos, comma - pos);
    if (n < fields.size()) fields[n] = f;
    ++n;
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (n != 15) {
    std::string msg = "expected 15 columns, got " + std::to_string(n);
    if (n < 15) {
      msg += " (missing";
      for (size_t i = n; i < kColumnNames.size(); ++i) {
        msg += i == n ? " " : ",";
        msg += kColumnNames[i];
      }
      msg += ")";
    }
    out.error = {-1, "", msg};
    return out;
  }

  Record rec;
  auto fail = [&](int col, const std::string& why) {
    out.error = {col, kColumnNames[col], why + ": `" + std::string(fields[col]) + "`"};
  };

  if (auto t = parse_iso8601_utc(fields[0])) {
    rec.ts.t_utc_s = *t;
  } else {
    fail(0, "bad timestamp");
    return out;
  }
  if (!parse_u32_field(fields[1], &rec.ts.seq)) {
    fail(1, "bad sequence number");
    return out;
  }

  double* const numeric[] = {&rec.wind_speed_mps, &rec.rotor_rpm,
                             &rec.rotor_omega_rad_s, &rec.voltage_v,
                             &rec.current_a, &rec.power_w, &rec.temp_c,
                             &rec.pressure_pa, &rec.humidity_pct};
  for (int i = 0; i < 9; ++i) {
    if (!parse_double_field(fields[2 + i], numeric[i])) {
      fail(2 + i, "bad number");
      return out;
    }
  }

  std::optional<double>* const derived[] = {&rec.air_density_kg_m3, &rec.cp,
                                            &rec.tsr};
  for (int i = 0; i < 3; ++i) {
    if (fields[11 + i].empty()) continue;  // absent derived value
    double x;
    if (!parse_double_field(fields[11 + i], &x)) {
      fail(11 + i, "bad number");
      return out;
    }
    *derived[i] = x;
  }

  if (!parse_u32_field(fields[14], &rec.flags) || rec.flags > kAllFlagsMask) {
    fail(14, "bad flag mask");
    return out;
  }
  out.record = rec;
  return out;
}

// --- MemMedium -------------------------------------------------------------------

std::vector<std::string> MemMedium::list() {
  std::vector<std::string> out;
  for (const auto& [k, _] : files_) out.push_back(k);
  return out;
}

std::optional<uint64_t> MemMedium::size(const std::string& name) {
  const auto it = files_.find(name);
  if (it == files_.end()) return std::nullopt;
  return it->second.size();
}

bool MemMedium::read(const std::string& name, std::string* out) {
  if (!available()) return false;
  const auto it = files_.find(name);
  if (it == files_.end()) return false;
  *out = it->second;
  return true;
}

AppendStatus MemMedium::append(const std::string& name,
                               std::string_view bytes) {
  if (!available()) return AppendStatus::kUnavailable;
  if (crash_after_) {
    if (*crash_after_ < bytes.size()) {
      // Power dies mid-write: a prefix lands, then the device is gone.
      files_[name].append(bytes.substr(0, *crash_after_));
      crash_after_.reset();
      dead_ = true;
      return AppendStatus::kCrashed;
    }
    *crash_after_ -= bytes.size();
  }
  files_[name].append(bytes);
  return AppendStatus::kOk;
}

bool MemMedium::truncate(const std::string& name, uint64_t new_size) {
  if (!available()) return false;
  const auto it = files_.find(name);
  if (it == files_.end()) return false;
  if (new_size < it->second.size()) it->second.resize(new_size);
  return true;
}

uint64_t MemMedium::total_bytes() const {
  uint64_t n = 0;
  for (const auto& [_, v] : files_) n += v.size();
  return n;
}

// --- DirMedium -------------------------------------------------------------------

DirMedium::DirMedium(std::filesystem::path root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_);
}

DirMedium::~DirMedium() {
  for (auto& [_, f] : handles_) {
    if (f) std::fclose(f);
  }
}

void DirMedium::close_handle(const std::string& name) {
  const auto it = handles_.find(name);
  if (it != handles_.end()) {
    if (it->second) std::fclose(it->second);
    handles_.erase(it);
  }
}

std::vector<std::string> DirMedium::list() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(root_)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") {
      out.push_back(e.path().filename().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<uint64_t> DirMedium::size(const std::string& name) {
  const auto it = handles_.find(name);
  if (it != handles_.end() && it->second) std::fflush(it->second);
  std::error_code ec;
  const auto n = std::filesystem::file_size(root_ / name, ec);
  if (ec) return std::nullopt;
  return n;
}

bool DirMedium::read(const std::string& name, std::string* out) {
  const auto it = handles_.find(name);
  if (it != handles_.end() && it->second) std::fflush(it->second);
  std::ifstream in(root_ / name, std::ios::binary);
  if (!in) return false;
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  *out = std::move(data);
  return true;
}

AppendStatus DirMedium::append(const std::string& name,
                               std::string_view bytes) {
  std::FILE*& f = handles_[name];
  if (!f) {
    f = std::fopen((root_ / name).c_str(), "ab");
    if (!f) return AppendStatus::kUnavailable;
  }
  if (std::fwrite(bytes.data(), 1, bytes.size(), f) != bytes.size()) {
    return AppendStatus::kUnavailable;
  }
  std::fflush(f);
  return AppendStatus::kOk;
}

bool DirMedium::truncate(const std::string& name, uint64_t new_size) {
  close_handle(name);
  std::error_code ec;
  std::filesystem::resize_file(root_ / name, new_size, ec);
  return !ec;
}

// --- segment scanning --------------------------------------------------------------

namespace {

struct FooterInfo {
  uint32_t crc = 0;
  uint64_t count = 0;
};

bool parse_footer(std::string_view line, FooterInfo* out) {
  if (line.size() > 63) return false;
  char buf[64];
  std::memcpy(buf, line.data(), line.size());
  buf[line.size()] = '\0';
  unsigned crc = 0;
  unsigned long long count = 0;
  char extra = 0;
  if (std::sscanf(buf, "# crc32=%8x count=%llu%c", &crc, &count, &extra) != 2) {
    return false;
  }
  out->crc = crc;
  out->count = count;
  return true;
}

SegmentScan run_scan(std::string_view name, std::string_view data,
                     const std::function<void(const Record&)>* sink) {
  SegmentScan scan;
  scan.name = std::string(name);
  scan.total_size = data.size();

  size_t pos = 0;
  uint64_t line_no = 0;
  auto next_line = [&](std::string_view* line, size_t* start) -> bool {
    const size_t nl = data.find('\n', pos);
    if (nl == std::string_view::npos) return false;  // incomplete tail line
    *start = pos;
    *line = data.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    return true;
  };

  std::string_view line;
  size_t line_start = 0;
  if (!next_line(&line, &line_start)) {
    return scan;  // empty file or partial header: nothing trusted
  }
  if (line != kCsvHeader) {
    scan.quarantined = true;
    scan.error = "unrecognized header";
    return scan;
  }
  scan.committed_size = pos;

  std::vector<std::pair<std::string_view, uint64_t>> pending;
  size_t batch_start = pos;
  bool after_footer = false;
  FooterInfo footer;
  size_t footer_start = 0;

  while (next_line(&line, &line_start)) {
    if (after_footer) {
      if (line != kCommitMarker) break;  // torn between footer and marker
      // Commit point: validate the batch the footer claims.
      const std::string_view payload =
          data.substr(batch_start, footer_start - batch_start);
      if (crc32_bytes(payload) != footer.crc) {
        scan.quarantined = true;
        scan.error = "crc mismatch in committed batch";
        return scan;
      }
      if (pending.size() != footer.count) {
        scan.quarantined = true;
        scan.error = "row count mismatch in committed batch";
        return scan;
      }
      for (const auto& [row, row_line] : pending) {
        RecordParseResult r = parse_record(row);
        if (!r.ok()) {
          // The CRC proves these bytes are what the writer flushed, so a
          // parse failure is the writer's defect, confined to this row.
          scan.row_errors.push_back({row_line, r.error.message});
          continue;
        }
        if (!scan.first_stamp) scan.first_stamp = r.record->ts;
        scan.last_stamp = r.record->ts;
        ++scan.records;
        if (sink) (*sink)(*r.record);
      }
      ++scan.batches;
      pending.clear();
      after_footer = false;
      scan.committed_size = pos;
      batch_start = pos;
      continue;
    }
    if (line.substr(0, std::strlen(kFooterPrefix)) == kFooterPrefix) {
      if (!parse_footer(line, &footer)) break;  // garbage tail
      after_footer = true;
      footer_start = line_start;
      continue;
    }
    if (!line.empty() && line.front() == '#') break;  // stray comment: tail
    pending.emplace_back(line, line_no);
  }
  return scan;
}

}  // namespace

SegmentScan scan_segment(std::string_view name, std::string_view data,
                         const std::function<void(const Record&)>* sink) {
  // Validate fully before emitting anything: a CRC failure in a later batch
  // quarantines the whole segment, so no record from it may be surfaced.
  SegmentScan first = run_scan(name, data, nullptr);
  if (!sink || first.quarantined || first.records == 0) return first;
  return run_scan(name, data, sink);
}

// --- recovery / verification ---------------------------------------------------------

namespace {

RecoverReport scan_all(Medium& medium,
                       const std::function<void(const Record&)>* sink,
                       bool repair) {
  RecoverReport rep;
  for (const std::string& name : medium.list()) {
    std::string data;
    if (!medium.read(name, &data)) {
      rep.notes.push_back(name + ": unreadable");
      continue;
    }
    ++rep.segments;
    const SegmentScan scan = scan_segment(name, data, sink);
    if (scan.quarantined) {
      ++rep.quarantined_segments;
      rep.notes.push_back(name + ": quarantined (" + scan.error + ")");
      continue;
    }
    rep.committed_records += scan.records;
    rep.committed_batches += scan.batches;
    for (const auto& re : scan.row_errors) {
      rep.notes.push_back(name + ":" + std::to_string(re.line) +
                          ": skipped unparseable row (" + re.message + ")");
    }
    if (scan.last_stamp &&
        (!rep.last_stamp || *rep.last_stamp < *scan.last_stamp)) {
      rep.last_stamp = scan.last_stamp;
    }
    if (scan.total_size > scan.committed_size) {
      ++rep.truncation_events;
      rep.discarded_bytes += scan.total_size - scan.committed_size;
      rep.notes.push_back(
          name + ": discarded " +
          std::to_string(scan.total_size - scan.committed_size) +
          " uncommitted tail bytes");
      if (repair) medium.truncate(name, scan.committed_size);
    }
  }
  return rep;
}

}  // namespace

RecoverReport scan_committed(Medium& medium,
                             const std::function<void(const Record&)>& sink) {
  return scan_all(medium, &sink, /*repair=*/false);
}

RecoverReport recover_mount(Medium& medium) {
  return scan_all(medium, nullptr, /*repair=*/true);
}

RecoverResult recover(Medium& medium) {
  RecoverResult out;
  out.report = recover_mount(medium);
  const std::function<void(const Record&)> sink =
      [&](const Record& r) { out.records.push_back(r); };
  scan_all(medium, &sink, /*repair=*/false);
  return out;
}

VerifyReport verify(Medium& medium) {
  VerifyReport rep;
  for (const std::string& name : medium.list()) {
    std::string data;
    if (!medium.read(name, &data)) {
      SegmentScan s;
      s.name = name;
      s.quarantined = true;
      s.error = "unreadable";
      rep.segments.push_back(std::move(s));
      rep.all_ok = false;
      continue;
    }
    SegmentScan s = scan_segment(name, data, nullptr);
    if (s.quarantined) rep.all_ok = false;
    rep.records += s.records;
    rep.segments.push_back(std::move(s));
  }
  return rep;
}

// --- segment writer -------------------------------------------------------------------

bool SegmentWriter::ensure_segment_ready(const std::string& name,
                                         std::string* use_name,
                                         std::string* error) {
  std::string target = name;
  if (const auto it = redirect_.find(name); it != redirect_.end()) {
    target = it->second;
  }

  if (const auto it = committed_size_.find(target);
      it != committed_size_.end()) {
    // Known segment: repair any partial bytes from a failed earlier flush.
    const auto actual = medium_.size(target);
    const uint64_t committed = it->second;
    if (actual && *actual > committed) {
      if (!medium_.truncate(target, committed)) {
        *error = "repair truncate failed";
        return false;
      }
      ++repair_truncations_;
      repair_bytes_ += *actual - committed;
    } else if (actual && *actual < committed) {
      // Someone shortened the file under us; trust the medium.
      it->second = *actual;
      return ensure_segment_ready(name, use_name, error);
    }
    *use_name = target;
    return true;
  }

  const auto existing = medium_.size(target);
  if (!existing) {
    // Fresh segment: header first. It only becomes trusted once a batch
    // commits after it, so a crash here is recovered as an empty file.
    const std::string header_line = std::string(kCsvHeader) + "\n";
    const AppendStatus st = medium_.append(target, header_line);
    if (st != AppendStatus::kOk) {
      *error = st == AppendStatus::kUnavailable ? "medium unavailable"
                                                : "medium crashed mid-write";
      return false;
    }
    committed_size_[target] = header_line.size();
    *use_name = target;
    return true;
  }

  // Existing file this writer has not touched: scan to find the trusted
  // prefix (self-healing across unclean reboots).
  std::string data;
  if (!medium_.read(target, &data)) {
    *error = "medium unavailable";
    return false;
  }
  const SegmentScan scan = scan_segment(target, data, nullptr);
  if (scan.quarantined) {
    // Never append to a segment whose committed region is untrustworthy;
    // divert to a sibling and leave the evidence alone.
    std::string stem = target;
    if (stem.size() > 4 && stem.substr(stem.size() - 4) == ".csv") {
      stem.resize(stem.size() - 4);
    }
    for (int n = 1; n < 100; ++n) {
      const std::string sibling = stem + "_r" + std::to_string(n) + ".csv";
      if (!medium_.size(sibling) && !committed_size_.count(sibling)) {
        redirect_[name] = sibling;
        return ensure_segment_ready(name, use_name, error);
      }
    }
    *error = "no usable sibling for quarantined segment " + target;
    return false;
  }
  if (scan.committed_size == 0) {
    // Empty or torn before the header completed: start over.
    if (scan.total_size > 0) {
      if (!medium_.truncate(target, 0)) {
        *error = "repair truncate failed";
        return false;
      }
      ++repair_truncations_;
      repair_bytes_ += scan.total_size;
    }
    const std::string header_line = std::string(kCsvHeader) + "\n";
    const AppendStatus st = medium_.append(target, header_line);
    if (st != AppendStatus::kOk) {
      *error = st == AppendStatus::kUnavailable ? "medium unavailable"
                                                : "medium crashed mid-write";
      return false;
    }
    committed_size_[target] = header_line.size();
    *use_name = target;
    return true;
  }
  if (scan.total_size > scan.committed_size) {
    if (!medium_.truncate(target, scan.committed_size)) {
      *error = "repair truncate failed";
      return false;
    }
    ++repair_truncations_;
    repair_bytes_ += scan.total_size - scan.committed_size;
  }
  committed_size_[target] = scan.committed_size;
  *use_name = target;
  return true;
}

FlushOutcome SegmentWriter::flush(const std::vector<Record>& batch) {
  FlushOutcome out;
  if (batch.empty()) {
    out.ok = true;
    return out;
  }
  if (!medium_.available()) {
    out.error = "medium unavailable";
    return out;
  }

  size_t i = 0;
  while (i < batch.size()) {
    const CivilDate d = civil_from_utc(batch[i].ts.t_utc_s);
    std::string payload;
    size_t j = i;
    for (; j < batch.size(); ++j) {
      const CivilDate dj = civil_from_utc(batch[j].ts.t_utc_s);
      if (dj.year != d.year || dj.month != d.month || dj.day != d.day) break;
      payload += serialize_record(batch[j]);
    }

    std::string use_name;
    if (!ensure_segment_ready(segment_name(d), &use_name, &out.error)) {
      return out;
    }

    char footer[64];
    std::snprintf(footer, sizeof(footer), "# crc32=%08x count=%llu\n",
                  crc32_bytes(payload),
                  static_cast<unsigned long long>(j - i));

    auto do_append = [&](std::string_view bytes) {
      const AppendStatus st = medium_.append(use_name, bytes);
      if (st != AppendStatus::kOk) {
        out.error = st == AppendStatus::kUnavailable
                        ? "medium unavailable"
                        : "medium crashed mid-write";
        return false;
      }
      committed_size_[use_name] += bytes.size();
      return true;
    };
    if (!do_append(payload)) return out;
    if (!do_append(footer)) return out;
    if (!omit_commit_marker_) {
      if (!do_append(std::string(kCommitMarker) + "\n")) return out;
    }

    committed_records_ += j - i;
    out.records += j - i;
    out.bytes += payload.size();
    i = j;
  }
  out.ok = true;
  return out;
}

// --- RAM buffering -----------------------------------------------------------------

bool LogBufferPair::append(const Record& rec) {
  std::lock_guard lk(mu_);
  if (active_.size() >= capacity_) return false;
  active_.push_back(rec);
  return true;
}

uint64_t LogBufferPair::active_size() const {
  std::lock_guard lk(mu_);
  return active_.size();
}

bool LogBufferPair::flush_pending() const {
  std::lock_guard lk(mu_);
  return !staged_.empty();
}

const std::vector<Record>& LogBufferPair::stage_for_flush() {
  std::lock_guard lk(mu_);
  // A previously failed flush keeps its records staged; retry those first so
  // on-medium order matches acquisition order.
  if (staged_.empty()) staged_.swap(active_);
  return staged_;
}

void LogBufferPair::mark_flushed() {
  std::lock_guard lk(mu_);
  staged_.clear();
}

void LogBufferPair::drop_staged_prefix(uint64_t n) {
  std::lock_guard lk(mu_);
  if (n >= staged_.size()) {
    staged_.clear();
  } else {
    staged_.erase(staged_.begin(), staged_.begin() + static_cast<long>(n));
  }
}

std::vector<Record> LogBufferPair::take_all() {
  std::lock_guard lk(mu_);
  std::vector<Record> out = std::move(staged_);
  out.insert(out.end(), active_.begin(), active_.end());
  staged_.clear();
  active_.clear();
  return out;
}

// --- fallback ring -------------------------------------------------------------------

void RamRing::push(const Record& rec) {
  if (ring_.size() >= capacity_) {
    ring_.pop_front();
    ++dropped_;
  }
  ring_.push_back(rec);
}

void RamRing::push_all(const std::vector<Record>& recs) {
  for (const Record& r : recs) push(r);
}

std::vector<Record> RamRing::drain() {
  std::vector<Record> out(ring_.begin(), ring_.end());
  ring_.clear();
  return out;
}

}  // namespace winddaq
