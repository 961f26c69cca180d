#include "winddaq/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "winddaq/timekeeping.hpp"
#include "winddaq/version.hpp"

namespace winddaq {

namespace fs = std::filesystem;

// --- ingestion -------------------------------------------------------------

LoadResult load_campaign(const fs::path& dir) {
  LoadResult out;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    out.fatal = true;
    out.fatal_error = "not a readable directory: " + dir.string();
    return out;
  }
  DirMedium medium(dir);
  auto names = medium.list();
  if (names.empty()) {
    out.warnings.push_back("no log segments found in " + dir.string());
    return out;
  }
  for (const auto& name : names) {
    std::string data;
    if (!medium.read(name, &data)) {
      out.errors.push_back({name, 0, "unreadable segment"});
      continue;
    }
    std::function<void(const Record&)> sink = [&](const Record& r) {
      out.records.push_back(r);
    };
    SegmentScan scan = scan_segment(name, data, &sink);
    for (const auto& re : scan.row_errors) {
      out.errors.push_back({name, re.line, re.message});
    }
    if (scan.quarantined) {
      out.errors.push_back({name, 0, "quarantined: " + scan.error});
    } else if (scan.committed_size < scan.total_size) {
      out.warnings.push_back(
          name + ": " + std::to_string(scan.total_size - scan.committed_size) +
          " uncommitted tail bytes ignored");
    }
  }
  return out;
}

// --- quality ----------------------------------------------------------------

void QualityAccumulator::add(const Record& rec) {
  ++records_;
  if ((rec.flags & (kFlagRangeWind | kFlagRangeRpm | kFlagSensorFault)) == 0)
    ++valid_;
  if (prev_) {
    uint32_t anomaly = check_sequence(*prev_, rec.ts);
    if (anomaly & kFlagDupTimestamp) ++dups_;
    if (anomaly & kFlagOutOfSequence) ++oos_;
  }
  if (!first_) first_ = rec.ts;
  last_ = rec.ts;
  prev_ = rec.ts;
  if (rec.flags & kFlagClockUnsynced) {
    if (unsynced_run_start_ < 0) unsynced_run_start_ = rec.ts.t_utc_s;
    max_unsynced_span_ = std::max(max_unsynced_span_,
                                  rec.ts.t_utc_s - unsynced_run_start_ + 1);
  } else {
    unsynced_run_start_ = -1;
  }
}

QualityReport QualityAccumulator::result(std::optional<double> span_s) const {
  QualityReport q;
  q.records = records_;
  double span = 0;
  if (span_s) {
    span = *span_s;
  } else if (first_ && last_ && last_->t_utc_s >= first_->t_utc_s) {
    span = double(last_->t_utc_s - first_->t_utc_s) + 1.0;
  }
  q.expected = uint64_t(std::llround(span * rate_hz_));
  if (q.expected == 0) {
    q.completeness = records_ == 0 ? 1.0 : 0.0;
  } else {
    q.completeness = std::min(1.0, double(records_) / double(q.expected));
  }
  q.validity = records_ == 0 ? 1.0 : double(valid_) / double(records_);
  q.dup_count = dups_;
  q.out_of_sequence_count = oos_;
  q.integrity_events = ctx_.integrity_events;
  double worst_span =
      std::max<double>(double(max_unsynced_span_), double(ctx_.sync_interval_s));
  q.timeliness_bound_s = stamp_error_bound_s(ctx_.drift_ppm, worst_span);
  return q;
}

QualityReport quality_report(const std::vector<Record>& records, double rate_hz,
                             double span_s, const QualityContext& ctx) {
  QualityAccumulator acc(rate_hz, ctx);
  for (const auto& r : records) acc.add(r);
  return acc.result(span_s);
}

std::string render_quality_report(const QualityReport& q) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "records=%llu\n"
                "expected=%llu\n"
                "completeness=%.6f\n"
                "validity=%.6f\n"
                "consistency_duplicates=%llu\n"
                "consistency_out_of_sequence=%llu\n"
                "integrity_events=%llu\n"
                "timeliness_bound_s=%.3f\n",
                (unsigned long long)q.records, (unsigned long long)q.expected,
                q.completeness, q.validity, (unsigned long long)q.dup_count,
                (unsigned long long)q.out_of_sequence_count,
                (unsigned long long)q.integrity_events, q.timeliness_bound_s);
  return buf;
}

// --- validity filtering -------------------------------------------------------

FilterResult filter_valid(const std::vector<Record>& records) {
  FilterResult out;
  out.kept.reserve(records.size());
  for (const auto& r : records)
    if (record_passes_filter(r)) out.kept.push_back(r);
  out.retention = records.empty()
                      ? 1.0
                      : double(out.kept.size()) / double(records.size());
  if (records.empty())
    out.warnings.push_back("no records to filter");
  else if (out.kept.empty())
    out.warnings.push_back("no records survive validity filtering");
  return out;
}

// --- uncertainty ---------------------------------------------------------------

UncertaintyBudget propagate_uncertainty(const UncertaintyInputs& in, double v,
                                        double power_w, double rho,
                                        double area, double omega,
                                        double radius) {
  auto require_pos = [](double x, const char* what) {
    if (!(x > 0.0) || !std::isfinite(x))
      throw std::invalid_argument(std::string(what) +
                                  " must be positive for uncertainty "
                                  "propagation");
  };
  require_pos(v, "wind speed");
  require_pos(power_w, "power");
  require_pos(rho, "air density");
  require_pos(area, "swept area");
  require_pos(omega, "rotor speed");
  require_pos(radius, "rotor radius");

  UncertaintyBudget b;
  b.u_v = in.u_wind_mps;
  b.u_p_rel = in.u_power_rel;
  b.u_rho_rel = in.u_density_rel;
  b.u_a_rel = in.u_area_rel;
  b.u_omega_rel = in.u_omega_rel;
  b.u_r_rel = in.u_radius_rel;
  double uv_rel = in.u_wind_mps / v;
  b.u_cp_rel = std::sqrt(b.u_p_rel * b.u_p_rel + 9.0 * uv_rel * uv_rel +
                         b.u_rho_rel * b.u_rho_rel + b.u_a_rel * b.u_a_rel);
  b.u_lambda_rel = std::sqrt(uv_rel * uv_rel + b.u_omega_rel * b.u_omega_rel +
                             b.u_r_rel * b.u_r_rel);
  return b;
}

// --- curve binning ---------------------------------------------------------------

void CurveAccumulator::add(const Record& rec) {
  if (!rec.cp || !rec.tsr || !std::isfinite(*rec.cp) ||
      !std::isfinite(*rec.tsr) || *rec.tsr < 0.0) {
    // counted in result() via a sentinel bin would complicate the map; track
    // directly.
    ++skipped_;
    return;
  }
  int64_t k = int64_t(std::floor(*rec.tsr / width_));
  Accum& a = bins_[k];
  ++a.n;
  a.sum += *rec.cp;
  a.sum_sq += *rec.cp * *rec.cp;
  a.sum_wind += rec.wind_speed_mps;
  a.sum_lambda += *rec.tsr;
}

CurveResult CurveAccumulator::result() const {
  CurveResult out;
  out.skipped_records = skipped_;
  for (const auto& [k, a] : bins_) {
    if (a.n < uint64_t(std::max(1, min_count_))) {
      ++out.suppressed_bins;
      out.suppressed_records += a.n;
      continue;
    }
    CurveBin bin;
    bin.lambda_low = double(k) * width_;
    bin.lambda_high = double(k + 1) * width_;
    bin.count = a.n;
    bin.cp_mean = a.sum / double(a.n);
    bin.mean_wind_mps = a.sum_wind / double(a.n);
    bin.mean_lambda = a.sum_lambda / double(a.n);
    if (a.n >= 2) {
      double var = a.sum_sq / double(a.n) - bin.cp_mean * bin.cp_mean;
      bin.cp_std = std::sqrt(std::max(0.0, var));
    } else {
      bin.cp_std = 0.0;
      bin.single_sample = true;
    }
    double se = a.n >= 2 ? bin.cp_std / std::sqrt(double(a.n)) : 0.0;
    double u_sys_rel = 0.0;
    if (bin.mean_wind_mps > 0.0) {
      double uv_rel = u_.u_wind_mps / bin.mean_wind_mps;
      u_sys_rel = std::sqrt(u_.u_power_rel * u_.u_power_rel +
                            9.0 * uv_rel * uv_rel +
                            u_.u_density_rel * u_.u_density_rel +
                            u_.u_area_rel * u_.u_area_rel);
    }
    bin.cp_uncertainty = std::sqrt(se * se + u_sys_rel * bin.cp_mean *
                                                 u_sys_rel * bin.cp_mean);
    out.bins.push_back(bin);
  }
  return out;
}

CurveResult bin_curve(const std::vector<Record>& valid, double bin_width,
                      int min_bin_count, const UncertaintyInputs& u) {
  CurveAccumulator acc(bin_width, min_bin_count, u);
  for (const auto& r : valid) acc.add(r);
  return acc.result();
}

const char* const kCurveCsvHeader = "lambda_low,lambda_high,count,cp_mean,cp_std,cp_u";

std::string render_curve_csv(const CurveResult& curve) {
  std::string out = kCurveCsvHeader;
  out += '\n';
  char buf[256];
  for (const auto& b : curve.bins) {
    std::snprintf(buf, sizeof buf, "%.4f,%.4f,%llu,%.6f,%.6f,%.6f\n",
                  b.lambda_low, b.lambda_high, (unsigned long long)b.count,
                  b.cp_mean, b.cp_std, b.cp_uncertainty);
    out += buf;
  }
  std::snprintf(buf, sizeof buf,
                "# suppressed_bins=%llu suppressed_records=%llu\n",
                (unsigned long long)curve.suppressed_bins,
                (unsigned long long)curve.suppressed_records);
  out += buf;
  return out;
}

// --- FAIR packaging -----------------------------------------------------------------

const std::vector<std::string> kMandatoryMetadataKeys = {
    "title",
    "creator",
    "keywords",
    "site_coordinates",
    "turbine_rotor_radius_m",
    "turbine_rotor_height_m",
    "turbine_swept_area_m2",
    "deployment_start",
    "deployment_end",
    "firmware_version",
    "license",
};

std::map<std::string, std::string> build_package_metadata(
    const Config& cfg, std::optional<Timestamp> first_stamp,
    std::optional<Timestamp> last_stamp) {
  std::map<std::string, std::string> m;
  for (const auto& [k, v] : cfg.metadata) m[k] = v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", cfg.geometry.rotor_radius_m);
  m["turbine_rotor_radius_m"] = buf;
  std::snprintf(buf, sizeof buf, "%.6g", cfg.geometry.rotor_height_m);
  m["turbine_rotor_height_m"] = buf;
  std::snprintf(buf, sizeof buf, "%.6g", cfg.geometry.swept_area_m2);
  m["turbine_swept_area_m2"] = buf;
  if (first_stamp) m["deployment_start"] = iso8601_utc(first_stamp->t_utc_s);
  if (last_stamp) m["deployment_end"] = iso8601_utc(last_stamp->t_utc_s);
  m["firmware_version"] = kVersionString;
  std::string snapshot = render_config(cfg);
  std::snprintf(buf, sizeof buf, "crc32:%08x", crc32_bytes(snapshot));
  m["config_version"] = buf;
  return m;
}

namespace {

bool write_file(const fs::path& p, std::string_view content,
                std::string* err) {
  std::ofstream f(p, std::ios::binary);
  if (!f) {
    if (err) *err = "cannot open " + p.string();
    return false;
  }
  f.write(content.data(), std::streamsize(content.size()));
  f.flush();
  if (!f.good()) {
    if (err) *err = "short write to " + p.string();
    return false;
  }
  return true;
}

std::optional<uint32_t> crc32_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) return std::nullopt;
  char buf[1 << 16];
  uint32_t crc = crc32_init();
  while (f) {
    f.read(buf, sizeof buf);
    std::streamsize n = f.gcount();
    if (n > 0) crc = crc32_update(crc, buf, size_t(n));
  }
  return crc;
}

const char* const kPackageReadme =
    "Wind turbine data-acquisition campaign package\n"
    "==============================================\n"
    "\n"
    "Layout\n"
    "  data/               raw logged CSV segments, one per UTC day\n"
    "  derived/curve.csv   binned performance curve (method of bins)\n"
    "  metadata.txt        dataset descriptors, key = value\n"
    "  quality_report.txt  data-quality dimensions, key=value\n"
    "  checksums.txt       CRC-32 of every file, 'crc32  path' per line\n"
    "\n"
    "Raw CSV columns (15)\n"
    "  timestamp_utc       ISO 8601, UTC, 1 s resolution\n"
    "  seq                 same-second disambiguator, 0-based\n"
    "  wind_speed_mps      wind speed, m/s, raw (EMA applies to derived cols)\n"
    "  rotor_rpm           rotor speed from hall pulse count, rev/min\n"
    "  omega_rad_s         rotor angular speed, rad/s\n"
    "  voltage_v           bus voltage, V\n"
    "  current_a           bus current, A (negative = reverse flow)\n"
    "  power_w             electrical power, W\n"
    "  temp_c              ambient temperature, degC\n"
    "  pressure_pa         barometric pressure, Pa\n"
    "  humidity_pct        relative humidity, %\n"
    "  rho_kg_m3           dry-air density from temp/pressure; may be empty\n"
    "  cp                  power coefficient; empty below cut-in\n"
    "  tsr                 tip-speed ratio; empty below cut-in\n"
    "  flags               decimal OR of quality-flag bits\n"
    "\n"
    "Quality flags (bit order)\n"
    "  RANGE_WIND RANGE_RPM SENSOR_FAULT DUP_TIMESTAMP OUT_OF_SEQUENCE\n"
    "  BELOW_CUTIN REVERSE_CURRENT BETZ_EXCEEDED CLOCK_UNSYNCED\n"
    "\n"
    "Segment framing: rows are committed in batches; each batch ends with\n"
    "'# crc32=XXXXXXXX count=N' and '# committed'. Uncommitted tails were\n"
    "discarded at recovery. Lines starting with '#' are not data.\n"
    "\n"
    "Curve columns: lambda_low,lambda_high,count,cp_mean,cp_std,cp_u.\n"
    "Bins cover [lambda_low, lambda_high) on the tip-speed-ratio axis;\n"
    "cp_std is the population standard deviation, cp_u combines the standard\n"
    "error with the propagated instrument budget. Bins with fewer samples\n"
    "than the configured minimum are suppressed and tallied in the trailing\n"
    "comment.\n";

}  // namespace

PackageOutcome package_fair(const fs::path& out_dir, const PackageInputs& in) {
  PackageOutcome out;
  for (const auto& key : kMandatoryMetadataKeys)
    if (!in.metadata.count(key) || in.metadata.at(key).empty())
      out.missing_keys.push_back(key);
  if (!out.missing_keys.empty()) {
    out.error = "metadata key " + out.missing_keys.front() + " required";
    return out;
  }

  std::error_code ec;
  fs::create_directories(out_dir / "data", ec);
  fs::create_directories(out_dir / "derived", ec);
  if (ec) {
    out.error = "cannot create package directories: " + ec.message();
    return out;
  }

  // Raw segments, byte-for-byte.
  if (fs::is_directory(in.log_dir)) {
    std::vector<fs::path> segs;
    for (const auto& e : fs::directory_iterator(in.log_dir))
      if (e.is_regular_file() && e.path().extension() == ".csv")
        segs.push_back(e.path());
    std::sort(segs.begin(), segs.end());
    for (const auto& s : segs) {
      fs::copy_file(s, out_dir / "data" / s.filename(),
                    fs::copy_options::overwrite_existing, ec);
      if (ec) {
        out.error = "cannot copy " + s.string() + ": " + ec.message();
        return out;
      }
      out.files.push_back("data/" + s.filename().string());
    }
  }

  std::string err;
  if (!write_file(out_dir / "derived" / "curve.csv", render_curve_csv(in.curve),
                  &err)) {
    out.error = err;
    return out;
  }
  out.files.push_back("derived/curve.csv");

  std::string meta;
  for (const auto& [k, v] : in.metadata) meta += k + " = " + v + "\n";
  if (!write_file(out_dir / "metadata.txt", meta, &err)) {
    out.error = err;
    return out;
  }
  out.files.push_back("metadata.txt");

  if (!write_file(out_dir / "quality_report.txt",
                  render_quality_report(in.quality), &err)) {
    out.error = err;
    return out;
  }
  out.files.push_back("quality_report.txt");

  if (!write_file(out_dir / "README.txt", kPackageReadme, &err)) {
    out.error = err;
    return out;
  }
  out.files.push_back("README.txt");

  std::sort(out.files.begin(), out.files.end());
  std::string sums;
  char line[4400];
  for (const auto& rel : out.files) {
    auto crc = crc32_file(out_dir / rel);
    if (!crc) {
      out.error = "cannot checksum " + rel;
      return out;
    }
    std::snprintf(line, sizeof line, "%08x  %s\n", *crc, rel.c_str());
    sums += line;
  }
  if (!write_file(out_dir / "checksums.txt", sums, &err)) {
    out.error = err;
    return out;
  }
  out.files.push_back("checksums.txt");
  out.ok = true;
  return out;
}

bool verify_package_checksums(const fs::path& package_dir,
                              std::string* first_mismatch) {
  std::ifstream f(package_dir / "checksums.txt");
  if (!f) {
    if (first_mismatch) *first_mismatch = "checksums.txt missing";
    return false;
  }
  std::string line;
  bool any = false;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    unsigned long expect = 0;
    char rel[4096];
    if (std::sscanf(line.c_str(), "%8lx  %4095[^\n]", &expect, rel) != 2) {
      if (first_mismatch) *first_mismatch = "bad checksum line: " + line;
      return false;
    }
    any = true;
    auto got = crc32_file(package_dir / rel);
    if (!got || *got != uint32_t(expect)) {
      if (first_mismatch) *first_mismatch = rel;
      return false;
    }
  }
  return any;
}

}  // namespace winddaq
