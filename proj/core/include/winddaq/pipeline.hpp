#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "winddaq/config.hpp"
#include "winddaq/model.hpp"
#include "winddaq/storage.hpp"

namespace winddaq {

// Post-campaign analysis: ingest logged segments, grade the stream on the
// five data-quality dimensions, filter to analysis-grade records, propagate
// measurement uncertainty, bin the performance curve, and emit a
// self-describing dataset package. Every stage streams where it matters, so
// multi-month campaigns analyze in bounded memory.

// --- ingestion -------------------------------------------------------------

struct LoadError {
  std::string file;
  uint64_t line = 0;  // 1-based within the segment
  std::string message;
};

struct LoadResult {
  std::vector<Record> records;  // concatenated in segment order
  std::vector<LoadError> errors;
  std::vector<std::string> warnings;
  bool fatal = false;
  std::string fatal_error;
};

LoadResult load_campaign(const std::filesystem::path& dir);

// --- quality ----------------------------------------------------------------

struct QualityReport {
  double completeness = 0;  // recorded / expected
  double validity = 0;      // fraction free of range/sensor-fault flags
  uint64_t dup_count = 0;
  uint64_t out_of_sequence_count = 0;
  uint64_t integrity_events = 0;    // corruption/loss events from recovery
  double timeliness_bound_s = 0;    // worst-case stamp error over campaign
  uint64_t records = 0;
  uint64_t expected = 0;
  uint64_t consistency() const { return dup_count + out_of_sequence_count; }
};

struct QualityContext {
  double drift_ppm = 2.0;
  int64_t sync_interval_s = 3600;
  uint64_t integrity_events = 0;
};

// Streaming accumulator; feed records in as-logged order (consistency is an
// order property).
class QualityAccumulator {
 public:
  QualityAccumulator(double rate_hz, const QualityContext& ctx)
      : rate_hz_(rate_hz), ctx_(ctx) {}
  void add(const Record& rec);
  // Span defaults to what the stamps cover; pass the configured campaign
  // span when known (a dead logger at campaign end leaves no stamps behind).
  QualityReport result(std::optional<double> span_s = std::nullopt) const;

 private:
  double rate_hz_;
  QualityContext ctx_;
  uint64_t records_ = 0;
  uint64_t valid_ = 0;
  uint64_t dups_ = 0;
  uint64_t oos_ = 0;
  std::optional<Timestamp> prev_;
  std::optional<Timestamp> first_;
  std::optional<Timestamp> last_;
  // Longest contiguous run of CLOCK_UNSYNCED stamps, in seconds.
  int64_t unsynced_run_start_ = -1;
  int64_t max_unsynced_span_ = 0;
};

QualityReport quality_report(const std::vector<Record>& records,
                             double rate_hz, double span_s,
                             const QualityContext& ctx);
std::string render_quality_report(const QualityReport& q);

// --- validity filtering -------------------------------------------------------

// What the curve fit may consume: range violations, sensor faults, stamp
// anomalies and below-cut-in records are excluded. Reverse-current,
// Betz-exceeded and unsynced-clock records stay (flagged but physically
// usable); dropping them is an analysis choice, not a validity one.
inline constexpr uint32_t kFilterDropMask =
    kFlagRangeWind | kFlagRangeRpm | kFlagSensorFault | kFlagDupTimestamp |
    kFlagOutOfSequence | kFlagBelowCutin;

inline bool record_passes_filter(const Record& r) {
  return (r.flags & kFilterDropMask) == 0;
}

struct FilterResult {
  std::vector<Record> kept;
  double retention = 1.0;
  std::vector<std::string> warnings;
};
FilterResult filter_valid(const std::vector<Record>& records);

// --- uncertainty ---------------------------------------------------------------

struct UncertaintyBudget {
  double u_v = 0;          // absolute, m/s
  double u_p_rel = 0;
  double u_rho_rel = 0;
  double u_a_rel = 0;
  double u_omega_rel = 0;
  double u_r_rel = 0;
  double u_cp_rel = 0;     // propagated
  double u_lambda_rel = 0; // propagated
};

// First-order (GUM) propagation at an operating point. Only the wind speed
// enters the relative combination nonlinearly (cubically for cp):
//   u_cp_rel     = sqrt(u_P_rel^2 + (3 u_v / v)^2 + u_rho_rel^2 + u_A_rel^2)
//   u_lambda_rel = sqrt((u_v / v)^2 + u_omega_rel^2 + u_R_rel^2)
// All operating-point inputs must be positive. Throws std::invalid_argument
// otherwise (a caller below cut-in has no business propagating).
UncertaintyBudget propagate_uncertainty(const UncertaintyInputs& in, double v,
                                        double power_w, double rho,
                                        double area, double omega,
                                        double radius);

// --- curve binning ---------------------------------------------------------------

struct CurveBin {
  double lambda_low = 0;
  double lambda_high = 0;
  uint64_t count = 0;
  double cp_mean = 0;
  double cp_std = 0;          // population; 0 with note for single samples
  double cp_uncertainty = 0;  // standard error + propagated budget
  double mean_wind_mps = 0;
  double mean_lambda = 0;
  bool single_sample = false;
};

struct CurveResult {
  std::vector<CurveBin> bins;          // ascending lambda, populated only
  uint64_t suppressed_bins = 0;        // below min_bin_count
  uint64_t suppressed_records = 0;
  uint64_t skipped_records = 0;        // missing cp/tsr
};

// Streaming method-of-bins: lambda axis partitioned into [k w, (k+1) w).
class CurveAccumulator {
 public:
  CurveAccumulator(double bin_width, int min_bin_count,
                   const UncertaintyInputs& u)
      : width_(bin_width), min_count_(min_bin_count), u_(u) {}
  void add(const Record& rec);
  CurveResult result() const;

 private:
  struct Accum {
    uint64_t n = 0;
    double sum = 0;
    double sum_sq = 0;
    double sum_wind = 0;
    double sum_lambda = 0;
  };
  double width_;
  int min_count_;
  UncertaintyInputs u_;
  uint64_t skipped_ = 0;
  std::map<int64_t, Accum> bins_;
};

CurveResult bin_curve(const std::vector<Record>& valid, double bin_width,
                      int min_bin_count, const UncertaintyInputs& u);
std::string render_curve_csv(const CurveResult& curve);
extern const char* const kCurveCsvHeader;

// --- FAIR packaging -----------------------------------------------------------------

extern const std::vector<std::string> kMandatoryMetadataKeys;

std::map<std::string, std::string> build_package_metadata(
    const Config& cfg, std::optional<Timestamp> first_stamp,
    std::optional<Timestamp> last_stamp);

struct PackageInputs {
  std::filesystem::path log_dir;  // source of the raw CSV segments
  QualityReport quality;
  CurveResult curve;
  std::map<std::string, std::string> metadata;
};

struct PackageOutcome {
  bool ok = false;
  std::string error;
  std::vector<std::string> missing_keys;
  std::vector<std::string> files;  // package-relative, as written
};

// Emits data/, derived/curve.csv, metadata.txt, quality_report.txt,
// README.txt, checksums.txt under out_dir. Fails (writing nothing) if a
// mandatory metadata key is absent, naming the key.
PackageOutcome package_fair(const std::filesystem::path& out_dir,
                            const PackageInputs& in);

// Re-reads a package and recomputes every checksum line.
bool verify_package_checksums(const std::filesystem::path& package_dir,
                              std::string* first_mismatch = nullptr);

}  // namespace winddaq
