// winddaq: run seeded acquisition campaigns, analyze the resulting logs into
// quality reports / performance curves / dataset packages, and execute the
// named verification profiles.
//
// Exit codes: 0 success, 2 validation failure (bad config, schedule, flags,
// metadata), 3 assertion failure (benchtest criterion, --strict gate),
// 4 I/O failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "winddaq/campaign.hpp"
#include "winddaq/pipeline.hpp"
#include "winddaq/scenarios.hpp"
#include "winddaq/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitAssertion = 3;
constexpr int kExitIo = 4;

namespace fs = std::filesystem;
using namespace winddaq;

std::optional<std::string> read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) return std::nullopt;
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

bool write_text(const fs::path& p, std::string_view text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) return false;
  f.write(text.data(), std::streamsize(text.size()));
  return f.good();
}

std::optional<Scenario> scenario_by_name(const std::string& name,
                                         uint64_t seed) {
  if (name == "endurance72h") return scenario_endurance_72h(seed);
  if (name == "shakedown") return scenario_shakedown_week(seed);
  if (name == "nominal6mo") return scenario_nominal_six_month(seed);
  if (name == "curve") return scenario_curve_recovery(seed);
  if (name == "retention") return scenario_retention(seed);
  return std::nullopt;
}

int load_config_file(const std::string& path, Config* out) {
  auto text = read_file(path);
  if (!text) {
    std::cerr << "cannot read config file: " << path << "\n";
    return kExitIo;
  }
  auto parsed = load_config_text(*text);
  if (!parsed.ok()) {
    for (const auto& e : parsed.errors) {
      std::cerr << "config: " << (e.key.empty() ? "(file)" : e.key) << ": "
                << e.message << "\n";
    }
    return kExitValidation;
  }
  *out = *parsed.config;
  return kExitOk;
}

// --- run ---------------------------------------------------------------------

struct RunArgs {
  std::string config_path;
  std::string faults_path;
  std::string scenario;
  std::string out_dir;
  std::string accel = "max";
  int64_t duration_s = 600;
  bool duration_given = false;
  uint64_t seed = 1;
  bool truth = false;
  bool telemetry_log = false;
};

int cmd_run(const RunArgs& args) {
  CampaignOptions opts;

  if (!args.scenario.empty()) {
    auto sc = scenario_by_name(args.scenario, args.seed);
    if (!sc) {
      std::cerr << "unknown scenario: " << args.scenario
                << " (expected endurance72h, shakedown, nominal6mo, curve or "
                   "retention)\n";
      return kExitValidation;
    }
    opts = sc->options;
    if (args.duration_given) opts.duration_s = args.duration_s;
  } else {
    opts.config = default_config();
    if (!args.config_path.empty()) {
      int rc = load_config_file(args.config_path, &opts.config);
      if (rc != kExitOk) return rc;
    }
    opts.faults = empty_fault_schedule();
    if (!args.faults_path.empty()) {
      auto text = read_file(args.faults_path);
      if (!text) {
        std::cerr << "cannot read fault schedule: " << args.faults_path << "\n";
        return kExitIo;
      }
      auto parsed = parse_fault_schedule(*text);
      if (!parsed.ok()) {
        for (const auto& e : parsed.errors) std::cerr << "faults: " << e << "\n";
        return kExitValidation;
      }
      opts.faults = *parsed.schedule;
    }
    opts.duration_s = args.duration_s;
  }
  opts.seed = args.seed;

  if (opts.duration_s <= 0) {
    std::cerr << "duration must be positive\n";
    return kExitValidation;
  }
  if (args.accel == "max") {
    opts.accel = 0;
  } else {
    char* end = nullptr;
    opts.accel = std::strtod(args.accel.c_str(), &end);
    if (end == args.accel.c_str() || *end != '\0' || !(opts.accel >= 1.0)) {
      std::cerr << "--accel expects 'max' or a number >= 1\n";
      return kExitValidation;
    }
  }

  const fs::path out(args.out_dir);
  std::error_code ec;
  fs::create_directories(out / "diag", ec);
  if (ec) {
    std::cerr << "cannot create output directory: " << ec.message() << "\n";
    return kExitIo;
  }
  // A reused log directory would interleave two campaigns into the same
  // day-keyed segments; refuse rather than corrupt.
  for (const auto& e : fs::directory_iterator(out)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") {
      std::cerr << "output directory already contains log segments: "
                << args.out_dir << "\n";
      return kExitValidation;
    }
  }

  std::ofstream transitions(out / "diag" / "transitions.log");
  std::ofstream events(out / "diag" / "events.txt");
  std::ofstream truth_csv;
  std::ofstream telemetry_log;
  CampaignSinks sinks;
  sinks.transitions = &transitions;
  sinks.events = &events;
  if (args.truth) {
    truth_csv.open(out / "diag" / "truth.csv");
    sinks.truth_csv = &truth_csv;
  }
  if (args.telemetry_log) {
    telemetry_log.open(out / "diag" / "telemetry.log");
    sinks.telemetry_transcript = &telemetry_log;
  }

  DirMedium medium(out);
  NullBroker broker;
  CampaignResult res = run_campaign(opts, medium, broker, sinks);

  const std::string summary = campaign_summary(opts, res);
  if (!write_text(out / "diag" / "summary.txt", summary) ||
      !write_text(out / "diag" / "config.txt", render_config(opts.config))) {
    std::cerr << "cannot write diagnostics\n";
    return kExitIo;
  }
  std::cout << summary;
  return kExitOk;
}

// --- analyze -----------------------------------------------------------------

struct AnalyzeArgs {
  std::string in_dir;
  std::string out_dir;
  std::string config_path;
  double bin_width = 0;  // 0: take the config's value
  double rate_hz = 0;    // 0: take the config's value
  double span_s = 0;     // 0: infer from stamps
  double min_completeness = 0.9;
  bool strict = false;
  bool no_package = false;
};

int cmd_analyze(const AnalyzeArgs& args) {
  if (!fs::is_directory(args.in_dir)) {
    std::cerr << "input is not a readable directory: " << args.in_dir << "\n";
    return kExitIo;
  }

  Config cfg = default_config();
  if (!args.config_path.empty()) {
    int rc = load_config_file(args.config_path, &cfg);
    if (rc != kExitOk) return rc;
  } else if (fs::exists(fs::path(args.in_dir) / "diag" / "config.txt")) {
    // A campaign directory carries its own config snapshot; trust it.
    int rc = load_config_file((fs::path(args.in_dir) / "diag" / "config.txt").string(), &cfg);
    if (rc != kExitOk) return rc;
  }

  const double rate = args.rate_hz > 0 ? args.rate_hz : cfg.sample_rate_hz;
  const double bin_w = args.bin_width > 0 ? args.bin_width : cfg.bin_width_lambda;

  std::error_code ec;
  fs::create_directories(args.out_dir, ec);
  if (ec) {
    std::cerr << "cannot create output directory: " << ec.message() << "\n";
    return kExitIo;
  }

  // Single streaming pass: quality, validity filtering and curve binning see
  // each committed record once, so campaign length costs no memory.
  QualityContext ctx;
  ctx.drift_ppm = cfg.clock.drift_ppm;
  ctx.sync_interval_s = cfg.clock.sync_interval_s;
  QualityAccumulator qa(rate, ctx);
  CurveAccumulator ca(bin_w, cfg.min_bin_count, cfg.uncertainty);
  uint64_t total = 0, kept = 0;
  std::optional<Timestamp> first, last;

  DirMedium medium{fs::path(args.in_dir)};
  std::function<void(const Record&)> sink = [&](const Record& r) {
    ++total;
    qa.add(r);
    if (!first) first = r.ts;
    last = r.ts;
    if (record_passes_filter(r)) {
      ++kept;
      ca.add(r);
    }
  };
  RecoverReport rep = scan_committed(medium, sink);
  for (const auto& note : rep.notes) std::cerr << "note: " << note << "\n";

  QualityReport q = qa.result(args.span_s > 0
                                  ? std::optional<double>(args.span_s)
                                  : std::nullopt);
  q.integrity_events = rep.quarantined_segments + rep.truncation_events;
  CurveResult curve = ca.result();
  const double retention = total ? double(kept) / double(total) : 1.0;

  if (!write_text(fs::path(args.out_dir) / "quality_report.txt",
                  render_quality_report(q)) ||
      !write_text(fs::path(args.out_dir) / "curve.csv",
                  render_curve_csv(curve))) {
    std::cerr << "cannot write analysis outputs\n";
    return kExitIo;
  }

  std::string out = render_quality_report(q);
  char buf[160];
  std::snprintf(buf, sizeof buf, "retention=%.6f\n", retention);
  out += buf;
  std::snprintf(buf, sizeof buf, "curve_bins=%zu\n", curve.bins.size());
  out += buf;
  std::snprintf(buf, sizeof buf, "suppressed_bins=%llu\n",
                (unsigned long long)curve.suppressed_bins);
  out += buf;

  if (!args.no_package) {
    PackageInputs pin;
    pin.log_dir = args.in_dir;
    pin.quality = q;
    pin.curve = curve;
    pin.metadata = build_package_metadata(cfg, first, last);
    PackageOutcome pkg =
        package_fair(fs::path(args.out_dir) / "package", pin);
    if (!pkg.ok) {
      std::cerr << "packaging failed: " << pkg.error << "\n";
      return pkg.missing_keys.empty() ? kExitIo : kExitValidation;
    }
    std::string mismatch;
    if (!verify_package_checksums(fs::path(args.out_dir) / "package",
                                  &mismatch)) {
      std::cerr << "package self-verification failed: " << mismatch << "\n";
      return kExitIo;
    }
    out += "package=" + (fs::path(args.out_dir) / "package").string() + "\n";
  }

  std::cout << out;

  if (args.strict && q.completeness < args.min_completeness) {
    std::snprintf(buf, sizeof buf,
                  "completeness %.6f below required %.6f\n", q.completeness,
                  args.min_completeness);
    std::cerr << buf;
    return kExitAssertion;
  }
  return kExitOk;
}

// --- benchtest ----------------------------------------------------------------

int cmd_benchtest(const std::string& profile, uint64_t seed) {
  auto result = run_benchtest(profile, seed);
  if (!result) {
    std::cerr << "unknown profile: " << profile << " (expected";
    for (const auto& p : kBenchtestProfiles) std::cerr << " " << p;
    std::cerr << ")\n";
    return kExitValidation;
  }
  std::cout << "profile=" << result->profile << "\n";
  for (const auto& line : result->lines) std::cout << line << "\n";
  std::cout << "result=" << (result->pass ? "PASS" : "FAIL") << "\n";
  return result->pass ? kExitOk : kExitAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wind turbine data-acquisition simulator and analysis pipeline"};
  app.set_version_flag("--version", std::string(kVersionString));
  app.require_subcommand(1);

  RunArgs run;
  CLI::App* run_cmd =
      app.add_subcommand("run", "run a seeded acquisition campaign");
  run_cmd->add_option("--config", run.config_path, "config file (key = value)");
  run_cmd->add_option("--faults", run.faults_path,
                      "fault schedule file (start end KIND [channel])");
  auto* scen = run_cmd->add_option(
      "--scenario", run.scenario,
      "named scenario preset (endurance72h, shakedown, nominal6mo, curve, "
      "retention); excludes --config/--faults");
  scen->excludes("--config");
  scen->excludes("--faults");
  auto* dur =
      run_cmd->add_option("--duration", run.duration_s, "logical seconds");
  run_cmd->add_option("--accel", run.accel,
                      "'max' or logical seconds per wall second (>= 1)");
  run_cmd->add_option("--seed", run.seed, "campaign seed");
  run_cmd->add_option("--out", run.out_dir, "output directory")->required();
  run_cmd->add_flag("--truth", run.truth, "write diag/truth.csv");
  run_cmd->add_flag("--telemetry-log", run.telemetry_log,
                    "write diag/telemetry.log");

  AnalyzeArgs an;
  CLI::App* an_cmd = app.add_subcommand(
      "analyze", "quality-grade a log directory and package the dataset");
  an_cmd->add_option("--in", an.in_dir, "campaign log directory")->required();
  an_cmd->add_option("--out", an.out_dir, "analysis output directory")
      ->required();
  an_cmd->add_option("--config", an.config_path,
                     "config for metadata/limits (default: diag/config.txt "
                     "inside --in, else built-ins)");
  an_cmd->add_option("--bin-width", an.bin_width, "lambda bin width");
  an_cmd->add_option("--rate", an.rate_hz, "expected sample rate, Hz");
  an_cmd->add_option("--span", an.span_s,
                     "deployment span in seconds (default: stamp extent)");
  an_cmd->add_option("--min-completeness", an.min_completeness,
                     "threshold for --strict");
  an_cmd->add_flag("--strict", an.strict,
                   "nonzero exit when completeness is below the threshold");
  an_cmd->add_flag("--no-package", an.no_package, "skip the dataset package");

  std::string profile;
  uint64_t bt_seed = 1;
  CLI::App* bt_cmd =
      app.add_subcommand("benchtest", "run a named verification profile");
  bt_cmd->add_option("profile", profile, "endurance72h | powercycle50 | shakedown")
      ->required();
  bt_cmd->add_option("--seed", bt_seed, "profile seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (run_cmd->parsed()) {
      run.duration_given = dur->count() > 0;
      return cmd_run(run);
    }
    if (an_cmd->parsed()) return cmd_analyze(an);
    if (bt_cmd->parsed()) return cmd_benchtest(profile, bt_seed);
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitValidation;
}
