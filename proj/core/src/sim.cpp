#include "winddaq/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace winddaq {

// --- fault schedule -----------------------------------------------------------

std::string_view fault_kind_name(FaultKind kind) {
  switch (kind) {
    case FaultKind::kPowerOutage: return "POWER_OUTAGE";
    case FaultKind::kMaintenance: return "MAINTENANCE";
    case FaultKind::kSdFail: return "SD_FAIL";
    case FaultKind::kNetOutage: return "NET_OUTAGE";
    case FaultKind::kSensorStuck: return "SENSOR_STUCK";
  }
  return "?";
}

namespace {

std::optional<FaultKind> fault_kind_from_name(std::string_view name) {
  for (FaultKind k : {FaultKind::kPowerOutage, FaultKind::kMaintenance,
                      FaultKind::kSdFail, FaultKind::kNetOutage,
                      FaultKind::kSensorStuck}) {
    if (fault_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

std::vector<std::pair<double, double>> merge_spans(
    std::vector<std::pair<double, double>> spans) {
  std::sort(spans.begin(), spans.end());
  std::vector<std::pair<double, double>> out;
  for (const auto& s : spans) {
    if (!out.empty() && s.first <= out.back().second) {
      out.back().second = std::max(out.back().second, s.second);
    } else {
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace

FaultSchedule empty_fault_schedule() { return FaultSchedule{}; }

FaultParseResult parse_fault_schedule(std::string_view text) {
  FaultParseResult out;
  FaultSchedule sched;
  std::vector<std::string> errors;

  size_t line_no = 0;
  std::stringstream ss{std::string(text)};
  std::string line;
  while (std::getline(ss, line)) {
    ++line_no;
    if (const size_t hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    std::stringstream ls{line};
    double start, end;
    std::string kind_s, channel_s;
    auto bad = [&](const std::string& why) {
      errors.push_back("line " + std::to_string(line_no) + ": " + why);
    };
    if (!(ls >> start)) {
      ls.clear();
      std::string junk;
      if (ls >> junk) bad("expected `start_s end_s KIND [channel]`");
      continue;  // blank after comment strip
    }
    if (!(ls >> end >> kind_s)) {
      bad("expected `start_s end_s KIND [channel]`");
      continue;
    }
    const auto kind = fault_kind_from_name(kind_s);
    if (!kind) {
      bad("unknown fault kind `" + kind_s + "`");
      continue;
    }
    if (start < 0 || end <= start) {
      bad("interval must satisfy 0 <= start < end");
      continue;
    }
    FaultEvent ev{start, end, *kind, std::nullopt};
    if (*kind == FaultKind::kSensorStuck) {
      if (!(ls >> channel_s)) {
        bad("SENSOR_STUCK needs a channel name");
        continue;
      }
      const auto ch = channel_from_name(channel_s);
      if (!ch) {
        bad("unknown channel `" + channel_s + "`");
        continue;
      }
      ev.channel = ch;
    } else if (ls >> channel_s) {
      bad("unexpected trailing field `" + channel_s + "`");
      continue;
    }
    sched.events.push_back(ev);
  }

  if (!errors.empty()) {
    out.errors = std::move(errors);
    return out;
  }

  std::vector<std::pair<double, double>> outages, maint;
  for (const auto& ev : sched.events) {
    if (ev.kind == FaultKind::kPowerOutage) outages.emplace_back(ev.start_s, ev.end_s);
    if (ev.kind == FaultKind::kMaintenance) maint.emplace_back(ev.start_s, ev.end_s);
  }
  sched.outage_spans = merge_spans(std::move(outages));
  sched.maintenance_spans = merge_spans(std::move(maint));
  out.schedule = std::move(sched);
  return out;
}

ActiveFaults faults_active(const FaultSchedule& sched, double t_s) {
  ActiveFaults out;
  for (const auto& ev : sched.events) {
    if (t_s < ev.start_s || t_s >= ev.end_s) continue;
    switch (ev.kind) {
      case FaultKind::kSdFail: out.sd_fail = true; break;
      case FaultKind::kNetOutage: out.net_outage = true; break;
      case FaultKind::kSensorStuck:
        out.stuck[static_cast<int>(*ev.channel)] = true;
        break;
      case FaultKind::kPowerOutage:
      case FaultKind::kMaintenance:
        break;  // handled via the merged spans below
    }
  }
  for (const auto& [s, e] : sched.maintenance_spans) {
    if (t_s >= s && t_s < e) out.maintenance = true;
  }
  for (const auto& [s, e] : sched.outage_spans) {
    if (t_s >= s && t_s < e) {
      out.power_outage = true;
      out.outage_elapsed_s = t_s - s;
    }
  }
  return out;
}

// --- environment ---------------------------------------------------------------

WindProcess::WindProcess(const WindModelConfig& cfg)
    : cfg_(cfg), v_(cfg.mean_mps) {}

double WindProcess::step(double dt_s, RngStream& rng) {
  const double phi = std::exp(-dt_s / cfg_.reversion_time_s);
  const double innovation_std =
      cfg_.volatility_mps * std::sqrt(1.0 - phi * phi);
  // One draw per step regardless of parameters keeps streams aligned.
  const double eps = rng.normal() * innovation_std;
  v_ = cfg_.mean_mps + phi * (v_ - cfg_.mean_mps) + eps;
  v_ = std::max(v_, 0.0);
  return v_;
}

EnvSimulator::EnvSimulator(const WindModelConfig& wind,
                           const EnvCycleConfig& cycles, RngStream wind_rng)
    : wind_(wind), cycles_(cycles), rng_(wind_rng) {
  state_.wind_mps = wind.mean_mps;
  state_.temp_c = cycles.temp_mean_c;
  state_.pressure_pa = cycles.pressure_mean_pa;
  state_.humidity_pct = cycles.humidity_mean_pct;
}

EnvState EnvSimulator::step(double dt_s) {
  t_ += dt_s;
  state_.wind_mps = wind_.step(dt_s, rng_);
  const double day_phase = 2.0 * M_PI * t_ / 86400.0;
  // Offset phases so the channels do not move in lockstep.
  state_.temp_c = cycles_.temp_mean_c + cycles_.temp_amplitude_c *
                                            std::sin(day_phase - M_PI / 3);
  state_.pressure_pa =
      cycles_.pressure_mean_pa +
      cycles_.pressure_amplitude_pa * std::sin(day_phase * 2 + M_PI / 5);
  state_.humidity_pct =
      std::clamp(cycles_.humidity_mean_pct +
                     cycles_.humidity_amplitude_pct * std::sin(day_phase),
                 0.0, 100.0);
  return state_;
}

// --- turbine ---------------------------------------------------------------------

TurbineModel::TurbineModel(const TurbineGeometry& geom, const CpCurve& curve,
                           double tau_s, double cutin_mps)
    : geom_(geom), curve_(curve), tau_s_(tau_s), cutin_mps_(cutin_mps),
      lambda_opt_(curve.peak_lambda()) {}

double TurbineModel::lambda_target(double t_s) const {
  if (!sweep_) return lambda_opt_;
  // Triangle wave between the sweep bounds, starting at the low end.
  const double phase = t_s / sweep_->period_s;
  const double saw = phase - std::floor(phase);
  const double tri = saw < 0.5 ? 2.0 * saw : 2.0 - 2.0 * saw;
  return sweep_->lambda_min + (sweep_->lambda_max - sweep_->lambda_min) * tri;
}

TurbineTruth TurbineModel::step(double wind_mps, double dt_s) {
  t_ += dt_s;
  // Target speed: hold the target tip-speed ratio above cut-in, coast to a
  // stop below it. First-order lag models rotor inertia.
  const double omega_target =
      wind_mps >= cutin_mps_
          ? lambda_target(t_) * wind_mps / geom_.rotor_radius_m
          : 0.0;
  const double k = 1.0 - std::exp(-dt_s / tau_s_);
  truth_.omega_rad_s += k * (omega_target - truth_.omega_rad_s);

  if (wind_mps > 0.05) {
    truth_.lambda = compute_lambda(truth_.omega_rad_s, geom_.rotor_radius_m,
                                   wind_mps);
  } else {
    truth_.lambda = 0.0;
  }
  truth_.cp = wind_mps >= cutin_mps_ ? curve_.value(truth_.lambda) : 0.0;
  truth_.power_w = truth_.cp * 0.5 * kStandardAirDensity *
                   geom_.swept_area_m2 * wind_mps * wind_mps * wind_mps;
  return truth_;
}

uint64_t HallPulser::step(double omega_rad_s, double dt_s) {
  phase_pulses_ += std::max(omega_rad_s, 0.0) * dt_s / (2.0 * M_PI) * ppr_;
  const double whole = std::floor(phase_pulses_);
  phase_pulses_ -= whole;
  return static_cast<uint64_t>(whole);
}

// --- sensors ---------------------------------------------------------------------

double quantize(double value, const SensorSpec& spec) {
  const double span = spec.valid_max - spec.valid_min;
  const double steps = static_cast<double>(1ull << spec.quantization_bits) - 1;
  const double clamped = std::clamp(value, spec.valid_min, spec.valid_max);
  const double code = std::round((clamped - spec.valid_min) / span * steps);
  return spec.valid_min + code / steps * span;
}

double SensorModel::read(double truth, RngStream& rng, bool stuck) {
  const double noisy = truth + spec_.bias + rng.normal() * spec_.noise_std;
  if (stuck && last_) return *last_;
  const double quantized = quantize(noisy, spec_);
  const double corrected =
      spec_.gain_correction * quantized + spec_.offset_correction;
  last_ = corrected;
  return corrected;
}

}  // namespace winddaq
