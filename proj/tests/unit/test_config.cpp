#include "winddaq/config.hpp"

#include <algorithm>

#include "doctest.h"

using namespace winddaq;

namespace {
bool has_error_for(const ConfigParseResult& r, const std::string& key) {
  return std::any_of(r.errors.begin(), r.errors.end(),
                     [&](const ConfigError& e) { return e.key == key; });
}
}  // namespace

TEST_CASE("key-value parser handles comments, blanks and bad lines") {
  const KeyValueDoc doc = parse_key_values(
      "# leading comment\n"
      "a = 1\n"
      "\n"
      "b=two words  # trailing comment\n"
      "broken line without equals\n"
      "  c  =  3  \n");
  REQUIRE(doc.entries.size() == 3);
  CHECK(*doc.find("a") == "1");
  CHECK(*doc.find("b") == "two words");
  CHECK(*doc.find("c") == "3");
  CHECK(doc.find("missing") == nullptr);
  REQUIRE(doc.syntax_errors.size() == 1);
}

TEST_CASE("defaults validate and render round-trips") {
  const Config def = default_config();
  const std::string text = render_config(def);
  const ConfigParseResult back = load_config_text(text);
  REQUIRE(back.ok());
  const Config& cfg = *back.config;
  CHECK(cfg.sample_rate_hz == def.sample_rate_hz);
  CHECK(cfg.ema_alpha == doctest::Approx(def.ema_alpha));
  CHECK(cfg.cutin_wind_mps == doctest::Approx(def.cutin_wind_mps));
  CHECK(cfg.geometry.swept_area_m2 == doctest::Approx(def.geometry.swept_area_m2));
  CHECK(cfg.flush_interval_s == def.flush_interval_s);
  CHECK(cfg.clock.start_utc_s == def.clock.start_utc_s);
  CHECK(cfg.cp_curve.points.size() == def.cp_curve.points.size());
  CHECK(cfg.metadata.at("license") == def.metadata.at("license"));
  CHECK(cfg.limits.wind_max_mps == doctest::Approx(def.limits.wind_max_mps));
  // Render again: canonical form is a fixed point.
  CHECK(render_config(cfg) == text);
}

TEST_CASE("unknown keys are named individually") {
  const auto r = load_config_text("sample_rate_hz = 1\nnot_a_knob = 5\n");
  CHECK(!r.ok());
  CHECK(has_error_for(r, "not_a_knob"));
}

TEST_CASE("validation reports every violation at once") {
  const auto r = load_config_text(
      "sample_rate_hz = 3\n"
      "ema_alpha = 1.5\n"
      "rotor_radius_m = -2\n");
  CHECK(!r.ok());
  CHECK(r.errors.size() >= 3);
  CHECK(has_error_for(r, "sample_rate_hz"));
  CHECK(has_error_for(r, "ema_alpha"));
  CHECK(has_error_for(r, "rotor_radius_m"));
}

TEST_CASE("sample rate accepts only 1 and 2 Hz") {
  CHECK(load_config_text("sample_rate_hz = 1\n").ok());
  CHECK(load_config_text("sample_rate_hz = 2\n").ok());
  CHECK(!load_config_text("sample_rate_hz = 3\n").ok());
  CHECK(!load_config_text("sample_rate_hz = 0\n").ok());
}

TEST_CASE("swept area is derived, not settable") {
  const auto r = load_config_text("swept_area_m2 = 7\n");
  CHECK(!r.ok());
  CHECK(has_error_for(r, "swept_area_m2"));
  const auto ok = load_config_text("rotor_radius_m = 1.0\nrotor_height_m = 3.0\n");
  REQUIRE(ok.ok());
  CHECK(ok.config->geometry.swept_area_m2 == doctest::Approx(6.0));
}

TEST_CASE("metadata keys pass through") {
  const auto r = load_config_text(
      "title = My campaign\n"
      "site_coordinates = 52.52N,13.40E\n");
  REQUIRE(r.ok());
  CHECK(r.config->metadata.at("title") == "My campaign");
  CHECK(r.config->metadata.at("site_coordinates") == "52.52N,13.40E");
  // Defaults carry no coordinates; packaging enforces their presence later.
  CHECK(default_config().metadata.count("site_coordinates") == 0);
}

TEST_CASE("cp curve text form parses and rejects garbage") {
  const auto ok = load_config_text("cp_curve = 0:0,1:0.1,2:0.35,3:0.2,4:0\n");
  REQUIRE(ok.ok());
  CHECK(ok.config->cp_curve.points.size() == 5);
  CHECK(ok.config->cp_curve.value(2.0) == doctest::Approx(0.35));
  CHECK(!load_config_text("cp_curve = 1:0.1\n").ok());          // one point
  CHECK(!load_config_text("cp_curve = 2:0.1,1:0.2\n").ok());    // not increasing
  CHECK(!load_config_text("cp_curve = nonsense\n").ok());
}

TEST_CASE("piecewise curve interpolates, clamps and finds its peak") {
  CpCurve c;
  c.points = {{0.0, 0.0}, {1.0, 0.1}, {2.5, 0.42}, {4.0, 0.05}};
  CHECK(c.value(0.0) == doctest::Approx(0.0));
  CHECK(c.value(1.0) == doctest::Approx(0.1));
  CHECK(c.value(0.5) == doctest::Approx(0.05));
  CHECK(c.value(1.75) == doctest::Approx(0.26));
  CHECK(c.value(-1.0) == doctest::Approx(0.0));   // clamp low
  CHECK(c.value(9.0) == doctest::Approx(0.05));   // clamp high
  CHECK(c.peak_lambda() == doctest::Approx(2.5));
  CHECK(c.peak_cp() == doctest::Approx(0.42));
}

TEST_CASE("start_utc accepts ISO-8601 only") {
  const auto ok = load_config_text("start_utc = 2026-03-01T12:00:00Z\n");
  REQUIRE(ok.ok());
  CHECK(iso8601_utc(ok.config->clock.start_utc_s) == "2026-03-01T12:00:00Z");
  CHECK(!load_config_text("start_utc = 1767225600\n").ok());
}

TEST_CASE("site id cannot smuggle path separators") {
  CHECK(!load_config_text("site_id = a/b\n").ok());
  CHECK(load_config_text("site_id = roof-a\n").ok());
}

TEST_CASE("sensor channel knobs apply per channel") {
  const auto r = load_config_text(
      "wind_noise_std = 0.5\n"
      "power_bits = 14\n"
      "temp_min = -40\n");
  REQUIRE(r.ok());
  CHECK(r.config->sensors[size_t(SensorChannel::kWind)].noise_std ==
        doctest::Approx(0.5));
  CHECK(r.config->sensors[size_t(SensorChannel::kPower)].quantization_bits == 14);
  CHECK(r.config->sensors[size_t(SensorChannel::kTemp)].valid_min ==
        doctest::Approx(-40.0));
  CHECK(!load_config_text("wind_bits = 0\n").ok());
  CHECK(!load_config_text("wind_max = -1\nwind_min = 0\n").ok());  // empty span
}

TEST_CASE("invalid rate is bounded") {
  CHECK(load_config_text("invalid_rate = 0.06\n").ok());
  CHECK(!load_config_text("invalid_rate = 0.9\n").ok());
  CHECK(!load_config_text("invalid_rate = -0.1\n").ok());
}
