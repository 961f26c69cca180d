#include "winddaq/model.hpp"

#include <cmath>
#include <set>

#include "doctest.h"

using namespace winddaq;

TEST_CASE("flag names round-trip over every mask") {
  for (uint32_t mask = 0; mask <= kAllFlagsMask; ++mask) {
    const auto names = flags_decode(mask);
    const auto enc = flags_encode(names);
    CHECK(enc.ok());
    CHECK(enc.mask == mask);
  }
}

TEST_CASE("flag names are distinct and stable") {
  std::set<std::string_view> seen;
  for (int i = 0; i < kFlagCount; ++i) {
    const auto f = static_cast<QualityFlag>(1u << i);
    const auto name = flag_name(f);
    CHECK(!name.empty());
    CHECK(seen.insert(name).second);
    const auto back = flag_from_name(name);
    REQUIRE(back.has_value());
    CHECK(*back == (1u << i));
  }
  CHECK(flag_name(kFlagRangeWind) == "RANGE_WIND");
  CHECK(flag_name(kFlagBetzExceeded) == "BETZ_EXCEEDED");
  CHECK(!flag_from_name("NOT_A_FLAG").has_value());
  const auto enc = flags_encode({"RANGE_WIND", "bogus"});
  CHECK(!enc.ok());
  CHECK(enc.mask == kFlagRangeWind);
  REQUIRE(enc.unknown.size() == 1);
  CHECK(enc.unknown[0] == "bogus");
}

TEST_CASE("iso8601 round-trips across decades and leap days") {
  CHECK(iso8601_utc(0) == "1970-01-01T00:00:00Z");
  CHECK(iso8601_utc(1767225600) == "2026-01-01T00:00:00Z");
  // 2024-02-29 exists; days since epoch computed independently:
  // 54 years * 365 + 13 leap days (1972..2020) = 19723 days to 2024-01-01,
  // plus 31 (Jan) + 28 = 59 days to Feb 29.
  const int64_t feb29 = (19723 + 59) * int64_t{86400};
  CHECK(iso8601_utc(feb29) == "2024-02-29T00:00:00Z");
  for (int64_t t : {int64_t{0}, int64_t{86399}, int64_t{86400}, feb29,
                    int64_t{1767225600}, int64_t{1767225600 + 15552000}}) {
    const auto back = parse_iso8601_utc(iso8601_utc(t));
    REQUIRE(back.has_value());
    CHECK(*back == t);
  }
  CHECK(!parse_iso8601_utc("2026-13-01T00:00:00Z").has_value());
  CHECK(!parse_iso8601_utc("garbage").has_value());
}

TEST_CASE("civil date advances day-by-day consistently") {
  // Walk 2000 consecutive days; each must advance the (y,m,d) triple by
  // exactly one calendar day per the Gregorian rules.
  auto leap = [](int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; };
  auto days_in = [&](int y, unsigned m) -> unsigned {
    static const unsigned d[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return (m == 2 && leap(y)) ? 29 : d[m - 1];
  };
  CivilDate prev = civil_from_utc(1767225600);
  CHECK(prev.year == 2026);
  CHECK(prev.month == 1);
  CHECK(prev.day == 1);
  for (int k = 1; k < 2000; ++k) {
    const CivilDate cur = civil_from_utc(1767225600 + int64_t{86400} * k);
    CivilDate want = prev;
    if (++want.day > days_in(want.year, want.month)) {
      want.day = 1;
      if (++want.month > 12) {
        want.month = 1;
        ++want.year;
      }
    }
    CHECK(cur.year == want.year);
    CHECK(cur.month == want.month);
    CHECK(cur.day == want.day);
    prev = cur;
  }
}

TEST_CASE("swept area is the bladed rectangle") {
  const TurbineGeometry g = make_geometry(0.5, 2.0, 4);
  CHECK(g.swept_area_m2 == doctest::Approx(2.0));
  CHECK(g.pulses_per_revolution == 4);
  const TurbineGeometry g2 = make_geometry(1.5, 3.0, 6);
  CHECK(g2.swept_area_m2 == doctest::Approx(9.0));
}

TEST_CASE("air density follows the dry ideal gas law") {
  // Independent oracle: rho = p / (R_d T_K) evaluated in the test.
  auto oracle = [](double t_c, double p) { return p / (287.05 * (t_c + 273.15)); };
  const auto std_rho = air_density(15.0, 101325.0);
  REQUIRE(std_rho.has_value());
  CHECK(*std_rho == doctest::Approx(oracle(15.0, 101325.0)).epsilon(1e-12));
  CHECK(*std_rho == doctest::Approx(1.2250).epsilon(5e-4));

  const auto warm = air_density(30.0, 101325.0);
  REQUIRE(warm.has_value());
  CHECK(*warm == doctest::Approx(1.1644).epsilon(5e-4));

  // Linearity in pressure at fixed temperature.
  const auto half = air_density(15.0, 50000.0);
  const auto full = air_density(15.0, 100000.0);
  REQUIRE(half.has_value());
  REQUIRE(full.has_value());
  CHECK(*full == doctest::Approx(2.0 * *half).epsilon(1e-12));

  // Implausible ambient conditions are refused, not divided through.
  CHECK(!air_density(-70.0, 101325.0).has_value());
  CHECK(!air_density(90.0, 101325.0).has_value());
  CHECK(!air_density(15.0, 20000.0).has_value());
  CHECK(!air_density(15.0, 130000.0).has_value());
}

TEST_CASE("cp is power over available wind power") {
  CHECK(compute_cp(300.0, 1.225, 2.0, 10.0) ==
        doctest::Approx(300.0 / 1225.0).epsilon(1e-12));
  CHECK(compute_cp(300.0, 1.225, 2.0, 10.0) == doctest::Approx(0.2449).epsilon(2e-4));
  CHECK(compute_cp(0.0, 1.225, 2.0, 10.0) == 0.0);
  const double cp_hot = compute_cp(1000.0, 1.225, 2.0, 10.0);
  CHECK(cp_hot == doctest::Approx(0.8163).epsilon(2e-4));
  CHECK(cp_hot > kBetzLimit);
}

TEST_CASE("tip-speed ratio algebra") {
  CHECK(compute_lambda(20.0, 0.5, 10.0) == doctest::Approx(1.0));
  CHECK(compute_lambda(0.0, 0.5, 10.0) == 0.0);
  const double base = compute_lambda(7.0, 0.5, 6.0);
  CHECK(compute_lambda(14.0, 0.5, 6.0) == doctest::Approx(2.0 * base));
  CHECK(compute_lambda(7.0, 0.5, 12.0) == doctest::Approx(base / 2.0));
}

TEST_CASE("rpm/omega conversions invert") {
  for (double rpm : {0.0, 30.0, 100.0, 454.0}) {
    CHECK(omega_to_rpm(rpm_to_omega(rpm)) == doctest::Approx(rpm).epsilon(1e-12));
  }
  CHECK(rpm_to_omega(60.0) == doctest::Approx(2.0 * M_PI));
}
