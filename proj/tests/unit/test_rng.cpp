#include "winddaq/rng.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"

using namespace winddaq;

TEST_CASE("identical seeds reproduce identical streams") {
  RngStream a(42, RngStreamId::kEnvWind);
  RngStream b(42, RngStreamId::kEnvWind);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("streams with different ids do not collide") {
  RngStream a(42, RngStreamId::kEnvWind);
  RngStream b(42, RngStreamId::kSensorWind);
  int equal = 0;
  for (int i = 0; i < 1000; ++i) {
    if (a.next_u64() == b.next_u64()) ++equal;
  }
  CHECK(equal == 0);
}

TEST_CASE("nearby campaign seeds decorrelate") {
  // splitmix64 mixing: consecutive seeds must not produce correlated first
  // draws. Check the first draw differs for 100 consecutive seeds.
  std::vector<uint64_t> firsts;
  for (uint64_t s = 1; s <= 100; ++s) {
    firsts.push_back(RngStream(s, RngStreamId::kTest).next_u64());
  }
  for (size_t i = 1; i < firsts.size(); ++i) CHECK(firsts[i] != firsts[i - 1]);
}

TEST_CASE("uniform01 stays in [0,1) and fills the interval") {
  RngStream r(7, RngStreamId::kTest);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  CHECK(lo < 0.001);
  CHECK(hi > 0.999);
  // Mean of U(0,1): 0.5 +- 4 sigma/sqrt(n), sigma = 1/sqrt(12).
  CHECK(sum / n == doctest::Approx(0.5).epsilon(4.0 / std::sqrt(12.0 * n) / 0.5));
}

TEST_CASE("uniform(lo,hi) respects bounds") {
  RngStream r(7, RngStreamId::kTest);
  for (int i = 0; i < 10000; ++i) {
    const double x = r.uniform(-3.0, 5.0);
    CHECK(x >= -3.0);
    CHECK(x < 5.0);
  }
}

TEST_CASE("below(n) is in range and roughly uniform") {
  RngStream r(11, RngStreamId::kTest);
  std::vector<int> counts(10, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const uint64_t v = r.below(10);
    REQUIRE(v < 10);
    ++counts[v];
  }
  // Each cell: mean 10000, std = sqrt(n p (1-p)) = 94.9; allow 5 sigma.
  for (int c : counts) CHECK(std::abs(c - 10000) < 475);
}

TEST_CASE("normal() matches N(0,1) moments") {
  RngStream r(13, RngStreamId::kTest);
  const int n = 100000;
  double sum = 0, sum_sq = 0;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(double(n)));          // 4 sigma
  CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));       // 4 sigma of var
  RngStream shifted(13, RngStreamId::kTest);
  double s2 = 0;
  for (int i = 0; i < 1000; ++i) s2 += shifted.normal(5.0, 2.0);
  CHECK(s2 / 1000 == doctest::Approx(5.0).epsilon(0.06));
}

TEST_CASE("mix_seed separates campaign seed from stream id") {
  CHECK(mix_seed(1, 1) != mix_seed(1, 2));
  CHECK(mix_seed(1, 1) != mix_seed(2, 1));
  // Swapping arguments must not alias (1,2) with (2,1).
  CHECK(mix_seed(1, 2) != mix_seed(2, 1));
}
