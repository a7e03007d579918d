#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "scope/noise_schedule.hpp"
#include "scope/report.hpp"
#include "scope/rng.hpp"

using namespace scope;

TEST_CASE("linear schedule tabulates 1 - k/n exactly") {
  auto s = make_noise_schedule(ScheduleKind::linear, 4);
  REQUIRE(s.sigma.size() == 5);
  CHECK(s.sigma[0] == 1.0);
  CHECK(s.sigma[1] == 0.75);
  CHECK(s.sigma[2] == 0.5);
  CHECK(s.sigma[3] == 0.25);
  CHECK(s.sigma[4] == 0.0);
  CHECK(delta_sigma(s, 0) == -0.25);

  auto one = make_noise_schedule(ScheduleKind::linear, 1);
  REQUIRE(one.sigma.size() == 2);
  CHECK(one.sigma[0] == 1.0);
  CHECK(one.sigma[1] == 0.0);
  CHECK(delta_sigma(one, 0) == -1.0);
}

TEST_CASE("cosine schedule matches the closed form at n = 4") {
  auto s = make_noise_schedule(ScheduleKind::cosine, 4);
  // cos(pi/8)^2 = 1/2 + sqrt(2)/4 and cos(pi/4)^2 = 1/2.
  const double sigma1 = 0.5 + 0.25 * std::sqrt(2.0);
  CHECK(s.sigma[0] == 1.0);
  CHECK(std::abs(s.sigma[1] - sigma1) <= 1e-12);
  CHECK(std::abs(s.sigma[2] - 0.5) <= 1e-12);
  CHECK(s.sigma[4] == 0.0);
  CHECK(std::abs(delta_sigma(s, 1) - (0.5 - sigma1)) <= 1e-12);
}

TEST_CASE("schedules keep exact endpoints, strict decrease, unit total step") {
  const std::vector<int> sizes = {1, 2, 3, 5, 17, 64, 500, 4096, 10000};
  for (ScheduleKind kind : {ScheduleKind::linear, ScheduleKind::cosine}) {
    for (int n : sizes) {
      CAPTURE(n);
      auto s = make_noise_schedule(kind, n);
      REQUIRE(s.sigma.size() == n + 1);
      CHECK(s.sigma[0] == 1.0);
      CHECK(s.sigma[n] == 0.0);
      double total = 0.0;
      bool decreasing = true;
      bool negative = true;
      for (int k = 0; k < n; ++k) {
        decreasing = decreasing && s.sigma[k + 1] < s.sigma[k];
        double d = delta_sigma(s, k);
        negative = negative && d < 0.0;
        total += d;
      }
      CHECK(decreasing);
      CHECK(negative);
      CHECK(std::abs(total + 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("schedule construction and indexing reject bad arguments") {
  CHECK_THROWS_AS(make_noise_schedule(ScheduleKind::linear, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_noise_schedule(ScheduleKind::cosine, -3), std::invalid_argument);
  auto s = make_noise_schedule(ScheduleKind::linear, 3);
  CHECK_THROWS_AS(delta_sigma(s, -1), std::invalid_argument);
  CHECK_THROWS_AS(delta_sigma(s, 3), std::invalid_argument);
  CHECK_NOTHROW(delta_sigma(s, 2));
}

TEST_CASE("schedule kind names round-trip") {
  CHECK(schedule_kind_from_name("linear") == ScheduleKind::linear);
  CHECK(schedule_kind_from_name("cosine") == ScheduleKind::cosine);
  CHECK(schedule_kind_from_name(schedule_kind_name(ScheduleKind::cosine)) == ScheduleKind::cosine);
  CHECK(schedule_kind_from_name(schedule_kind_name(ScheduleKind::linear)) == ScheduleKind::linear);
  CHECK_THROWS_AS(schedule_kind_from_name("quadratic"), std::invalid_argument);
}

TEST_CASE("equal seeds give identical draw streams") {
  Rng a(123456789ull);
  Rng b(123456789ull);
  bool equal = true;
  for (int i = 0; i < 10000; ++i) equal = equal && a.next_u64() == b.next_u64();
  CHECK(equal);

  Rng c(1), d(2);
  bool differ = false;
  for (int i = 0; i < 100; ++i) differ = differ || c.next_u64() != d.next_u64();
  CHECK(differ);
}

TEST_CASE("uniform draws stay inside (0, 1]") {
  Rng rng(7);
  bool in_range = true;
  for (int i = 0; i < 10000; ++i) {
    double u = rng.next_double();
    in_range = in_range && u > 0.0 && u <= 1.0;
  }
  CHECK(in_range);
}

TEST_CASE("normal vectors are deterministic and finite") {
  Rng a(42), b(42);
  Vector va = a.normal_vector(64);
  Vector vb = b.normal_vector(64);
  CHECK((va - vb).norm() == 0.0);
  CHECK(va.allFinite());
  CHECK(std::abs(va.mean()) < 1.0);
}

TEST_CASE("bounded integer draws stay in range") {
  Rng rng(9);
  bool in_range = true;
  bool saw_lo = false;
  bool saw_hi = false;
  for (int i = 0; i < 2000; ++i) {
    int v = rng.next_int(3, 9);
    in_range = in_range && v >= 3 && v <= 9;
    saw_lo = saw_lo || v == 3;
    saw_hi = saw_hi || v == 9;
  }
  CHECK(in_range);
  CHECK(saw_lo);
  CHECK(saw_hi);
}

TEST_CASE("doubles survive the text round trip") {
  const double fixed[] = {0.0,   1.0,    -1.0, 0.1,
                          1.0 / 3.0,     M_PI, 1e-300,
                          1e300, 5e-324, -0.25 * std::sqrt(2.0)};
  for (double x : fixed) CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);

  Rng rng(11);
  bool all_exact = true;
  for (int i = 0; i < 1000; ++i) {
    double x = std::ldexp(rng.next_normal(), rng.next_int(-100, 100));
    all_exact = all_exact && std::strtod(format_double(x).c_str(), nullptr) == x;
  }
  CHECK(all_exact);
}
