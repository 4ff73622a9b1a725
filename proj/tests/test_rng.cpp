#include <doctest.h>

#include <cmath>
#include <set>

#include "shotdown/rng.hpp"

using namespace shotdown;

TEST_CASE("streams are reproducible and position-independent") {
  RngStream a(99, 5), b(99, 5);
  for (int i = 0; i < 100; ++i) REQUIRE(a.next_u32() == b.next_u32());

  RngStream c(99, 6);
  bool differs = false;
  for (int i = 0; i < 8; ++i) differs |= (a.next_u32() != c.next_u32());
  CHECK(differs);
}

TEST_CASE("sub-streams do not collide") {
  RngStream root(1, 0);
  std::set<std::uint64_t> firsts;
  for (std::uint64_t k = 0; k < 2000; ++k) {
    RngStream s = root.sub(k);
    firsts.insert(s.next_u64());
  }
  CHECK(firsts.size() == 2000);
}

TEST_CASE("u01 and normal moments") {
  RngStream r(7, 1);
  const int n = 200000;
  double su = 0, su2 = 0, sn = 0, sn2 = 0;
  for (int i = 0; i < n; ++i) {
    double u = r.u01();
    REQUIRE(u > 0);
    REQUIRE(u < 1);
    su += u;
    su2 += u * u;
    double z = r.normal();
    sn += z;
    sn2 += z * z;
  }
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(su2 / n == doctest::Approx(1.0 / 3).epsilon(0.01));
  CHECK(sn / n == doctest::Approx(0.0).epsilon(1).scale(0.01));
  CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("uniform direction has zero mean and unit norm") {
  for (int d : {1, 2, 3}) {
    RngStream r(11, static_cast<std::uint64_t>(d));
    Point mean(d);
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      Point w = r.uniform_direction(d);
      REQUIRE(norm(w) == doctest::Approx(1.0).epsilon(1e-12));
      mean += (1.0 / n) * w;
    }
    for (int i = 0; i < d; ++i) CHECK(std::abs(mean[i]) < 0.02);
  }
}
