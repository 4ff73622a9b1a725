#include <doctest.h>

#include <cmath>
#include <numbers>

#include "shotdown/intensity.hpp"
#include "shotdown/mc.hpp"

using namespace shotdown;

TEST_CASE("half-space in d=1: closed-form killing intensity") {
  // kappa = A delta^-alpha / alpha; for alpha=1, delta=0.5 this is 2/pi
  Domain hs = Domain::half_space(Point{-1.0}, 0.0);  // {x > 0}
  for (double a : {0.5, 1.0, 1.5}) {
    StableLaw law(1, a);
    for (double delta : {0.25, 0.5, 2.0}) {
      double expect = law.levy_constant() * std::pow(delta, -a) / a;
      IntensityPair p = killing_intensities(law, hs, Point{delta});
      CHECK(p.kappa == doctest::Approx(expect).epsilon(1e-12));
      CHECK(p.iota == doctest::Approx(expect).epsilon(1e-12));  // half-space is convex
    }
  }
  StableLaw law1(1, 1.0);
  CHECK(kappa(law1, hs, Point{0.5}) ==
        doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-12));
  CHECK_THROWS(kappa(law1, hs, Point{-0.5}));
}

TEST_CASE("scaling: kappa_{rD}(rx) = r^-alpha kappa_D(x)") {
  StableLaw law(2, 1.3);
  Domain d1 = Domain::annulus(1, 2);
  Domain d2 = Domain::annulus(2, 4);
  Point x{1.5, 0.4};
  double k1 = kappa(law, d1, x, 1e-8);
  double k2 = kappa(law, d2, 2.0 * x, 1e-8);
  CHECK(k2 == doctest::Approx(std::pow(2.0, -1.3) * k1).epsilon(1e-6));
  double i1 = iota(law, d1, x, 1e-8);
  double i2 = iota(law, d2, 2.0 * x, 1e-8);
  CHECK(i2 == doctest::Approx(std::pow(2.0, -1.3) * i1).epsilon(1e-6));
}

TEST_CASE("boundary blowup: kappa * delta^alpha stays in a band on the ball") {
  StableLaw law(2, 0.8);
  Domain ball = Domain::ball(Point{0.0, 0.0}, 1.0);
  double lo = kInf, hi = 0;
  for (double delta : {0.2, 0.1, 0.05, 0.02, 0.01, 0.005}) {
    double k = kappa(law, ball, Point{1.0 - delta, 0.0}, 1e-7);
    double scaled = k * std::pow(delta, 0.8);
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
  }
  CHECK(hi / lo < 3.0);
}

TEST_CASE("convex domains: iota equals kappa; annulus: strictly larger") {
  StableLaw law(2, 1.0);
  Domain ball = Domain::ball(Point{0.3, -0.2}, 1.7);
  IntensityPair p = killing_intensities(law, ball, Point{0.5, 0.5}, 1e-8);
  CHECK(p.iota == doctest::Approx(p.kappa).epsilon(1e-12));

  Domain ann = Domain::annulus(1, 2);
  IntensityPair q = killing_intensities(law, ann, Point{1.5, 0.0}, 1e-8);
  CHECK(q.iota - q.kappa > 10 * 1e-8 * q.iota);
  CHECK(q.iota - q.kappa > 0.01);
}

TEST_CASE("iota >= kappa > 0 at random interior points of the three-ball domain") {
  StableLaw law(2, 0.7);
  Domain d = Domain::harnack7();
  RngStream rng(404, 0);
  auto pts = d.sample_uniform(rng, 200);
  for (const auto& x : pts) {
    IntensityPair p = killing_intensities(law, d, x, 1e-5);
    REQUIRE(p.kappa > 0);
    REQUIRE(p.iota >= p.kappa);
  }
}

TEST_CASE("iota cross-checked by Monte Carlo jump sampling") {
  StableLaw law(2, 1.0);
  Domain ann = Domain::annulus(1, 2);
  Point x{1.5, 0.0};
  double quad = iota(law, ann, x, 1e-8);

  // jumps above eps <= delta_D(x) cover the whole invisible set
  double eps = 0.4;
  double rate = law.big_jump_rate(eps);
  RngStream rng(2121, 0);
  const std::size_t n = 1000000;
  auto r = map_reduce_paths(n, 1, Exec::kParallel, [&](std::size_t i, std::span<double> out) {
    RngStream s = rng.sub(i);
    double rad = law.sample_big_jump_radius(eps, s);
    Point y = x + rad * s.uniform_direction(2);
    out[0] = (!ann.contains(y) || !ann.chord_in_domain(x, y)) ? 1.0 : 0.0;
  });
  Estimate e = r.estimate(0);
  double mc = rate * e.value;
  double se = rate * e.stderr_value;
  CHECK(std::abs(mc - quad) < 3 * se);
}

TEST_CASE("difference profile slopes") {
  Domain ann = Domain::annulus(1, 2);
  Point q{1.0, 0.0};       // inner boundary point
  Point inward{1.0, 0.0};  // into the annulus
  std::vector<double> deltas;
  for (double d = 0.2; d > 2e-3; d *= 0.6) deltas.push_back(d);

  // alpha > 1: diff ~ delta^{1-alpha}
  {
    StableLaw law(2, 1.5);
    IntensityProfile p = difference_profile(law, ann, q, inward, deltas, 1e-7);
    CHECK(std::abs(p.fitted_slope - (-0.5)) < 0.15);
    for (const auto& row : p.rows) CHECK(row.diff >= 0);
  }
  // alpha < 1: diff stays bounded
  {
    StableLaw law(2, 0.5);
    IntensityProfile p = difference_profile(law, ann, q, inward, deltas, 1e-7);
    double lo = kInf, hi = 0;
    for (const auto& row : p.rows) {
      lo = std::min(lo, row.diff);
      hi = std::max(hi, row.diff);
    }
    CHECK(hi / lo < 10.0);
  }
  // alpha = 1: dominated by the log template
  {
    StableLaw law(2, 1.0);
    IntensityProfile p = difference_profile(law, ann, q, inward, deltas, 1e-7);
    double lo = kInf, hi = 0;
    for (const auto& row : p.rows) {
      double scaled = row.diff / std::log(std::exp(1.0) + 1.0 / row.delta);
      lo = std::min(lo, scaled);
      hi = std::max(hi, scaled);
    }
    CHECK(hi / lo < 10.0);
  }

  StableLaw law(2, 1.5);
  CHECK_THROWS(difference_profile(law, ann, q, Point{-1.0, 0.0}, {0.1}, 1e-6));
}

TEST_CASE("relative difference (iota-kappa)/kappa vanishes towards the boundary") {
  StableLaw law(2, 1.2);
  Domain ann = Domain::annulus(1, 2);
  std::vector<double> deltas = {0.3, 0.1, 0.03, 0.01, 0.003};
  IntensityProfile p = difference_profile(law, ann, Point{1.0, 0.0}, Point{1.0, 0.0}, deltas, 1e-7);
  double prev = kInf;
  for (const auto& row : p.rows) {
    double rel = row.diff / row.kappa;
    CHECK(rel < prev * (1 + 1e-3));
    prev = rel;
  }
}
