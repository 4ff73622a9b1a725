// The OpenMP path drivers must reproduce the serial reference bit for bit.
#include <doctest.h>

#include <omp.h>

#include "shotdown/sim.hpp"

using namespace shotdown;

TEST_CASE("map_reduce_paths: parallel equals serial exactly") {
  auto fn = [](std::size_t i, std::span<double> out) {
    RngStream rng(77, i);
    out[0] = rng.u01();
    out[1] = rng.normal() * 0.25 + static_cast<double>(i % 7);
  };
  auto a = map_reduce_paths(50000, 2, Exec::kSerial, fn);
  auto b = map_reduce_paths(50000, 2, Exec::kParallel, fn);
  REQUIRE(a.sum[0] == b.sum[0]);
  REQUIRE(a.sum[1] == b.sum[1]);
  REQUIRE(a.sumsq[0] == b.sumsq[0]);
  REQUIRE(a.sumsq[1] == b.sumsq[1]);
}

TEST_CASE("survival estimates are identical across executors and thread counts") {
  StableLaw law(2, 1.0);
  Domain ann = Domain::annulus(1, 2);
  Point x0{1.5, 0.0};
  SimScheme s = SimScheme::jump_adapted_for(ann, 0.5);
  RngStream base(31337, 0);

  Estimate serial = survival_probability(law, ann, x0, 0.4, s, base, 20000, Exec::kSerial);
  Estimate par = survival_probability(law, ann, x0, 0.4, s, base, 20000, Exec::kParallel);
  REQUIRE(serial.value == par.value);
  REQUIRE(serial.stderr_value == par.stderr_value);

  int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  Estimate one = survival_probability(law, ann, x0, 0.4, s, base, 20000, Exec::kParallel);
  omp_set_num_threads(saved);
  REQUIRE(one.value == par.value);
}
