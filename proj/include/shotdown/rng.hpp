// Counter-based random streams (Philox4x32-10, Salmon et al. 2011).
//
// A stream is addressed by (seed, stream id). Streams are statistically
// independent, cheap to construct, and draws depend only on the stream's own
// counter, so estimates are reproducible under any thread count or execution
// order. Derived sub-streams are obtained by hashing the parent id.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "shotdown/point.hpp"

namespace shotdown {

namespace detail {

// SplitMix64 finalizer, used for stream-id derivation.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

class RngStream {
 public:
  using result_type = std::uint32_t;

  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t seed, std::uint64_t stream)
      : key0_(static_cast<std::uint32_t>(seed)),
        key1_(static_cast<std::uint32_t>(seed >> 32)),
        stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return 0xffffffffu; }

  // Independent child stream; the child's id mixes the parent id and k.
  RngStream sub(std::uint64_t k) const {
    std::uint64_t seed = (static_cast<std::uint64_t>(key1_) << 32) | key0_;
    return RngStream(seed, detail::mix64(stream_ ^ detail::mix64(k + 0x632be59bd9b4e019ULL)));
  }

  result_type operator()() { return next_u32(); }

  std::uint32_t next_u32() {
    if (idx_ == 4) {
      block();
      idx_ = 0;
    }
    return out_[idx_++];
  }

  std::uint64_t next_u64() {
    std::uint64_t lo = next_u32(), hi = next_u32();
    return (hi << 32) | lo;
  }

  // Uniform on (0,1), 53 random bits, never exactly 0 or 1.
  double u01() {
    std::uint64_t r = next_u64() >> 11;
    return (static_cast<double>(r) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * u01(); }

  double exponential() { return -std::log(u01()); }

  // Box-Muller; the spare value is cached within the stream.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u = u01(), v = u01();
    double r = std::sqrt(-2.0 * std::log(u));
    double a = 2.0 * std::numbers::pi * v;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  Point normal_vector(int dim) {
    Point p(dim);
    for (int i = 0; i < dim; ++i) p[i] = normal();
    return p;
  }

  Point uniform_direction(int dim) {
    if (dim == 1) return Point{next_u32() & 1u ? 1.0 : -1.0};
    if (dim == 2) {
      double a = 2.0 * std::numbers::pi * u01();
      return Point{std::cos(a), std::sin(a)};
    }
    while (true) {
      Point p = normal_vector(dim);
      double n2 = norm2(p);
      if (n2 > 1e-300) {
        p *= 1.0 / std::sqrt(n2);
        return p;
      }
    }
  }

  // Uniform point in the ball B(center, radius).
  Point uniform_in_ball(const Point& center, double radius) {
    Point dir = uniform_direction(center.dim);
    double r = radius * std::pow(u01(), 1.0 / center.dim);
    return center + r * dir;
  }

 private:
  void block() {
    std::uint32_t c0 = static_cast<std::uint32_t>(ctr_);
    std::uint32_t c1 = static_cast<std::uint32_t>(ctr_ >> 32);
    std::uint32_t c2 = static_cast<std::uint32_t>(stream_);
    std::uint32_t c3 = static_cast<std::uint32_t>(stream_ >> 32);
    std::uint32_t k0 = key0_, k1 = key1_;
    for (int round = 0; round < 10; ++round) {
      std::uint64_t p0 = 0xD2511F53ULL * c0;
      std::uint64_t p1 = 0xCD9E8D57ULL * c2;
      std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
      std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
      std::uint32_t n0 = hi1 ^ c1 ^ k0;
      std::uint32_t n1 = lo1;
      std::uint32_t n2 = hi0 ^ c3 ^ k1;
      std::uint32_t n3 = lo0;
      c0 = n0; c1 = n1; c2 = n2; c3 = n3;
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    out_[0] = c0; out_[1] = c1; out_[2] = c2; out_[3] = c3;
    ++ctr_;
  }

  std::uint32_t key0_, key1_;
  std::uint64_t stream_;
  std::uint64_t ctr_ = 0;
  std::uint32_t out_[4] = {};
  int idx_ = 4;
  double spare_ = 0;
  bool have_spare_ = false;
};

}  // namespace shotdown
