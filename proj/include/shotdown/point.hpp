// Small fixed-capacity Euclidean vector used for positions, directions and jumps.
#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>

namespace shotdown {

inline constexpr int kMaxDim = 8;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Point {
  int dim = 0;
  std::array<double, kMaxDim> v{};

  Point() = default;
  explicit Point(int d) : dim(d) { assert(d >= 1 && d <= kMaxDim); }
  Point(std::initializer_list<double> xs) : dim(static_cast<int>(xs.size())) {
    assert(dim >= 1 && dim <= kMaxDim);
    int i = 0;
    for (double x : xs) v[i++] = x;
  }

  double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }

  std::span<const double> coords() const { return {v.data(), static_cast<std::size_t>(dim)}; }

  Point& operator+=(const Point& o) {
    for (int i = 0; i < dim; ++i) v[i] += o.v[i];
    return *this;
  }
  Point& operator-=(const Point& o) {
    for (int i = 0; i < dim; ++i) v[i] -= o.v[i];
    return *this;
  }
  Point& operator*=(double s) {
    for (int i = 0; i < dim; ++i) v[i] *= s;
    return *this;
  }

  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator*(Point a, double s) { return a *= s; }
  friend Point operator*(double s, Point a) { return a *= s; }
};

inline double dot(const Point& a, const Point& b) {
  assert(a.dim == b.dim);
  double s = 0;
  for (int i = 0; i < a.dim; ++i) s += a.v[i] * b.v[i];
  return s;
}

inline double norm2(const Point& a) { return dot(a, a); }
inline double norm(const Point& a) { return std::sqrt(norm2(a)); }
inline double dist(const Point& a, const Point& b) { return norm(a - b); }

inline Point zero_point(int dim) { return Point(dim); }

inline Point normalized(const Point& a) {
  double n = norm(a);
  assert(n > 0);
  Point r = a;
  r *= 1.0 / n;
  return r;
}

}  // namespace shotdown
