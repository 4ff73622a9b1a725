#include "shotdown/intensity.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace shotdown {

namespace {

constexpr double kPi = std::numbers::pi;

struct RayMass {
  double kappa;  // sum over outside intervals of a^-alpha - b^-alpha
  double iota;   // r*^-alpha
};

RayMass ray_mass(const Domain& dom, const Point& x, const Point& dir, double alpha) {
  IntervalSet out = dom.outside_on_line(x, dir, kInf);
  RayMass m{0, 0};
  if (out.empty()) return m;
  m.iota = std::pow(out.front().lo, -alpha);
  for (const Interval& iv : out) {
    double hi = iv.hi == kInf ? 0.0 : std::pow(iv.hi, -alpha);
    m.kappa += std::pow(iv.lo, -alpha) - hi;
  }
  return m;
}

// Midpoint-rule directions and weights for one refinement level.
void sphere_nodes(int d, int level, std::vector<Point>& dirs, std::vector<double>& wts) {
  dirs.clear();
  wts.clear();
  if (d == 1) {
    dirs = {Point{1.0}, Point{-1.0}};
    wts = {1.0, 1.0};
    return;
  }
  if (d == 2) {
    int n = 64 << level;
    dirs.reserve(n);
    wts.assign(n, 2 * kPi / n);
    for (int j = 0; j < n; ++j) {
      double a = 2 * kPi * (j + 0.5) / n;
      dirs.push_back(Point{std::cos(a), std::sin(a)});
    }
    return;
  }
  // d >= 3: midpoint product rule in (theta_1,...,theta_{d-2}, phi)
  if (d != 3) throw std::invalid_argument("killing intensities: d > 3 not supported");
  int nt = 16 << level, np = 2 * nt;
  dirs.reserve(static_cast<std::size_t>(nt) * np);
  wts.reserve(static_cast<std::size_t>(nt) * np);
  for (int i = 0; i < nt; ++i) {
    double th = kPi * (i + 0.5) / nt;
    double w = (kPi / nt) * (2 * kPi / np) * std::sin(th);
    for (int j = 0; j < np; ++j) {
      double ph = 2 * kPi * (j + 0.5) / np;
      dirs.push_back(Point{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)});
      wts.push_back(w);
    }
  }
}

}  // namespace

IntensityPair killing_intensities(const StableLaw& law, const Domain& dom, const Point& x,
                                  double target_rel_error) {
  if (!dom.contains(x)) throw std::invalid_argument("killing intensities: x outside domain");
  if (law.dim() != dom.dim()) throw std::invalid_argument("killing intensities: dim mismatch");
  const double a = law.alpha();
  const double front = law.levy_constant() / a;

  IntensityPair prev{}, cur{};
  std::vector<Point> dirs;
  std::vector<double> wts;
  const int max_level = dom.dim() == 1 ? 0 : 10;
  for (int level = 0; level <= max_level; ++level) {
    sphere_nodes(dom.dim(), level, dirs, wts);
    const auto n = dirs.size();
    std::vector<double> kv(n), iv(n);
#pragma omp parallel for schedule(static)
    for (long long j = 0; j < static_cast<long long>(n); ++j) {
      RayMass m = ray_mass(dom, x, dirs[static_cast<std::size_t>(j)], a);
      kv[static_cast<std::size_t>(j)] = m.kappa * wts[static_cast<std::size_t>(j)];
      iv[static_cast<std::size_t>(j)] = m.iota * wts[static_cast<std::size_t>(j)];
    }
    double ks = 0, is = 0;
    for (std::size_t j = 0; j < n; ++j) {  // fixed-order reduction
      ks += kv[j];
      is += iv[j];
    }
    cur = {front * ks, front * is, kInf, n};
    if (level > 0 && prev.iota > 0) {
      cur.rel_change = std::max(std::abs(cur.kappa - prev.kappa) / std::max(cur.kappa, 1e-300),
                                std::abs(cur.iota - prev.iota) / std::max(cur.iota, 1e-300));
      if (cur.rel_change < target_rel_error) return cur;
    }
    prev = cur;
  }
  if (dom.dim() == 1) cur.rel_change = 0;  // two exact rays
  return cur;
}

IntensityProfile difference_profile(const StableLaw& law, const Domain& dom,
                                    const Point& boundary_point, const Point& inward_normal,
                                    const std::vector<double>& deltas, double target_rel_error) {
  IntensityProfile prof;
  prof.alpha = law.alpha();
  Point n = normalized(inward_normal);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (double d : deltas) {
    Point x = boundary_point + d * n;
    if (!dom.contains(x))
      throw std::invalid_argument("difference_profile: sweep point left the domain");
    IntensityPair p = killing_intensities(law, dom, x, target_rel_error);
    prof.rows.push_back({d, x, p.kappa, p.iota, p.iota - p.kappa});
    if (p.iota > p.kappa) {
      double lx = std::log(d), ly = std::log(p.iota - p.kappa);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++m;
    }
  }
  if (m >= 2) {
    double dm = static_cast<double>(m);
    prof.fitted_slope = (dm * sxy - sx * sy) / (dm * sxx - sx * sx);
  }
  return prof;
}

}  // namespace shotdown
