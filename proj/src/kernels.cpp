#include "shotdown/kernels.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace shotdown {

namespace {
constexpr double kPi = std::numbers::pi;
}

double green_ref(const Domain& dom, double alpha, const Point& x, const Point& y) {
  double dx = dom.dist_to_complement(x), dy = dom.dist_to_complement(y);
  double xy = dist(x, y);
  if (dx <= 0 || dy <= 0 || xy <= 0)
    throw std::invalid_argument("green_ref: needs distinct interior points");
  double r = std::max({dx, xy, dy});
  int d = dom.dim();
  return std::pow(dx, alpha / 2) * std::pow(dy, alpha / 2) * std::pow(r, -alpha) *
         std::pow(xy, alpha - d);
}

HeatKernelEstimator::HeatKernelEstimator(const StableLaw& law, const Domain& dom, SimScheme scheme)
    : law_(law), dom_(dom), scheme_(scheme), profile_(law) {
  if (law.dim() != dom.dim()) throw std::invalid_argument("heat kernel: dimension mismatch");
}

HeatKernelEstimator::Pair HeatKernelEstimator::estimate(double t, const Point& x, const Point& y,
                                                        const RngStream& base, std::size_t n,
                                                        Exec exec) const {
  if (t <= 0 || t > scheme_.horizon)
    throw std::invalid_argument("heat kernel: t must lie in (0, horizon]");

  // out = {corr_tau, corr_sigma, corr_tau * corr_sigma}
  auto r = map_reduce_paths(n, 3, exec, [&](std::size_t i, std::span<double> out) {
    RngStream rng = base.sub(i);
    PathRecord rec = simulate(law_, dom_, x, scheme_, rng);
    double ck = 0, ch = 0;
    if (rec.tau < t) ck = profile_(t - rec.tau, rec.x_exit, y);
    if (rec.sigma < t) ch = profile_(t - rec.sigma, rec.x_land, y);
    out[0] = ck;
    out[1] = ch;
    out[2] = ck * ch;
  });

  Pair p;
  p.p_free = profile_(t, x, y);
  Estimate ck = r.estimate(0), ch = r.estimate(1);
  p.p_killed = {p.p_free - ck.value, ck.stderr_value, n, {}};
  p.p_hat = {p.p_free - ch.value, ch.stderr_value, n, {}};
  double nn = static_cast<double>(n);
  double sample_cov = (r.sum[2] - nn * ck.value * ch.value) / (nn - 1);
  p.corr_cov = sample_cov / nn;  // covariance of the two correction means
  return p;
}

std::size_t CellGrid::size() const {
  std::size_t s = 1;
  for (int k : shape) s *= static_cast<std::size_t>(k);
  return s;
}

double CellGrid::cell_volume() const {
  double v = 1;
  for (std::size_t i = 0; i < shape.size(); ++i)
    v *= (hi[static_cast<int>(i)] - lo[static_cast<int>(i)]) / shape[i];
  return v;
}

std::size_t CellGrid::index_of(const Point& p) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    double a = lo[static_cast<int>(i)], b = hi[static_cast<int>(i)];
    double u = (p[static_cast<int>(i)] - a) / (b - a);
    if (u < 0 || u >= 1) return size();
    idx = idx * static_cast<std::size_t>(shape[i]) +
          static_cast<std::size_t>(u * static_cast<double>(shape[i]));
  }
  return idx;
}

Point CellGrid::cell_center(std::size_t idx) const {
  Point c(lo.dim);
  for (std::size_t i = shape.size(); i-- > 0;) {
    auto k = static_cast<std::size_t>(shape[i]);
    std::size_t j = idx % k;
    idx /= k;
    double a = lo[static_cast<int>(i)], b = hi[static_cast<int>(i)];
    c[static_cast<int>(i)] = a + (b - a) * (static_cast<double>(j) + 0.5) / static_cast<double>(k);
  }
  return c;
}

namespace {

// Visitor that captures the position occupied at one fixed time.
struct SliceVisitor {
  double t_slice;
  Point pos;
  bool have = false;
  void segment(double t0, const Point& x, double dt) {
    if (t0 <= t_slice && t_slice < t0 + dt) {
      pos = x;
      have = true;
    }
  }
};

}  // namespace

HatHistogram p_hat_histogram(const StableLaw& law, const Domain& dom, double t, const Point& x,
                             const CellGrid& grid, const SimScheme& scheme, const RngStream& base,
                             std::size_t n, Exec exec) {
  if (grid.size() == 0) throw std::invalid_argument("p_hat_histogram: empty grid");
  if (t <= 0 || t > scheme.horizon)
    throw std::invalid_argument("p_hat_histogram: t must lie in (0, horizon]");
  const std::size_t nc = grid.size();
  SimScheme local = scheme;
  local.horizon = t + scheme.h;  // guarantees a skeleton segment containing t

  auto r = map_reduce_paths(n, nc + 1, exec, [&](std::size_t i, std::span<double> out) {
    RngStream rng = base.sub(i);
    SliceVisitor sv{t, Point(x.dim), false};
    PathRecord rec = simulate(law, dom, x, local, rng, sv);
    if (!(rec.sigma > t) || !sv.have) return;
    out[nc] = 1.0;
    std::size_t idx = grid.index_of(sv.pos);
    if (idx < nc) out[idx] = 1.0;
  });

  HatHistogram h;
  h.grid = grid;
  h.density.resize(nc);
  double vol = grid.cell_volume();
  for (std::size_t c = 0; c < nc; ++c) {
    double p = r.mean(c);
    double se = std::sqrt(std::max(p * (1 - p), 0.0) / static_cast<double>(n));
    h.density[c] = {p / vol, se / vol, n, {}};
  }
  double ps = r.mean(nc);
  h.total_mass = {ps, std::sqrt(std::max(ps * (1 - ps), 0.0) / static_cast<double>(n)), n, {}};
  return h;
}

namespace {

struct OccupationVisitor {
  const std::vector<Point>* targets;
  const std::vector<double>* radii;
  const CellGrid* partition;
  std::span<double> occupation;  // per target
  std::span<double> cells;       // per partition cell
  double lifetime = 0;

  void segment(double, const Point& pos, double dt) {
    lifetime += dt;
    for (std::size_t k = 0; k < targets->size(); ++k) {
      double r = (*radii)[k];
      if (dist(pos, (*targets)[k]) < r) occupation[k] += dt;
    }
    if (partition) {
      std::size_t idx = partition->index_of(pos);
      if (idx < cells.size()) cells[idx] += dt;
    }
  }
};

}  // namespace

GreenBatch green_hat_batch(const StableLaw& law, const Domain& dom, const Point& x,
                           const std::vector<Point>& targets, const std::vector<double>& radii,
                           const SimScheme& scheme, const RngStream& base, std::size_t n,
                           const CellGrid* partition, Exec exec) {
  if (targets.size() != radii.size())
    throw std::invalid_argument("green_hat_batch: targets/radii size mismatch");
  const std::size_t nt = targets.size();
  const std::size_t nc = partition ? partition->size() : 0;
  // outputs: per-target occupation, lifetime, survived flag, partition cells
  const std::size_t k_out = nt + 2 + nc;

  auto r = map_reduce_paths(n, k_out, exec, [&](std::size_t i, std::span<double> out) {
    RngStream rng = base.sub(i);
    OccupationVisitor ov{&targets, &radii, partition, out.subspan(0, nt),
                         out.subspan(nt + 2, nc), 0};
    PathRecord rec = simulate(law, dom, x, scheme, rng, ov);
    out[nt] = ov.lifetime;
    out[nt + 1] = rec.shot_down() ? 0.0 : 1.0;
  });

  GreenBatch g;
  g.g_hat.resize(nt);
  const int d = dom.dim();
  for (std::size_t k = 0; k < nt; ++k) {
    double vol = std::pow(radii[k], d) * std::pow(kPi, d / 2.0) /
                 boost::math::tgamma(d / 2.0 + 1);  // |B(0,rho)|
    Estimate occ = r.estimate(k);
    g.g_hat[k] = {occ.value / vol, occ.stderr_value / vol, n,
                  "smoothing_radius=" + std::to_string(radii[k]) +
                      " substep=" + std::to_string(scheme.h) +
                      " horizon=" + std::to_string(scheme.horizon)};
  }
  g.mean_lifetime = r.estimate(nt);
  g.survived_fraction = r.mean(nt + 1);
  if (partition) {
    g.cell_occupation.resize(nc);
    for (std::size_t c = 0; c < nc; ++c) g.cell_occupation[c] = r.estimate(nt + 2 + c);
  }
  return g;
}

Estimate green_hat(const StableLaw& law, const Domain& dom, const Point& x, const Point& y,
                   double smoothing_radius, const SimScheme& scheme, const RngStream& base,
                   std::size_t n, Exec exec) {
  double xy = dist(x, y), dy = dom.dist_to_complement(y);
  if (!(smoothing_radius < xy / 2 && smoothing_radius < dy / 2))
    throw std::invalid_argument("green_hat: smoothing radius too large for the pair");
  GreenBatch b = green_hat_batch(law, dom, x, {y}, {smoothing_radius}, scheme, base, n, nullptr,
                                 exec);
  return b.g_hat[0];
}

SimScheme choose_green_horizon(const StableLaw& law, const Domain& dom, const Point& x,
                               double survive_target, const RngStream& base) {
  SimScheme s = SimScheme::jump_adapted_for(dom, 1.0);
  for (int it = 0; it < 16; ++it) {
    const std::size_t pilot = 2000;
    auto r = map_reduce_paths(pilot, 1, Exec::kParallel, [&](std::size_t i, std::span<double> out) {
      RngStream rng = base.sub(900000 + i);
      PathRecord rec = simulate(law, dom, x, s, rng);
      out[0] = rec.shot_down() ? 0.0 : 1.0;
    });
    if (r.mean(0) < survive_target) return s;
    s.horizon *= 2;
    s.h = 1e-3 * s.horizon;
  }
  return s;
}

double riesz_exit_density(double alpha, const Point& center, double r, const Point& x,
                          const Point& z) {
  Point xr = x - center, zr = z - center;
  double nx = norm(xr), nz = norm(zr);
  if (!(nx < r && r < nz))
    throw std::invalid_argument("riesz_exit_density: need |x| < r < |z|");
  int d = x.dim;
  double c = boost::math::tgamma(d / 2.0) * std::pow(kPi, -d / 2.0 - 1) *
             std::sin(kPi * alpha / 2);
  return c * std::pow(r * r - nx * nx, alpha / 2) * std::pow(nz * nz - r * r, -alpha / 2) *
         std::pow(dist(zr, xr), -d);
}

double riesz_total_mass_2d(double alpha, double r, const Point& x_rel, double tol) {
  const double nx = norm(x_rel);
  if (!(nx < r)) throw std::invalid_argument("riesz_total_mass_2d: need |x| < r");
  const double c = std::pow(kPi, -2.0) * std::sin(kPi * alpha / 2) *
                   std::pow(r * r - nx * nx, alpha / 2);
  // radial form, angle measured from the direction of x; s^2 - r^2 is carried
  // as u (2r + u) with u = s - r to stay exact near the singular endpoint
  auto angular_u = [&](double u) {
    double s = r + u;
    double s2r2 = u * (2 * r + u);
    auto f = [&](double phi) {
      double zx2 = s * s - 2 * s * nx * std::cos(phi) + nx * nx;
      return c * std::pow(s2r2, -alpha / 2) / zx2;
    };
    double err = 0;
    return 2 * s *
           boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, kPi, 10, 1e-11,
                                                                         &err);
  };
  auto angular = [&](double s) { return angular_u(s - r); };
  // endpoint singularity at u = 0; the power tail is flattened by w = s^-alpha
  boost::math::quadrature::tanh_sinh<double> ts;
  double mid = 2 * r + 2 * norm(x_rel);
  double v = ts.integrate(angular_u, 0.0, mid - r, tol);
  auto tail = [&](double w) {
    double s = std::pow(w, -1.0 / alpha);
    return angular(s) * std::pow(w, -1.0 / alpha - 1.0) / alpha;
  };
  v += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(tail, 0.0,
                                                                     std::pow(mid, -alpha), 12,
                                                                     1e-10);
  return v;
}

}  // namespace shotdown
