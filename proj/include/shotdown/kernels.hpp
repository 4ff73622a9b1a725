// Heat-kernel and Green-function estimators for the killed and shot-down
// processes, the Riesz exit law from a ball, and the one-jump harmonic
// measure with the chord-containment constraint.
//
// Pointwise kernels use the Hunt-formula correction (free kernel minus the
// expected post-stopping contribution); only stopped paths contribute to the
// correction, which keeps the variance low. Both corrections are accumulated
// from the same paths, so coupled comparisons (p_hat vs p_killed) share all
// randomness, and on convex domains they coincide exactly.
#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "shotdown/mc.hpp"
#include "shotdown/sim.hpp"

namespace shotdown {

// delta_D(x)^{a/2} delta_D(y)^{a/2} r^{-a} |x-y|^{a-d}, r = max(dx, |x-y|, dy)
double green_ref(const Domain& dom, double alpha, const Point& x, const Point& y);

class HeatKernelEstimator {
 public:
  HeatKernelEstimator(const StableLaw& law, const Domain& dom, SimScheme scheme);

  struct Pair {
    Estimate p_killed;
    Estimate p_hat;
    double corr_cov = 0;  // covariance of the two per-path corrections
    double p_free = 0;
  };

  // p_D(t,x,y) and p_hat_D(t,x,y) from n common paths started at x.
  Pair estimate(double t, const Point& x, const Point& y, const RngStream& base, std::size_t n,
                Exec exec = Exec::kParallel) const;

  const DensityProfile& profile() const { return profile_; }
  const Domain& domain() const { return dom_; }
  const StableLaw& law() const { return law_; }
  const SimScheme& scheme() const { return scheme_; }

 private:
  StableLaw law_;
  Domain dom_;
  SimScheme scheme_;
  DensityProfile profile_;
};

// Axis-aligned product grid of cells covering [lo, hi] with counts[i] per cell.
struct CellGrid {
  Point lo, hi;
  std::vector<int> shape;  // per coordinate

  std::size_t size() const;
  std::size_t index_of(const Point& p) const;  // size() when outside
  double cell_volume() const;
  Point cell_center(std::size_t idx) const;
};

// Surviving-path landing histogram at time t: estimates of the cell-averaged
// p_hat, i.e. P_x(sigma > t, X_t in cell) / |cell|. total_mass returns the
// plain survival estimate from the same paths.
struct HatHistogram {
  CellGrid grid;
  std::vector<Estimate> density;  // per cell
  Estimate total_mass;
};

HatHistogram p_hat_histogram(const StableLaw& law, const Domain& dom, double t, const Point& x,
                             const CellGrid& grid, const SimScheme& scheme, const RngStream& base,
                             std::size_t n, Exec exec = Exec::kParallel);

// Occupation-time estimate of G_hat(x, y_k) with smoothing balls B(y_k, rho_k),
// all from one ensemble started at x. Also reports the sample-mean lifetime
// min(sigma, T) and the per-cell occupation of a partition when given.
struct GreenBatch {
  std::vector<Estimate> g_hat;          // per target
  Estimate mean_lifetime;               // E[min(sigma, T)]
  double survived_fraction = 0;         // P(sigma > T) truncation indicator
  std::vector<Estimate> cell_occupation;  // per grid cell, if a grid was given
};

GreenBatch green_hat_batch(const StableLaw& law, const Domain& dom, const Point& x,
                           const std::vector<Point>& targets, const std::vector<double>& radii,
                           const SimScheme& scheme, const RngStream& base, std::size_t n,
                           const CellGrid* partition = nullptr, Exec exec = Exec::kParallel);

Estimate green_hat(const StableLaw& law, const Domain& dom, const Point& x, const Point& y,
                   double smoothing_radius, const SimScheme& scheme, const RngStream& base,
                   std::size_t n, Exec exec = Exec::kParallel);

// Doubles the horizon until the surviving fraction in a pilot run drops below
// survive_target; returns the scheme with that horizon.
SimScheme choose_green_horizon(const StableLaw& law, const Domain& dom, const Point& x,
                               double survive_target, const RngStream& base);

// Exit density of the ball B(center, r): for |x-center| < r < |z-center|,
//   C^d_a (r^2-|x|^2)^{a/2} (|z|^2-r^2)^{-a/2} |z-x|^{-d}   (ball at origin),
// with C^d_a = Gamma(d/2) pi^{-d/2-1} sin(pi a/2).
double riesz_exit_density(double alpha, const Point& center, double r, const Point& x,
                          const Point& z);
// Total mass over the exterior, by quadrature (d = 2): should be 1.
double riesz_total_mass_2d(double alpha, double r, const Point& x_rel, double tol = 1e-9);

// E_x[f(X_{tau_B}) ; [X_{tau_B-}, X_{tau_B}] subset D] for a ball B inside D:
// the mean-value payoff of the shot-down process over one exit from B.
template <class Payoff>
Estimate harmonic_measure_shotdown(const StableLaw& law, const Domain& dom, const Point& center,
                                   double radius, const Point& x0, Payoff&& payoff,
                                   const SimScheme& scheme, const RngStream& base, std::size_t n,
                                   Exec exec = Exec::kParallel) {
  Domain ball = Domain::ball(center, radius);
  if (!dom.contains(center)) throw std::invalid_argument("harmonic measure: ball outside domain");
  auto r = map_reduce_paths(n, 1, exec, [&](std::size_t i, std::span<double> out) {
    RngStream rng = base.sub(i);
    PathRecord rec = simulate(law, ball, x0, scheme, rng);
    if (!rec.exited()) return;
    if (!dom.chord_in_domain(rec.x_pre, rec.x_land)) return;
    out[0] = payoff(rec.x_land);
  });
  return r.estimate(0);
}

}  // namespace shotdown
