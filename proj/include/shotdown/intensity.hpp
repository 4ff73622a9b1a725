// Killing intensity kappa_D (nu-mass of D^c) and shooting-down intensity
// iota_D (nu-mass of the invisible set) by polar decomposition: the radial
// structure along each direction comes exactly from the CSG ray intervals,
// only the sphere average is numerical (midpoint rule with node doubling).
// kappa <= iota holds exactly per direction, so the quadrature preserves it.
#pragma once

#include <vector>

#include "shotdown/geometry.hpp"
#include "shotdown/stable.hpp"

namespace shotdown {

struct IntensityPair {
  double kappa = 0;
  double iota = 0;
  double rel_change = 0;     // last doubling step's relative change
  std::size_t n_dirs = 0;    // directions used at the final level
};

IntensityPair killing_intensities(const StableLaw& law, const Domain& dom, const Point& x,
                                  double target_rel_error = 1e-6);

inline double kappa(const StableLaw& law, const Domain& dom, const Point& x,
                    double target_rel_error = 1e-6) {
  return killing_intensities(law, dom, x, target_rel_error).kappa;
}
inline double iota(const StableLaw& law, const Domain& dom, const Point& x,
                   double target_rel_error = 1e-6) {
  return killing_intensities(law, dom, x, target_rel_error).iota;
}

struct IntensityProfile {
  struct Row {
    double delta;
    Point x;
    double kappa, iota, diff;
  };
  std::vector<Row> rows;
  double alpha = 0;
  // least-squares slope of log(iota-kappa) against log(delta), over rows with diff > 0
  double fitted_slope = 0;
};

// Evaluates (kappa, iota) along x = boundary_point + delta * inward_normal.
IntensityProfile difference_profile(const StableLaw& law, const Domain& dom,
                                    const Point& boundary_point, const Point& inward_normal,
                                    const std::vector<double>& deltas,
                                    double target_rel_error = 1e-6);

}  // namespace shotdown
