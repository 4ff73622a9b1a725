// Isotropic alpha-stable law: jump density nu, increment sampling by
// subordination, compound-Poisson big-jump decomposition, and the transition
// density p_t (closed form for alpha = 1, radial Fourier inversion otherwise).
#pragma once

#include <memory>
#include <vector>

#include "shotdown/point.hpp"
#include "shotdown/rng.hpp"

namespace shotdown {

class StableLaw {
 public:
  StableLaw(int dim, double alpha);

  int dim() const { return dim_; }
  double alpha() const { return alpha_; }

  // A_{d,alpha} = 2^a Gamma((d+a)/2) pi^{-d/2} / |Gamma(-a/2)|, normalized so
  // that int [1-cos(xi.z)] nu(z) dz = |xi|^alpha.
  double levy_constant() const { return levy_const_; }
  double sphere_area() const { return sphere_area_; }  // |S^{d-1}|

  double levy_density(const Point& z) const;   // nu(z), throws at z = 0
  double levy_density_radial(double r) const;  // nu on |z| = r

  // nu({|z| > eps}) = A w_{d-1} eps^{-alpha} / alpha
  double big_jump_rate(double eps) const;
  // per-coordinate variance of the |z| < eps jump part:
  // sigma^2(eps) = A w_{d-1} eps^{2-alpha} / (d (2-alpha))
  double small_jump_variance(double eps) const;

  // One-sided alpha/2-stable subordinator S_t with E exp(-u S_t) = exp(-t u^{alpha/2}),
  // drawn by the Chambers-Mallows-Stuck / Kanter representation.
  double sample_subordinator(double t, RngStream& rng) const;

  // X_t = sqrt(2 S_t) * N(0, I_d); the characteristic function is exp(-t|xi|^alpha).
  Point sample_increment(double t, RngStream& rng) const;

  struct BigJump {
    double waiting_time;  // Exponential(big_jump_rate(eps))
    Point jump;           // |jump| > eps, direction uniform, radius ~ r^{-1-alpha}
  };
  BigJump sample_big_jump(double eps, RngStream& rng) const;
  double sample_big_jump_radius(double eps, RngStream& rng) const;

  // two-sided bound shape: t^{-d/alpha} /\ t |x|^{-d-alpha}
  double envelope(double t, double r) const;

 private:
  int dim_;
  double alpha_;
  double levy_const_;
  double sphere_area_;
};

struct DensityEval {
  double value = 0;
  enum class Method { kClosedForm, kFourierInversion } method = Method::kClosedForm;
  double abs_error_bound = 0;
};

// p_t(x) for |x| = r. For alpha = 1 the Cauchy-type closed form is used and the
// bound is 0; otherwise adaptive Gauss-Kronrod inversion of the radial Fourier
// integral with an analytic truncation-tail bound. If the quadrature cannot
// certify target_abs_error, the achieved bound is reported.
DensityEval stable_density(const StableLaw& law, double t, double r, double target_abs_error);

inline DensityEval stable_density(const StableLaw& law, double t, const Point& x,
                                  double target_abs_error) {
  return stable_density(law, t, norm(x), target_abs_error);
}

// Cached radial profile of p_1 for fast repeated evaluation; p_t follows by
// scaling. Log-log interpolation on a dense grid, handing over to the
// large-argument expansion (leading term: the nu tail) beyond the grid.
class DensityProfile {
 public:
  explicit DensityProfile(const StableLaw& law, double rel_tol = 1e-6);

  double p1(double s) const;
  double operator()(double t, double r) const;
  double operator()(double t, const Point& x, const Point& y) const {
    return (*this)(t, dist(x, y));
  }
  const StableLaw& law() const { return law_; }

 private:
  StableLaw law_;
  double s_min_, s_max_;  // grid range; asymptotic series beyond s_max
  double log_s_min_, inv_dlog_;
  std::vector<double> log_p_;  // at log-spaced s nodes
  double p0_;                  // p_1(0)
};

}  // namespace shotdown
