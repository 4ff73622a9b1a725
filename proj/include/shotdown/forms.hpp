// Deterministic quadrature of the killed and shot-down Dirichlet forms.
//
// Test functions are supported on finitely many balls inside D, which lets
// every integral reduce to: an outer product-Gauss rule over the support,
// and an inner polar integral whose radial breakpoints come exactly from the
// CSG ray structure. The quadratic difference (f(y)-f(x))^2 <= L^2 |y-x|^2
// kills the jump-kernel singularity for alpha < 2.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "shotdown/geometry.hpp"
#include "shotdown/stable.hpp"

namespace shotdown {

struct TestFunction {
  std::function<double(const Point&)> eval;
  std::vector<BoundingBall> support;  // f vanishes outside these balls
  std::string tag;                    // bump | polynomial-bump | ...

  double operator()(const Point& x) const { return eval(x); }
};

// Smooth mollifier bump: exp(1 - 1/(1-u^2)) on u = |x-c|/r < 1, else 0.
TestFunction bump(const Point& center, double radius);
// (1 - u^2)^3 on u < 1; twice continuously differentiable at the rim.
TestFunction polynomial_bump(const Point& center, double radius);
// Sum of two bumps (used across visibility obstructions).
TestFunction two_lobed(const Point& c1, double r1, const Point& c2, double r2);

struct QuadSpec {
  int radial_outer = 16;     // Gauss-Legendre nodes per support-ball radius
  int angular_outer = 32;    // outer angular nodes
  int angular_inner = 256;   // inner polar directions per outer node
  double radial_tol = 1e-9;  // per-segment tolerance of the inner radial rule
};

struct FormValue {
  double jump_part = 0;     // 1/2 double integral over admissible pairs
  double killing_part = 0;  // int f^2 * (intensity) term
  double total = 0;
  double quadrature_error = 0;  // accumulated error estimates
};

// Killed form: 1/2 iint (f(y)-f(x))^2 nu(y-x) dy dx with f = 0 off D,
// decomposed as the D x D jump part plus int f^2 kappa_D.
FormValue energy_killed(const StableLaw& law, const Domain& dom, const TestFunction& f,
                        const QuadSpec& spec = {});

// Shot-down form: 1/2 iint over chord-in-domain pairs plus int f^2 iota_D.
FormValue energy_shotdown(const StableLaw& law, const Domain& dom, const TestFunction& f,
                          const QuadSpec& spec = {});

// Cross term iint_{D x (D \ D_w)} f(w) nu(z-w) f(z) dz dw.
double visibility_cross_term(const StableLaw& law, const Domain& dom, const TestFunction& f,
                             const QuadSpec& spec = {});

// Hardy pair: lhs = energy_killed total, rhs = int f^2 kappa_D.
struct HardyPair {
  double lhs = 0;
  double rhs = 0;
};
HardyPair hardy_check(const StableLaw& law, const Domain& dom, const TestFunction& f,
                      const QuadSpec& spec = {});

// int over the support of g(x) dx by the product-Gauss rule (exposed for the
// cross-checks in tests).
double integrate_support(const TestFunction& f, const QuadSpec& spec,
                         const std::function<double(const Point&)>& g);

}  // namespace shotdown
