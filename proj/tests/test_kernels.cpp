#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "shotdown/kernels.hpp"

using namespace shotdown;

namespace {
constexpr double kPi = std::numbers::pi;

double combined_se(const Estimate& a, const Estimate& b) {
  return std::hypot(a.stderr_value, b.stderr_value);
}
}  // namespace

TEST_CASE("green_ref: positivity and symmetry") {
  Domain ann = Domain::annulus(1, 2);
  Point x{1.5, 0.0}, y{0.0, -1.7};
  double g1 = green_ref(ann, 1.0, x, y);
  double g2 = green_ref(ann, 1.0, y, x);
  CHECK(g1 > 0);
  CHECK(g1 == doctest::Approx(g2).epsilon(1e-14));
  CHECK_THROWS(green_ref(ann, 1.0, x, x));
  CHECK_THROWS(green_ref(ann, 1.0, x, Point{0.5, 0.0}));
}

TEST_CASE("hunt estimator: free space means no correction") {
  StableLaw law(2, 1.0);
  Domain all = Domain::whole_space(2);
  SimScheme s;
  s.mode = SimScheme::Mode::kJumpAdapted;
  s.eps_jump = 0.1;
  s.h = 1e-3;
  s.horizon = 0.3;
  HeatKernelEstimator est(law, all, s);
  Point x{0.0, 0.0}, y{1.0, 1.0};
  auto p = est.estimate(0.25, x, y, RngStream(3, 3), 200);
  CHECK(p.p_hat.value == p.p_free);
  CHECK(p.p_hat.stderr_value == 0);
  CHECK(p.p_killed.value == p.p_free);
}

TEST_CASE("hunt estimator on the ball: correction is nonnegative, coupled pair identical") {
  StableLaw law(2, 1.0);
  Domain ball = Domain::ball(Point{0.0, 0.0}, 1.0);
  SimScheme s = SimScheme::jump_adapted_for(ball, 0.1);
  HeatKernelEstimator est(law, ball, s);
  Point o{0.0, 0.0};
  auto p = est.estimate(0.1, o, o, RngStream(9, 1), 20000);
  CHECK(p.p_hat.value > 0);
  CHECK(p.p_hat.value <= p.p_free);
  // convex: sigma = tau pathwise, so the two corrections agree exactly
  CHECK(p.p_hat.value == p.p_killed.value);
  CHECK(p.p_hat.stderr_value == p.p_killed.stderr_value);
}

TEST_CASE("killed kernel vanishes far outside the domain") {
  StableLaw law(2, 1.0);
  Domain ball = Domain::ball(Point{0.0, 0.0}, 1.0);
  SimScheme s = SimScheme::jump_adapted_for(ball, 0.5);
  HeatKernelEstimator est(law, ball, s);
  auto p = est.estimate(0.5, Point{0.0, 0.0}, Point{4.0, 0.0}, RngStream(10, 2), 40000);
  CHECK(std::abs(p.p_killed.value) < 3 * p.p_killed.stderr_value + 1e-4);
}

TEST_CASE("shot-down kernel is symmetric within noise on the annulus") {
  StableLaw law(2, 1.0);
  Domain ann = Domain::annulus(1, 2);
  SimScheme s = SimScheme::jump_adapted_for(ann, 0.5);
  HeatKernelEstimator est(law, ann, s);
  Point x{1.5, 0.0}, y{0.0, 1.5};
  const std::size_t n = 100000;
  auto pxy = est.estimate(0.5, x, y, RngStream(77, 1), n);
  auto pyx = est.estimate(0.5, y, x, RngStream(77, 2), n);
  CHECK(std::abs(pxy.p_hat.value - pyx.p_hat.value) <
        3 * combined_se(pxy.p_hat, pyx.p_hat));
  // and the ordering p_hat <= p_killed holds as estimates on coupled paths
  CHECK(pxy.p_hat.value <= pxy.p_killed.value + 1e-12);
}

TEST_CASE("histogram: mass equals survival and cells match pointwise estimates") {
  StableLaw law(2, 1.0);
  Domain ann = Domain::annulus(1, 2);
  SimScheme s = SimScheme::jump_adapted_for(ann, 0.4);
  Point x{1.5, 0.0};
  CellGrid grid{Point{-2.0, -2.0}, Point{2.0, 2.0}, {10, 10}};
  double t = 0.4;
  auto h = p_hat_histogram(law, ann, t, x, grid, s, RngStream(55, 0), 100000);

  double mass = 0;
  for (const auto& e : h.density) mass += e.value * grid.cell_volume();
  CHECK(mass == doctest::Approx(h.total_mass.value).epsilon(1e-9));

  Estimate surv = survival_probability(law, ann, x, t, s, RngStream(55, 0), 100000);
  CHECK(h.total_mass.value == surv.value);  // same paths, same indicator

  // cells fully outside the annulus hold no mass
  std::size_t center_cell = grid.index_of(Point{0.1, 0.1});
  CHECK(h.density[center_cell].value == 0);

  // a bulk cell against the pointwise hunt estimator
  HeatKernelEstimator est(law, ann, s);
  std::size_t probe = grid.index_of(Point{1.4, 0.6});
  Point c = grid.cell_center(probe);
  auto pt = est.estimate(t, x, c, RngStream(56, 0), 100000);
  double cell_bias = 0.15 * pt.p_hat.value + 0.01;  // smoothing over a 0.4-cell
  CHECK(std::abs(h.density[probe].value - pt.p_hat.value) <
        3 * combined_se(h.density[probe], pt.p_hat) + cell_bias);
}

TEST_CASE("occupation identity: partition sum equals mean lifetime") {
  StableLaw law(2, 1.0);
  Domain ann = Domain::annulus(1, 2);
  SimScheme s = SimScheme::jump_adapted_for(ann, 4.0);
  CellGrid part{Point{-2.001, -2.001}, Point{2.001, 2.001}, {8, 8}};
  GreenBatch g = green_hat_batch(law, ann, Point{1.5, 0.0}, {Point{-1.5, 0.0}}, {0.1}, s,
                                 RngStream(3131, 0), 20000, &part);
  double cell_sum = 0;
  for (const auto& e : g.cell_occupation) cell_sum += e.value;
  CHECK(cell_sum == doctest::Approx(g.mean_lifetime.value).epsilon(1e-9));
  CHECK(g.survived_fraction < 0.05);
}

TEST_CASE("green symmetry and scaling") {
  StableLaw law(2, 1.0);
  Domain ann = Domain::annulus(1, 2);
  Point x{1.5, 0.0}, y{-1.5, 0.0};
  SimScheme sx = choose_green_horizon(law, ann, x, 1e-3, RngStream(8, 8));
  const std::size_t n = 60000;
  Estimate gxy = green_hat(law, ann, x, y, 0.12, sx, RngStream(8, 1), n);
  Estimate gyx = green_hat(law, ann, y, x, 0.12, sx, RngStream(8, 2), n);
  CHECK(gxy.value > 0);
  CHECK(std::abs(gxy.value - gyx.value) < 3 * combined_se(gxy, gyx) + 0.02 * gxy.value);

  // doubling the domain and the pair scales the green function by 2^{a-d}
  Domain ann2 = Domain::annulus(2, 4);
  SimScheme sx2 = choose_green_horizon(law, ann2, 2.0 * x, 1e-3, RngStream(8, 9));
  Estimate g2 = green_hat(law, ann2, 2.0 * x, 2.0 * y, 0.24, sx2, RngStream(8, 3), n);
  double ratio = g2.value / gxy.value;
  double se = ratio * std::hypot(g2.stderr_value / g2.value, gxy.stderr_value / gxy.value);
  CHECK(std::abs(ratio - 0.5) < 3 * se + 0.03);
}

TEST_CASE("riesz exit density: mass, radial symmetry, argument checks") {
  Point o{0.0, 0.0};
  for (double a : {0.5, 1.0, 1.5}) {
    CHECK(riesz_total_mass_2d(a, 1.0, o) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(riesz_total_mass_2d(a, 1.0, Point{0.3, -0.4}) == doctest::Approx(1.0).epsilon(1e-7));
  }
  double d1 = riesz_exit_density(0.7, o, 1.0, o, Point{1.7, 0.4});
  double d2 = riesz_exit_density(0.7, o, 1.0, o, Point{-0.4, 1.7});
  CHECK(d1 == doctest::Approx(d2).epsilon(1e-13));
  CHECK_THROWS(riesz_exit_density(0.7, o, 1.0, Point{1.2, 0.0}, Point{2.0, 0.0}));
  CHECK_THROWS(riesz_exit_density(0.7, o, 1.0, o, Point{0.5, 0.0}));
}

TEST_CASE("simulated exit law from the ball matches the riesz density (chi-square)") {
  StableLaw law(2, 1.0);
  Domain ball = Domain::ball(Point{0.0, 0.0}, 1.0);
  SimScheme s = SimScheme::jump_adapted_for(ball, 64.0);
  s.h = 1e-3;
  Point o{0.0, 0.0};

  // radial quantile edges of the exit law from the center
  const int nr = 8, na = 4;
  auto radial_cdf = [&](double rho) {
    auto f = [&](double u) {
      Point z{u, 0.0};
      return riesz_exit_density(1.0, o, 1.0, o, z) * 2 * kPi * u;
    };
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 1.0, rho, 12, 1e-10);
  };
  std::vector<double> edges{1.0};
  for (int k = 1; k < nr; ++k) {
    double target = static_cast<double>(k) / nr, lo = 1.0, hi = 1e9;
    for (int it = 0; it < 200; ++it) {
      double mid = std::sqrt(lo * hi);
      (radial_cdf(mid) < target ? lo : hi) = mid;
    }
    edges.push_back(std::sqrt(lo * hi));
  }
  edges.push_back(kInf);

  const std::size_t n = 30000;
  std::vector<double> counts(static_cast<std::size_t>(nr) * na, 0.0);
  RngStream base(616, 0);
  for (std::size_t i = 0; i < n; ++i) {
    RngStream rng = base.sub(i);
    PathRecord rec = simulate(law, ball, o, s, rng);
    REQUIRE(rec.exited());
    double rho = norm(rec.x_exit);
    double phi = std::atan2(rec.x_exit[1], rec.x_exit[0]) + kPi;
    int ri = 0;
    while (!(rho >= edges[ri] && rho < edges[ri + 1])) ++ri;
    int ai = std::min(na - 1, static_cast<int>(phi / (2 * kPi / na)));
    counts[static_cast<std::size_t>(ri) * na + ai] += 1;
  }
  double expect = static_cast<double>(n) / (nr * na);
  double chi2 = 0;
  for (double c : counts) chi2 += (c - expect) * (c - expect) / expect;
  boost::math::chi_squared_distribution<double> dist(nr * na - 1.0);
  double p_value = 1.0 - boost::math::cdf(dist, chi2);
  CHECK(p_value > 0.01);
}

TEST_CASE("harmonic measure without obstruction reduces to the riesz law") {
  StableLaw law(2, 1.2);
  Point c{0.0, 0.0};
  double r = 1.0;
  Domain big = Domain::ball(c, 50.0);  // chord condition is vacuous
  SimScheme s = SimScheme::jump_adapted_for(Domain::ball(c, r), 64.0);

  // target: the shell 2 < |z| < 3
  auto payoff = [&](const Point& z) {
    double nz = norm(z);
    return (nz > 2.0 && nz < 3.0) ? 1.0 : 0.0;
  };
  Estimate mc = harmonic_measure_shotdown(law, big, c, r, c, payoff, s, RngStream(99, 0), 40000);

  auto f = [&](double u) {
    Point z{u, 0.0};
    return riesz_exit_density(1.2, c, r, c, z) * 2 * kPi * u;
  };
  double exact =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 2.0, 3.0, 12, 1e-10);
  CHECK(std::abs(mc.value - exact) < 3 * mc.stderr_value + 0.01);
}
