#include "shotdown/stable.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace shotdown {

namespace {

constexpr double kPi = std::numbers::pi;

double sphere_area_of(int d) {
  // |S^{d-1}| = 2 pi^{d/2} / Gamma(d/2)
  return 2.0 * std::pow(kPi, d / 2.0) / boost::math::tgamma(d / 2.0);
}

// Angular average of exp(-i r x.w) over unit directions w, as a function of
// u = r|x|: cos for d=1, J_0 for d=2, sinc for d=3, Bessel form in general.
double radial_kernel(int d, double u) {
  if (d == 1) return std::cos(u);
  if (d == 3) return u < 1e-8 ? 1.0 - u * u / 6.0 : std::sin(u) / u;
  if (u < 1e-6) return 1.0 - u * u / (2.0 * d);
  double nu = d / 2.0 - 1.0;
  if (d == 2) return boost::math::cyl_bessel_j(0.0, u);
  return boost::math::tgamma(d / 2.0) * std::pow(2.0 / u, nu) * boost::math::cyl_bessel_j(nu, u);
}

// Large-|x| expansion of p_1, from term-wise inversion of exp(-|xi|^alpha):
//   p_1(s) ~ sum_k (-1)^{k+1}/k! 2^{k a} pi^{-d/2-1} sin(pi k a/2)
//            Gamma((d+ka)/2) Gamma(1+ka/2) s^{-d-ka}.
// The k = 1 term is the nu-tail A_{d,a} s^{-d-a}. For a < 1 the series
// converges for every s > 0; for a >= 1 it is asymptotic and is truncated at
// the smallest term. rel_err_est reports the first omitted term, inflated when
// cancellation ate too many digits.
double series_density_p1(const StableLaw& law, double s, double* rel_err_est) {
  const int d = law.dim();
  const double a = law.alpha();
  const bool convergent = a < 1.0;
  double sum = 0, prev = kInf, max_term = 0, last = kInf;
  double sign = 1, kfact = 1;
  for (int k = 1; k <= 80; ++k) {
    kfact *= k;
    double term = sign / kfact * std::pow(2.0, k * a) * std::pow(kPi, -d / 2.0 - 1) *
                  std::sin(kPi * k * a / 2) * boost::math::tgamma((d + k * a) / 2) *
                  boost::math::tgamma(1 + k * a / 2) * std::pow(s, -d - k * a);
    sign = -sign;
    double at = std::abs(term);
    if (at == 0) continue;
    if (!convergent && at >= prev) {  // asymptotic series started diverging
      last = at;
      break;
    }
    sum += term;
    prev = at;
    last = at;
    max_term = std::max(max_term, at);
    if (convergent && sum > 0 && at < 1e-14 * sum) break;
  }
  if (rel_err_est) {
    double est = sum > 0 ? last / sum : kInf;
    if (sum > 0 && max_term > 1e13 * sum) est = kInf;  // lost to cancellation
    *rel_err_est = est;
  }
  return sum;
}

}  // namespace

StableLaw::StableLaw(int dim, double alpha) : dim_(dim), alpha_(alpha) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("dimension out of range");
  if (!(alpha > 0 && alpha < 2)) throw std::invalid_argument("alpha outside (0,2)");
  // |Gamma(-a/2)| = pi / ((a/2) Gamma(a/2) sin(pi a/2)) by the reflection formula
  double abs_gamma_neg =
      kPi / ((alpha / 2) * boost::math::tgamma(alpha / 2) * std::sin(kPi * alpha / 2));
  levy_const_ = std::pow(2.0, alpha) * boost::math::tgamma((dim + alpha) / 2) *
                std::pow(kPi, -dim / 2.0) / abs_gamma_neg;
  sphere_area_ = sphere_area_of(dim);
}

double StableLaw::levy_density_radial(double r) const {
  if (r <= 0) throw std::invalid_argument("levy_density: z = 0 is singular");
  return levy_const_ * std::pow(r, -dim_ - alpha_);
}

double StableLaw::levy_density(const Point& z) const {
  if (z.dim != dim_) throw std::invalid_argument("levy_density: dimension mismatch");
  return levy_density_radial(norm(z));
}

double StableLaw::big_jump_rate(double eps) const {
  if (eps <= 0) throw std::invalid_argument("big_jump_rate: cutoff must be positive");
  return levy_const_ * sphere_area_ * std::pow(eps, -alpha_) / alpha_;
}

double StableLaw::small_jump_variance(double eps) const {
  if (eps <= 0) throw std::invalid_argument("small_jump_variance: cutoff must be positive");
  return levy_const_ * sphere_area_ * std::pow(eps, 2 - alpha_) / (dim_ * (2 - alpha_));
}

double StableLaw::sample_subordinator(double t, RngStream& rng) const {
  if (t <= 0) throw std::invalid_argument("sample_subordinator: t must be positive");
  double beta = alpha_ / 2;
  double v = kPi * rng.u01();
  double e = rng.exponential();
  // Kanter: S_1 = (sin(bV)/sin(V)^{1/b}) (sin((1-b)V)/E)^{(1-b)/b}, E exp(-u S_1) = exp(-u^b)
  double s1 = std::sin(beta * v) / std::pow(std::sin(v), 1.0 / beta) *
              std::pow(std::sin((1 - beta) * v) / e, (1 - beta) / beta);
  return std::pow(t, 1.0 / beta) * s1;
}

Point StableLaw::sample_increment(double t, RngStream& rng) const {
  double s = sample_subordinator(t, rng);
  double scale = std::sqrt(2.0 * s);
  Point x(dim_);
  for (int i = 0; i < dim_; ++i) x[i] = scale * rng.normal();
  return x;
}

double StableLaw::sample_big_jump_radius(double eps, RngStream& rng) const {
  return eps * std::pow(rng.u01(), -1.0 / alpha_);
}

StableLaw::BigJump StableLaw::sample_big_jump(double eps, RngStream& rng) const {
  double wait = rng.exponential() / big_jump_rate(eps);
  double r = sample_big_jump_radius(eps, rng);
  return {wait, r * rng.uniform_direction(dim_)};
}

double StableLaw::envelope(double t, double r) const {
  double a = std::pow(t, -static_cast<double>(dim_) / alpha_);
  if (r <= 0) return a;
  return std::min(a, t * std::pow(r, -dim_ - alpha_));
}

namespace {

// p_t at radius s by quadrature of (2pi)^-d w_{d-1} int_0^R K(rs) e^{-t r^a} r^{d-1} dr,
// plus an analytic bound on the discarded tail. Panels no wider than the
// oscillation half-period.
DensityEval invert(const StableLaw& law, double t, double s, double target) {
  const int d = law.dim();
  const double a = law.alpha();
  const double front = std::pow(2 * kPi, -d) * law.sphere_area();

  // tail bound via Gamma(sh,x) <= 2 x^{sh-1} e^{-x} for x >= max(2 sh, 2)
  auto tail_bound = [&](double big_r) {
    double x = t * std::pow(big_r, a);
    double sh = static_cast<double>(d) / a;
    if (x < std::max(2 * sh, 2.0)) return kInf;
    return front * (2.0 / a) * std::pow(t, -sh) * std::pow(x, sh - 1) * std::exp(-x);
  };
  double big_r = std::pow(std::max(2.0 * d / a, 2.0) / t, 1.0 / a);
  while (tail_bound(big_r) > target / 2 && big_r < 1e300) big_r *= 2;
  double tail = tail_bound(big_r);

  auto integrand = [&](double r) {
    return radial_kernel(d, r * s) * std::exp(-t * std::pow(r, a)) * std::pow(r, d - 1);
  };

  double width = big_r / 16;
  if (s > 0) width = std::min(width, kPi / s);
  auto n_panels = static_cast<std::size_t>(std::ceil(big_r / width));
  n_panels = std::min<std::size_t>(n_panels, 400000);
  double h = big_r / static_cast<double>(n_panels);

  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  double sum = 0, err_sum = 0;
  for (std::size_t i = 0; i < n_panels; ++i) {
    double lo = h * static_cast<double>(i), hi = lo + h;
    double e = 0;
    sum += GK::integrate(integrand, lo, hi, 5, 1e-9, &e);
    err_sum += e;
  }

  DensityEval out;
  out.method = DensityEval::Method::kFourierInversion;
  out.value = front * sum;
  out.abs_error_bound = front * err_sum + tail;
  if (out.value < 0) {
    out.abs_error_bound += -out.value;
    out.value = 0;
  }
  return out;
}

}  // namespace

DensityEval stable_density(const StableLaw& law, double t, double r, double target_abs_error) {
  if (t <= 0) throw std::invalid_argument("stable_density: t must be positive");
  const int d = law.dim();
  if (law.alpha() == 1.0) {
    double cd = boost::math::tgamma((d + 1) / 2.0) / std::pow(kPi, (d + 1) / 2.0);
    DensityEval out;
    out.method = DensityEval::Method::kClosedForm;
    out.value = cd * t * std::pow(t * t + r * r, -(d + 1) / 2.0);
    out.abs_error_bound = 0;
    return out;
  }
  return invert(law, t, r, target_abs_error);
}

DensityProfile::DensityProfile(const StableLaw& law, double rel_tol) : law_(law) {
  const int d = law.dim();
  const double a = law.alpha();

  // p_1(0) = (2pi)^-d w_{d-1} Gamma(d/a) / a
  p0_ = std::pow(2 * kPi, -d) * law.sphere_area() * boost::math::tgamma(d / a) / a;

  if (a == 1.0) {  // closed form; no grid needed
    s_min_ = s_max_ = 0;
    log_s_min_ = inv_dlog_ = 0;
    return;
  }

  // hand over to the tail series as soon as it is accurate enough
  s_max_ = 1.0;
  double rel = kInf;
  while (s_max_ < 128.0) {
    series_density_p1(law, s_max_, &rel);
    if (rel < 1e-5) break;
    s_max_ *= 1.5;
  }

  s_min_ = 1e-3;
  const int n = 1024;
  log_s_min_ = std::log(s_min_);
  double dlog = (std::log(s_max_) - log_s_min_) / (n - 1);
  inv_dlog_ = 1.0 / dlog;

  log_p_.resize(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (int i = 0; i < n; ++i) {
    double s = std::exp(log_s_min_ + dlog * i);
    double guess = std::min(p0_, law.levy_constant() * std::pow(s, -d - a));
    DensityEval e = stable_density(law, 1.0, s, std::max(rel_tol * guess, 1e-10 * p0_));
    log_p_[i] = std::log(std::max(e.value, 1e-320));
  }
}

double DensityProfile::p1(double s) const {
  s = std::abs(s);
  const int d = law_.dim();
  const double a = law_.alpha();
  if (a == 1.0) {
    double cd = boost::math::tgamma((d + 1) / 2.0) / std::pow(kPi, (d + 1) / 2.0);
    return cd * std::pow(1 + s * s, -(d + 1) / 2.0);
  }
  if (s <= s_min_) return p0_;
  if (s >= s_max_) return series_density_p1(law_, s, nullptr);
  double u = (std::log(s) - log_s_min_) * inv_dlog_;
  auto i = static_cast<std::size_t>(u);
  if (i + 1 >= log_p_.size()) i = log_p_.size() - 2;
  double w = u - static_cast<double>(i);
  return std::exp(log_p_[i] * (1 - w) + log_p_[i + 1] * w);
}

double DensityProfile::operator()(double t, double r) const {
  double ts = std::pow(t, -1.0 / law_.alpha());
  return std::pow(ts, law_.dim()) * p1(ts * r);
}

}  // namespace shotdown
