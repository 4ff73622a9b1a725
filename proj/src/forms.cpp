#include "shotdown/forms.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace shotdown {

namespace {

constexpr double kPi = std::numbers::pi;

// Gauss-Legendre nodes on [-1, 1] by Newton iteration.
void legendre_nodes(int n, std::vector<double>& xs, std::vector<double>& ws) {
  xs.resize(n);
  ws.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = 0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2 * j + 1) * x * p1 - j * p2) / (j + 1);
      }
      pp = n * (x * p0 - p1) / (x * x - 1);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    xs[i] = -x;
    xs[n - 1 - i] = x;
    ws[i] = ws[n - 1 - i] = 2.0 / ((1 - x * x) * pp * pp);
  }
}

// sum over closed intervals of int rho^{-1-a} = (lo^-a - hi^-a)/a
double power_mass(const IntervalSet& set, double alpha) {
  double m = 0;
  for (const Interval& iv : set) {
    if (iv.lo <= 0) throw std::logic_error("power_mass: interval reaches the singularity");
    double hi = iv.hi == kInf ? 0.0 : std::pow(iv.hi, -alpha);
    m += (std::pow(iv.lo, -alpha) - hi) / alpha;
  }
  return m;
}

IntervalSet complement_intervals(const IntervalSet& s, double lo, double hi) {
  IntervalSet out;
  double cur = lo;
  for (const Interval& iv : s) {
    if (iv.lo > cur) out.push_back({cur, iv.lo});
    cur = std::max(cur, iv.hi);
    if (cur >= hi) break;
  }
  if (cur < hi) out.push_back({cur, hi});
  return out;
}

// ray intervals inside the union of support balls (unit direction)
IntervalSet support_ray(const std::vector<BoundingBall>& support, const Point& x,
                        const Point& dir) {
  IntervalSet s;
  for (const auto& b : support) {
    Point u = x - b.center;
    double bb = dot(u, dir);
    double cc = norm2(u) - b.radius * b.radius;
    double disc = bb * bb - cc;
    if (disc <= 0) continue;
    double sq = std::sqrt(disc);
    double t1 = -bb - sq, t2 = -bb + sq;
    if (t2 <= 0) continue;
    s.push_back({std::max(t1, 0.0), t2});
  }
  normalize_intervals(s);
  return s;
}

struct RadialRule {
  double alpha;
  double tol;

  // int_seg g(rho) rho^{-1-a} d rho; tanh_sinh when the segment starts at 0
  template <class G>
  double segment(double lo, double hi, G&& g, double* err) const {
    if (hi <= lo) return 0;
    auto f = [&](double rho) {
      if (rho < 1e-60) return 0.0;  // g vanishes quadratically there
      double gg = g(rho);
      if (gg == 0) return 0.0;
      return gg * std::pow(rho, -1 - alpha);
    };
    double e = 0, v = 0;
    if (lo < 1e-14 * hi || lo == 0) {
      thread_local boost::math::quadrature::tanh_sinh<double> ts;
      // g vanishes quadratically at 0, so the integrand is o(rho^{1-a})
      v = ts.integrate(f, lo, hi, 1e-8, &e);
    } else {
      v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, lo, hi, 4, tol, &e);
    }
    if (err) *err += e;
    return v;
  }

  template <class G>
  double over_set(const IntervalSet& set, G&& g, double* err) const {
    double v = 0;
    for (const Interval& iv : set) v += segment(iv.lo, iv.hi, g, err);
    return v;
  }
};

struct InnerPieces {
  double diff_all = 0;       // (f(y)-f(x))^2 over the support along the ray
  double diff_vis = 0;       // same, restricted to the visible prefix
  double mass_off_s = 0;     // rho^{-1-a} mass off the support (whole ray)
  double mass_vis_off_s = 0; // visible, inside D, off the support
  double mass_inside_off_s = 0;  // inside D, off the support
  double mass_outside_d = 0; // kappa contribution
  double rstar_mass = 0;     // iota contribution: r*^-a / a
  double cross = 0;          // f(x) f(y) over invisible-but-inside-D support
  double err = 0;
};

struct FormWorkspace {
  const StableLaw* law;
  const Domain* dom;
  const TestFunction* f;
  double tol;

  InnerPieces ray(const Point& x, double fx, const Point& dir) const {
    InnerPieces out;
    const double a = law->alpha();
    RadialRule rule{a, tol};

    IntervalSet outside = dom->outside_on_line(x, dir, kInf);
    double rstar = outside.empty() ? kInf : outside.front().lo;
    IntervalSet sray = support_ray(f->support, x, dir);
    double rmax = sray.empty() ? 0.0 : sray.back().hi;

    auto g_diff = [&](double rho) {
      double d = (*f)(x + rho * dir) - fx;
      return d * d;
    };
    out.diff_all = rule.over_set(sray, g_diff, &out.err);
    out.diff_vis = rule.over_set(intersect_intervals(sray, {{0.0, rstar}}), g_diff, &out.err);

    IntervalSet off_s = complement_intervals(sray, 0.0, kInf);
    out.mass_off_s = power_mass(off_s, a);
    IntervalSet inside = complement_intervals(outside, 0.0, kInf);
    IntervalSet inside_off_s = intersect_intervals(inside, off_s);
    out.mass_inside_off_s = power_mass(inside_off_s, a);
    out.mass_vis_off_s =
        power_mass(intersect_intervals(off_s, {{0.0, rstar}}), a);
    out.mass_outside_d = power_mass(outside, a);
    out.rstar_mass = rstar == kInf ? 0.0 : std::pow(rstar, -a) / a;

    if (rstar < rmax) {
      IntervalSet invis_s = intersect_intervals(intersect_intervals(inside, sray),
                                                {{rstar, kInf}});
      auto g_cross = [&](double rho) { return fx * (*f)(x + rho * dir); };
      out.cross = rule.over_set(invis_s, g_cross, &out.err);
    }
    return out;
  }
};

struct OuterNode {
  Point x;
  double w;
};

// product-Gauss nodes over the support balls (d = 1 or 2)
std::vector<OuterNode> outer_nodes(const TestFunction& f, int n_rad, int n_ang) {
  std::vector<OuterNode> nodes;
  std::vector<double> gx, gw;
  legendre_nodes(n_rad, gx, gw);
  for (const auto& b : f.support) {
    int d = b.center.dim;
    if (d == 1) {
      for (int i = 0; i < n_rad; ++i) {
        Point x{b.center[0] + b.radius * gx[i]};
        nodes.push_back({x, gw[i] * b.radius});
      }
    } else if (d == 2) {
      for (int i = 0; i < n_rad; ++i) {
        double r = 0.5 * (gx[i] + 1) * b.radius;  // map [-1,1] -> [0,R]
        double wr = 0.5 * b.radius * gw[i] * r;
        for (int j = 0; j < n_ang; ++j) {
          double th = 2 * kPi * (j + 0.5) / n_ang;
          Point x = b.center + Point{r * std::cos(th), r * std::sin(th)};
          nodes.push_back({x, wr * 2 * kPi / n_ang});
        }
      }
    } else {
      throw std::invalid_argument("form quadrature supports d <= 2");
    }
  }
  return nodes;
}

std::vector<Point> inner_directions(int d, int n_ang) {
  std::vector<Point> dirs;
  if (d == 1) {
    dirs = {Point{1.0}, Point{-1.0}};
  } else {
    dirs.reserve(n_ang);
    for (int j = 0; j < n_ang; ++j) {
      double th = 2 * kPi * (j + 0.5) / n_ang;
      dirs.push_back(Point{std::cos(th), std::sin(th)});
    }
  }
  return dirs;
}

struct FormTotals {
  double killed_total = 0, killed_killing = 0;
  double shot_total = 0, shot_killing = 0;
  double cross = 0;
  double err = 0;
};

FormTotals evaluate(const StableLaw& law, const Domain& dom, const TestFunction& f,
                    const QuadSpec& spec, int n_rad, int n_ang_outer, int n_ang_inner) {
  FormWorkspace ws{&law, &dom, &f, spec.radial_tol};
  auto nodes = outer_nodes(f, n_rad, n_ang_outer);
  auto dirs = inner_directions(dom.dim(), n_ang_inner);
  const double ang_w = dom.dim() == 1 ? 1.0 : 2 * kPi / static_cast<double>(dirs.size());
  const double A = law.levy_constant();

  std::vector<FormTotals> per_node(nodes.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 4)
  for (long long ni = 0; ni < static_cast<long long>(nodes.size()); ++ni) {
    try {
    const OuterNode& nd = nodes[static_cast<std::size_t>(ni)];
    double fx = f(nd.x);
    InnerPieces acc;
    for (const Point& dir : dirs) {
      InnerPieces p = ws.ray(nd.x, fx, dir);
      acc.diff_all += p.diff_all;
      acc.diff_vis += p.diff_vis;
      acc.mass_off_s += p.mass_off_s;
      acc.mass_vis_off_s += p.mass_vis_off_s;
      acc.mass_inside_off_s += p.mass_inside_off_s;
      acc.mass_outside_d += p.mass_outside_d;
      acc.rstar_mass += p.rstar_mass;
      acc.cross += p.cross;
      acc.err += p.err;
    }
    double f2 = fx * fx;
    FormTotals t;  // the radial masses already carry the 1/alpha factor
    t.killed_total = nd.w * (0.5 * A * ang_w * acc.diff_all + f2 * A * ang_w * acc.mass_off_s);
    t.killed_killing = nd.w * f2 * A * ang_w * acc.mass_outside_d;
    t.shot_total = nd.w * (0.5 * A * ang_w * acc.diff_vis +
                           f2 * A * ang_w * (acc.mass_vis_off_s + acc.rstar_mass));
    t.shot_killing = nd.w * f2 * A * ang_w * acc.rstar_mass;
    t.cross = nd.w * A * ang_w * acc.cross;
    t.err = nd.w * A * ang_w * acc.err;
    per_node[static_cast<std::size_t>(ni)] = t;
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  FormTotals sum;
  for (const FormTotals& t : per_node) {  // fixed-order reduction
    sum.killed_total += t.killed_total;
    sum.killed_killing += t.killed_killing;
    sum.shot_total += t.shot_total;
    sum.shot_killing += t.shot_killing;
    sum.cross += t.cross;
    sum.err += t.err;
  }
  return sum;
}

FormTotals evaluate_with_refinement(const StableLaw& law, const Domain& dom,
                                    const TestFunction& f, const QuadSpec& spec,
                                    double* resolution_err) {
  FormTotals fine = evaluate(law, dom, f, spec, spec.radial_outer, spec.angular_outer,
                             spec.angular_inner);
  FormTotals coarse = evaluate(law, dom, f, spec, std::max(4, spec.radial_outer / 2),
                               std::max(8, spec.angular_outer / 2),
                               std::max(16, spec.angular_inner / 2));
  if (resolution_err)
    *resolution_err = std::abs(fine.killed_total - coarse.killed_total) +
                      std::abs(fine.shot_total - coarse.shot_total);
  return fine;
}

void check_inputs(const StableLaw& law, const Domain& dom, const TestFunction& f) {
  if (law.dim() != dom.dim()) throw std::invalid_argument("forms: dimension mismatch");
  if (f.support.empty()) throw std::invalid_argument("forms: test function has no support");
  for (const auto& b : f.support) {
    if (b.center.dim != dom.dim()) throw std::invalid_argument("forms: support dim mismatch");
    // support must sit inside D so that f = 0 on D^c
    if (dom.dist_to_complement(b.center) < b.radius)
      throw std::invalid_argument("forms: support ball leaves the domain");
  }
  for (std::size_t i = 0; i < f.support.size(); ++i)
    for (std::size_t j = i + 1; j < f.support.size(); ++j)
      if (dist(f.support[i].center, f.support[j].center) <=
          f.support[i].radius + f.support[j].radius)
        throw std::invalid_argument("forms: support balls must be disjoint");
}

}  // namespace

TestFunction bump(const Point& center, double radius) {
  TestFunction f;
  f.tag = "bump";
  f.support = {{center, radius}};
  f.eval = [center, radius](const Point& x) {
    double u2 = norm2(x - center) / (radius * radius);
    if (u2 >= 1) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u2));
  };
  return f;
}

TestFunction polynomial_bump(const Point& center, double radius) {
  TestFunction f;
  f.tag = "polynomial-bump";
  f.support = {{center, radius}};
  f.eval = [center, radius](const Point& x) {
    double u2 = norm2(x - center) / (radius * radius);
    if (u2 >= 1) return 0.0;
    double w = 1 - u2;
    return w * w * w;
  };
  return f;
}

TestFunction two_lobed(const Point& c1, double r1, const Point& c2, double r2) {
  TestFunction f;
  f.tag = "two-lobed";
  f.support = {{c1, r1}, {c2, r2}};
  TestFunction b1 = bump(c1, r1), b2 = bump(c2, r2);
  f.eval = [b1, b2](const Point& x) { return b1(x) + b2(x); };
  return f;
}

FormValue energy_killed(const StableLaw& law, const Domain& dom, const TestFunction& f,
                        const QuadSpec& spec) {
  check_inputs(law, dom, f);
  double res_err = 0;
  FormTotals t = evaluate_with_refinement(law, dom, f, spec, &res_err);
  FormValue v;
  v.total = t.killed_total;
  v.killing_part = t.killed_killing;
  v.jump_part = t.killed_total - t.killed_killing;
  v.quadrature_error = t.err + res_err;
  return v;
}

FormValue energy_shotdown(const StableLaw& law, const Domain& dom, const TestFunction& f,
                          const QuadSpec& spec) {
  check_inputs(law, dom, f);
  double res_err = 0;
  FormTotals t = evaluate_with_refinement(law, dom, f, spec, &res_err);
  FormValue v;
  v.total = t.shot_total;
  v.killing_part = t.shot_killing;
  v.jump_part = t.shot_total - t.shot_killing;
  v.quadrature_error = t.err + res_err;
  return v;
}

double visibility_cross_term(const StableLaw& law, const Domain& dom, const TestFunction& f,
                             const QuadSpec& spec) {
  check_inputs(law, dom, f);
  FormTotals t = evaluate(law, dom, f, spec, spec.radial_outer, spec.angular_outer,
                          spec.angular_inner);
  return t.cross;
}

HardyPair hardy_check(const StableLaw& law, const Domain& dom, const TestFunction& f,
                      const QuadSpec& spec) {
  check_inputs(law, dom, f);
  FormTotals t = evaluate(law, dom, f, spec, spec.radial_outer, spec.angular_outer,
                          spec.angular_inner);
  return {t.killed_total, t.killed_killing};
}

double integrate_support(const TestFunction& f, const QuadSpec& spec,
                         const std::function<double(const Point&)>& g) {
  auto nodes = outer_nodes(f, spec.radial_outer, spec.angular_outer);
  std::vector<double> vals(nodes.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (long long i = 0; i < static_cast<long long>(nodes.size()); ++i)
    vals[static_cast<std::size_t>(i)] =
        nodes[static_cast<std::size_t>(i)].w * g(nodes[static_cast<std::size_t>(i)].x);
  double s = 0;
  for (double v : vals) s += v;
  return s;
}

}  // namespace shotdown
