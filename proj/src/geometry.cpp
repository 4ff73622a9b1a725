#include "shotdown/geometry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace shotdown {

void normalize_intervals(IntervalSet& s) {
  s.erase(std::remove_if(s.begin(), s.end(), [](const Interval& i) { return i.lo > i.hi; }),
          s.end());
  std::sort(s.begin(), s.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  IntervalSet merged;
  for (const Interval& i : s) {
    if (!merged.empty() && i.lo <= merged.back().hi)
      merged.back().hi = std::max(merged.back().hi, i.hi);
    else
      merged.push_back(i);
  }
  s = std::move(merged);
}

IntervalSet unite_intervals(const IntervalSet& a, const IntervalSet& b) {
  IntervalSet r = a;
  r.insert(r.end(), b.begin(), b.end());
  normalize_intervals(r);
  return r;
}

IntervalSet intersect_intervals(const IntervalSet& a, const IntervalSet& b) {
  IntervalSet r;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    double lo = std::max(a[i].lo, b[j].lo);
    double hi = std::min(a[i].hi, b[j].hi);
    if (lo <= hi) r.push_back({lo, hi});
    if (a[i].hi < b[j].hi)
      ++i;
    else
      ++j;
  }
  return r;
}

struct Domain::Node {
  enum class Kind { kBall, kHalfSpace, kUnion, kIntersection, kDifference, kWhole };
  Kind kind;
  Point center;   // ball
  double radius = 0;
  Point normal;   // half-space (unit)
  double offset = 0;
  std::vector<std::shared_ptr<const Node>> kids;  // for kDifference, kids[0] is the base
};

namespace {

using Node = Domain::Node;
using Kind = Node::Kind;

bool open_contains(const Node& n, const Point& x);

bool closed_contains(const Node& n, const Point& x) {
  switch (n.kind) {
    case Kind::kBall:
      return dist(x, n.center) <= n.radius;
    case Kind::kHalfSpace:
      return dot(n.normal, x) <= n.offset;
    case Kind::kUnion:
      for (const auto& k : n.kids)
        if (closed_contains(*k, x)) return true;
      return false;
    case Kind::kIntersection:
      for (const auto& k : n.kids)
        if (!closed_contains(*k, x)) return false;
      return true;
    case Kind::kDifference:
      if (!closed_contains(*n.kids[0], x)) return false;
      for (std::size_t i = 1; i < n.kids.size(); ++i)
        if (open_contains(*n.kids[i], x)) return false;
      return true;
    case Kind::kWhole:
      return true;
  }
  return false;
}

bool open_contains(const Node& n, const Point& x) {
  switch (n.kind) {
    case Kind::kBall:
      return dist(x, n.center) < n.radius;
    case Kind::kHalfSpace:
      return dot(n.normal, x) < n.offset;
    case Kind::kUnion:
      for (const auto& k : n.kids)
        if (open_contains(*k, x)) return true;
      return false;
    case Kind::kIntersection:
      for (const auto& k : n.kids)
        if (!open_contains(*k, x)) return false;
      return true;
    case Kind::kDifference:
      if (!open_contains(*n.kids[0], x)) return false;
      for (std::size_t i = 1; i < n.kids.size(); ++i)
        if (closed_contains(*n.kids[i], x)) return false;
      return true;
    case Kind::kWhole:
      return true;
  }
  return false;
}

// Distance from x to the closed set described by the node.
double dist_to_closed(const Node& n, const Point& x) {
  switch (n.kind) {
    case Kind::kBall:
      return std::max(0.0, dist(x, n.center) - n.radius);
    case Kind::kHalfSpace:
      return std::max(0.0, dot(n.normal, x) - n.offset);
    case Kind::kUnion: {
      double d = kInf;
      for (const auto& k : n.kids) d = std::min(d, dist_to_closed(*k, x));
      return d;
    }
    case Kind::kIntersection: {
      // lower bound, exact for the leaf families used here
      double d = 0;
      for (const auto& k : n.kids) d = std::max(d, dist_to_closed(*k, x));
      return d;
    }
    case Kind::kDifference:
      return dist_to_closed(*n.kids[0], x);
    case Kind::kWhole:
      return 0;
  }
  return 0;
}

double dist_to_complement_node(const Node& n, const Point& x) {
  switch (n.kind) {
    case Kind::kBall:
      return std::max(0.0, n.radius - dist(x, n.center));
    case Kind::kHalfSpace:
      return std::max(0.0, n.offset - dot(n.normal, x));
    case Kind::kUnion: {
      double d = 0;
      for (const auto& k : n.kids) d = std::max(d, dist_to_complement_node(*k, x));
      return d;
    }
    case Kind::kIntersection: {
      double d = kInf;
      for (const auto& k : n.kids) d = std::min(d, dist_to_complement_node(*k, x));
      return d;
    }
    case Kind::kDifference: {
      double d = dist_to_complement_node(*n.kids[0], x);
      for (std::size_t i = 1; i < n.kids.size(); ++i)
        d = std::min(d, dist_to_closed(*n.kids[i], x));
      return std::max(0.0, d);
    }
    case Kind::kWhole:
      return kInf;
  }
  return 0;
}

struct LineQuery {
  const Point* origin;
  const Point* dir;
  double t_max;
  double tau;  // tangency tolerance on the normalized discriminant
};

// Quadratic data for a ball leaf along the line: q(t) = A t^2 + 2 B t + C,
// inside the open ball iff q < 0.
struct BallQuad {
  double A, B, C, disc, disc_n;
};

BallQuad ball_quad(const Node& n, const LineQuery& q) {
  Point u = *q.origin - n.center;
  double A = norm2(*q.dir);
  double B = dot(u, *q.dir);
  double C = norm2(u) - n.radius * n.radius;
  double disc = B * B - A * C;
  double scale = A * n.radius * n.radius;
  double disc_n = scale > 0 ? disc / scale : (C < 0 ? kInf : -kInf);
  return {A, B, C, disc, disc_n};
}

void clip_push(IntervalSet& out, double lo, double hi, double t_max) {
  lo = std::max(lo, 0.0);
  hi = std::min(hi, t_max);
  if (lo <= hi) out.push_back({lo, hi});
}

// Closed subset of [0, t_max] where the line point is NOT in the open node.
IntervalSet outside_set(const Node& n, const LineQuery& q);

// Closed subset of [0, t_max] where the line point lies in the closed node.
IntervalSet closed_set(const Node& n, const LineQuery& q) {
  IntervalSet out;
  switch (n.kind) {
    case Kind::kBall: {
      BallQuad b = ball_quad(n, q);
      if (b.A == 0) {
        if (b.C <= 0) clip_push(out, 0, q.t_max, q.t_max);
      } else if (b.disc_n > q.tau) {
        double s = std::sqrt(b.disc);
        clip_push(out, (-b.B - s) / b.A, (-b.B + s) / b.A, q.t_max);
      } else if (b.disc_n >= -q.tau) {
        double tm = -b.B / b.A;  // grazing contact counts as touching
        clip_push(out, tm, tm, q.t_max);
      }
      return out;
    }
    case Kind::kHalfSpace: {
      double s0 = dot(n.normal, *q.origin) - n.offset;
      double slope = dot(n.normal, *q.dir);
      if (slope == 0) {
        if (s0 <= 0) clip_push(out, 0, q.t_max, q.t_max);
      } else {
        double t0 = -s0 / slope;
        if (slope > 0)
          clip_push(out, -kInf, t0, q.t_max);
        else
          clip_push(out, t0, kInf, q.t_max);
      }
      return out;
    }
    case Kind::kUnion: {
      for (const auto& k : n.kids) out = unite_intervals(out, closed_set(*k, q));
      return out;
    }
    case Kind::kIntersection: {
      out = closed_set(*n.kids[0], q);
      for (std::size_t i = 1; i < n.kids.size(); ++i)
        out = intersect_intervals(out, closed_set(*n.kids[i], q));
      return out;
    }
    case Kind::kDifference: {
      out = closed_set(*n.kids[0], q);
      for (std::size_t i = 1; i < n.kids.size(); ++i)
        out = intersect_intervals(out, outside_set(*n.kids[i], q));
      return out;
    }
    case Kind::kWhole:
      clip_push(out, 0, q.t_max, q.t_max);
      return out;
  }
  return out;
}

IntervalSet outside_set(const Node& n, const LineQuery& q) {
  IntervalSet out;
  switch (n.kind) {
    case Kind::kBall: {
      BallQuad b = ball_quad(n, q);
      if (b.A == 0) {
        if (b.C >= 0) clip_push(out, 0, q.t_max, q.t_max);
        return out;
      }
      if (b.disc_n > q.tau) {
        double s = std::sqrt(b.disc);
        double t1 = (-b.B - s) / b.A, t2 = (-b.B + s) / b.A;
        clip_push(out, -kInf, t1, q.t_max);
        clip_push(out, t2, kInf, q.t_max);
      } else {
        clip_push(out, -kInf, kInf, q.t_max);  // misses or grazes the open ball
      }
      normalize_intervals(out);
      return out;
    }
    case Kind::kHalfSpace: {
      double s0 = dot(n.normal, *q.origin) - n.offset;
      double slope = dot(n.normal, *q.dir);
      if (slope == 0) {
        if (s0 >= 0) clip_push(out, 0, q.t_max, q.t_max);
      } else {
        double t0 = -s0 / slope;
        if (slope > 0)
          clip_push(out, t0, kInf, q.t_max);
        else
          clip_push(out, -kInf, t0, q.t_max);
      }
      return out;
    }
    case Kind::kUnion: {
      out = outside_set(*n.kids[0], q);
      for (std::size_t i = 1; i < n.kids.size(); ++i)
        out = intersect_intervals(out, outside_set(*n.kids[i], q));
      return out;
    }
    case Kind::kIntersection: {
      for (const auto& k : n.kids) out = unite_intervals(out, outside_set(*k, q));
      return out;
    }
    case Kind::kDifference: {
      out = outside_set(*n.kids[0], q);
      for (std::size_t i = 1; i < n.kids.size(); ++i)
        out = unite_intervals(out, closed_set(*n.kids[i], q));
      return out;
    }
    case Kind::kWhole:
      return out;
  }
  return out;
}

// Fast exact paths for the common trees; -1 means "can't decide, use intervals".

int segment_inside_fast(const Node& n, const Point& a, const Point& b, double tau);

// 1 if [a,b] misses the closed node, 0 if it meets it, -1 unknown
int segment_misses_closed_fast(const Node& n, const Point& a, const Point& b, double tau) {
  switch (n.kind) {
    case Kind::kBall: {
      Point w = b - a;
      Point u = a - n.center;
      double A = norm2(w);
      double B = dot(u, w);
      double C = norm2(u) - n.radius * n.radius;
      double t = A > 0 ? std::clamp(-B / A, 0.0, 1.0) : 0.0;
      double qmin = (A * t + 2 * B) * t + C;
      return qmin / (n.radius * n.radius) > tau ? 1 : 0;
    }
    case Kind::kHalfSpace: {
      double s0 = dot(n.normal, a) - n.offset;
      double s1 = dot(n.normal, b) - n.offset;
      return (std::min(s0, s1) > 0) ? 1 : 0;
    }
    case Kind::kUnion: {
      for (const auto& k : n.kids) {
        int r = segment_misses_closed_fast(*k, a, b, tau);
        if (r != 1) return r;
      }
      return 1;
    }
    default:
      return -1;
  }
}

int segment_inside_fast(const Node& n, const Point& a, const Point& b, double tau) {
  switch (n.kind) {
    case Kind::kBall:  // convex: endpoints decide
      return (dist(a, n.center) < n.radius && dist(b, n.center) < n.radius) ? 1 : 0;
    case Kind::kHalfSpace:
      return (dot(n.normal, a) < n.offset && dot(n.normal, b) < n.offset) ? 1 : 0;
    case Kind::kIntersection: {
      for (const auto& k : n.kids) {
        int r = segment_inside_fast(*k, a, b, tau);
        if (r != 1) return r;
      }
      return 1;
    }
    case Kind::kDifference: {
      int base = segment_inside_fast(*n.kids[0], a, b, tau);
      if (base != 1) return base;
      for (std::size_t i = 1; i < n.kids.size(); ++i) {
        int r = segment_misses_closed_fast(*n.kids[i], a, b, tau);
        if (r != 1) return r;
      }
      return 1;
    }
    case Kind::kWhole:
      return 1;
    case Kind::kUnion:
      return -1;
  }
  return -1;
}

int count_leaves(const Node& n) {
  if (n.kids.empty()) return 1;
  int c = 0;
  for (const auto& k : n.kids) c += count_leaves(*k);
  return c;
}

std::optional<BoundingBall> bounding(const Node& n) {
  switch (n.kind) {
    case Kind::kBall:
      return BoundingBall{n.center, n.radius};
    case Kind::kHalfSpace:
    case Kind::kWhole:
      return std::nullopt;
    case Kind::kUnion: {
      std::optional<BoundingBall> acc;
      for (const auto& k : n.kids) {
        auto b = bounding(*k);
        if (!b) return std::nullopt;
        if (!acc)
          acc = b;
        else
          acc->radius = std::max(acc->radius, dist(acc->center, b->center) + b->radius);
      }
      return acc;
    }
    case Kind::kIntersection: {
      for (const auto& k : n.kids) {
        auto b = bounding(*k);
        if (b) return b;
      }
      return std::nullopt;
    }
    case Kind::kDifference:
      return bounding(*n.kids[0]);
  }
  return std::nullopt;
}

}  // namespace

Domain Domain::ball(const Point& center, double radius) {
  if (radius <= 0) throw std::invalid_argument("ball radius must be positive");
  auto n = std::make_shared<Node>();
  n->kind = Kind::kBall;
  n->center = center;
  n->radius = radius;
  return Domain(std::move(n), center.dim);
}

Domain Domain::half_space(const Point& normal, double offset) {
  double len = norm(normal);
  if (len <= 0) throw std::invalid_argument("half-space normal must be nonzero");
  auto n = std::make_shared<Node>();
  n->kind = Kind::kHalfSpace;
  n->normal = normal;
  n->normal *= 1.0 / len;
  n->offset = offset / len;
  return Domain(std::move(n), normal.dim);
}

static void check_dims(const std::vector<Domain>& kids) {
  if (kids.empty()) throw std::invalid_argument("composite domain needs children");
  for (const auto& k : kids)
    if (k.dim() != kids.front().dim()) throw std::invalid_argument("dimension mismatch in CSG");
}

Domain Domain::unite(std::vector<Domain> children) {
  check_dims(children);
  auto n = std::make_shared<Node>();
  n->kind = Kind::kUnion;
  for (auto& c : children) n->kids.push_back(c.root_);
  return Domain(std::move(n), children.front().dim());
}

Domain Domain::intersect(std::vector<Domain> children) {
  check_dims(children);
  auto n = std::make_shared<Node>();
  n->kind = Kind::kIntersection;
  for (auto& c : children) n->kids.push_back(c.root_);
  return Domain(std::move(n), children.front().dim());
}

Domain Domain::subtract(Domain base, std::vector<Domain> removed) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kDifference;
  n->kids.push_back(base.root_);
  for (auto& r : removed) {
    if (r.dim() != base.dim()) throw std::invalid_argument("dimension mismatch in CSG");
    n->kids.push_back(r.root_);
  }
  return Domain(std::move(n), base.dim());
}

Domain Domain::whole_space(int dim) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kWhole;
  return Domain(std::move(n), dim);
}

Domain Domain::annulus(double r_inner, double r_outer) {
  if (!(0 < r_inner && r_inner < r_outer))
    throw std::invalid_argument("annulus requires 0 < r1 < r2");
  Point o{0.0, 0.0};
  return subtract(ball(o, r_outer), {ball(o, r_inner)});
}

Domain Domain::harnack7() {
  return subtract(ball(Point{0.0, 0.0}, 9.0),
                  {ball(Point{2.5, -1.0}, 1.0), ball(Point{5.0, 1.0}, 1.0)});
}

int Domain::leaf_count() const { return count_leaves(*root_); }

bool Domain::contains(const Point& x) const {
  if (x.dim != dim_) throw std::invalid_argument("point dimension mismatch");
  return open_contains(*root_, x);
}

bool Domain::closure_contains(const Point& x) const {
  if (x.dim != dim_) throw std::invalid_argument("point dimension mismatch");
  return closed_contains(*root_, x);
}

double Domain::dist_to_complement(const Point& x) const {
  if (x.dim != dim_) throw std::invalid_argument("point dimension mismatch");
  return dist_to_complement_node(*root_, x);
}

bool Domain::chord_in_domain(const Point& a, const Point& b) const {
  if (a.dim != dim_ || b.dim != dim_) throw std::invalid_argument("point dimension mismatch");
  int fast = segment_inside_fast(*root_, a, b, tau_geom_);
  if (fast >= 0) return fast == 1;
  Point w = b - a;
  LineQuery q{&a, &w, 1.0, tau_geom_};
  return outside_set(*root_, q).empty();
}

bool Domain::visible(const Point& x, const Point& y) const {
  if (!contains(x)) throw std::invalid_argument("visible: base point outside domain");
  return contains(y) && chord_in_domain(x, y);
}

IntervalSet Domain::outside_on_line(const Point& x, const Point& dir, double t_max) const {
  LineQuery q{&x, &dir, t_max, tau_geom_};
  return outside_set(*root_, q);
}

double Domain::first_exit_radius(const Point& x, const Point& dir) const {
  IntervalSet out = outside_on_line(x, dir, kInf);
  if (out.empty()) return kInf;
  return out.front().lo;
}

std::optional<BoundingBall> Domain::bounding_ball() const { return bounding(*root_); }

double Domain::diameter_bound() const {
  auto b = bounding_ball();
  if (!b) throw std::invalid_argument("domain is unbounded");
  return 2 * b->radius;
}

std::vector<Point> Domain::sample_uniform(RngStream& rng, std::size_t n, double* acceptance_rate,
                                          double acceptance_floor) const {
  auto bb = bounding_ball();
  if (!bb) throw std::invalid_argument("sample_uniform requires a bounded domain");
  std::vector<Point> pts;
  pts.reserve(n);
  std::size_t proposals = 0;
  const std::size_t check_after = std::max<std::size_t>(10000, static_cast<std::size_t>(100.0 / acceptance_floor));
  while (pts.size() < n) {
    Point p = rng.uniform_in_ball(bb->center, bb->radius);
    ++proposals;
    if (contains(p)) pts.push_back(p);
    if (proposals >= check_after && static_cast<double>(pts.size()) < acceptance_floor * static_cast<double>(proposals))
      throw std::runtime_error("sample_uniform: acceptance rate below floor (degenerate CSG?)");
  }
  if (acceptance_rate) *acceptance_rate = static_cast<double>(n) / static_cast<double>(proposals);
  return pts;
}

// ---------------------------------------------------------------------------
// Domain-spec parser

namespace {

struct Tokenizer {
  std::string s;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eof() {
    skip_ws();
    return pos >= s.size();
  }
  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }
  bool accept(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) throw std::invalid_argument(std::string("domain spec: expected '") + c + "'");
  }
  std::string word() {
    skip_ws();
    std::size_t start = pos;
    while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
      ++pos;
    return s.substr(start, pos - start);
  }
  double number() {
    skip_ws();
    std::size_t consumed = 0;
    double v;
    try {
      v = std::stod(s.substr(pos), &consumed);
    } catch (const std::exception&) {
      throw std::invalid_argument("domain spec: expected a number at '" + s.substr(pos, 12) + "'");
    }
    pos += consumed;
    return v;
  }
  bool number_ahead() {
    skip_ws();
    if (pos >= s.size()) return false;
    char c = s[pos];
    return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.';
  }
};

Domain parse_node(Tokenizer& tk);

std::vector<Domain> parse_list(Tokenizer& tk) {
  tk.expect('{');
  std::vector<Domain> kids;
  kids.push_back(parse_node(tk));
  while (tk.accept(';')) kids.push_back(parse_node(tk));
  tk.expect('}');
  return kids;
}

Domain parse_node(Tokenizer& tk) {
  std::string w = tk.word();
  if (w == "ball" || w == "halfspace") {
    std::vector<double> nums;
    while (tk.number_ahead()) nums.push_back(tk.number());
    if (nums.size() < 2 || nums.size() > kMaxDim + 1)
      throw std::invalid_argument("domain spec: '" + w + "' needs d coordinates and one scalar");
    Point p(static_cast<int>(nums.size()) - 1);
    for (int i = 0; i < p.dim; ++i) p[i] = nums[i];
    return w == "ball" ? Domain::ball(p, nums.back()) : Domain::half_space(p, nums.back());
  }
  if (w == "union") return Domain::unite(parse_list(tk));
  if (w == "inter") return Domain::intersect(parse_list(tk));
  if (w == "diff") {
    std::vector<Domain> kids = parse_list(tk);
    if (kids.size() < 2) throw std::invalid_argument("domain spec: diff needs base and removed parts");
    Domain base = kids.front();
    kids.erase(kids.begin());
    return Domain::subtract(base, kids);
  }
  if (w == "annulus") {
    tk.expect('(');
    double r1 = tk.number();
    tk.expect(',');
    double r2 = tk.number();
    tk.expect(')');
    return Domain::annulus(r1, r2);
  }
  if (w == "harnack7") return Domain::harnack7();
  throw std::invalid_argument("domain spec: unknown shape '" + w + "'");
}

}  // namespace

Domain parse_domain(const std::string& spec) {
  Tokenizer tk{spec};
  Domain d = parse_node(tk);
  if (!tk.eof()) throw std::invalid_argument("domain spec: trailing input");
  constexpr int kMaxLeaves = 64;
  if (d.leaf_count() > kMaxLeaves) throw std::invalid_argument("domain spec: too many CSG leaves");
  return d;
}

}  // namespace shotdown
