// Open domains D in R^d as CSG over balls and half-spaces, with the three
// queries the shot-down process needs: open membership, distance to the
// complement, and whether a segment [x,y] stays inside D.
//
// Boundary convention: D is open, so boundary points are not members, and
// "diff" removes the closure of its removed parts. Segment-sphere tests use
// exact discriminants with a tolerance band; a grazing contact counts as
// touching the complement (the chord is killed).
#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "shotdown/point.hpp"
#include "shotdown/rng.hpp"

namespace shotdown {

// Sorted disjoint closed intervals of the parameter line.
struct Interval {
  double lo, hi;
};
using IntervalSet = std::vector<Interval>;

void normalize_intervals(IntervalSet& s);
IntervalSet unite_intervals(const IntervalSet& a, const IntervalSet& b);
IntervalSet intersect_intervals(const IntervalSet& a, const IntervalSet& b);

struct BoundingBall {
  Point center;
  double radius;
};

class Domain {
 public:
  static Domain ball(const Point& center, double radius);
  // Open half-space {x : n.x < offset}; n is normalized internally.
  static Domain half_space(const Point& normal, double offset);
  static Domain unite(std::vector<Domain> children);
  static Domain intersect(std::vector<Domain> children);
  // base minus the closures of the removed parts
  static Domain subtract(Domain base, std::vector<Domain> removed);
  static Domain whole_space(int dim);

  static Domain annulus(double r_inner, double r_outer);  // d = 2, centered
  // The three-ball domain B(0,9) \ (B((2.5,-1),1) u B((5,1),1)) in d = 2.
  static Domain harnack7();

  int dim() const { return dim_; }
  int leaf_count() const;

  bool contains(const Point& x) const;
  bool closure_contains(const Point& x) const;
  double dist_to_complement(const Point& x) const;  // delta_D(x), 0 outside D

  // true iff [a,b] does not meet the complement of D
  bool chord_in_domain(const Point& a, const Point& b) const;
  // y in D_x; requires x in D
  bool visible(const Point& x, const Point& y) const;

  // Closed subset of {t in [0,t_max]} where x + t*dir lies outside open D.
  // dir need not be unit; t_max may be kInf for rays.
  IntervalSet outside_on_line(const Point& x, const Point& dir, double t_max) const;
  // First r >= 0 with x + r*dir in D^c (dir unit); kInf if the ray never exits.
  double first_exit_radius(const Point& x, const Point& dir) const;

  std::optional<BoundingBall> bounding_ball() const;
  double diameter_bound() const;  // 2 * bounding radius; throws if unbounded

  // n i.i.d. uniform points by rejection from the bounding ball.
  std::vector<Point> sample_uniform(RngStream& rng, std::size_t n,
                                    double* acceptance_rate = nullptr,
                                    double acceptance_floor = 1e-4) const;

  double tangency_tolerance() const { return tau_geom_; }
  void set_tangency_tolerance(double tau) { tau_geom_ = tau; }

  struct Node;

 private:
  Domain(std::shared_ptr<const Node> root, int dim) : root_(std::move(root)), dim_(dim) {}

  std::shared_ptr<const Node> root_;
  int dim_ = 0;
  double tau_geom_ = 1e-12;
};

// Parses the config-file domain grammar:
//   ball cx cy ... r | halfspace nx ny ... off
//   union{A; B; ...} | inter{A; B; ...} | diff{base; removed; ...}
//   annulus(r1,r2) | harnack7
Domain parse_domain(const std::string& spec);

}  // namespace shotdown
