#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace floquet {

struct Lattice2D {
  Eigen::Vector2d v1, v2;
  Eigen::Vector2d delta1, delta2;
  double vol_gamma = 0.0;

  Eigen::Vector2d point(long a, long b) const { return double(a) * v1 + double(b) * v2; }
  Eigen::Vector2d dual_point(long p, long r) const { return double(p) * delta1 + double(r) * delta2; }
};

// A fundamental direction delta = p*delta1 + r*delta2 with a minimal lattice
// vector d = d_a*v1 + d_b*v2 orthogonal to it.
struct Direction {
  int index = 0;  // 1-based position in the direction list
  long p = 0, r = 0;
  long d_a = 0, d_b = 0;
  Eigen::Vector2d delta;
  Eigen::Vector2d d;

  // delta . (a v1 + b v2), exact in integers.
  long dot_lattice(long a, long b) const { return p * a + r * b; }
  long dot_d(const Direction& other) const { return other.p * d_a + other.r * d_b; }
};

using IntPair = std::pair<long, long>;

Lattice2D build_lattice(const Eigen::Vector2d& v1, const Eigen::Vector2d& v2);

// Pairs of lattice vectors (integer coordinates, one representative per +-)
// with |d| <= radius and equal norms to 1e-9.
std::vector<std::pair<IntPair, IntPair>> check_distinct_norms(const Lattice2D& lat, double radius);

double default_certificate_radius(const Lattice2D& lat);

// Direction for a given primitive dual pair (p,r). The minimal orthogonal
// lattice vector is found by enumeration, ties broken lexicographically.
Direction make_direction(const Lattice2D& lat, long p, long r, int index);

// Primitive dual vectors with |delta| <= radius, one per +- pair, sorted by
// norm then (p,r). With require_condition_two the lattice is certified first.
std::vector<Direction> fundamental_directions(const Lattice2D& lat, double radius,
                                              bool require_condition_two = true);

// (delta_l . delta_k) vol / (2 (delta_l . d_j)(delta_k . d_j)).
double coupling_constant(const Lattice2D& lat, const Direction& l, const Direction& k,
                         const Direction& j);

}  // namespace floquet
