#include "floquet/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "floquet/errors.hpp"

namespace floquet {

Lattice2D build_lattice(const Eigen::Vector2d& v1, const Eigen::Vector2d& v2) {
  Eigen::Matrix2d B;
  B.col(0) = v1;
  B.col(1) = v2;
  const double det = B.determinant();
  if (!(std::abs(det) > 1e-12)) throw DegenerateBasis("|det(v1,v2)| = " + std::to_string(std::abs(det)));
  // rows of B^{-1} are the dual vectors
  const Eigen::Matrix2d D = B.inverse().transpose();
  Lattice2D lat;
  lat.v1 = v1;
  lat.v2 = v2;
  lat.delta1 = D.col(0);
  lat.delta2 = D.col(1);
  lat.vol_gamma = std::abs(det);
  return lat;
}

double default_certificate_radius(const Lattice2D& lat) {
  return 8.0 * std::max(lat.delta1.norm(), lat.delta2.norm());
}

namespace {

bool positive_rep(long a, long b) { return a > 0 || (a == 0 && b > 0); }

struct Entry {
  long a, b;
  double norm;
};

// Nonzero lattice points in the closed ball, one per +- pair.
std::vector<Entry> lattice_ball(const Eigen::Vector2d& u1, const Eigen::Vector2d& u2,
                                const Eigen::Vector2d& w1, const Eigen::Vector2d& w2, double radius) {
  // coefficient a of x = a u1 + b u2 equals w1.x, so |a| <= radius |w1|
  const long amax = long(std::floor(radius * w1.norm() + 1e-9));
  const long bmax = long(std::floor(radius * w2.norm() + 1e-9));
  std::vector<Entry> out;
  for (long a = 0; a <= amax; ++a)
    for (long b = -bmax; b <= bmax; ++b) {
      if (!positive_rep(a, b)) continue;
      const double nr = (double(a) * u1 + double(b) * u2).norm();
      if (nr <= radius * (1 + 1e-12)) out.push_back({a, b, nr});
    }
  return out;
}

}  // namespace

std::vector<std::pair<IntPair, IntPair>> check_distinct_norms(const Lattice2D& lat, double radius) {
  auto pts = lattice_ball(lat.v1, lat.v2, lat.delta1, lat.delta2, radius);
  std::sort(pts.begin(), pts.end(), [](const Entry& x, const Entry& y) {
    return std::tie(x.norm, x.a, x.b) < std::tie(y.norm, y.a, y.b);
  });
  std::vector<std::pair<IntPair, IntPair>> bad;
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t k = i + 1; k < pts.size() && pts[k].norm - pts[i].norm < 1e-9; ++k)
      bad.push_back({{pts[i].a, pts[i].b}, {pts[k].a, pts[k].b}});
  return bad;
}

Direction make_direction(const Lattice2D& lat, long p, long r, int index) {
  if (p == 0 && r == 0) throw OutOfRange("zero dual vector");
  if (std::gcd(p, r) != 1) throw OutOfRange("dual vector (" + std::to_string(p) + "," + std::to_string(r) + ") is not primitive");
  Direction dir;
  dir.index = index;
  dir.p = p;
  dir.r = r;
  dir.delta = lat.dual_point(p, r);
  // every orthogonal lattice vector is k(r,-p); enumerate the ball of its norm
  const double rad = lat.point(r, -p).norm();
  const auto ball = lattice_ball(lat.v1, lat.v2, lat.delta1, lat.delta2, rad);
  bool found = false;
  double best = 0;
  for (const auto& e : ball) {
    if (dir.dot_lattice(e.a, e.b) != 0) continue;
    if (!found || e.norm < best - 1e-12) {
      found = true;
      best = e.norm;
      dir.d_a = e.a;
      dir.d_b = e.b;
    }
  }
  if (!found) throw OutOfRange("no orthogonal lattice vector found");
  dir.d = lat.point(dir.d_a, dir.d_b);
  return dir;
}

std::vector<Direction> fundamental_directions(const Lattice2D& lat, double radius, bool require_condition_two) {
  if (require_condition_two) {
    const auto bad = check_distinct_norms(lat, default_certificate_radius(lat));
    if (!bad.empty()) {
      const auto& [x, y] = bad.front();
      throw ConditionTwoViolated("|(" + std::to_string(x.first) + "," + std::to_string(x.second) + ")| = |(" +
                                 std::to_string(y.first) + "," + std::to_string(y.second) + ")|");
    }
  }
  auto pts = lattice_ball(lat.delta1, lat.delta2, lat.v1, lat.v2, radius);
  std::sort(pts.begin(), pts.end(), [](const Entry& x, const Entry& y) {
    if (std::abs(x.norm - y.norm) > 1e-12) return x.norm < y.norm;
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  std::vector<Direction> out;
  for (const auto& e : pts) {
    if (std::gcd(e.a, e.b) != 1) continue;
    out.push_back(make_direction(lat, e.a, e.b, int(out.size()) + 1));
  }
  return out;
}

double coupling_constant(const Lattice2D& lat, const Direction& l, const Direction& k, const Direction& j) {
  const long ld = j.dot_d(l), kd = j.dot_d(k);
  if (ld == 0 || kd == 0)
    throw OrthogonalDirection("direction " + std::to_string(ld == 0 ? l.index : k.index) +
                              " is orthogonal to d_" + std::to_string(j.index));
  return l.delta.dot(k.delta) * lat.vol_gamma / (2.0 * double(ld) * double(kd));
}

}  // namespace floquet
