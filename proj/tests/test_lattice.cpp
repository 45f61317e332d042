#include <cmath>
#include <numeric>

#include "doctest.h"
#include "floquet/errors.hpp"
#include "floquet/lattice.hpp"

using namespace floquet;

namespace {
Lattice2D square() { return build_lattice({1, 0}, {0, 1}); }
Lattice2D skew() { return build_lattice({1, 0}, {std::sqrt(2.0) / 4, std::exp(1.0) / 2}); }
}  // namespace

TEST_CASE("dual basis") {
  const auto lat = skew();
  CHECK(lat.delta1.dot(lat.v1) == doctest::Approx(1.0));
  CHECK(std::abs(lat.delta1.dot(lat.v2)) < 1e-15);
  CHECK(std::abs(lat.delta2.dot(lat.v1)) < 1e-15);
  CHECK(lat.delta2.dot(lat.v2) == doctest::Approx(1.0));
  CHECK(lat.vol_gamma == doctest::Approx(std::exp(1.0) / 2));
}

TEST_CASE("degenerate basis") {
  CHECK_THROWS_AS(build_lattice({1, 2}, {2, 4}), DegenerateBasis);
}

TEST_CASE("distinct norms") {
  CHECK_FALSE(check_distinct_norms(square(), 3.0).empty());
  CHECK_THROWS_AS(fundamental_directions(square(), 2.0), ConditionTwoViolated);
  const auto lat = skew();
  CHECK(check_distinct_norms(lat, default_certificate_radius(lat)).empty());
  const auto dirs = fundamental_directions(lat, 3.0);
  REQUIRE(dirs.size() >= 4);
  for (size_t i = 1; i < dirs.size(); ++i) CHECK(dirs[i - 1].delta.norm() <= dirs[i].delta.norm() + 1e-12);
}

TEST_CASE("orthogonal lattice vector") {
  const auto lat = square();
  const auto d = make_direction(lat, 1, 1, 3);
  CHECK(d.d_a == 1);
  CHECK(d.d_b == -1);
  CHECK(std::abs(d.delta.dot(d.d)) < 1e-15);
  const auto e = make_direction(skew(), 2, -3, 1);
  CHECK(std::abs(e.delta.dot(e.d)) < 1e-12);
  CHECK(std::gcd(e.d_a, e.d_b) == 1);
  CHECK_THROWS_AS(make_direction(lat, 2, 4, 1), OutOfRange);
  CHECK_THROWS_AS(make_direction(lat, 0, 0, 1), OutOfRange);
}

TEST_CASE("coupling constant") {
  const auto lat = square();
  const auto d1 = make_direction(lat, 1, 0, 1), d2 = make_direction(lat, 0, 1, 2), d3 = make_direction(lat, 1, 1, 3);
  // d3 = (1,-1): delta1.d3 = 1, delta2.d3 = -1
  CHECK(coupling_constant(lat, d1, d1, d3) == doctest::Approx(0.5));
  CHECK(coupling_constant(lat, d1, d2, d3) == doctest::Approx(0.0));
  CHECK(coupling_constant(lat, d2, d3, d1) == doctest::Approx(0.5));
  CHECK_THROWS_AS(coupling_constant(lat, d1, d2, d1), OrthogonalDirection);
}
