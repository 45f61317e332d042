#include <cmath>
#include <numbers>

#include "doctest.h"
#include "floquet/errors.hpp"
#include "floquet/finitegap.hpp"
#include "floquet/weierstrass.hpp"

using namespace floquet;
constexpr double kPi = std::numbers::pi;

namespace {
Potential1D lame() { return one_gap_potential(make_wp_params(1.0)); }
Potential1D two_gap() { return lame().scaled(3.0).translated(0.13); }
}  // namespace

TEST_CASE("gap coordinate") {
  for (double a : {0.0, 0.3, 1.2, kPi / 2}) {
    for (int sheet : {1, -1}) {
      const GapCoordinate c{a, sheet};
      const double mu = mu_from_alpha(c, 2.0, 5.0);
      CHECK(mu == doctest::Approx(2.0 + 3.0 * std::sin(a) * std::sin(a)));
      CHECK(alpha_from_mu(mu, 2.0, 5.0, sheet).alpha == doctest::Approx(a).epsilon(1e-9));
    }
  }
  CHECK_THROWS_AS(alpha_from_mu(6.0, 2.0, 5.0), OutOfGap);
}

TEST_CASE("flow follows the Dirichlet spectrum of translates") {
  const auto q = two_gap();
  const auto s = full_spectrum(q, 3);
  const auto data = FiniteGapData::from_spectrum(s);
  REQUIRE(data.gaps.size() == 2);
  const auto start = torus_point_from_spectrum(data, s);
  const auto grid = uniform_grid(8);
  const auto fl = mu_flow(data, start, grid);
  for (int k = 0; k < 8; ++k) {
    const auto mu = dirichlet_spectrum(q.translated(grid[k]), 2);
    CHECK(std::abs(mu[0] - fl.mu[0][k]) < 1e-8);
    CHECK(std::abs(mu[1] - fl.mu[1][k]) < 1e-8);
  }
  const auto rq = reconstruct_potential(data, fl);
  for (int k = 0; k < 8; ++k) CHECK(std::abs(rq[k] - q.value(grid[k])) < 1e-8);
}

TEST_CASE("one-gap flow is periodic") {
  const auto s = full_spectrum(lame(), 2);
  const auto data = FiniteGapData::from_spectrum(s);
  const auto start = torus_point_from_spectrum(data, s);
  const auto fl = mu_flow(data, start, {0.0, 1.0});
  CHECK(std::abs(fl.mu[0][1] - fl.mu[0][0]) < 1e-9);
  CHECK_THROWS_AS(mu_flow(data, start, {0.5, 0.1}), OutOfRange);
}

TEST_CASE("squared eigenfunctions") {
  const auto q = two_gap();
  const auto s = full_spectrum(q, 3);
  const auto data = FiniteGapData::from_spectrum(s);
  const auto start = torus_point_from_spectrum(data, s);
  const int N = 128;
  const auto fl = mu_flow(data, start, uniform_grid(N));
  for (const auto& g : data.gaps) {
    const auto sq = eigenfunction_sq(data, g.m, fl);
    // the product is normalized without rescaling
    CHECK(sq.norm == doctest::Approx(1.0).epsilon(1e-9));
    for (double v : sq.values) CHECK(v > -1e-12);
    const auto ds = eigenfunction_sq_ds(data, g.m, fl, sq);
    double mean = 0;
    for (double v : ds) mean += v / N;
    CHECK(std::abs(mean) < 1e-8);
  }
}

TEST_CASE("closed levels: flow and sensitivity") {
  const auto s = full_spectrum(lame(), 3);
  const auto ld = e1_limit_data(s, {2, 3});
  REQUIRE(ld.gaps.size() == 3);
  const auto S = alpha_tilde_sensitivity(ld, {kPi / 2, 0.3, 0.7}, 0.61, {1, 2});
  CHECK((S - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-7);
  const auto le = limit_eigenfunction_E1(ld, 2, kPi / 2, 0.3, 128);
  double mean = 0;
  for (double v : le.phi_sq) mean += v / 128;
  CHECK(mean == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("free closed level rotates at rate m pi") {
  // zero potential with level 2 kept as a closed gap
  FiniteGapData d;
  d.lambda0 = 0;
  d.gaps.push_back({2, 4 * kPi * kPi, 4 * kPi * kPi, 4 * kPi * kPi});
  const auto v = flow_rhs(d, {0.4});
  CHECK(v[0] == doctest::Approx(2 * kPi).epsilon(1e-9));
}
