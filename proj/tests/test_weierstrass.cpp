#include <cmath>
#include <numbers>

#include "doctest.h"
#include "floquet/errors.hpp"
#include "floquet/hill.hpp"
#include "floquet/weierstrass.hpp"

using namespace floquet;

TEST_CASE("half-period values") {
  for (double tau : {0.5, 1.0, 2.0}) {
    const auto e = half_period_values(tau);
    CHECK(std::abs(e.e1 + e.e2 + e.e3) < 1e-12 * std::abs(e.e1));
    CHECK(e.e1 > e.e2);
    CHECK(e.e2 > e.e3);
  }
  // square lattice
  CHECK(std::abs(half_period_values(1.0).e2) < 1e-12);
}

TEST_CASE("series satisfies the Weierstrass equation") {
  // wp(s + i tau/2) = q/2 + mean is real on the line and solves wp'^2 = 4 prod (wp - e_k)
  for (double tau : {0.7, 1.0, 1.6}) {
    const auto p = make_wp_params(tau);
    const auto q = one_gap_potential(p);
    const auto e = half_period_values(tau);
    const double mean = wp_mean(tau);
    for (double s : {0.05, 0.21, 0.37, 0.5, 0.73}) {
      const double wp = q.value(s) / 2 + mean, dwp = q.derivative(s) / 2;
      const double rhs = 4 * (wp - e.e1) * (wp - e.e2) * (wp - e.e3);
      CHECK(dwp * dwp == doctest::Approx(rhs).epsilon(1e-9).scale(std::abs(e.e1) * std::abs(e.e1) * std::abs(e.e1)));
    }
    // on the line s + i tau/2 the function ranges over [e3, e2]
    CHECK(q.value(0.0) / 2 + mean == doctest::Approx(e.e3).epsilon(1e-10));
    CHECK(q.value(0.5) / 2 + mean == doctest::Approx(e.e2).epsilon(1e-10).scale(std::abs(e.e1)));
  }
}

TEST_CASE("band edges against shooting") {
  for (double tau : {0.8, 1.0, 2.0}) {
    const auto p = make_wp_params(tau);
    const auto s = periodic_antiperiodic_spectrum(one_gap_potential(p), 4);
    const auto e = band_edges(p);
    CHECK(s.lambda0 == doctest::Approx(e.lambda0).epsilon(1e-9));
    CHECK(s.gap(1).minus == doctest::Approx(e.lambda1_minus).epsilon(1e-9));
    CHECK(s.gap(1).plus == doctest::Approx(e.lambda1_plus).epsilon(1e-9));
    CHECK(s.gap(1).gamma == doctest::Approx(gap_of_tau(tau)).epsilon(1e-9));
    for (int m = 2; m <= 4; ++m) CHECK(s.gap(m).gamma < 1e-7);
  }
}

TEST_CASE("gap inversion") {
  double prev = 1e300;
  for (double tau : {0.3, 0.6, 1.0, 2.0, 4.0}) {
    const double g = gap_of_tau(tau);
    CHECK(g < prev);
    prev = g;
    CHECK(tau_from_gap(g).tau == doctest::Approx(tau).epsilon(1e-10));
  }
  CHECK_THROWS(tau_from_gap(-1.0));
}
