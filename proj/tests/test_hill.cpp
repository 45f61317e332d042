#include <cmath>
#include <numbers>

#include "doctest.h"
#include "floquet/errors.hpp"
#include "floquet/hill.hpp"

using namespace floquet;
constexpr double kPi = std::numbers::pi;

TEST_CASE("free spectrum") {
  const auto s = full_spectrum(Potential1D::zero(), 6);
  CHECK(std::abs(s.lambda0) < 1e-10);
  for (int m = 1; m <= 6; ++m) {
    const double e = m * m * kPi * kPi;
    CHECK(s.gap(m).minus == doctest::Approx(e).epsilon(1e-10));
    CHECK(s.gap(m).plus == doctest::Approx(e).epsilon(1e-10));
    CHECK(s.gap(m).mu == doctest::Approx(e).epsilon(1e-10));
    CHECK_FALSE(s.gap(m).open);
  }
  CHECK(s.open_set().empty());
}

TEST_CASE("Mathieu characteristic values") {
  // -y'' + 2cos(2 pi s) y = lambda y is Mathieu's equation with x = pi s,
  // a = lambda / pi^2 and q = 1 / pi^2
  const double q = 1.0 / (kPi * kPi), q2 = q * q, q3 = q2 * q, q4 = q2 * q2;
  const double a0 = -q2 / 2 + 7 * q4 / 128 - 29 * q4 * q2 / 2304;
  const double b1 = 1 - q - q2 / 8 + q3 / 64 - q4 / 1536;
  const double a1 = 1 + q - q2 / 8 - q3 / 64 - q4 / 1536;
  const auto s = periodic_antiperiodic_spectrum(Potential1D::cosine(2.0, 1), 2);
  CHECK(s.lambda0 == doctest::Approx(kPi * kPi * a0).epsilon(1e-6));
  CHECK(std::abs(s.gap(1).minus - kPi * kPi * b1) < 1e-6);
  CHECK(std::abs(s.gap(1).plus - kPi * kPi * a1) < 1e-6);
}

TEST_CASE("monodromy is unimodular and the derivative matches differences") {
  const auto q = Potential1D({1.5, -0.4}, {0.3});
  for (double l : {-3.0, 2.0, 17.0, 60.0}) {
    CHECK(monodromy(q, l).determinant() == doctest::Approx(1.0).epsilon(1e-10));
    const double h = 1e-5;
    const double fd = (discriminant(q, l + h) - discriminant(q, l - h)) / (2 * h);
    CHECK(discriminant_derivative(q, l) == doctest::Approx(fd).epsilon(1e-6));
    const auto md = monodromy_with_derivative(q, l);
    CHECK((md.M - monodromy(q, l)).norm() < 1e-9);
  }
}

TEST_CASE("critical points lie inside the gaps") {
  const auto q = Potential1D({1.5, -0.4}, {0.3});
  const auto s = full_spectrum(q, 5);
  const auto c = critical_points(q, s);
  REQUIRE(c.size() >= 5);
  for (int m = 1; m <= 5; ++m) {
    CHECK(c[m - 1].value >= s.gap(m).minus - 1e-9);
    CHECK(c[m - 1].value <= s.gap(m).plus + 1e-9);
    CHECK(std::abs(discriminant_derivative(q, c[m - 1].value)) < 1e-6);
  }
  CHECK(interlacing_violations(s, 1e-9).empty());
}

TEST_CASE("interlacing violations are reported") {
  Spectrum1D s;
  s.lambda0 = 0;
  s.has_dirichlet = true;
  GapData g;
  g.m = 1;
  g.minus = 10;
  g.plus = 12;
  g.mu = 13;
  s.gaps.push_back(g);
  CHECK(interlacing_violations(s, 1e-9).size() == 1);
  s.gaps[0].mu = 11;
  s.gaps[0].plus = 9;
  CHECK(interlacing_violations(s, 1e-9).size() == 1);
}

TEST_CASE("product formula against shooting") {
  const auto q = Potential1D({2.0, 0.5});
  const auto s = periodic_antiperiodic_spectrum(q, 30);
  for (double l : {-1.0, 5.0, 33.0, 120.0, 400.0}) {
    const double d = discriminant(q, l);
    const auto p = discriminant_product_ratio(s, l, 30);
    CHECK(p.value == doctest::Approx(d * d - 4).epsilon(1e-4));
  }
  CHECK_THROWS_AS(discriminant_product_ratio(s, 1.0, 31), OutOfRange);
}

TEST_CASE("Galerkin sectors") {
  const auto q = Potential1D({1.0, 0.0, -0.7}, {0.0, 0.4});
  const auto s = full_spectrum(q, 4);
  const auto per = galerkin_oracle(q, 24, Sector::periodic);
  const auto anti = galerkin_oracle(q, 24, Sector::antiperiodic);
  const auto dir = galerkin_oracle(q, 24, Sector::dirichlet);
  CHECK(per[0] == doctest::Approx(s.lambda0).epsilon(1e-9));
  CHECK(per[1] == doctest::Approx(s.gap(2).minus).epsilon(1e-9));
  CHECK(anti[1] == doctest::Approx(s.gap(1).plus).epsilon(1e-9));
  CHECK(dir[2] == doctest::Approx(s.gap(3).mu).epsilon(1e-7));
}
