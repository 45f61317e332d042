#include <cmath>
#include <numbers>

#include "doctest.h"
#include "floquet/config.hpp"
#include "floquet/errors.hpp"
#include "floquet/invariants.hpp"

using namespace floquet;

namespace {
ManifoldPoint base() { return make_point(default_config()); }
}  // namespace

TEST_CASE("vanishing field gives vanishing invariants") {
  auto pt = base();
  pt.eps = {0, 0, 0, 0};
  InvariantEvaluator ev(64);
  const auto v = ev.invariant_vector(pt);
  CHECK(v.phi.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("quadrature converges under grid doubling") {
  InvariantEvaluator ev(128);
  const auto v = ev.invariant_vector(base());
  CHECK(v.doubling_change < 1e-10);
  InvariantEvaluator strict(16, 1e-300);
  auto pt = base();
  pt.eps = {0.5, 0.5, 0.3, 0.3};
  CHECK_THROWS_AS(strict.invariant_vector(pt), QuadratureNotConverged);
}

TEST_CASE("closed form at eps0") {
  InvariantEvaluator ev(64);
  const auto pt = base();
  for (int j = 3; j <= 4; ++j)
    for (int m = 1; m <= 2; ++m) {
      const auto f = phi_limit_closed_form(ev, pt, j, m);
      CHECK(f.residual < 1e-10);
      CHECK(f.fitted_cos == doctest::Approx(f.formula).epsilon(1e-8));
      CHECK(std::abs(f.fitted_sin) < 1e-10 * std::abs(f.formula) + 1e-14);
      CHECK(f.d_spread < 1e-10);
    }
  CHECK_THROWS_AS(phi_limit_closed_form(ev, pt, 1, 2), OutOfRange);
  CHECK_THROWS_AS(phi_limit_closed_form(ev, pt.with_eps(3, 0.1), 3, 1), OutOfRange);
}

TEST_CASE("analytic derivatives against differences") {
  InvariantEvaluator ev(64);
  auto pt = base();
  pt.eps = {0.5, 0.5, 0.1, 0.05};
  const auto d = ev.derivatives(pt);
  const double h = 1e-4;
  for (size_t r = 0; r < d.index.size(); ++r) {
    const auto c = d.index[r];
    const auto p = ev.invariant_vector(pt.with_alpha(c, pt.alpha(c) + h), false).phi;
    const auto m = ev.invariant_vector(pt.with_alpha(c, pt.alpha(c) - h), false).phi;
    for (int i = 0; i < p.size(); ++i) CHECK(std::abs((p(i) - m(i)) / (2 * h) - d.J(r, i)) < 1e-6);
  }
}

TEST_CASE("eps3 derivatives at eps0 against differences") {
  InvariantEvaluator ev(64);
  const auto pt = base();
  const auto z = ev.derivatives(pt);
  const double e = 1e-4, h = 1e-4;
  const auto zp = ev.invariant_vector(pt.with_eps(3, e), false).phi;
  const auto zm = ev.invariant_vector(pt.with_eps(3, -e), false).phi;
  for (int i = 0; i < zp.size(); ++i) CHECK(std::abs((zp(i) - zm(i)) / (2 * e) - z.phi_e3(i)) < 1e-7);
  for (size_t r = 0; r < z.index.size(); ++r) {
    const auto c = z.index[r];
    auto phi = [&](double de, double da) {
      return ev.invariant_vector(pt.with_eps(3, de).with_alpha(c, pt.alpha(c) + da), false).phi;
    };
    const Eigen::VectorXd fd = (phi(e, h) - phi(e, -h) - phi(-e, h) + phi(-e, -h)) / (4 * e * h);
    for (int i = 0; i < fd.size(); ++i) CHECK(std::abs(fd(i) - z.J_e3(r, i)) < 1e-5);
  }
}

TEST_CASE("mixed derivative: quadrature and differences agree") {
  InvariantEvaluator ev(64);
  const auto pt = base();
  for (int j = 1; j <= 2; ++j) {
    const auto r = mixed_derivative(ev, pt, j, 2);
    CHECK(r.discrepancy < 1e-5 * std::max(1.0, std::abs(r.method_a)));
    CHECK(r.method_a == doctest::Approx(r.coupling * r.normalized));
  }
  CHECK_THROWS_AS(mixed_derivative(ev, pt, 3, 2), OutOfRange);
}

TEST_CASE("b coefficient approaches the sine as the gap closes") {
  InvariantEvaluator ev(64);
  auto pt = base();
  double prev = 1e300;
  for (double e : {0.2, 0.05, 0.0125}) {
    pt.eps = {e, e, 0, 0};
    const double b = b_coeff(ev, pt, 2, 2, 2);
    const double s = std::sin(2 * pt.alpha({3, 2}) - 2 * pt.alpha({2, 2}));
    CHECK(std::abs(b - s) < prev);
    prev = std::abs(b - s);
  }
  CHECK(prev < 1e-2);
  // free direction: exact
  pt.eps = {0, 0, 0, 0};
  CHECK(b_coeff(ev, pt, 1, 2, 2) == doctest::Approx(std::sin(2 * pt.alpha({3, 2}) - 2 * pt.alpha({1, 2}))).epsilon(1e-8));
}

TEST_CASE("epsilon selection") {
  InvariantEvaluator ev(64);
  const auto pt = base();
  SelectionOptions opt;
  opt.N = 128;
  const auto sel = select_epsilons(ev, 0.3, pt, opt);
  CHECK(sel.all_positive());
  CHECK(sel.eps1 > 0);
  CHECK(sel.eps2 > 0);
  // the next larger eps1 on the grid violates an inequality
  if (sel.eps1 < 1.0) {
    const double up = sel.eps1 * std::pow(10.0, 1.0 / opt.per_decade);
    bool any_negative = false;
    for (const auto& s : selection_slacks(ev, 0.3, pt, up, sel.eps2, opt))
      if (s.name.rfind("choicetwo", 0) != 0 && s.value <= 0) any_negative = true;
    CHECK(any_negative);
  }
  CHECK_THROWS_AS(select_epsilons(ev, 1.5, pt, opt), OutOfRange);
}
