#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "doctest.h"
#include "floquet/config.hpp"
#include "floquet/errors.hpp"
#include "floquet/jacobian.hpp"

using namespace floquet;
constexpr double kPi = std::numbers::pi;

namespace {
ManifoldPoint base() { return make_point(default_config()); }

int permutation_sign(std::vector<int> p) {
  int s = 1;
  for (size_t i = 0; i < p.size(); ++i)
    while (p[i] != int(i)) {
      std::swap(p[i], p[p[i]]);
      s = -s;
    }
  return s;
}
}  // namespace

TEST_CASE("determinant under permutations") {
  InvariantEvaluator ev(64);
  auto pt = base();
  pt.eps = {0.5, 0.5, 0.2, 0.1};
  const auto r = jacobian(ev, pt, 0, JacobianMethod::Analytic);
  REQUIRE(std::abs(r.det) > 0);
  std::mt19937 rng(7);
  std::vector<int> perm(r.labels.size());
  for (int t = 0; t < 3; ++t) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    CHECK(r.permuted_det(perm) == doctest::Approx(permutation_sign(perm) * r.det).epsilon(1e-10));
    // relabelling rows and columns together leaves det unchanged
    CHECK(reorder(r, perm).det == doctest::Approx(r.det).epsilon(1e-10));
  }
}

TEST_CASE("finite differences and analytic route agree") {
  InvariantEvaluator ev(64);
  auto pt = base();
  pt.eps = {0.5, 0.5, 0.1, 0.0};
  const auto a = jacobian(ev, pt, 0, JacobianMethod::Analytic);
  const auto f = jacobian(ev, pt, 1e-4, JacobianMethod::FiniteDifference);
  CHECK((a.J - f.J).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(f.det == doctest::Approx(a.det).epsilon(1e-5));
  CHECK_THROWS_AS(jacobian(ev, pt, 1e-13, JacobianMethod::FiniteDifference), QuadratureNoiseDominates);
}

TEST_CASE("structure at eps0") {
  InvariantEvaluator ev(64);
  const auto pt = base();
  const auto s = structure_at_eps0(ev, pt);
  CHECK(s.zero_column_ratio < 1e-6);
  CHECK(s.off_pattern < 1e-5);
  CHECK(s.jac.rank == s.expected_rank);
  CHECK(s.i3_block_nonzero);
  CHECK(s.jac.zero_columns == std::vector<int>{0, 1});
  CHECK(std::abs(s.jac.det) < 1e-12);
  // single entry of the j >= 3 columns: -2 c a a sin(2 alpha)
  for (int i = pt.n(); i < int(s.jac.labels.size()); ++i) {
    const auto c = s.jac.labels[i];
    const auto f = phi_limit_closed_form(ev, pt, c.j, c.m);
    CHECK(s.jac.J(i, i) == doctest::Approx(-2 * f.formula * std::sin(2 * pt.alpha(c))).epsilon(1e-8));
  }
  CHECK_THROWS_AS(structure_at_eps0(ev, pt.with_eps(3, 0.1)), OutOfRange);
}

TEST_CASE("reduced determinant") {
  InvariantEvaluator ev(64);
  auto pt = base();
  pt.eps = {0.01, 0.5, 0, 0};
  const auto r = reduced_determinant(ev, pt);
  CHECK(std::abs(r.direct) > 0);
  CHECK(r.direct == doctest::Approx(r.diagonal_product).epsilon(1e-3));

  // zero locus of the j >= 3 entries
  const auto z = reduced_determinant(ev, pt.with_alpha({4, 1}, kPi / 2));
  CHECK(std::abs(z.direct) < 1e-10 * std::abs(r.direct));

  // alpha_{3,m} = alpha_{1,m} nearly kills the E1 diagonal entry for small eps1
  const auto w = reduced_determinant(ev, pt.with_alpha({3, 2}, pt.alpha({1, 2})));
  CHECK(std::abs(w.diagonal(0)) < 0.05 * std::abs(r.diagonal(0)));

  // gamma_{3,.} -> 2 gamma_{3,.} doubles each E1 diagonal entry to first order
  auto big = pt;
  for (auto& g : big.dirs[2].gaps) g *= 2;
  const auto b = reduced_determinant(ev, big);
  for (int i = 0; i < pt.n(); ++i) CHECK(b.diagonal(i) / r.diagonal(i) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("scan on the eps0 plane is never certified") {
  InvariantEvaluator ev(32);
  ScanSpecification spec;
  spec.eps3 = {0.0};
  spec.eps4 = {0.0};
  spec.generic_alphas = 2;
  const auto res = rigidity_scan(ev, base(), spec);
  CHECK(res.failures == 0);
  for (const auto& c : res.cells) CHECK_FALSE(c.certified);
  CHECK(res.certified_fraction_generic == 0.0);
}

TEST_CASE("scan samples") {
  ScanSpecification spec;
  spec.generic_alphas = 3;
  const auto s = scan_alpha_samples(base(), spec);
  CHECK(s.size() == 3 + 4);
  for (size_t i = 3; i < s.size(); ++i) CHECK(s[i].second);
  const auto t = scan_alpha_samples(base(), spec);
  for (size_t i = 0; i < s.size(); ++i)
    for (const auto& c : base().E0c()) CHECK(s[i].first.alpha(c) == t[i].first.alpha(c));
}
