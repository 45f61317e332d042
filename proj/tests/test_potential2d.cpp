#include <cmath>
#include <numbers>

#include "doctest.h"
#include "floquet/config.hpp"
#include "floquet/errors.hpp"
#include "floquet/potential2d.hpp"

using namespace floquet;

TEST_CASE("validation") {
  auto cfg = default_config();
  CHECK_NOTHROW(make_point(cfg));
  auto bad = cfg;
  bad.directions[2] = {1, -1};
  bad.directions[3] = {1, 1};
  CHECK_THROWS_AS(make_point(bad), ConfigError);
  bad = cfg;
  bad.gaps[2].push_back(0.3);
  bad.alpha[2].push_back(0.1);
  CHECK_THROWS_AS(make_point(bad), ConfigError);
  bad = cfg;
  bad.eps[0] = 1.5;
  CHECK_THROWS_AS(make_point(bad), ConfigError);
}

TEST_CASE("effective gaps and index sets") {
  auto pt = make_point(default_config());
  pt.eps = {0.5, 0.25, 0.1, 0.2};
  const auto g = effective_gaps(pt);
  CHECK(g[0][0] == doctest::Approx(0.5 * 8));
  CHECK(g[1][0] == doctest::Approx(0.25 * 8));
  CHECK(g[0][1] == doctest::Approx(0.2 * 1));
  CHECK(g[2][1] == doctest::Approx(0.1 * 0.8));
  CHECK(g[3][0] == doctest::Approx(0.2 * 0.5));
  CHECK(pt.N() == 8);
  CHECK(pt.n() == 2);
  const auto c = pt.E0c();
  REQUIRE(c.size() == 6);
  CHECK(c[0] == Coord{1, 2});
  CHECK(c[1] == Coord{2, 2});
  CHECK(c[2] == Coord{3, 1});
}

TEST_CASE("realized directional gaps") {
  auto pt = make_point(default_config());
  pt.eps = {0.5, 0.5, 0.05, 0.02};
  LameCache cache;
  for (int j = 1; j <= pt.S(); ++j) CHECK_NOTHROW(verify_realization(pt, j, cache));
  // a single cosine opens its gap at first order only
  const auto r = verify_realization(pt, 3, cache);
  CHECK(r.measured[0] == doctest::Approx(r.target[0]).epsilon(1e-2));
}

TEST_CASE("assembled potential has the directional series") {
  auto pt = make_point(default_config());
  pt.eps = {0.5, 0.5, 0.1, 0.1};
  LameCache cache;
  const int N = 64;
  const auto Q = assemble(pt, N, cache);
  const auto F = directional_fourier(Q);
  CHECK(F.parseval_error(Q) < 1e-12);
  CHECK(F.inverse_error(Q) < 1e-10);
  for (int j = 1; j <= pt.S(); ++j) {
    const auto& d = pt.direction(j);
    const auto q = realize_directional(pt, j, cache);
    const auto r = F.directional(d, 6, d.delta.squaredNorm());
    for (int n = 1; n <= 6; ++n) {
      const double c = n <= int(q.cos_coeffs.size()) ? q.cos_coeffs[n - 1] : 0.0;
      const double s = n <= int(q.sin_coeffs.size()) ? q.sin_coeffs[n - 1] : 0.0;
      CHECK(std::abs(r.cos_coeffs[n - 1] - c) < 1e-10);
      CHECK(std::abs(r.sin_coeffs[n - 1] - s) < 1e-10);
    }
  }
}

TEST_CASE("aliasing is detected") {
  const int N = 16;
  Eigen::MatrixXd Q(N, N);
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < N; ++k) Q(i, k) = std::cos(std::numbers::pi * i);
  CHECK_THROWS_AS(directional_fourier(Q), AliasingDetected);
}

TEST_CASE("h field") {
  auto pt = make_point(default_config());
  LameCache cache;
  // at eps0 only the directions 1 and 2 contribute
  const auto h = h_field(pt, 3, 32, cache);
  CHECK(h[0].cwiseAbs().maxCoeff() > 0);
  pt.eps = {0, 0, 0, 0};
  const auto z = h_field(pt, 3, 32, cache);
  CHECK(z[0].cwiseAbs().maxCoeff() == 0);
  CHECK(z[1].cwiseAbs().maxCoeff() == 0);
}
