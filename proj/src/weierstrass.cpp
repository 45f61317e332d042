#include "floquet/weierstrass.hpp"

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "floquet/errors.hpp"

namespace floquet {

namespace {

constexpr double kPi = std::numbers::pi;

struct Theta {
  double t2, t3, t4;
};

// Jacobi thetas at z = 0 with nome q = e^{-pi tau}.
Theta thetas(double tau) {
  const double q = std::exp(-kPi * tau);
  Theta t{0.0, 1.0, 1.0};
  for (int n = 0;; ++n) {
    const double a = std::pow(q, (n + 0.5) * (n + 0.5));
    t.t2 += 2.0 * a;
    if (n >= 1) {
      const double b = std::pow(q, double(n) * n);
      t.t3 += 2.0 * b;
      t.t4 += (n % 2 ? -2.0 : 2.0) * b;
    }
    if (a < 1e-18 * t.t2 && n >= 1) break;
  }
  return t;
}

}  // namespace

WpParams make_wp_params(double tau) {
  if (!(tau > 0)) throw OutOfRange("tau must be positive");
  WpParams p{tau, 1};
  // |a_n / a_1| = n e^{-pi tau (n-1)} (1 - e^{-2 pi tau}) / (1 - e^{-2 pi n tau})
  while (p.n_max < 4000) {
    const int n = p.n_max + 1;
    const double r = n * std::exp(-kPi * tau * (n - 1)) * (-std::expm1(-2 * kPi * tau)) / (-std::expm1(-2 * kPi * tau * n));
    if (r < 1e-16) break;
    p.n_max = n;
  }
  return p;
}

std::vector<double> wp_fourier_coeffs(const WpParams& p) {
  std::vector<double> a(p.n_max);
  for (int n = 1; n <= p.n_max; ++n)
    a[n - 1] = -8.0 * kPi * kPi * n * std::exp(-kPi * n * p.tau) / (-std::expm1(-2.0 * kPi * n * p.tau));
  return a;
}

double wp_mean(double tau) {
  const double Q = std::exp(-2.0 * kPi * tau);
  double s = 0.0;
  for (int n = 1; n < 100000; ++n) {
    const double t = n * std::pow(Q, n) / (1.0 - std::pow(Q, n));
    s += t;
    if (t < 1e-18 * std::max(s, 1e-300)) break;
  }
  return -kPi * kPi / 3.0 + 8.0 * kPi * kPi * s;
}

HalfPeriods half_period_values(double tau) {
  const Theta t = thetas(tau);
  const double c = kPi * kPi / 3.0;
  const double t2 = std::pow(t.t2, 4), t3 = std::pow(t.t3, 4), t4 = std::pow(t.t4, 4);
  return {c * (t3 + t4), c * (t2 - t4), -c * (t2 + t3)};
}

Potential1D one_gap_potential(const WpParams& p) {
  auto a = wp_fourier_coeffs(p);
  for (auto& x : a) x *= 2.0;
  return Potential1D(a);
}

OneGapEdges band_edges(const WpParams& p) {
  const HalfPeriods e = half_period_values(p.tau);
  const double shift = -2.0 * wp_mean(p.tau);
  return {-e.e1 + shift, -e.e2 + shift, -e.e3 + shift, shift};
}

double gap_of_tau(double tau) {
  return kPi * kPi * std::pow(thetas(tau).t2, 4);
}

TauSolution tau_from_gap(double target_gap) {
  if (!(target_gap > 0)) throw OutOfRange("target gap must be positive");
  static const bool monotone = [] {
    double prev = gap_of_tau(kTauMin);
    for (int i = 1; i <= 400; ++i) {
      const double tau = kTauMin * std::pow(kTauMax / kTauMin, i / 400.0);
      const double g = gap_of_tau(tau);
      if (!(g < prev)) return false;
      prev = g;
    }
    return true;
  }();
  if (!monotone) throw OutOfRange("gap(tau) is not monotone on the tabulated range");
  const double gmax = gap_of_tau(kTauMin), gmin = gap_of_tau(kTauMax);
  if (target_gap > gmax) throw OutOfRange("gap " + std::to_string(target_gap) + " exceeds gap(tau_min)=" + std::to_string(gmax));
  if (target_gap <= gmin) return {kTauMax, true};
  const double lt = std::log(target_gap);
  auto f = [&](double tau) { return std::log(gap_of_tau(tau)) - lt; };
  boost::uintmax_t it = 200;
  auto tol = [](double a, double b) { return std::abs(a - b) <= 1e-15 * std::max(std::abs(a), std::abs(b)); };
  auto r = boost::math::tools::toms748_solve(f, kTauMin, kTauMax, tol, it);
  return {0.5 * (r.first + r.second), false};
}

}  // namespace floquet
