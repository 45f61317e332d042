#include "floquet/hill.hpp"

#include <algorithm>
#include <array>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "floquet/errors.hpp"

namespace floquet {

namespace {

constexpr double kPi = std::numbers::pi;
namespace odeint = boost::numeric::odeint;

// Fast evaluation of q(s) from precomputed complex weights.
class QEval {
 public:
  explicit QEval(const Potential1D& q) {
    w_.reserve(q.cos_coeffs.size());
    for (size_t n = 0; n < q.cos_coeffs.size(); ++n) w_.emplace_back(q.cos_coeffs[n], -q.sin_coeffs[n]);
    while (!w_.empty() && w_.back() == 0.0) w_.pop_back();
  }
  double operator()(double s) const {
    if (w_.empty()) return 0.0;
    const std::complex<double> z = std::polar(1.0, 2.0 * kPi * s);
    std::complex<double> zn = 1.0, acc = 0.0;
    for (const auto& w : w_) {
      zn *= z;
      acc += w * zn;
    }
    return acc.real();
  }

 private:
  std::vector<std::complex<double>> w_;
};

template <class State, class Rhs>
void integrate_unit(Rhs&& rhs, State& x, double lambda, double tol) {
  auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_fehlberg78<State>());
  const double dt0 = 1.0 / (8.0 * (1.0 + std::sqrt(std::abs(lambda))));
  try {
    odeint::integrate_adaptive(stepper, rhs, x, 0.0, 1.0, dt0);
  } catch (const std::exception& e) {
    std::ostringstream os;
    os << "lambda=" << lambda << ": " << e.what();
    throw IntegrationFailure(os.str());
  }
  for (double v : x)
    if (!std::isfinite(v)) throw IntegrationFailure("non-finite state at lambda=" + std::to_string(lambda));
}

double det_shift(const Eigen::Matrix2d& M, double sigma) {
  // det(M - sigma I) entrywise; at coexistence points both factors are small
  return (M(0, 0) - sigma) * (M(1, 1) - sigma) - M(0, 1) * M(1, 0);
}

template <class F>
double refine_root(F&& f, double a, double b, double fa, double fb, double rel_tol, const char* what) {
  if (fa == 0) return a;
  if (fb == 0) return b;
  if ((fa > 0) == (fb > 0)) {
    std::ostringstream os;
    os << what << ": no sign change on [" << a << ", " << b << "]";
    throw RootBracketFailure(os.str());
  }
  boost::uintmax_t it = 200;
  const double abs_floor = 1e-14;
  auto tol = [&](double x, double y) { return std::abs(x - y) <= std::max(rel_tol * std::max(std::abs(x), std::abs(y)), abs_floor); };
  auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, it);
  return 0.5 * (r.first + r.second);
}

}  // namespace

Eigen::Matrix2d monodromy(const Potential1D& q, double lambda, const HillOptions& opt) {
  const QEval Q(q);
  using S = std::array<double, 4>;
  S x{1, 0, 0, 1};  // y1, y1', y2, y2'
  auto rhs = [&](const S& u, S& du, double s) {
    const double v = Q(s) - lambda;
    du[0] = u[1];
    du[1] = v * u[0];
    du[2] = u[3];
    du[3] = v * u[2];
  };
  integrate_unit(rhs, x, lambda, opt.ode_tol);
  Eigen::Matrix2d M;
  M << x[0], x[2], x[1], x[3];
  return M;
}

MonodromyPair monodromy_with_derivative(const Potential1D& q, double lambda, const HillOptions& opt) {
  const QEval Q(q);
  using S = std::array<double, 8>;
  S x{1, 0, 0, 1, 0, 0, 0, 0};
  auto rhs = [&](const S& u, S& du, double s) {
    const double v = Q(s) - lambda;
    du[0] = u[1];
    du[1] = v * u[0];
    du[2] = u[3];
    du[3] = v * u[2];
    du[4] = u[5];
    du[5] = v * u[4] - u[0];
    du[6] = u[7];
    du[7] = v * u[6] - u[2];
  };
  integrate_unit(rhs, x, lambda, opt.ode_tol);
  MonodromyPair out;
  out.M << x[0], x[2], x[1], x[3];
  out.dM << x[4], x[6], x[5], x[7];
  return out;
}

double discriminant(const Potential1D& q, double lambda, const HillOptions& opt) {
  return monodromy(q, lambda, opt).trace();
}

double discriminant_derivative(const Potential1D& q, double lambda, const HillOptions& opt) {
  return monodromy_with_derivative(q, lambda, opt).dM.trace();
}

std::vector<int> Spectrum1D::open_set() const {
  std::vector<int> I;
  for (const auto& g : gaps)
    if (g.open) I.push_back(g.m);
  return I;
}

Spectrum1D periodic_antiperiodic_spectrum(const Potential1D& q, int m_max, const HillOptions& opt) {
  if (m_max < 1) throw OutOfRange("m_max must be >= 1");
  auto dDelta = [&](double l) { return discriminant_derivative(q, l, opt); };

  // Critical points 1..m_max+1 from sign changes of dDelta on a scan whose
  // step tracks the local spacing of the free discriminant.
  const double lam_low = q.min_value() - 1.0;
  std::vector<double> crit;
  double a = lam_low, fa = dDelta(a);
  const double lam_cap = 1e3 + 4.0 * std::pow((m_max + 3) * kPi, 2) + 4.0 * q.sup_norm_bound();
  while (int(crit.size()) < m_max + 1) {
    const double b = a + 0.5 * std::max(1.0, std::sqrt(std::abs(a)));
    if (b > lam_cap) throw RootBracketFailure("critical-point scan exceeded lambda=" + std::to_string(lam_cap));
    const double fb = dDelta(b);
    if ((fa > 0) != (fb > 0) || fb == 0) crit.push_back(refine_root(dDelta, a, b, fa, fb, opt.root_tol, "critical point"));
    a = b;
    fa = fb;
  }
  std::vector<Eigen::Matrix2d> Mc;
  for (size_t i = 0; i < crit.size(); ++i) {
    Mc.push_back(monodromy(q, crit[i], opt));
    const double sigma = (i % 2 == 0) ? -1.0 : 1.0;  // crit[i] is lambda-dot_{i+1}
    if (sigma * Mc.back().trace() < 2.0 - 1e-6) {
      std::ostringstream os;
      os << "critical point " << i + 1 << " at " << crit[i] << " has Delta=" << Mc.back().trace()
         << "; scan missed a pair of sign changes";
      throw RootBracketFailure(os.str());
    }
  }

  Spectrum1D spec;
  spec.gap_tol = opt.gap_tol;
  auto f0 = [&](double l) { return det_shift(monodromy(q, l, opt), 1.0); };
  spec.lambda0 = refine_root(f0, lam_low, crit[0], f0(lam_low), det_shift(Mc[0], 1.0), opt.root_tol, "lambda0");

  for (int m = 1; m <= m_max; ++m) {
    const double sigma = (m % 2 == 0) ? 1.0 : -1.0;
    auto f = [&](double l) { return det_shift(monodromy(q, l, opt), sigma); };
    GapData g;
    g.m = m;
    g.critical = crit[m - 1];
    const double fc = det_shift(Mc[m - 1], sigma);
    if (fc >= 0) {
      g.minus = g.plus = g.critical;
      g.critical_flag = true;
    } else {
      const double lo = (m == 1) ? spec.lambda0 : crit[m - 2];
      const double hi = crit[m];
      const double flo = (m == 1) ? det_shift(monodromy(q, lo, opt), sigma) : det_shift(Mc[m - 2], sigma);
      g.minus = refine_root(f, lo, g.critical, flo, fc, opt.root_tol, "lambda_m^-");
      g.plus = refine_root(f, g.critical, hi, fc, det_shift(Mc[m], sigma), opt.root_tol, "lambda_m^+");
    }
    g.gamma = g.plus - g.minus;
    g.open = g.gamma > opt.gap_tol;
    if (!g.open) g.critical_flag = true;
    const double left = (m == 1) ? spec.lambda0 : spec.gaps.back().plus;
    g.near_touching = g.minus - left < 1e-9 * std::max(1.0, std::abs(g.minus));
    spec.gaps.push_back(g);
  }
  const auto bad = interlacing_violations(spec, 1e-9);
  if (!bad.empty()) throw InterlacingViolation(bad.front());
  return spec;
}

namespace {

void fill_dirichlet(const Potential1D& q, Spectrum1D& spec, int m_max, const HillOptions& opt) {
  // spec holds edges up to m_max+1 so every mu_m has band midpoints on both sides
  auto y2 = [&](double l) { return monodromy(q, l, opt)(0, 1); };
  for (int m = 1; m <= m_max; ++m) {
    const auto& g = spec.gaps[m - 1];
    const double left = (m == 1) ? spec.lambda0 : spec.gaps[m - 2].plus;
    const double lo = 0.5 * (left + g.minus);
    const double hi = 0.5 * (g.plus + spec.gaps[m].minus);
    const double mu = refine_root(y2, lo, hi, y2(lo), y2(hi), opt.root_tol, "mu_m");
    auto& gm = spec.gaps[m - 1];
    gm.mu = mu;
    const double l22 = std::log(std::abs(monodromy(q, mu, opt)(1, 1)));
    gm.sheet = (!gm.open || std::abs(l22) < 1e-10) ? 0 : (l22 > 0 ? -1 : 1);
  }
}

}  // namespace

std::vector<double> dirichlet_spectrum(const Potential1D& q, int m_max, const HillOptions& opt) {
  Spectrum1D spec = periodic_antiperiodic_spectrum(q, m_max + 1, opt);
  fill_dirichlet(q, spec, m_max, opt);
  std::vector<double> mu;
  for (int m = 1; m <= m_max; ++m) mu.push_back(spec.gaps[m - 1].mu);
  return mu;
}

Spectrum1D full_spectrum(const Potential1D& q, int m_max, const HillOptions& opt) {
  Spectrum1D spec = periodic_antiperiodic_spectrum(q, m_max + 1, opt);
  fill_dirichlet(q, spec, m_max, opt);
  spec.gaps.pop_back();
  spec.has_dirichlet = true;
  const auto bad = interlacing_violations(spec, 1e-9);
  if (!bad.empty()) throw InterlacingViolation(bad.front());
  return spec;
}

std::vector<CriticalPoint> critical_points(const Potential1D& q, const Spectrum1D& spec, const HillOptions& opt) {
  auto dDelta = [&](double l) { return discriminant_derivative(q, l, opt); };
  std::vector<CriticalPoint> out;
  for (const auto& g : spec.gaps) {
    CriticalPoint c;
    if (g.open) {
      c.value = refine_root(dDelta, g.minus, g.plus, dDelta(g.minus), dDelta(g.plus), opt.root_tol, "critical point");
    } else {
      c.value = 0.5 * (g.minus + g.plus);
      c.midpoint_flag = true;
    }
    out.push_back(c);
  }
  return out;
}

std::vector<std::string> interlacing_violations(const Spectrum1D& spec, double tol) {
  std::vector<std::string> bad;
  auto t = [&](double x) { return tol * std::max(1.0, std::abs(x)); };
  double prev = spec.lambda0;
  for (const auto& g : spec.gaps) {
    std::ostringstream os;
    os.precision(15);
    // bands have positive length; a touching pair is flagged separately
    if (g.minus < prev - t(prev)) os << "band before gap " << g.m << " inverted: " << prev << " > " << g.minus;
    else if (g.plus < g.minus - t(g.minus)) os << "gap " << g.m << " inverted: " << g.minus << " > " << g.plus;
    else if (spec.has_dirichlet && (g.mu < g.minus - t(g.mu) || g.mu > g.plus + t(g.mu)))
      os << "mu_" << g.m << "=" << g.mu << " outside [" << g.minus << ", " << g.plus << "]";
    if (!os.str().empty()) bad.push_back(os.str());
    prev = g.plus;
  }
  return bad;
}

ProductValue discriminant_product_ratio(const Spectrum1D& spec, double lambda, int n_tail) {
  if (spec.m_max() < n_tail) throw OutOfRange("spectrum shorter than n_tail");
  ProductValue out;
  double prod = 4.0 * (spec.lambda0 - lambda);
  for (int n = 1; n <= n_tail; ++n) {
    const auto& g = spec.gap(n);
    const double n2 = n * n * kPi * kPi;
    prod *= (g.plus - lambda) / n2 * ((g.minus - lambda) / n2);
  }
  // tail = prod_{n > n_tail} (1 - lambda/(n pi)^2)^2
  //      = [sin k / (k prod_{n <= n_tail} (1 - k^2/(n pi)^2))]^2,
  // with the factor nearest k rewritten through sinc(n pi - k) to stay regular.
  double ratio;
  if (lambda < 0) {
    const double k = std::sqrt(-lambda);
    ratio = std::sinh(k) / k;
    for (int n = 1; n <= n_tail; ++n) ratio /= 1.0 - lambda / (n * n * kPi * kPi);
  } else if (lambda == 0) {
    ratio = 1.0;
    out.pole_flag = true;
  } else {
    const double k = std::sqrt(lambda);
    const int ns = int(std::lround(k / kPi));
    if (ns >= 1 && ns <= n_tail) {
      const double x = ns * kPi - k;
      const double sincx = (x == 0) ? 1.0 : std::sin(x) / x;
      ratio = sincx * (ns * kPi) * (ns * kPi) / ((ns * kPi + k) * k);
      if (std::abs(x) < 1e-12 * std::max(1.0, k)) out.pole_flag = true;
    } else {
      ratio = std::sin(k) / k;
    }
    for (int n = 1; n <= n_tail; ++n) {
      if (n == ns) continue;
      ratio /= 1.0 - lambda / (n * n * kPi * kPi);
    }
  }
  out.value = prod * ratio * ratio;
  return out;
}

std::vector<double> galerkin_oracle(const Potential1D& q, int K, Sector sector) {
  const int nq = int(q.cos_coeffs.size());
  auto qhat = [&](int k) -> std::complex<double> {
    // Fourier coefficient of e^{2 pi i k s}
    if (k == 0 || std::abs(k) > nq) return 0.0;
    const int a = std::abs(k);
    std::complex<double> c(0.5 * q.cos_coeffs[a - 1], -0.5 * q.sin_coeffs[a - 1]);
    return k > 0 ? c : std::conj(c);
  };
  if (sector == Sector::dirichlet) {
    // <sin(m pi s), q sin(l pi s)> * 2 = int q [cos((m-l) pi s) - cos((m+l) pi s)]
    auto icos = [](int k) { return k == 0 ? 1.0 : 0.0; };
    auto isin = [](int k) { return (k % 2 == 0) ? 0.0 : 2.0 / (k * kPi); };
    auto int_q_cos = [&](int k) {
      double v = 0;
      for (int n = 1; n <= nq; ++n)
        v += 0.5 * q.cos_coeffs[n - 1] * (icos(2 * n + k) + icos(2 * n - k)) +
             0.5 * q.sin_coeffs[n - 1] * (isin(2 * n + k) + isin(2 * n - k));
      return v;
    };
    Eigen::MatrixXd H(K, K);
    for (int m = 1; m <= K; ++m)
      for (int l = 1; l <= K; ++l)
        H(m - 1, l - 1) = (m == l ? m * m * kPi * kPi : 0.0) + int_q_cos(m - l) - int_q_cos(m + l);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
    return {es.eigenvalues().data(), es.eigenvalues().data() + K};
  }
  const bool anti = sector == Sector::antiperiodic;
  const int dim = anti ? 2 * K : 2 * K + 1;
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);
  auto freq = [&](int i) { return anti ? kPi * (2 * (i - K) + 1) : 2.0 * kPi * (i - K); };
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      H(i, j) = qhat(i - j);
      if (i == j) H(i, j) += freq(i) * freq(i);
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().data(), es.eigenvalues().data() + dim};
}

}  // namespace floquet
