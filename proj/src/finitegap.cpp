#include "floquet/finitegap.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "floquet/errors.hpp"

namespace floquet {

namespace {
constexpr double kPi = std::numbers::pi;
namespace odeint = boost::numeric::odeint;
}  // namespace

GapCoordinate GapCoordinate::from_angle(double theta) {
  // reduce to (-pi/2, pi/2]
  double t = std::remainder(theta, kPi);
  if (t <= -kPi / 2) t += kPi;
  return {std::abs(t), t < 0 ? -1 : 1};
}

GapCoordinate alpha_from_mu(double mu, double lminus, double lplus, int sheet, double tol) {
  const double g = lplus - lminus;
  if (!(g > 0)) throw DegenerateGap("closed gap has no torus coordinate");
  if (mu < lminus - tol * std::max(1.0, std::abs(lminus)) || mu > lplus + tol * std::max(1.0, std::abs(lplus))) {
    std::ostringstream os;
    os.precision(15);
    os << "mu=" << mu << " outside [" << lminus << ", " << lplus << "]";
    throw OutOfGap(os.str());
  }
  const double x = std::clamp((mu - lminus) / g, 0.0, 1.0);
  return {std::asin(std::sqrt(x)), sheet < 0 ? -1 : 1};
}

double mu_from_alpha(const GapCoordinate& c, double lminus, double lplus) {
  const double s = std::sin(c.alpha);
  return lminus + (lplus - lminus) * s * s;
}

FiniteGapData FiniteGapData::from_spectrum(const Spectrum1D& spec) {
  FiniteGapData d;
  d.lambda0 = spec.lambda0;
  d.gap_tol = spec.gap_tol;
  for (const auto& g : spec.gaps)
    if (g.open) d.gaps.push_back({g.m, g.minus, g.plus, g.critical});
  return d;
}

int FiniteGapData::position(int m) const {
  for (size_t i = 0; i < gaps.size(); ++i)
    if (gaps[i].m == m) return int(i);
  return -1;
}

TorusPoint torus_point_from_spectrum(const FiniteGapData& data, const Spectrum1D& spec) {
  if (!spec.has_dirichlet) throw OutOfRange("spectrum carries no Dirichlet data");
  TorusPoint t;
  for (const auto& g : data.gaps) {
    const auto& sg = spec.gap(g.m);
    t.push_back(alpha_from_mu(sg.mu, g.minus, g.plus, sg.sheet == 0 ? 1 : sg.sheet).angle());
  }
  return t;
}

std::vector<double> flow_rhs(const FiniteGapData& data, const std::vector<double>& theta, double collision_tol) {
  const size_t K = data.gaps.size();
  std::vector<double> mu(K), out(K);
  for (size_t i = 0; i < K; ++i) {
    const double s = std::sin(theta[i]);
    mu[i] = data.gaps[i].minus + data.gaps[i].gamma() * s * s;
  }
  for (size_t i = 0; i < K; ++i) {
    double num = mu[i] - data.lambda0, den = 1.0;
    for (size_t n = 0; n < K; ++n) {
      if (n == i) continue;
      num *= (mu[i] - data.gaps[n].minus) * (mu[i] - data.gaps[n].plus);
      const double d = mu[n] - mu[i];
      if (std::abs(d) < collision_tol) {
        std::ostringstream os;
        os << "mu_" << data.gaps[i].m << " and mu_" << data.gaps[n].m << " within " << std::abs(d);
        throw CollisionError(os.str());
      }
      den *= d;
    }
    out[i] = std::sqrt(std::max(num, 0.0)) / std::abs(den);
  }
  return out;
}

FlowResult mu_flow(const FiniteGapData& data, const TorusPoint& start, const std::vector<double>& s_grid,
                   const FlowOptions& opt) {
  if (start.size() != data.gaps.size()) throw OutOfRange("torus point dimension != number of gaps");
  const size_t K = data.gaps.size();
  FlowResult out;
  out.theta.assign(K, {});
  out.mu.assign(K, {});
  out.dmu.assign(K, {});
  out.dtheta.assign(K, {});
  auto record = [&](const std::vector<double>& th, double s) {
    const auto v = flow_rhs(data, th, opt.collision_tol);
    out.s.push_back(s);
    for (size_t i = 0; i < K; ++i) {
      const auto& g = data.gaps[i];
      const double sn = std::sin(th[i]);
      out.theta[i].push_back(th[i]);
      out.mu[i].push_back(g.minus + g.gamma() * sn * sn);
      out.dtheta[i].push_back(v[i]);
      out.dmu[i].push_back(g.gamma() * std::sin(2.0 * th[i]) * v[i]);
    }
  };
  if (s_grid.empty()) return out;
  if (s_grid.front() < 0 || !std::is_sorted(s_grid.begin(), s_grid.end()))
    throw OutOfRange("s_grid must be ascending and nonnegative");
  std::vector<double> x(start);
  if (K == 0) {
    for (double s : s_grid) out.s.push_back(s);
    return out;
  }
  std::vector<double> times;
  const bool prepend = s_grid.front() > 0;
  if (prepend) times.push_back(0.0);
  times.insert(times.end(), s_grid.begin(), s_grid.end());
  auto rhs = [&](const std::vector<double>& th, std::vector<double>& dth, double) { dth = flow_rhs(data, th, opt.collision_tol); };
  bool skip = prepend;
  auto obs = [&](const std::vector<double>& th, double s) {
    if (skip) {
      skip = false;
      return;
    }
    record(th, s);
  };
  auto stepper = odeint::make_controlled(opt.tol, opt.tol, odeint::runge_kutta_fehlberg78<std::vector<double>>());
  const double dt = 1e-3;
  if (times.size() == 1) {
    record(x, times.front());
  } else {
    odeint::integrate_times(stepper, rhs, x, times.begin(), times.end(), dt, obs);
  }
  return out;
}

std::vector<double> uniform_grid(int N, double s0) {
  std::vector<double> s(N);
  for (int k = 0; k < N; ++k) s[k] = s0 + double(k) / N;
  return s;
}

std::vector<double> reconstruct_potential(const FiniteGapData& data, const FlowResult& flow) {
  std::vector<double> q(flow.s.size(), data.lambda0);
  for (size_t i = 0; i < data.gaps.size(); ++i)
    for (size_t k = 0; k < q.size(); ++k) q[k] += data.gaps[i].plus + data.gaps[i].minus - 2.0 * flow.mu[i][k];
  return q;
}

namespace {

// Factor n of the product for (phi_m^+)^2 and its s-derivative.
struct Factor {
  double v, dv;
};

Factor product_factor(const FiniteGapData& data, size_t im, size_t n, const FlowResult& flow, size_t k) {
  const auto& gm = data.gaps[im];
  const auto& gn = data.gaps[n];
  if (n == im && gm.gamma() <= data.gap_tol) {
    // closed level: (l^+ - mu)/(l^+ - l-dot) -> 2 cos^2 theta
    const double th = flow.theta[n][k];
    return {2.0 * std::cos(th) * std::cos(th), -2.0 * std::sin(2.0 * th) * flow.dtheta[n][k]};
  }
  const double den = gm.plus - gn.critical;
  if (std::abs(den) <= 1e-14 * std::max(1.0, std::abs(gm.plus))) {
    std::ostringstream os;
    os << "lambda_" << gm.m << "^+ equals the critical point of gap " << gn.m;
    throw DegenerateGap(os.str());
  }
  return {(gm.plus - flow.mu[n][k]) / den, -flow.dmu[n][k] / den};
}

}  // namespace

SquaredEigenfunction eigenfunction_sq(const FiniteGapData& data, int m, const FlowResult& flow) {
  const int im = data.position(m);
  if (im < 0) throw OutOfRange("gap " + std::to_string(m) + " not in the data");
  SquaredEigenfunction out;
  out.values.assign(flow.s.size(), 1.0);
  for (size_t k = 0; k < flow.s.size(); ++k)
    for (size_t n = 0; n < data.gaps.size(); ++n) out.values[k] *= product_factor(data, im, n, flow, k).v;
  double mean = 0;
  for (double v : out.values) mean += v;
  mean /= double(out.values.size());
  out.norm = mean;
  for (double& v : out.values) v /= mean;
  return out;
}

std::vector<double> eigenfunction_sq_ds(const FiniteGapData& data, int m, const FlowResult& flow,
                                        const SquaredEigenfunction& sq) {
  const int im = data.position(m);
  if (im < 0) throw OutOfRange("gap " + std::to_string(m) + " not in the data");
  const size_t K = data.gaps.size();
  std::vector<double> d(flow.s.size(), 0.0);
  std::vector<Factor> f(K);
  for (size_t k = 0; k < flow.s.size(); ++k) {
    for (size_t n = 0; n < K; ++n) f[n] = product_factor(data, im, n, flow, k);
    for (size_t n = 0; n < K; ++n) {
      double t = f[n].dv;
      for (size_t l = 0; l < K; ++l)
        if (l != n) t *= f[l].v;
      d[k] += t;
    }
    d[k] /= sq.norm;
  }
  return d;
}

FiniteGapData e1_limit_data(const Spectrum1D& one_gap_spec, const std::vector<int>& closed_levels) {
  FiniteGapData d;
  d.lambda0 = one_gap_spec.lambda0;
  d.gap_tol = one_gap_spec.gap_tol;
  const auto& g1 = one_gap_spec.gap(1);
  if (!g1.open) throw DegenerateGap("first gap of the one-gap spectrum is closed");
  d.gaps.push_back({1, g1.minus, g1.plus, g1.critical});
  for (int m : closed_levels) {
    const auto& g = one_gap_spec.gap(m);
    if (g.open) throw GapMismatch("gap " + std::to_string(m) + " of the one-gap potential is open");
    const double l = g.critical;
    d.gaps.push_back({m, l, l, l});
  }
  return d;
}

FlowResult alpha_tilde_flow_E1(const FiniteGapData& limit_data, double alpha1, const std::vector<double>& alpha_closed,
                               const std::vector<double>& s_grid, const FlowOptions& opt) {
  TorusPoint start{alpha1};
  start.insert(start.end(), alpha_closed.begin(), alpha_closed.end());
  return mu_flow(limit_data, start, s_grid, opt);
}

LimitEigenfunction limit_eigenfunction_E1(const FiniteGapData& limit_data, int m, double alpha1, double alpham, int N,
                                          const FlowOptions& opt) {
  const int im = limit_data.position(m);
  if (im < 1) throw OutOfRange("closed level " + std::to_string(m) + " not in the limit data");
  FiniteGapData d;
  d.lambda0 = limit_data.lambda0;
  d.gap_tol = limit_data.gap_tol;
  d.gaps = {limit_data.gaps[0], limit_data.gaps[im]};
  const auto flow = mu_flow(d, {alpha1, alpham}, uniform_grid(N), opt);
  const double lm = d.gaps[1].plus, ldot1 = d.gaps[0].critical;
  LimitEigenfunction out;
  out.phi.resize(N);
  double mean = 0;
  for (int k = 0; k < N; ++k) {
    out.phi[k] = std::sqrt(2.0) * std::cos(flow.theta[1][k]) * std::sqrt((lm - flow.mu[0][k]) / (lm - ldot1));
    mean += out.phi[k] * out.phi[k];
  }
  mean /= N;
  const double c = 1.0 / std::sqrt(mean);
  out.phi_sq.resize(N);
  for (int k = 0; k < N; ++k) {
    out.phi[k] *= c;
    out.phi_sq[k] = out.phi[k] * out.phi[k];
  }
  return out;
}

Eigen::MatrixXd alpha_tilde_sensitivity(const FiniteGapData& data, const TorusPoint& start, double s,
                                        const std::vector<int>& coordinates, double h, const FlowOptions& opt) {
  const int n = int(coordinates.size());
  Eigen::MatrixXd S(n, n);
  for (int b = 0; b < n; ++b) {
    TorusPoint p = start, m = start;
    p[coordinates[b]] += h;
    m[coordinates[b]] -= h;
    const auto fp = mu_flow(data, p, {s}, opt), fm = mu_flow(data, m, {s}, opt);
    for (int a = 0; a < n; ++a) S(a, b) = (fp.theta[coordinates[a]][0] - fm.theta[coordinates[a]][0]) / (2 * h);
  }
  return S;
}

}  // namespace floquet
