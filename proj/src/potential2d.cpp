#include "floquet/potential2d.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <unsupported/Eigen/FFT>

#include "floquet/errors.hpp"

namespace floquet {

namespace {
constexpr double kPi = std::numbers::pi;
}

void ManifoldPoint::validate() const {
  if (S() < 3) throw ConfigError("need at least three directions");
  const auto &d1 = direction(1), &d2 = direction(2), &d3 = direction(3);
  if (d1.p != 1 || d1.r != 0 || d2.p != 0 || d2.r != 1)
    throw ConfigError("directions 1 and 2 must be the dual basis (1,0), (0,1)");
  if (d3.p != d1.p + d2.p || d3.r != d1.r + d2.r) throw ConfigError("direction 3 must equal delta1 + delta2");
  if (I(1) != I(2) || I(1) != I(3)) throw ConfigError("directions 1, 2, 3 need the same number of gaps");
  for (int j = 1; j <= S(); ++j) {
    const auto& dd = dirs[j - 1];
    if (dd.gaps.empty()) throw ConfigError("direction " + std::to_string(j) + " has no gaps");
    if (dd.alpha.size() != dd.gaps.size()) throw ConfigError("alpha table size mismatch in direction " + std::to_string(j));
    for (double g : dd.gaps)
      if (!(g > 0)) throw ConfigError("base gaps must be positive");
    for (int k = 1; k < j; ++k)
      if (direction(k).p == dd.dir.p && direction(k).r == dd.dir.r) throw ConfigError("repeated direction");
  }
  for (double e : eps)
    if (!(e >= 0 && e <= 1)) throw ConfigError("eps components must lie in [0,1]");
}

std::vector<Coord> ManifoldPoint::E1() const {
  std::vector<Coord> out;
  for (int j = 1; j <= 2; ++j)
    for (int m = 2; m <= I(j); ++m) out.push_back({j, m});
  return out;
}

std::vector<Coord> ManifoldPoint::E0c() const {
  auto out = E1();
  for (int j = 3; j <= S(); ++j)
    for (int m = 1; m <= I(j); ++m) out.push_back({j, m});
  return out;
}

int ManifoldPoint::N() const {
  int n = 0;
  for (int j = 1; j <= S(); ++j) n += I(j);
  return n;
}

ManifoldPoint ManifoldPoint::with_alpha(Coord c, double value) const {
  ManifoldPoint p = *this;
  p.dirs.at(c.j - 1).alpha.at(c.m - 1) = value;
  return p;
}

ManifoldPoint ManifoldPoint::with_eps(int i, double value) const {
  ManifoldPoint p = *this;
  p.eps.at(i - 1) = value;
  return p;
}

std::vector<std::vector<double>> effective_gaps(const ManifoldPoint& pt) {
  std::vector<std::vector<double>> g(pt.S());
  for (int j = 1; j <= pt.S(); ++j)
    for (int m = 1; m <= pt.I(j); ++m) {
      double e;
      if (j <= 2) e = (m == 1) ? pt.eps[j - 1] : pt.eps[3];
      else e = (j == 3) ? pt.eps[2] : pt.eps[3];
      g[j - 1].push_back(e * pt.base_gap({j, m}));
    }
  return g;
}

LameDirection lame_direction(double gap, int m_max) {
  LameDirection L;
  L.gap = gap;
  if (gap <= 0) {
    L.free = true;
    return L;
  }
  L.tau = tau_from_gap(gap);
  L.q = one_gap_potential(make_wp_params(L.tau.tau));
  L.spec = full_spectrum(L.q, std::max(m_max, 1));
  for (const auto& g : L.spec.gaps)
    if (g.m > 1 && g.gamma > 1e-6) throw GapMismatch("one-gap potential has open gap " + std::to_string(g.m));
  std::vector<int> levels;
  for (int m = 2; m <= m_max; ++m) levels.push_back(m);
  L.limit = e1_limit_data(L.spec, levels);
  const auto& g1 = L.spec.gap(1);
  L.alpha1 = alpha_from_mu(g1.mu, g1.minus, g1.plus, g1.sheet == 0 ? 1 : g1.sheet).angle();
  return L;
}

std::shared_ptr<const LameDirection> LameCache::get(double gap, int m_max) {
  std::lock_guard<std::mutex> lock(mu_);
  auto key = std::make_pair(gap, m_max);
  auto it = map_.find(key);
  if (it != map_.end()) return it->second;
  auto v = std::make_shared<const LameDirection>(lame_direction(gap, m_max));
  map_.emplace(key, v);
  return v;
}

std::array<double, 2> LameCache::gap_response(double gap, int m) {
  const auto key = std::make_pair(gap, m);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = response_.find(key);
    if (it != response_.end()) return it->second;
  }
  const auto L = get(gap, m);
  std::array<double, 2> K{1.0, 1.0};
  if (!L->free) {
    const double t = 1e-4;
    for (int k = 0; k < 2; ++k) {
      std::vector<double> c(m, 0.0), s(m, 0.0);
      // cos(x + 2 alpha) at alpha = 0 and pi/4
      (k == 0 ? c : s)[m - 1] = (k == 0) ? t : -t;
      const auto spec = periodic_antiperiodic_spectrum(L->q + Potential1D(c, s), m);
      K[k] = spec.gap(m).gamma / t;
    }
  }
  std::lock_guard<std::mutex> lock(mu_);
  response_.emplace(key, K);
  return K;
}

double response_at(const std::array<double, 2>& K, double alpha) {
  const double c = std::cos(2 * alpha), s = std::sin(2 * alpha);
  return std::sqrt(K[0] * K[0] * c * c + K[1] * K[1] * s * s);
}

double response_dalpha(const std::array<double, 2>& K, double alpha) {
  return (K[1] * K[1] - K[0] * K[0]) * std::sin(4 * alpha) / response_at(K, alpha);
}

Potential1D phase_series(const std::vector<double>& gamma, const std::vector<double>& alpha, int m_from) {
  std::vector<double> c(gamma.size(), 0.0), s(gamma.size(), 0.0);
  for (size_t i = m_from - 1; i < gamma.size(); ++i) {
    // gamma cos(x + 2 alpha) = gamma cos(2 alpha) cos x - gamma sin(2 alpha) sin x
    c[i] = gamma[i] * std::cos(2.0 * alpha[i]);
    s[i] = -gamma[i] * std::sin(2.0 * alpha[i]);
  }
  return Potential1D(c, s);
}

Potential1D realize_directional(const ManifoldPoint& pt, int j, LameCache& cache) {
  const auto g = effective_gaps(pt);
  const auto& alpha = pt.dirs.at(j - 1).alpha;
  if (j <= 2) {
    const auto L = cache.get(g[j - 1][0], pt.I(j));
    // closed levels of the one-gap potential respond to a cosine with an
    // alpha-dependent factor; divide it out so the gaps match to first order
    auto amp = g[j - 1];
    for (int m = 2; m <= pt.I(j); ++m)
      if (amp[m - 1] > 0) amp[m - 1] /= response_at(cache.gap_response(g[j - 1][0], m), alpha[m - 1]);
    return L->q + phase_series(amp, alpha, 2);
  }
  return phase_series(g[j - 1], alpha, 1);
}

RealizationCheck verify_realization(const ManifoldPoint& pt, int j, LameCache& cache, double coef) {
  const auto g = effective_gaps(pt);
  const auto q = realize_directional(pt, j, cache);
  const auto spec = periodic_antiperiodic_spectrum(q, pt.I(j));
  RealizationCheck r;
  r.worst_excess = -1e300;
  for (int m = 1; m <= pt.I(j); ++m) {
    const double t = g[j - 1][m - 1];
    const double meas = spec.gap(m).gamma;
    r.target.push_back(t);
    r.measured.push_back(meas);
    double budget = coef * t * t;
    if (j <= 2 && m == 1) {
      // the one-gap part is exact; the closed-level terms move it at second order
      budget = 1e-6;
      for (int k = 2; k <= pt.I(j); ++k) budget += coef * g[j - 1][k - 1] * g[j - 1][k - 1];
    }
    r.worst_excess = std::max(r.worst_excess, std::abs(meas - t) - budget);
  }
  if (r.worst_excess > 0) {
    std::ostringstream os;
    os << "direction " << j << ": gap lengths exceed the budget by " << r.worst_excess;
    throw GapMismatch(os.str());
  }
  return r;
}

Eigen::MatrixXd assemble(const ManifoldPoint& pt, int N, LameCache& cache) {
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(N, N);
  for (int j = 1; j <= pt.S(); ++j) {
    const auto tab = realize_directional(pt, j, cache).sample(N);
    const auto& d = pt.direction(j);
    const double w = d.delta.squaredNorm();
    for (int i = 0; i < N; ++i)
      for (int k = 0; k < N; ++k) Q(i, k) += w * tab[grid_index(d, i, k, N)];
  }
  return Q;
}

std::array<Eigen::MatrixXd, 2> h_field(const ManifoldPoint& pt, int j, int N, LameCache& cache) {
  std::array<Eigen::MatrixXd, 2> h{Eigen::MatrixXd::Zero(N, N), Eigen::MatrixXd::Zero(N, N)};
  const auto& dj = pt.direction(j);
  for (int e = 1; e <= pt.S(); ++e) {
    if (e == j) continue;
    const auto& de = pt.direction(e);
    const long ed = dj.dot_d(de);
    if (ed == 0) continue;
    const Eigen::Vector2d w = de.delta / double(ed);
    const auto tab = realize_directional(pt, e, cache).sample(N);
    for (int i = 0; i < N; ++i)
      for (int k = 0; k < N; ++k) {
        const double v = tab[grid_index(de, i, k, N)];
        h[0](i, k) += w.x() * v;
        h[1](i, k) += w.y() * v;
      }
  }
  return h;
}

std::complex<double> Fourier2D::coeff(long k1, long k2) const {
  auto wrap = [&](long k) { long v = k % N; return int(v < 0 ? v + N : v); };
  return F(wrap(k1), wrap(k2));
}

double Fourier2D::parseval_error(const Eigen::MatrixXd& samples) const {
  const double lhs = samples.squaredNorm() / (double(N) * N);
  const double rhs = F.squaredNorm();
  return std::abs(lhs - rhs) / std::max(lhs, 1e-300);
}

double Fourier2D::inverse_error(const Eigen::MatrixXd& samples) const {
  double worst = 0;
  Eigen::FFT<double> fft;
  Eigen::MatrixXcd G = F * double(N) * double(N);
  std::vector<std::complex<double>> in(N), out(N);
  for (int i = 0; i < N; ++i) {
    for (int k = 0; k < N; ++k) in[k] = G(i, k);
    fft.inv(out, in);
    for (int k = 0; k < N; ++k) G(i, k) = out[k];
  }
  for (int k = 0; k < N; ++k) {
    for (int i = 0; i < N; ++i) in[i] = G(i, k);
    fft.inv(out, in);
    for (int i = 0; i < N; ++i) G(i, k) = out[i];
  }
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < N; ++k) worst = std::max(worst, std::abs(G(i, k) - samples(i, k)));
  return worst;
}

Potential1D Fourier2D::directional(const Direction& d, int n_max, double weight) const {
  std::vector<double> c(n_max), s(n_max);
  for (int n = 1; n <= n_max; ++n) {
    const auto a = coeff(n * d.p, n * d.r) / weight;
    c[n - 1] = 2.0 * a.real();
    s[n - 1] = -2.0 * a.imag();
  }
  return Potential1D(c, s);
}

Fourier2D directional_fourier(const Eigen::MatrixXd& samples, double nyquist_tol) {
  const int N = int(samples.rows());
  if (N != samples.cols() || N < 2 || (N & (N - 1)) != 0) throw OutOfRange("grid must be square with power-of-two side");
  Eigen::FFT<double> fft;
  Fourier2D out;
  out.N = N;
  out.F.resize(N, N);
  std::vector<std::complex<double>> in(N), res(N);
  for (int i = 0; i < N; ++i) {
    for (int k = 0; k < N; ++k) in[k] = samples(i, k);
    fft.fwd(res, in);
    for (int k = 0; k < N; ++k) out.F(i, k) = res[k];
  }
  for (int k = 0; k < N; ++k) {
    for (int i = 0; i < N; ++i) in[i] = out.F(i, k);
    fft.fwd(res, in);
    for (int i = 0; i < N; ++i) out.F(i, k) = res[i];
  }
  out.F /= double(N) * double(N);
  double total = out.F.squaredNorm(), nyq = 0;
  for (int i = 0; i < N; ++i) nyq += std::norm(out.F(i, N / 2)) + (i == N / 2 ? 0.0 : std::norm(out.F(N / 2, i)));
  if (nyq > nyquist_tol * std::max(total, 1e-300)) {
    std::ostringstream os;
    os << "relative energy " << nyq / total << " on the Nyquist lines";
    throw AliasingDetected(os.str());
  }
  return out;
}

}  // namespace floquet
