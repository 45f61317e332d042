#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "floquet/finitegap.hpp"
#include "floquet/lattice.hpp"
#include "floquet/weierstrass.hpp"

namespace floquet {

struct Coord {
  int j = 0, m = 0;
  bool operator==(const Coord&) const = default;
};

struct DirectionData {
  Direction dir;
  std::vector<double> gaps;   // base gap lengths gamma_{j,m}, m = 1..|I_j|
  std::vector<double> alpha;  // torus coordinates alpha_{j,m}
};

// A point of the manifold M(eps). Directions 1 and 2 carry the one-gap
// potentials, direction 3 = delta1 + delta2 is switched on by eps3 and the
// remaining ones and the higher gaps of directions 1, 2 by eps4.
struct ManifoldPoint {
  Lattice2D lattice;
  std::vector<DirectionData> dirs;
  std::array<double, 4> eps{0.5, 0.5, 0.0, 0.0};

  void validate() const;
  int S() const { return int(dirs.size()); }
  int I(int j) const { return int(dirs.at(j - 1).gaps.size()); }
  const Direction& direction(int j) const { return dirs.at(j - 1).dir; }
  double alpha(Coord c) const { return dirs.at(c.j - 1).alpha.at(c.m - 1); }
  double base_gap(Coord c) const { return dirs.at(c.j - 1).gaps.at(c.m - 1); }

  std::vector<Coord> E0() const { return {{1, 1}, {2, 1}}; }
  std::vector<Coord> E1() const;
  // E0 complement, ordered by j then m; E1 entries come first.
  std::vector<Coord> E0c() const;
  int N() const;
  int n() const { return int(E1().size()); }

  ManifoldPoint with_alpha(Coord c, double value) const;
  ManifoldPoint with_eps(int i, double value) const;  // i = 1..4
};

// Gap lengths gamma_{j,m}(eps) of the parametrization, [j-1][m-1].
std::vector<std::vector<double>> effective_gaps(const ManifoldPoint& pt);

// One-gap (Lame) potential of directions 1, 2 with its spectral data.
struct LameDirection {
  double gap = 0;
  bool free = false;  // gap == 0: zero potential
  TauSolution tau;
  Potential1D q;
  Spectrum1D spec;
  FiniteGapData limit;  // open gap 1 plus the closed levels 2..m_max
  double alpha1 = 0;    // torus angle of the potential itself
  std::vector<double> cos_coeffs() const { return q.cos_coeffs; }
  double coeff(int n) const { return (n >= 1 && n <= int(q.cos_coeffs.size())) ? q.cos_coeffs[n - 1] : 0.0; }
};

LameDirection lame_direction(double gap, int m_max);

// Memoizes lame_direction; safe to share between threads.
class LameCache {
 public:
  std::shared_ptr<const LameDirection> get(double gap, int m_max);
  // Gap opened at level m by L.q + t cos(2 pi m s + 2 alpha), per unit t, at
  // alpha = 0 and alpha = pi/4 (Fredholm alternative on the double eigenvalue).
  std::array<double, 2> gap_response(double gap, int m);

 private:
  std::mutex mu_;
  std::map<std::pair<double, int>, std::shared_ptr<const LameDirection>> map_;
  std::map<std::pair<double, int>, std::array<double, 2>> response_;
};

// sum_m gamma cos(2 pi m s + 2 alpha_m) as a series.
// First-order gap per unit amplitude at phase alpha, and its alpha derivative.
double response_at(const std::array<double, 2>& K, double alpha);
double response_dalpha(const std::array<double, 2>& K, double alpha);

Potential1D phase_series(const std::vector<double>& gamma, const std::vector<double>& alpha, int m_from = 1);

Potential1D realize_directional(const ManifoldPoint& pt, int j, LameCache& cache);

struct RealizationCheck {
  std::vector<double> target, measured;
  double worst_excess = 0;  // max(|measured - target| - budget), <= 0 when fine
};
// hill1d gap lengths of the realized q_j against the parametrized targets with
// budget coef * target^2; the one-gap part gets 1e-6 plus the second-order
// shift from the closed-level terms.
RealizationCheck verify_realization(const ManifoldPoint& pt, int j, LameCache& cache, double coef = 10.0);

// Samples of q_j(p_j s + r_j t) etc. on the (s,t) tensor grid of side N use
// index (p i + r k) mod N into a table of q_j(u / N).
inline int grid_index(const Direction& d, int i, int k, int N) {
  long v = (d.p * long(i) + d.r * long(k)) % N;
  return int(v < 0 ? v + N : v);
}

// q(x) = sum_j |delta_j|^2 q_j(delta_j . x) at x = s v1 + t v2, s = i/N, t = k/N.
Eigen::MatrixXd assemble(const ManifoldPoint& pt, int N, LameCache& cache);

// h = sum_{e != j, e . d_j != 0} e / (e . d_j) q_e(e . x), components (x, y).
std::array<Eigen::MatrixXd, 2> h_field(const ManifoldPoint& pt, int j, int N, LameCache& cache);

struct Fourier2D {
  int N = 0;
  Eigen::MatrixXcd F;  // F(k1 mod N, k2 mod N) = coefficient of e^{2 pi i (k1 s + k2 t)}
  std::complex<double> coeff(long k1, long k2) const;
  double parseval_error(const Eigen::MatrixXd& samples) const;
  double inverse_error(const Eigen::MatrixXd& samples) const;
  // Series of q_delta along n delta, divided by |delta|^2.
  Potential1D directional(const Direction& d, int n_max, double weight) const;
};

Fourier2D directional_fourier(const Eigen::MatrixXd& samples, double nyquist_tol = 1e-12);

}  // namespace floquet
