#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "floquet/potential1d.hpp"

namespace floquet {

struct HillOptions {
  double ode_tol = 1e-12;   // relative and absolute tolerance of the shooting integrator
  double root_tol = 1e-15;  // relative tolerance of bracketed root refinement
  double gap_tol = 1e-8;    // gaps shorter than this are reported closed
};

// Monodromy [y1(1) y2(1); y1'(1) y2'(1)] of -y'' + q y = lambda y.
Eigen::Matrix2d monodromy(const Potential1D& q, double lambda, const HillOptions& opt = {});

struct MonodromyPair {
  Eigen::Matrix2d M;
  Eigen::Matrix2d dM;  // d/dlambda
};
MonodromyPair monodromy_with_derivative(const Potential1D& q, double lambda, const HillOptions& opt = {});

double discriminant(const Potential1D& q, double lambda, const HillOptions& opt = {});
double discriminant_derivative(const Potential1D& q, double lambda, const HillOptions& opt = {});

struct GapData {
  int m = 0;
  double minus = 0, plus = 0;
  double gamma = 0;
  double critical = 0;       // zero of dDelta/dlambda in the gap
  bool open = false;         // gamma > gap_tol
  bool critical_flag = false;  // closed gap, midpoint substituted
  bool near_touching = false;  // band to the left narrower than the root tolerance
  double mu = 0;             // Dirichlet eigenvalue in this gap
  int sheet = 0;             // +1 / -1 side of the torus, 0 at a gap edge
};

struct Spectrum1D {
  double lambda0 = 0;
  std::vector<GapData> gaps;  // gaps[m-1]
  double gap_tol = 1e-8;
  bool has_dirichlet = false;

  int m_max() const { return int(gaps.size()); }
  const GapData& gap(int m) const { return gaps.at(m - 1); }
  std::vector<int> open_set() const;
};

// lambda0 and gap edges for m <= m_max together with the critical points.
Spectrum1D periodic_antiperiodic_spectrum(const Potential1D& q, int m_max, const HillOptions& opt = {});
// Dirichlet eigenvalues mu_1..mu_m_max (roots of y2(1, lambda)).
std::vector<double> dirichlet_spectrum(const Potential1D& q, int m_max, const HillOptions& opt = {});
// Both, with the Dirichlet data and torus sheets stored in the gaps.
Spectrum1D full_spectrum(const Potential1D& q, int m_max, const HillOptions& opt = {});

struct CriticalPoint {
  double value = 0;
  bool midpoint_flag = false;
};
// Zeros of dDelta/dlambda inside each gap of spec, refined independently.
std::vector<CriticalPoint> critical_points(const Potential1D& q, const Spectrum1D& spec, const HillOptions& opt = {});

// Violations of lambda0 < l1- <= l1+ < l2- ... and l- <= mu <= l+.
std::vector<std::string> interlacing_violations(const Spectrum1D& spec, double tol);

struct ProductValue {
  double value = 0;
  bool pole_flag = false;
};
// Delta^2 - 4 from the band edges via the product normalized by the free one.
ProductValue discriminant_product_ratio(const Spectrum1D& spec, double lambda, int n_tail);

enum class Sector { periodic, antiperiodic, dirichlet };
std::vector<double> galerkin_oracle(const Potential1D& q, int K, Sector sector);

}  // namespace floquet
