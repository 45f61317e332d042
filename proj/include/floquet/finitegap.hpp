#pragma once

#include <Eigen/Dense>
#include <vector>

#include "floquet/hill.hpp"

namespace floquet {

// Torus coordinate of one gap: sin^2(alpha) = (mu - l^-)/(l^+ - l^-), alpha in
// [0, pi/2], sheet +1 while mu increases along the flow and -1 while it decreases.
struct GapCoordinate {
  double alpha = 0;
  int sheet = 1;
  // Angle on the full circle used as the flow variable: mu rises on (0, pi/2)
  // and falls on (-pi/2, 0).
  double angle() const { return sheet < 0 ? -alpha : alpha; }
  static GapCoordinate from_angle(double theta);
};

GapCoordinate alpha_from_mu(double mu, double lminus, double lplus, int sheet = 1, double tol = 1e-10);
double mu_from_alpha(const GapCoordinate& c, double lminus, double lplus);

struct FiniteGap {
  int m = 0;
  double minus = 0, plus = 0;
  double critical = 0;
  double gamma() const { return plus - minus; }
};

// Spectral data of a finite-gap potential: lambda0 and the gaps carried by the
// torus. A gap with minus == plus is a closed level kept as a flow coordinate.
struct FiniteGapData {
  double lambda0 = 0;
  std::vector<FiniteGap> gaps;
  double gap_tol = 1e-8;

  static FiniteGapData from_spectrum(const Spectrum1D& spec);
  int position(int m) const;  // index of gap m in gaps, -1 if absent
};

// Start point: one signed angle per gap of the data, in order.
using TorusPoint = std::vector<double>;
TorusPoint torus_point_from_spectrum(const FiniteGapData& data, const Spectrum1D& spec);

struct FlowResult {
  std::vector<double> s;
  std::vector<std::vector<double>> theta;  // [gap][k]
  std::vector<std::vector<double>> mu;
  std::vector<std::vector<double>> dmu;
  std::vector<std::vector<double>> dtheta;
};

struct FlowOptions {
  double tol = 1e-13;
  double collision_tol = 1e-10;
};

// Angle velocities d theta_m/ds at a torus point.
std::vector<double> flow_rhs(const FiniteGapData& data, const std::vector<double>& theta, double collision_tol = 1e-10);

// Integrates the Dirichlet flow from s = 0 and records it at the (ascending,
// nonnegative) s_grid points.
FlowResult mu_flow(const FiniteGapData& data, const TorusPoint& start, const std::vector<double>& s_grid,
                   const FlowOptions& opt = {});

std::vector<double> uniform_grid(int N, double s0 = 0.0);

// lambda0 + sum (l^+ + l^- - 2 mu_m(s)).
std::vector<double> reconstruct_potential(const FiniteGapData& data, const FlowResult& flow);

struct SquaredEigenfunction {
  std::vector<double> values;  // normalized (phi_m^+)^2 on the flow grid
  double norm = 1;             // mean of the raw product over the grid
};
// Product formula for (phi_m^+)^2; the flow must sit on a uniform grid over one
// period for the normalization. Closed gaps of the data use the 2cos^2 limit.
SquaredEigenfunction eigenfunction_sq(const FiniteGapData& data, int m, const FlowResult& flow);
// s-derivative of the same normalized function.
std::vector<double> eigenfunction_sq_ds(const FiniteGapData& data, int m, const FlowResult& flow,
                                        const SquaredEigenfunction& sq);

// Limit data of one E1 coordinate: the one-gap spectrum plus the closed level
// lambda_m of the same potential.
FiniteGapData e1_limit_data(const Spectrum1D& one_gap_spec, const std::vector<int>& closed_levels);

// alpha-tilde flows of the E1 limit (gap 1 and the closed levels), as angles.
FlowResult alpha_tilde_flow_E1(const FiniteGapData& limit_data, double alpha1, const std::vector<double>& alpha_closed,
                               const std::vector<double>& s_grid, const FlowOptions& opt = {});

struct LimitEigenfunction {
  std::vector<double> phi;     // signed, normalized
  std::vector<double> phi_sq;  // phi^2
};
// sqrt(2) cos(alpha_m(s)) sqrt((l_m - mu_1(s)) / (l_m - l-dot_1)), normalized on the uniform grid.
LimitEigenfunction limit_eigenfunction_E1(const FiniteGapData& limit_data, int m, double alpha1, double alpham, int N,
                                          const FlowOptions& opt = {});

// d theta_a(s) / d theta_b(0) for a, b in coordinates (positions in the data),
// by central differences of the start point.
Eigen::MatrixXd alpha_tilde_sensitivity(const FiniteGapData& data, const TorusPoint& start, double s,
                                        const std::vector<int>& coordinates, double h = 1e-6,
                                        const FlowOptions& opt = {});

}  // namespace floquet
