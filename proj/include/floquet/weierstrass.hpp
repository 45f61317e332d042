#pragma once

#include <vector>

#include "floquet/potential1d.hpp"

namespace floquet {

// Weierstrass p for the lattice generated by 1 and i*tau.
struct WpParams {
  double tau = 1.0;
  int n_max = 0;  // truncation of the cosine series
};

WpParams make_wp_params(double tau);

// a_n = -8 pi^2 n e^{-pi n tau} / (1 - e^{-2 pi n tau}), n = 1..n_max:
// cosine coefficients of p(s + i tau/2) without its constant term.
std::vector<double> wp_fourier_coeffs(const WpParams& p);

// Constant term of p(s + i tau/2) on the line.
double wp_mean(double tau);

struct HalfPeriods {
  double e1, e2, e3;  // p(1/2), p((1+i tau)/2), p(i tau/2)
};
HalfPeriods half_period_values(double tau);

// The Lame potential 2 p(s + i tau/2) minus its mean: cosine coefficients 2 a_n.
Potential1D one_gap_potential(const WpParams& p);

struct OneGapEdges {
  double lambda0, lambda1_minus, lambda1_plus;
  double shift;  // added to -e_k to move into the mean-zero gauge
};
OneGapEdges band_edges(const WpParams& p);

// e2 - e3, the length of the single open gap.
double gap_of_tau(double tau);

struct TauSolution {
  double tau = 0;
  bool large_tau_flag = false;  // target below the tabulated range, tau clipped
};
TauSolution tau_from_gap(double target_gap);

constexpr double kTauMin = 0.05;
constexpr double kTauMax = 40.0;

}  // namespace floquet
