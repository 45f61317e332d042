#pragma once

#include <vector>

namespace floquet {

// Mean-zero real trigonometric series of period 1:
//   q(s) = sum_n cos_coeffs[n-1] cos(2 pi n s) + sin_coeffs[n-1] sin(2 pi n s).
struct Potential1D {
  std::vector<double> cos_coeffs;
  std::vector<double> sin_coeffs;

  Potential1D() = default;
  Potential1D(std::vector<double> c, std::vector<double> s = {});

  static Potential1D zero() { return {}; }
  static Potential1D cosine(double amplitude, int n = 1);
  // Trigonometric interpolant of samples q(k/N), k = 0..N-1; the mean is dropped.
  static Potential1D from_samples(const std::vector<double>& samples, double drop_below = 0.0);

  int max_frequency() const;
  double value(double s) const;
  double derivative(double s) const;
  double second_derivative(double s) const;
  double min_value(int samples = 512) const;
  double sup_norm_bound() const;

  // q(. + s0)
  Potential1D translated(double s0) const;
  Potential1D scaled(double c) const;
  Potential1D operator+(const Potential1D& o) const;

  std::vector<double> sample(int N, double s0 = 0.0) const;
};

}  // namespace floquet
