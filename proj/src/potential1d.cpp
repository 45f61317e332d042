#include "floquet/potential1d.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <unsupported/Eigen/FFT>

namespace floquet {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

Potential1D::Potential1D(std::vector<double> c, std::vector<double> s) : cos_coeffs(std::move(c)), sin_coeffs(std::move(s)) {
  const size_t n = std::max(cos_coeffs.size(), sin_coeffs.size());
  cos_coeffs.resize(n, 0.0);
  sin_coeffs.resize(n, 0.0);
}

Potential1D Potential1D::cosine(double amplitude, int n) {
  std::vector<double> c(n, 0.0);
  c[n - 1] = amplitude;
  return Potential1D(c);
}

Potential1D Potential1D::from_samples(const std::vector<double>& samples, double drop_below) {
  const int N = int(samples.size());
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> F;
  fft.fwd(F, samples);
  const int nmax = (N - 1) / 2;
  std::vector<double> c(nmax), s(nmax);
  for (int n = 1; n <= nmax; ++n) {
    c[n - 1] = 2.0 * F[n].real() / N;
    s[n - 1] = -2.0 * F[n].imag() / N;
    if (std::abs(c[n - 1]) < drop_below) c[n - 1] = 0;
    if (std::abs(s[n - 1]) < drop_below) s[n - 1] = 0;
  }
  while (!c.empty() && c.back() == 0 && s.back() == 0) {
    c.pop_back();
    s.pop_back();
  }
  return Potential1D(c, s);
}

int Potential1D::max_frequency() const {
  for (int n = int(cos_coeffs.size()); n >= 1; --n)
    if (cos_coeffs[n - 1] != 0 || sin_coeffs[n - 1] != 0) return n;
  return 0;
}

// Sum of (c_n - i s_n) (i 2 pi n)^k e^{i 2 pi n s}, real part, by complex recurrence.
static double series_eval(const Potential1D& q, double s, int k) {
  const std::complex<double> z = std::polar(1.0, kTwoPi * s);
  std::complex<double> zn = 1.0, acc = 0.0;
  for (size_t n = 1; n <= q.cos_coeffs.size(); ++n) {
    zn *= z;
    std::complex<double> w(q.cos_coeffs[n - 1], -q.sin_coeffs[n - 1]);
    for (int i = 0; i < k; ++i) w *= std::complex<double>(0.0, kTwoPi * double(n));
    acc += w * zn;
  }
  return acc.real();
}

double Potential1D::value(double s) const { return series_eval(*this, s, 0); }
double Potential1D::derivative(double s) const { return series_eval(*this, s, 1); }
double Potential1D::second_derivative(double s) const { return series_eval(*this, s, 2); }

double Potential1D::min_value(int samples) const {
  double m = 0.0;
  for (int k = 0; k < samples; ++k) m = std::min(m, value(double(k) / samples));
  return m;
}

double Potential1D::sup_norm_bound() const {
  double b = 0.0;
  for (size_t n = 0; n < cos_coeffs.size(); ++n) b += std::hypot(cos_coeffs[n], sin_coeffs[n]);
  return b;
}

Potential1D Potential1D::translated(double s0) const {
  Potential1D out = *this;
  for (size_t n = 1; n <= cos_coeffs.size(); ++n) {
    const double th = kTwoPi * double(n) * s0;
    const double c = cos_coeffs[n - 1], s = sin_coeffs[n - 1];
    // c cos(x + th) + s sin(x + th)
    out.cos_coeffs[n - 1] = c * std::cos(th) + s * std::sin(th);
    out.sin_coeffs[n - 1] = s * std::cos(th) - c * std::sin(th);
  }
  return out;
}

Potential1D Potential1D::scaled(double c) const {
  Potential1D out = *this;
  for (auto& x : out.cos_coeffs) x *= c;
  for (auto& x : out.sin_coeffs) x *= c;
  return out;
}

Potential1D Potential1D::operator+(const Potential1D& o) const {
  const size_t n = std::max(cos_coeffs.size(), o.cos_coeffs.size());
  std::vector<double> c(n, 0.0), s(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    if (i < cos_coeffs.size()) c[i] += cos_coeffs[i], s[i] += sin_coeffs[i];
    if (i < o.cos_coeffs.size()) c[i] += o.cos_coeffs[i], s[i] += o.sin_coeffs[i];
  }
  return Potential1D(c, s);
}

std::vector<double> Potential1D::sample(int N, double s0) const {
  std::vector<double> out(N);
  for (int k = 0; k < N; ++k) out[k] = value(s0 + double(k) / N);
  return out;
}

}  // namespace floquet
