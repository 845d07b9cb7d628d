#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library under test.

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ridecomfort/error.hpp"

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

inline std::vector<double> sine(double f, double amp, double rate, std::size_t n, double phase = 0.0) {
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = amp * std::sin(2.0 * kPi * f * static_cast<double>(k) / rate + phase);
  }
  return out;
}

// Amplitude of the least-squares fit y ~ a sin + b cos + c over y[first..].
inline double fit_sine_amplitude(std::span<const double> y, double f, double rate, std::size_t first) {
  double m[3][3] = {};
  double r[3] = {};
  for (std::size_t k = first; k < y.size(); ++k) {
    const double ph = 2.0 * kPi * f * static_cast<double>(k) / rate;
    const double basis[3] = {std::sin(ph), std::cos(ph), 1.0};
    for (int i = 0; i < 3; ++i) {
      r[i] += basis[i] * y[k];
      for (int j = 0; j < 3; ++j) m[i][j] += basis[i] * basis[j];
    }
  }
  // Gaussian elimination with partial pivoting.
  for (int c = 0; c < 3; ++c) {
    int p = c;
    for (int i = c + 1; i < 3; ++i) {
      if (std::abs(m[i][c]) > std::abs(m[p][c])) p = i;
    }
    for (int j = 0; j < 3; ++j) std::swap(m[c][j], m[p][j]);
    std::swap(r[c], r[p]);
    for (int i = c + 1; i < 3; ++i) {
      const double q = m[i][c] / m[c][c];
      for (int j = c; j < 3; ++j) m[i][j] -= q * m[c][j];
      r[i] -= q * r[c];
    }
  }
  double x[3];
  for (int i = 2; i >= 0; --i) {
    double s = r[i];
    for (int j = i + 1; j < 3; ++j) s -= m[i][j] * x[j];
    x[i] = s / m[i][i];
  }
  return std::hypot(x[0], x[1]);
}

// One-sided modified periodogram of a single segment by an O(M^2) DFT.
inline std::vector<double> direct_periodogram(std::span<const double> x, std::span<const double> w,
                                              double rate) {
  const std::size_t m = x.size();
  double energy = 0.0;
  for (double v : w) energy += v * v;
  std::vector<double> out(m / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t n = 0; n < m; ++n) {
      const double ph = -2.0 * kPi * static_cast<double>(k * n % m) / static_cast<double>(m);
      acc += w[n] * x[n] * std::complex<double>(std::cos(ph), std::sin(ph));
    }
    double p = std::norm(acc) / (energy * rate);
    if (k != 0 && !(m % 2 == 0 && k == m / 2)) p *= 2.0;
    out[k] = p;
  }
  return out;
}

// Periodic Hann from its textbook definition.
inline std::vector<double> hann(std::size_t m) {
  std::vector<double> w(m);
  for (std::size_t n = 0; n < m; ++n) {
    w[n] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(n) / static_cast<double>(m));
  }
  return w;
}

inline double gauss(double u, double h) {
  return std::exp(-0.5 * (u / h) * (u / h)) / (h * std::sqrt(2.0 * kPi));
}

template <class F>
std::optional<ridecomfort::ErrorCode> error_code_of(F&& f) {
  try {
    f();
  } catch (const ridecomfort::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace oracle
