#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ridecomfort {

enum class WindowKind { hann, hamming, blackman, rectangular };

const char* to_string(WindowKind kind);
WindowKind window_kind_from_string(const std::string& name);

struct WelchConfig {
  std::size_t segment_len = 1024;  // M
  std::size_t shift = 512;         // S
  WindowKind window = WindowKind::hann;
};

void validate(const WelchConfig& cfg);

/// One-sided power spectral density, (m/s²)²/Hz, at freqs[i] = i * rate / M.
struct PsdEstimate {
  std::vector<double> freqs;
  std::vector<double> power;
  double rate = 0.0;
  std::size_t segments = 0;

  double bin_width() const;
};

struct Spectrogram {
  std::vector<double> times;  // segment centres, s
  std::vector<double> freqs;
  std::vector<std::vector<double>> power_db;  // [column][bin]
};

inline constexpr double kDbFloor = 1e-12;

/// Periodic (DFT-even) coefficients: w[n] = w[M - n] for 0 < n < M.
std::vector<double> window_coeffs(WindowKind kind, std::size_t m);

/// Window energy sum(w[m]^2).
double window_energy(std::span<const double> w);

/// Welch estimate: K = 1 + floor((N - M) / S) segments, each a modified
/// periodogram |X_k|^2 / (W * rate), averaged and folded to one side.
PsdEstimate welch_psd(std::span<const double> samples, double rate, const WelchConfig& cfg = {});

/// One single-segment periodogram per hop position, in dB.
Spectrogram spectrogram(std::span<const double> samples, double rate, const WelchConfig& cfg,
                        std::size_t hop, double t0 = 0.0);

}  // namespace ridecomfort
