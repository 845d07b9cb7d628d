#include "ridecomfort/spectral.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "ridecomfort/error.hpp"

namespace ridecomfort {

namespace {

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class RealFft {
 public:
  explicit RealFft(std::size_t n)
      : n_(n),
        in_(static_cast<double*>(fftw_malloc(sizeof(double) * n))),
        out_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)))) {
    if (!in_ || !out_) throw std::bad_alloc();
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::span<double> input() { return {in_, n_}; }
  void execute() { fftw_execute(plan_); }
  double power(std::size_t bin) const {
    return out_[bin][0] * out_[bin][0] + out_[bin][1] * out_[bin][1];
  }

 private:
  std::size_t n_;
  double* in_;
  fftw_complex* out_;
  fftw_plan plan_ = nullptr;
};

// Adds the one-sided modified periodogram of samples[start, start + M) to acc.
void accumulate_segment(RealFft& fft, std::span<const double> samples, std::size_t start,
                        std::span<const double> window, double scale, std::vector<double>& acc) {
  const std::size_t m = window.size();
  auto in = fft.input();
  for (std::size_t i = 0; i < m; ++i) in[i] = samples[start + i] * window[i];
  fft.execute();
  for (std::size_t k = 0; k < acc.size(); ++k) {
    const bool unpaired = k == 0 || (m % 2 == 0 && k == m / 2);
    acc[k] += fft.power(k) * scale * (unpaired ? 1.0 : 2.0);
  }
}

std::vector<double> bin_freqs(std::size_t m, double rate) {
  std::vector<double> f(m / 2 + 1);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = static_cast<double>(k) * rate / static_cast<double>(m);
  return f;
}

}  // namespace

const char* to_string(WindowKind kind) {
  switch (kind) {
    case WindowKind::hann: return "hann";
    case WindowKind::hamming: return "hamming";
    case WindowKind::blackman: return "blackman";
    case WindowKind::rectangular: return "rectangular";
  }
  return "?";
}

WindowKind window_kind_from_string(const std::string& name) {
  if (name == "hann") return WindowKind::hann;
  if (name == "hamming") return WindowKind::hamming;
  if (name == "blackman") return WindowKind::blackman;
  if (name == "rectangular" || name == "boxcar") return WindowKind::rectangular;
  throw Error(ErrorCode::invalid_argument, "unknown window '" + name + "'");
}

void validate(const WelchConfig& cfg) {
  if (cfg.segment_len < 2) throw Error(ErrorCode::invalid_argument, "segment length must be >= 2");
  if (cfg.shift < 1 || cfg.shift > cfg.segment_len) {
    throw Error(ErrorCode::invalid_argument, "shift must satisfy 1 <= S <= M");
  }
}

double PsdEstimate::bin_width() const {
  return freqs.size() > 1 ? freqs[1] - freqs[0] : rate;
}

std::vector<double> window_coeffs(WindowKind kind, std::size_t m) {
  if (m < 2) throw Error(ErrorCode::invalid_argument, "window length must be >= 2");
  std::vector<double> w(m, 1.0);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(m);
  for (std::size_t n = 0; n < m; ++n) {
    const double c1 = std::cos(step * static_cast<double>(n));
    const double c2 = std::cos(2.0 * step * static_cast<double>(n));
    switch (kind) {
      case WindowKind::hann: w[n] = 0.5 - 0.5 * c1; break;
      case WindowKind::hamming: w[n] = 0.54 - 0.46 * c1; break;
      case WindowKind::blackman: w[n] = 0.42 - 0.5 * c1 + 0.08 * c2; break;
      case WindowKind::rectangular: break;
    }
  }
  if (kind == WindowKind::blackman) w[0] = 0.0;  // exact zero instead of ~1e-17
  return w;
}

double window_energy(std::span<const double> w) {
  double e = 0.0;
  for (double v : w) e += v * v;
  return e;
}

PsdEstimate welch_psd(std::span<const double> samples, double rate, const WelchConfig& cfg) {
  validate(cfg);
  if (!(rate > 0.0)) throw Error(ErrorCode::invalid_argument, "rate must be > 0");
  const std::size_t m = cfg.segment_len;
  if (samples.size() < m) {
    throw Error(ErrorCode::segment_too_long, "segment length " + std::to_string(m) +
                                                 " exceeds signal length " +
                                                 std::to_string(samples.size()));
  }
  const auto window = window_coeffs(cfg.window, m);
  const double scale = 1.0 / (window_energy(window) * rate);
  const std::size_t k_segments = 1 + (samples.size() - m) / cfg.shift;

  PsdEstimate out;
  out.rate = rate;
  out.segments = k_segments;
  out.freqs = bin_freqs(m, rate);
  out.power.assign(out.freqs.size(), 0.0);
  RealFft fft(m);
  for (std::size_t k = 0; k < k_segments; ++k) {
    accumulate_segment(fft, samples, k * cfg.shift, window, scale, out.power);
  }
  for (double& p : out.power) p /= static_cast<double>(k_segments);
  return out;
}

Spectrogram spectrogram(std::span<const double> samples, double rate, const WelchConfig& cfg,
                        std::size_t hop, double t0) {
  if (hop < 1) throw Error(ErrorCode::invalid_argument, "hop must be >= 1");
  if (!(rate > 0.0)) throw Error(ErrorCode::invalid_argument, "rate must be > 0");
  if (cfg.segment_len < 2) throw Error(ErrorCode::invalid_argument, "segment length must be >= 2");
  const std::size_t m = cfg.segment_len;
  if (samples.size() < m) {
    throw Error(ErrorCode::segment_too_long, "segment length " + std::to_string(m) +
                                                 " exceeds signal length " +
                                                 std::to_string(samples.size()));
  }
  const auto window = window_coeffs(cfg.window, m);
  const double scale = 1.0 / (window_energy(window) * rate);

  Spectrogram out;
  out.freqs = bin_freqs(m, rate);
  RealFft fft(m);
  std::vector<double> column(out.freqs.size());
  for (std::size_t start = 0; start + m <= samples.size(); start += hop) {
    std::fill(column.begin(), column.end(), 0.0);
    accumulate_segment(fft, samples, start, window, scale, column);
    for (double& p : column) p = 10.0 * std::log10(p + kDbFloor);
    out.times.push_back(t0 + (static_cast<double>(start) + static_cast<double>(m) / 2.0) / rate);
    out.power_db.push_back(column);
  }
  return out;
}

}  // namespace ridecomfort
