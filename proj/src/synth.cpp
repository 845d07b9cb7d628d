#include "ridecomfort/synth.hpp"

#include <cmath>
#include <numbers>

#include "ridecomfort/error.hpp"
#include "ridecomfort/weighting.hpp"

namespace ridecomfort {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t sample_count(double duration, double rate) {
  return static_cast<std::size_t>(std::llround(duration * rate));
}

// Gaussian noise through a 2nd-order Butterworth lowpass at fc, scaled to the
// requested standard deviation. A discarded warm-up hides the filter transient.
std::vector<double> lowpass_noise(Rng& rng, std::size_t n, double rate, double fc, double sigma) {
  WeightingSpec lp;
  lp.f2 = fc;
  const auto filter = design_filter(lp, rate);
  const auto warm = static_cast<std::size_t>(std::ceil(4.0 / fc * rate));
  std::vector<double> white(n + warm);
  for (double& v : white) v = rng.normal();
  auto shaped = apply_weighting(white, filter, rate);
  std::vector<double> out(shaped.begin() + static_cast<std::ptrdiff_t>(warm), shaped.end());
  double mean = 0.0;
  for (double v : out) mean += v;
  mean /= static_cast<double>(out.size());
  double ss = 0.0;
  for (double v : out) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(out.size()));
  for (double& v : out) v = sd > 0.0 ? (v - mean) * sigma / sd : 0.0;
  return out;
}

// Raised-cosine excursion of the given peak and length starting at t_start.
void add_pulse(std::vector<double>& dst, double rate, double t_start, double length, double peak) {
  const auto first = static_cast<std::size_t>(std::ceil(t_start * rate));
  for (std::size_t k = first; k < dst.size(); ++k) {
    const double u = (static_cast<double>(k) / rate - t_start) / length;
    if (u > 1.0) break;
    dst[k] += peak * 0.5 * (1.0 - std::cos(kTwoPi * u));
  }
}

// Exponentially decaying oscillation, the vertical signature of a bump.
void add_bump(std::vector<double>& dst, double rate, double t_start, double freq, double decay_s,
              double amplitude) {
  const auto first = static_cast<std::size_t>(std::ceil(t_start * rate));
  for (std::size_t k = first; k < dst.size(); ++k) {
    const double t = static_cast<double>(k) / rate - t_start;
    if (t > 8.0 * decay_s) break;
    dst[k] += amplitude * std::exp(-t / decay_s) * std::sin(kTwoPi * freq * t);
  }
}

void add_sinusoid(std::vector<double>& dst, double rate, double freq, double amplitude, double phase) {
  for (std::size_t k = 0; k < dst.size(); ++k) {
    dst[k] += amplitude * std::sin(kTwoPi * freq * static_cast<double>(k) / rate + phase);
  }
}

struct Axes {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> z;
};

Axes gen_section(Archetype a, std::size_t n, double rate, Rng& rng) {
  const double duration = static_cast<double>(n) / rate;
  Axes s;
  switch (a) {
    case Archetype::highway:
      s.x = lowpass_noise(rng, n, rate, 0.10, 0.12);
      s.y = lowpass_noise(rng, n, rate, 0.10, 0.10);
      s.z = lowpass_noise(rng, n, rate, 3.0, 0.04);
      break;

    case Archetype::interurban: {
      s.x = lowpass_noise(rng, n, rate, 0.12, 0.35);
      s.y = lowpass_noise(rng, n, rate, 0.12, 0.30);
      s.z = lowpass_noise(rng, n, rate, 3.0, 0.07);
      add_sinusoid(s.y, rate, 0.08, 0.6, kTwoPi * rng.uniform());
      for (double t = rng.uniform(5.0, 15.0); t + 6.0 < duration; t += rng.uniform(30.0, 50.0)) {
        add_pulse(s.x, rate, t, 6.0, -1.2);
      }
      for (double t = rng.uniform(5.0, 20.0); t + 4.0 < duration; t += rng.uniform(20.0, 40.0)) {
        add_bump(s.z, rate, t, 2.0, 0.5, 0.4);
      }
      break;
    }

    case Archetype::curvy: {
      s.x = lowpass_noise(rng, n, rate, 0.12, 0.40);
      s.y = lowpass_noise(rng, n, rate, 0.12, 0.20);
      s.z = lowpass_noise(rng, n, rate, 3.0, 0.06);
      const double tones[][2] = {{0.06, 1.0}, {0.11, 0.8}, {0.17, 0.6}};
      for (const auto& [f, amp] : tones) add_sinusoid(s.y, rate, f, amp, kTwoPi * rng.uniform());
      break;
    }

    case Archetype::urban: {
      s.x = lowpass_noise(rng, n, rate, 0.15, 0.20);
      s.y = lowpass_noise(rng, n, rate, 0.12, 0.35);
      s.z = lowpass_noise(rng, n, rate, 3.0, 0.06);
      // Stop/go cycle: braking then pulling away, peaks beyond 2 m/s².
      for (double t = rng.uniform(3.0, 8.0); t + 18.0 < duration; t += rng.uniform(22.0, 32.0)) {
        add_pulse(s.x, rate, t, 6.0, -rng.uniform(2.5, 3.0));
        add_pulse(s.x, rate, t + 10.0, 6.0, rng.uniform(2.3, 2.7));
      }
      for (double t = rng.uniform(2.0, 6.0); t + 5.0 < duration; t += rng.uniform(8.0, 16.0)) {
        add_bump(s.z, rate, t, 2.0, 0.6, rng.uniform(1.0, 1.4));
      }
      break;
    }
  }
  return s;
}

}  // namespace

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(kTwoPi * u2);
  has_spare_ = true;
  return r * std::cos(kTwoPi * u2);
}

const char* to_string(SignalKind kind) {
  switch (kind) {
    case SignalKind::sine: return "sine";
    case SignalKind::multisine: return "multisine";
    case SignalKind::white_noise: return "white_noise";
    case SignalKind::step: return "step";
    case SignalKind::excursion_train: return "excursion_train";
  }
  return "?";
}

SignalKind signal_kind_from_string(const std::string& name) {
  for (auto k : {SignalKind::sine, SignalKind::multisine, SignalKind::white_noise,
                 SignalKind::step, SignalKind::excursion_train}) {
    if (name == to_string(k)) return k;
  }
  throw Error(ErrorCode::invalid_argument, "unknown signal kind '" + name + "'");
}

AccelTrace gen_signal(const SignalSpec& spec) {
  if (!(spec.duration > 0.0) || !(spec.rate > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "signal duration and rate must be > 0");
  }
  if (spec.amplitudes.empty()) throw Error(ErrorCode::invalid_argument, "signal needs an amplitude");
  const bool uses_freqs = spec.kind == SignalKind::sine || spec.kind == SignalKind::multisine ||
                          spec.kind == SignalKind::excursion_train;
  if (uses_freqs) {
    if (spec.frequencies.empty()) throw Error(ErrorCode::invalid_argument, "signal needs a frequency");
    for (double f : spec.frequencies) {
      if (!(f > 0.0)) throw Error(ErrorCode::invalid_argument, "frequencies must be > 0");
      if (f >= spec.rate / 2.0) {
        throw Error(ErrorCode::nyquist_violation, "frequency " + std::to_string(f) +
                                                      " Hz is not below Nyquist (" +
                                                      std::to_string(spec.rate / 2.0) + " Hz)");
      }
    }
  }
  if (spec.kind == SignalKind::multisine && spec.frequencies.size() != spec.amplitudes.size()) {
    throw Error(ErrorCode::invalid_argument, "multisine needs one amplitude per frequency");
  }

  const std::size_t n = sample_count(spec.duration, spec.rate);
  if (n < 2) throw Error(ErrorCode::too_few_samples, "signal shorter than 2 samples");
  std::vector<double> v(n, 0.0);
  const double amp = spec.amplitudes[0];
  switch (spec.kind) {
    case SignalKind::sine:
      add_sinusoid(v, spec.rate, spec.frequencies[0], amp, 0.0);
      break;
    case SignalKind::multisine:
      for (std::size_t i = 0; i < spec.frequencies.size(); ++i) {
        add_sinusoid(v, spec.rate, spec.frequencies[i], spec.amplitudes[i], 0.0);
      }
      break;
    case SignalKind::white_noise: {
      Rng rng(spec.seed);
      for (double& s : v) s = amp * rng.normal();
      break;
    }
    case SignalKind::step: {
      const double at = spec.step_time < 0.0 ? spec.duration / 2.0 : spec.step_time;
      for (std::size_t k = 0; k < n; ++k) v[k] = static_cast<double>(k) / spec.rate >= at ? amp : 0.0;
      break;
    }
    case SignalKind::excursion_train: {
      // Rectangular pulses of alternating sign, one per period, offset by a quarter period.
      const double period = 1.0 / spec.frequencies[0];
      for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / spec.rate;
        const double cycles = std::floor(t / period);
        const double phase = t - cycles * period - 0.25 * period;
        if (phase >= 0.0 && phase < spec.pulse_width) {
          v[k] = std::fmod(cycles, 2.0) == 0.0 ? amp : -amp;
        }
      }
      break;
    }
  }
  std::vector<double> zero(n, 0.0);
  std::array<std::vector<double>, 3> axes{zero, zero, zero};
  axes[static_cast<std::size_t>(spec.axis)] = std::move(v);
  return AccelTrace(spec.rate, 0.0, std::move(axes[0]), std::move(axes[1]), std::move(axes[2]));
}

const char* to_string(Archetype a) {
  switch (a) {
    case Archetype::highway: return "highway";
    case Archetype::interurban: return "interurban";
    case Archetype::curvy: return "curvy";
    case Archetype::urban: return "urban";
  }
  return "?";
}

Archetype archetype_from_string(const std::string& name) {
  for (auto a : {Archetype::highway, Archetype::interurban, Archetype::curvy, Archetype::urban}) {
    if (name == to_string(a)) return a;
  }
  throw Error(ErrorCode::invalid_argument, "unknown archetype '" + name + "'");
}

TripProfile TripProfile::reference(std::uint64_t seed, double rate) {
  const auto secs = [](double km, double kmh) { return std::round(km / kmh * 3600.0); };
  TripProfile p;
  p.rate = rate;
  p.seed = seed;
  p.sections = {
      {"S1", Archetype::interurban, secs(3.7, 61.36), 3.7, 1.0},
      {"S2", Archetype::curvy, secs(5.2, 44.60), 5.2, 1.0},
      {"S3", Archetype::highway, secs(15.4, 80.72), 15.4, 1.0},
      {"S4", Archetype::urban, secs(2.2, 30.35), 2.2, 1.0},
  };
  return p;
}

TripProfile TripProfile::single(Archetype a, double duration_s, double distance_km,
                                std::uint64_t seed, double rate) {
  TripProfile p;
  p.rate = rate;
  p.seed = seed;
  p.sections = {{"S1", a, duration_s, distance_km, 1.0}};
  return p;
}

TripProfile TripProfile::with_total_duration(double total_s) const {
  double current = 0.0;
  for (const auto& s : sections) current += s.duration_s;
  TripProfile p = *this;
  // Rounded cumulative boundaries keep whole-second sections summing to total_s.
  double acc = 0.0;
  double prev_edge = 0.0;
  for (auto& s : p.sections) {
    acc += s.duration_s;
    const double edge = std::round(acc * total_s / current);
    s.duration_s = edge - prev_edge;
    prev_edge = edge;
  }
  return p;
}

TripProfile TripProfile::with_style_gain(double gain) const {
  TripProfile p = *this;
  for (auto& s : p.sections) s.style_gain = gain;
  return p;
}

std::pair<AccelTrace, TripManifest> gen_trip(const TripProfile& profile) {
  if (!(profile.rate > 0.0)) throw Error(ErrorCode::invalid_argument, "trip rate must be > 0");
  if (profile.sections.empty()) throw Error(ErrorCode::invalid_argument, "trip needs sections");

  TripManifest manifest;
  manifest.driver_id = profile.driver_id;
  manifest.car_id = profile.car_id;
  manifest.log_ref = profile.log_ref;

  Rng rng(profile.seed);
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> z;
  double t = 0.0;
  for (const auto& sp : profile.sections) {
    if (!(sp.duration_s > 0.0) || !(sp.style_gain >= 0.0) || !(sp.distance_km > 0.0)) {
      throw Error(ErrorCode::invalid_argument,
                  "section '" + sp.label + "': duration and distance must be > 0, gain >= 0");
    }
    const std::size_t n = sample_count(sp.duration_s, profile.rate);
    auto axes = gen_section(sp.archetype, n, profile.rate, rng);
    for (auto* axis : {&axes.x, &axes.y, &axes.z}) {
      for (double& v : *axis) v *= sp.style_gain;
    }
    x.insert(x.end(), axes.x.begin(), axes.x.end());
    y.insert(y.end(), axes.y.begin(), axes.y.end());
    z.insert(z.end(), axes.z.begin(), axes.z.end());

    SectionSpec s;
    s.label = sp.label;
    s.t_start = t;
    s.t_end = t + sp.duration_s;
    s.distance_km = sp.distance_km;
    s.avg_speed_kmh = sp.distance_km / (sp.duration_s / 3600.0);
    manifest.sections.push_back(std::move(s));
    t += sp.duration_s;
  }
  return {AccelTrace(profile.rate, 0.0, std::move(x), std::move(y), std::move(z)),
          std::move(manifest)};
}

}  // namespace ridecomfort
