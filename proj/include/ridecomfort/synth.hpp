#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ridecomfort/ingest.hpp"

namespace ridecomfort {

/// Portable Gaussian source: std::mt19937_64 (output fixed by the C++
/// standard) feeding 53-bit uniforms and the Box-Muller transform. No
/// std::*_distribution is involved, so streams are identical on every
/// conforming platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal.
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

enum class SignalKind { sine, multisine, white_noise, step, excursion_train };

const char* to_string(SignalKind kind);
SignalKind signal_kind_from_string(const std::string& name);

struct SignalSpec {
  SignalKind kind = SignalKind::sine;
  // sine/step/excursion_train use amplitudes[0]; white_noise uses it as sigma.
  std::vector<double> amplitudes{1.0};
  // sine: tone; multisine: one per amplitude; excursion_train: pulse repetition rate.
  std::vector<double> frequencies{1.0};
  double duration = 10.0;  // s
  double rate = kDefaultRate;
  std::uint64_t seed = 0;
  Axis axis = Axis::x;
  double step_time = -1.0;    // s; negative means duration / 2
  double pulse_width = 0.25;  // s, excursion_train only
};

/// Samples at k / rate, k < round(duration * rate); only spec.axis is non-zero.
AccelTrace gen_signal(const SignalSpec& spec);

enum class Archetype { highway, interurban, curvy, urban };

const char* to_string(Archetype a);
Archetype archetype_from_string(const std::string& name);

struct SectionProfile {
  std::string label;
  Archetype archetype = Archetype::highway;
  double duration_s = 60.0;
  double distance_km = 1.0;
  double style_gain = 1.0;
};

struct TripProfile {
  std::vector<SectionProfile> sections;
  double rate = kDefaultRate;
  std::uint64_t seed = 1;
  std::string driver_id = "D1";
  std::string car_id = "C1";
  std::string log_ref = "trip.csv";

  /// Four-section reference route: interurban 3.7 km at 61.36 km/h, curvy
  /// 5.2 km at 44.60 km/h, highway 15.4 km at 80.72 km/h, urban 2.2 km at
  /// 30.35 km/h. Durations are rounded to whole seconds.
  static TripProfile reference(std::uint64_t seed = 1, double rate = kDefaultRate);
  static TripProfile single(Archetype a, double duration_s, double distance_km,
                            std::uint64_t seed = 1, double rate = kDefaultRate);

  /// Same route with every section duration scaled so the total equals total_s.
  TripProfile with_total_duration(double total_s) const;
  TripProfile with_style_gain(double gain) const;
};

/// Synthetic trip per archetype recipe:
///  - highway: low-amplitude band-limited noise on all axes;
///  - interurban: moderate noise, mild braking, slow lateral sway, soft bumps;
///  - curvy: lateral 0.05-0.2 Hz cornering oscillations over noise;
///  - urban: longitudinal stop/go excursions above 2 m/s², vertical 2 Hz bump transients.
/// Horizontal content is kept mostly below 0.3 Hz. Every section's samples are
/// multiplied by its style_gain as the last step, so random draws never depend on it.
std::pair<AccelTrace, TripManifest> gen_trip(const TripProfile& profile);

}  // namespace ridecomfort
