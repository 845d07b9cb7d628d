#pragma once

#include <complex>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace ridecomfort {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class WeightingKind { wa_horizontal, wk_vertical, wf_sickness, custom };

const char* to_string(WeightingKind kind);

/// Analog prototype of a whole-body-vibration frequency weighting.
///
/// The magnitude is the cascade H_h * H_l * H_t * H_s of a band-limiting
/// highpass (f1) and lowpass (f2), an acceleration-velocity transition
/// (f3, f4, q4) and an upward step (f5, q5, f6, q6). Corners set to kInf drop
/// their factor; f1 = 0 drops the highpass.
struct WeightingSpec {
  WeightingKind kind = WeightingKind::custom;
  double f1 = 0.0;
  double f2 = kInf;
  double f3 = kInf;
  double f4 = kInf;
  double f5 = kInf;
  double f6 = kInf;
  double q4 = 1.0;
  double q5 = 1.0;
  double q6 = 1.0;

  static WeightingSpec wa_horizontal();
  static WeightingSpec wk_vertical();
  static WeightingSpec wf_sickness();
  /// Pass-through weighting (no stages); handy for unweighted RMS.
  static WeightingSpec identity();
};

void validate(const WeightingSpec& spec);

/// One second-order section: y = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2).
struct Biquad {
  double b0 = 1.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;

  std::complex<double> response(double theta) const;
  bool stable() const;
};

enum class Discretization {
  // Bilinear for highpass/step stages, magnitude-matched for lowpass-type stages.
  magnitude_matched,
  // Pre-warped bilinear transform for every stage.
  bilinear,
};

struct DigitalWeighting {
  WeightingSpec spec;
  double rate = 0.0;
  Discretization method = Discretization::magnitude_matched;
  std::vector<Biquad> stages;
};

/// |H(j 2 pi f)| of the analog cascade, evaluated directly in complex arithmetic.
double analog_gain(const WeightingSpec& spec, double f);

DigitalWeighting design_filter(const WeightingSpec& spec, double rate,
                               Discretization method = Discretization::magnitude_matched);

/// |H(e^{j 2 pi f / rate})| of the realized digital cascade.
double digital_gain(const DigitalWeighting& filter, double f);

/// Causal forward filtering with zero initial state; output length = input length.
std::vector<double> apply_weighting(std::span<const double> samples, const DigitalWeighting& filter,
                                    double rate);

/// Reads a parameter file: {"kind": "Custom", "f1": .., "f2": .., "f3": "inf", .., "Q4": ..}.
WeightingSpec parse_weighting_spec(std::istream& in, const std::string& source_path = "<stream>");
WeightingSpec load_weighting_spec(const std::filesystem::path& path);

}  // namespace ridecomfort
