#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ridecomfort/ingest.hpp"
#include "ridecomfort/weighting.hpp"

namespace ridecomfort {

/// Comfort grades in ascending order of discomfort.
enum class ComfortGrade {
  not_uncomfortable,
  a_little_uncomfortable,
  fairly_uncomfortable,
  uncomfortable,
  very_uncomfortable,
  extremely_uncomfortable,
};

const char* to_string(ComfortGrade grade);

enum class CountMode {
  excursion,  // one event per maximal run above threshold
  sample,     // every sample above threshold counts
};

struct MetricsConfig {
  double kx = 1.0;
  double ky = 1.0;
  double kz = 1.0;
  double event_threshold = 2.0;  // m/s²
  std::size_t window_len = 1024;
  double rate = kDefaultRate;
  CountMode count_mode = CountMode::excursion;
  // Weighted output before this time offset is excluded from a_w and MSDV.
  double settle_skip_seconds = 0.0;
};

void validate(const MetricsConfig& cfg);

/// Per-axis weightings: comfort (Wa, Wa, Wk by default) and sickness (Wf on all axes).
struct FilterSet {
  std::array<DigitalWeighting, 3> comfort;
  std::array<DigitalWeighting, 3> sickness;

  static FilterSet standard(double rate);
};

struct PerKm {
  double distance_km = 0.0;
  std::array<double, 3> msdv{};
  std::array<double, 3> n_events{};
};

struct ComfortReport {
  std::array<double, 3> a_w{};  // m/s²
  double a_v = 0.0;             // m/s²
  std::vector<ComfortGrade> labels;
  std::array<double, 3> msdv{};  // m/s^1.5
  std::array<std::size_t, 3> n_events{};
  double duration_s = 0.0;
  std::optional<PerKm> per_km;
};

struct WindowMetrics {
  std::array<double, 3> a_w{};
  std::array<double, 3> msdv{};
};

struct WindowedSeries {
  std::vector<double> window_start_s;
  std::vector<WindowMetrics> windows;
};

/// sqrt((1/T) sum w[k]^2 dt) of the weighted samples.
double weighted_rms(std::span<const double> samples, const DigitalWeighting& filter, double rate);

/// sqrt(sum w[k]^2 dt): the running dose integral at the end of the record.
double msdv(std::span<const double> samples, const DigitalWeighting& wf_filter, double rate);

/// Same quantities on samples that are already weighted.
double rms_of(std::span<const double> weighted, double rate);
double dose_of(std::span<const double> weighted, double rate);

double comfort_index(double a_wx, double a_wy, double a_wz, const MetricsConfig& cfg);

/// Every grade whose band contains a_v; bands overlap, so several may apply.
std::vector<ComfortGrade> classify_comfort(double a_v);

std::size_t count_events(std::span<const double> samples, double threshold,
                         CountMode mode = CountMode::excursion);

double per_distance(double value, double distance_km);

WindowedSeries windowed_metrics(const AccelTrace& trace, const FilterSet& filters,
                                const MetricsConfig& cfg);

struct SectionReport {
  SectionSpec section;
  ComfortReport report;
};

struct TripReport {
  std::string driver_id;
  std::string car_id;
  std::vector<SectionReport> sections;
  ComfortReport whole;
};

/// Weights each axis once over the full trace, then reports every manifest
/// section plus the whole trip. Event counts use the raw samples.
TripReport analyze_trip(const AccelTrace& trace, const TripManifest& manifest,
                        const MetricsConfig& cfg, const FilterSet& filters);

}  // namespace ridecomfort
