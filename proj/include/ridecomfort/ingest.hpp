#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ridecomfort {

/// Vehicle axes: x = longitudinal (fore-and-aft), y = lateral, z = vertical.
enum class Axis { x = 0, y = 1, z = 2 };

inline constexpr std::array<Axis, 3> kAllAxes{Axis::x, Axis::y, Axis::z};

const char* axis_name(Axis axis);

struct LogRow {
  double t = 0.0;
  double ax = 0.0;
  double ay = 0.0;
  double az = 0.0;
};

/// Raw accelerometer samples as read from disk; timestamps strictly increasing.
struct RawLog {
  std::vector<LogRow> rows;
  std::string source_path;
};

/// Uniformly sampled three-axis acceleration in m/s².
///
/// Sample k is taken at t0() + k / rate(). The constructor enforces the
/// invariants (rate > 0, equal axis lengths >= 2, finite samples), so every
/// AccelTrace in circulation is valid.
class AccelTrace {
 public:
  AccelTrace(double rate, double t0, std::vector<double> x, std::vector<double> y,
             std::vector<double> z);

  double rate() const noexcept { return rate_; }
  double t0() const noexcept { return t0_; }
  std::size_t size() const noexcept { return x_.size(); }
  double duration() const noexcept { return static_cast<double>(size()) / rate_; }
  double time_at(std::size_t k) const noexcept { return t0_ + static_cast<double>(k) / rate_; }

  std::span<const double> x() const noexcept { return x_; }
  std::span<const double> y() const noexcept { return y_; }
  std::span<const double> z() const noexcept { return z_; }
  std::span<const double> axis(Axis a) const noexcept;

 private:
  double rate_;
  double t0_;
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> z_;
};

struct SectionSpec {
  std::string label;
  double t_start = 0.0;
  double t_end = 0.0;
  double distance_km = 0.0;
  std::optional<double> avg_speed_kmh;
};

struct TripManifest {
  std::string driver_id;
  std::string car_id;
  std::vector<SectionSpec> sections;
  std::string log_ref;
};

enum class DetrendMode { mean_subtract, none };

// Analysis rate used throughout when the caller does not pick one.
inline constexpr double kDefaultRate = 100.0;
// Largest tolerated inter-row gap before a log is considered to have dropouts.
inline constexpr double kMaxGapSeconds = 0.5;

/// Parses a `t,ax,ay,az` CSV log. Blank lines and a trailing `\r` are tolerated.
RawLog parse_log(std::istream& in, const std::string& source_path = "<stream>");
RawLog parse_log_file(const std::filesystem::path& path);

/// Writes a log in the same CSV format using shortest round-trip decimal
/// representations, so parse_log(serialize_log(log)) is bit-exact.
std::string serialize_log(const RawLog& log);

/// Linear interpolation onto a uniform grid t0 + k/rate, t0 = first row time.
/// No extrapolation past the last row. Any inter-row gap above max_gap_s is a dropout.
AccelTrace resample_uniform(const RawLog& log, double rate, double max_gap_s = kMaxGapSeconds);

AccelTrace detrend_gravity(const AccelTrace& trace, DetrendMode mode);

/// Samples whose timestamps fall in [t_start, t_end).
AccelTrace slice_section(const AccelTrace& trace, const SectionSpec& section);

/// Index range [first, last) of the samples slice_section would return.
std::pair<std::size_t, std::size_t> section_bounds(const AccelTrace& trace,
                                                   const SectionSpec& section);

/// Converts a uniform trace back to rows (t = t0 + k/rate).
RawLog trace_to_log(const AccelTrace& trace, const std::string& source_path = "");

TripManifest parse_manifest(std::istream& in, const std::string& source_path = "<stream>");
TripManifest parse_manifest_file(const std::filesystem::path& path);
std::string serialize_manifest(const TripManifest& manifest);
void validate_manifest(const TripManifest& manifest);

}  // namespace ridecomfort
