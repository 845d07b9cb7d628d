#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ridecomfort/metrics.hpp"

namespace ridecomfort {

struct SilvermanRule {};

/// Explicit bandwidth (> 0) or a selection rule.
using Bandwidth = std::variant<double, SilvermanRule>;

struct GridAxis {
  double min = 0.0;
  double max = 1.0;
  std::size_t points = 129;
};

// Default grid: data range padded by this many bandwidths on each side.
inline constexpr double kGridPadBandwidths = 4.0;
// Odd so the midpoint of the padded range is a grid node.
inline constexpr std::size_t kDefaultGridPoints = 129;

struct KdeConfig {
  std::array<Bandwidth, 2> bandwidth{SilvermanRule{}, SilvermanRule{}};
  std::array<std::optional<GridAxis>, 2> grid{};
  std::size_t default_points = kDefaultGridPoints;
};

/// Gaussian KDE on a regular grid. For 2-D data density is row-major in x:
/// density[ix * ny + iy].
struct KdeGrid {
  std::vector<std::vector<double>> axes;
  std::vector<double> density;
  std::vector<double> bandwidth_used;

  std::size_t dims() const { return axes.size(); }
  double at(std::size_t ix) const { return density[ix]; }
  double at(std::size_t ix, std::size_t iy) const { return density[ix * axes[1].size() + iy]; }
  double peak() const;
  /// Trapezoidal integral over the grid.
  double integral() const;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// h = 0.9 * min(sd, IQR / 1.34) * n^(-1/5), sd with n - 1 denominator and
/// quartiles by linear interpolation between order statistics
/// (q(p) at position p * (n - 1)). When IQR is 0 but sd > 0, sd is used alone.
double bandwidth_silverman(std::span<const double> samples);

/// Quantile with linear interpolation between order statistics.
double quantile_linear(std::vector<double> samples, double p);

KdeGrid kde_1d(std::span<const double> samples, const KdeConfig& cfg = {});
KdeGrid kde_2d(std::span<const Point2> samples, const KdeConfig& cfg = {});

enum class GroupBy { section, driver, car, driver_car, all };

const char* to_string(GroupBy g);
GroupBy group_by_from_string(const std::string& name);

/// One analysed trip: its uniform trace and manifest.
struct TripInput {
  AccelTrace trace;
  TripManifest manifest;
};

/// Windowed (MSDV_x, MSDV_y) samples keyed by group label. A window belongs to
/// the section that fully contains it; straddling windows are dropped.
std::map<std::string, std::vector<Point2>> msdv_window_samples(std::span<const TripInput> trips,
                                                               const FilterSet& filters,
                                                               const MetricsConfig& cfg,
                                                               GroupBy group_by);

std::map<std::string, KdeGrid> msdv_density(std::span<const TripInput> trips,
                                            const FilterSet& filters, const MetricsConfig& cfg,
                                            GroupBy group_by, const KdeConfig& kde = {});

}  // namespace ridecomfort
