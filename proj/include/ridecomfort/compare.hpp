#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ridecomfort/metrics.hpp"

namespace ridecomfort {

enum class EntityKind { driver, car, section };

const char* to_string(EntityKind kind);
EntityKind entity_kind_from_string(const std::string& name);

enum class Metric { a_v, a_wx, a_wy, a_wz, msdv_x, msdv_y, msdv_z, n_x, n_y, n_z };

inline constexpr Metric kAllMetrics[] = {Metric::a_v,    Metric::a_wx,   Metric::a_wy,
                                         Metric::a_wz,   Metric::msdv_x, Metric::msdv_y,
                                         Metric::msdv_z, Metric::n_x,    Metric::n_y,
                                         Metric::n_z};

const char* to_string(Metric m);
Metric metric_from_string(const std::string& name);

/// Metrics that scale linearly with the input acceleration (event counts do not).
bool scale_covariant(Metric m);

/// Value compared for a metric. Section comparisons use distance-normalised
/// MSDV and N; A_v and a_w are always raw.
double metric_value(const ComfortReport& r, Metric m, EntityKind kind);

struct SituationKey {
  std::string driver_id;
  std::string car_id;
  std::string section_label;

  auto operator<=>(const SituationKey&) const = default;
};

using ReportSet = std::map<SituationKey, ComfortReport>;

/// Flattens trip reports into one entry per (driver, car, section).
ReportSet situations_of(std::span<const TripReport> trips);

enum class Outcome { i_dominates, j_dominates, nondeterminant };

/// Non-determinant iff |v_i - v_j| <= epsilon * max(v_i, v_j) (this covers both zero).
Outcome pairwise_compare(double v_i, double v_j, double epsilon);

struct PairStats {
  std::string i;
  std::string j;
  Metric metric = Metric::a_v;
  double pct_i_gt_j = 0.0;
  double pct_j_gt_i = 0.0;
  double pct_nondeterminant = 0.0;
  std::size_t situations = 0;
};

struct ComparisonMatrix {
  EntityKind entity_kind = EntityKind::driver;
  double epsilon = 0.05;
  std::vector<std::string> entities;
  std::vector<PairStats> pairs;  // every ordered pair (i, j), i != j, per metric

  const PairStats& find(const std::string& i, const std::string& j, Metric m) const;
};

ComparisonMatrix aggregate_matrix(const ReportSet& reports, EntityKind kind,
                                  std::span<const Metric> metrics, double epsilon);
ComparisonMatrix aggregate_matrix(const ReportSet& reports, EntityKind kind, Metric metric,
                                  double epsilon);

struct SweepResult {
  std::vector<double> epsilons;
  std::vector<ComparisonMatrix> matrices;
};

SweepResult threshold_sweep(const ReportSet& reports, EntityKind kind,
                            std::span<const Metric> metrics, std::span<const double> epsilons);

}  // namespace ridecomfort
