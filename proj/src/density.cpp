#include "ridecomfort/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ridecomfort/error.hpp"

namespace ridecomfort {

namespace {

constexpr double kInvSqrt2Pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;

double gauss(double u) { return kInvSqrt2Pi * std::exp(-0.5 * u * u); }

double resolve_bandwidth(const Bandwidth& bw, std::span<const double> samples) {
  if (const auto* h = std::get_if<double>(&bw)) {
    if (!(*h > 0.0) || !std::isfinite(*h)) {
      throw Error(ErrorCode::invalid_argument, "explicit bandwidth must be finite and > 0");
    }
    return *h;
  }
  return bandwidth_silverman(samples);
}

std::vector<double> make_axis(const std::optional<GridAxis>& given, std::span<const double> samples,
                              double h, std::size_t default_points) {
  GridAxis g;
  if (given) {
    g = *given;
  } else {
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    g = {*lo - kGridPadBandwidths * h, *hi + kGridPadBandwidths * h, default_points};
  }
  if (g.points < 2 || !(g.min < g.max)) {
    throw Error(ErrorCode::invalid_argument, "KDE grid needs >= 2 points and min < max");
  }
  std::vector<double> axis(g.points);
  const double step = (g.max - g.min) / static_cast<double>(g.points - 1);
  for (std::size_t i = 0; i < g.points; ++i) axis[i] = g.min + step * static_cast<double>(i);
  axis.back() = g.max;
  return axis;
}

// kernel[i * n + s] = K((axis[i] - samples[s]) / h)
std::vector<double> kernel_matrix(const std::vector<double>& axis, std::span<const double> samples,
                                  double h) {
  const std::size_t n = samples.size();
  std::vector<double> k(axis.size() * n);
  for (std::size_t i = 0; i < axis.size(); ++i) {
    for (std::size_t s = 0; s < n; ++s) k[i * n + s] = gauss((axis[i] - samples[s]) / h);
  }
  return k;
}

double trapezoid_weight(std::size_t i, const std::vector<double>& axis) {
  const std::size_t n = axis.size();
  const double lo = i > 0 ? axis[i] - axis[i - 1] : 0.0;
  const double hi = i + 1 < n ? axis[i + 1] - axis[i] : 0.0;
  return 0.5 * (lo + hi);
}

std::string group_key(GroupBy g, const TripManifest& m, const SectionSpec& s) {
  switch (g) {
    case GroupBy::section: return s.label;
    case GroupBy::driver: return m.driver_id;
    case GroupBy::car: return m.car_id;
    case GroupBy::driver_car: return m.driver_id + "/" + m.car_id;
    case GroupBy::all: return "all";
  }
  return "all";
}

}  // namespace

double KdeGrid::peak() const {
  return density.empty() ? 0.0 : *std::max_element(density.begin(), density.end());
}

double KdeGrid::integral() const {
  double total = 0.0;
  if (dims() == 1) {
    for (std::size_t i = 0; i < axes[0].size(); ++i) total += trapezoid_weight(i, axes[0]) * at(i);
    return total;
  }
  for (std::size_t i = 0; i < axes[0].size(); ++i) {
    const double wx = trapezoid_weight(i, axes[0]);
    for (std::size_t j = 0; j < axes[1].size(); ++j) {
      total += wx * trapezoid_weight(j, axes[1]) * at(i, j);
    }
  }
  return total;
}

double quantile_linear(std::vector<double> samples, double p) {
  if (samples.empty()) throw Error(ErrorCode::empty_sample_set, "quantile of empty sample set");
  std::sort(samples.begin(), samples.end());
  const double pos = p * static_cast<double>(samples.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, samples.size() - 1);
  return samples[lo] + (samples[hi] - samples[lo]) * (pos - static_cast<double>(lo));
}

double bandwidth_silverman(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n == 0) throw Error(ErrorCode::empty_sample_set, "bandwidth of empty sample set");
  if (n < 2) {
    throw Error(ErrorCode::degenerate_bandwidth,
                "Silverman bandwidth needs >= 2 samples; supply an explicit bandwidth");
  }
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) {
    throw Error(ErrorCode::degenerate_bandwidth,
                "all samples identical; supply an explicit bandwidth");
  }
  const std::vector<double> v(samples.begin(), samples.end());
  const double iqr = quantile_linear(v, 0.75) - quantile_linear(v, 0.25);
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

KdeGrid kde_1d(std::span<const double> samples, const KdeConfig& cfg) {
  if (samples.empty()) throw Error(ErrorCode::empty_sample_set, "KDE of empty sample set");
  // Sorting fixes the summation order, making the result exactly permutation invariant.
  std::vector<double> xs(samples.begin(), samples.end());
  std::sort(xs.begin(), xs.end());
  const double h = resolve_bandwidth(cfg.bandwidth[0], xs);

  KdeGrid out;
  out.axes.push_back(make_axis(cfg.grid[0], xs, h, cfg.default_points));
  out.bandwidth_used = {h};
  const double norm = 1.0 / (static_cast<double>(xs.size()) * h);
  out.density.resize(out.axes[0].size());
  for (std::size_t i = 0; i < out.axes[0].size(); ++i) {
    double acc = 0.0;
    for (double s : xs) acc += gauss((out.axes[0][i] - s) / h);
    out.density[i] = acc * norm;
  }
  return out;
}

KdeGrid kde_2d(std::span<const Point2> samples, const KdeConfig& cfg) {
  if (samples.empty()) throw Error(ErrorCode::empty_sample_set, "KDE of empty sample set");
  std::vector<Point2> pts(samples.begin(), samples.end());
  std::sort(pts.begin(), pts.end(),
            [](const Point2& a, const Point2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  std::vector<double> xs(pts.size());
  std::vector<double> ys(pts.size());
  for (std::size_t s = 0; s < pts.size(); ++s) {
    xs[s] = pts[s].x;
    ys[s] = pts[s].y;
  }
  const double hx = resolve_bandwidth(cfg.bandwidth[0], xs);
  const double hy = resolve_bandwidth(cfg.bandwidth[1], ys);

  KdeGrid out;
  out.axes.push_back(make_axis(cfg.grid[0], xs, hx, cfg.default_points));
  out.axes.push_back(make_axis(cfg.grid[1], ys, hy, cfg.default_points));
  out.bandwidth_used = {hx, hy};

  const std::size_t n = pts.size();
  const auto kx = kernel_matrix(out.axes[0], xs, hx);
  const auto ky = kernel_matrix(out.axes[1], ys, hy);
  const std::size_t nx = out.axes[0].size();
  const std::size_t ny = out.axes[1].size();
  const double norm = 1.0 / (static_cast<double>(n) * hx * hy);
  out.density.resize(nx * ny);
  for (std::size_t i = 0; i < nx; ++i) {
    const double* rx = &kx[i * n];
    for (std::size_t j = 0; j < ny; ++j) {
      const double* ry = &ky[j * n];
      double acc = 0.0;
      for (std::size_t s = 0; s < n; ++s) acc += rx[s] * ry[s];
      out.density[i * ny + j] = acc * norm;
    }
  }
  return out;
}

const char* to_string(GroupBy g) {
  switch (g) {
    case GroupBy::section: return "section";
    case GroupBy::driver: return "driver";
    case GroupBy::car: return "car";
    case GroupBy::driver_car: return "driver_car";
    case GroupBy::all: return "all";
  }
  return "all";
}

GroupBy group_by_from_string(const std::string& name) {
  if (name == "section") return GroupBy::section;
  if (name == "driver") return GroupBy::driver;
  if (name == "car") return GroupBy::car;
  if (name == "driver_car") return GroupBy::driver_car;
  if (name == "all") return GroupBy::all;
  throw Error(ErrorCode::invalid_argument, "unknown grouping '" + name + "'");
}

std::map<std::string, std::vector<Point2>> msdv_window_samples(std::span<const TripInput> trips,
                                                               const FilterSet& filters,
                                                               const MetricsConfig& cfg,
                                                               GroupBy group_by) {
  std::map<std::string, std::vector<Point2>> groups;
  for (const auto& trip : trips) {
    const auto series = windowed_metrics(trip.trace, filters, cfg);
    std::vector<std::pair<std::size_t, std::size_t>> bounds;
    for (const auto& s : trip.manifest.sections) bounds.push_back(section_bounds(trip.trace, s));
    for (std::size_t w = 0; w < series.windows.size(); ++w) {
      const std::size_t first = w * cfg.window_len;
      const std::size_t last = first + cfg.window_len;
      for (std::size_t s = 0; s < bounds.size(); ++s) {
        if (first >= bounds[s].first && last <= bounds[s].second) {
          const auto& m = series.windows[w];
          groups[group_key(group_by, trip.manifest, trip.manifest.sections[s])].push_back(
              {m.msdv[0], m.msdv[1]});
          break;
        }
      }
    }
  }
  return groups;
}

std::map<std::string, KdeGrid> msdv_density(std::span<const TripInput> trips,
                                            const FilterSet& filters, const MetricsConfig& cfg,
                                            GroupBy group_by, const KdeConfig& kde) {
  const auto groups = msdv_window_samples(trips, filters, cfg, group_by);
  if (groups.empty()) {
    throw Error(ErrorCode::empty_sample_set, "no complete window falls inside any section");
  }
  std::map<std::string, KdeGrid> out;
  for (const auto& [key, pts] : groups) {
    try {
      out.emplace(key, kde_2d(pts, kde));
    } catch (const Error& e) {
      throw Error(e.code(), "group '" + key + "': " + e.what());
    }
  }
  return out;
}

}  // namespace ridecomfort
