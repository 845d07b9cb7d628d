#include "ridecomfort/metrics.hpp"

#include <cmath>

#include "ridecomfort/error.hpp"

namespace ridecomfort {

namespace {

struct Band {
  ComfortGrade grade;
  double low;
  double high;
  bool low_inclusive;
  bool high_inclusive;
};

// Finite bands are closed at both ends; the open-ended bands are
// [0, 0.315) and (2.0, inf).
constexpr Band kBands[] = {
    {ComfortGrade::not_uncomfortable, 0.0, 0.315, true, false},
    {ComfortGrade::a_little_uncomfortable, 0.315, 0.63, true, true},
    {ComfortGrade::fairly_uncomfortable, 0.5, 1.0, true, true},
    {ComfortGrade::uncomfortable, 0.8, 1.6, true, true},
    {ComfortGrade::very_uncomfortable, 1.25, 2.5, true, true},
    {ComfortGrade::extremely_uncomfortable, 2.0, kInf, false, false},
};

double sum_squares(std::span<const double> v) {
  double acc = 0.0;
  for (double s : v) acc += s * s;
  return acc;
}

void require_samples(std::span<const double> v) {
  if (v.size() < 2) throw Error(ErrorCode::too_few_samples, "metric needs at least 2 samples");
}

ComfortReport make_report(const std::array<std::span<const double>, 3>& comfort_w,
                          const std::array<std::span<const double>, 3>& sickness_w,
                          const std::array<std::span<const double>, 3>& raw, double duration_s,
                          const MetricsConfig& cfg) {
  ComfortReport r;
  for (std::size_t a = 0; a < 3; ++a) {
    r.a_w[a] = rms_of(comfort_w[a], cfg.rate);
    r.msdv[a] = dose_of(sickness_w[a], cfg.rate);
    r.n_events[a] = count_events(raw[a], cfg.event_threshold, cfg.count_mode);
  }
  r.a_v = comfort_index(r.a_w[0], r.a_w[1], r.a_w[2], cfg);
  r.labels = classify_comfort(r.a_v);
  r.duration_s = duration_s;
  return r;
}

PerKm per_km_of(const ComfortReport& r, double distance_km) {
  PerKm p;
  p.distance_km = distance_km;
  for (std::size_t a = 0; a < 3; ++a) {
    p.msdv[a] = per_distance(r.msdv[a], distance_km);
    p.n_events[a] = per_distance(static_cast<double>(r.n_events[a]), distance_km);
  }
  return p;
}

}  // namespace

const char* to_string(ComfortGrade grade) {
  switch (grade) {
    case ComfortGrade::not_uncomfortable: return "not uncomfortable";
    case ComfortGrade::a_little_uncomfortable: return "a little uncomfortable";
    case ComfortGrade::fairly_uncomfortable: return "fairly uncomfortable";
    case ComfortGrade::uncomfortable: return "uncomfortable";
    case ComfortGrade::very_uncomfortable: return "very uncomfortable";
    case ComfortGrade::extremely_uncomfortable: return "extremely uncomfortable";
  }
  return "?";
}

void validate(const MetricsConfig& cfg) {
  if (!(cfg.kx > 0.0 && cfg.ky > 0.0 && cfg.kz > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "k-factors must be > 0");
  }
  if (!(cfg.event_threshold > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "event threshold must be > 0");
  }
  if (cfg.window_len < 2) throw Error(ErrorCode::invalid_argument, "window_len must be >= 2");
  if (!(cfg.rate > 0.0)) throw Error(ErrorCode::invalid_argument, "rate must be > 0");
  if (!(cfg.settle_skip_seconds >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, "settle_skip_seconds must be >= 0");
  }
}

FilterSet FilterSet::standard(double rate) {
  const auto wa = design_filter(WeightingSpec::wa_horizontal(), rate);
  const auto wk = design_filter(WeightingSpec::wk_vertical(), rate);
  const auto wf = design_filter(WeightingSpec::wf_sickness(), rate);
  return {{wa, wa, wk}, {wf, wf, wf}};
}

double rms_of(std::span<const double> weighted, double rate) {
  require_samples(weighted);
  const double dt = 1.0 / rate;
  const double t = static_cast<double>(weighted.size()) * dt;
  return std::sqrt(sum_squares(weighted) * dt / t);
}

double dose_of(std::span<const double> weighted, double rate) {
  require_samples(weighted);
  return std::sqrt(sum_squares(weighted) / rate);
}

double weighted_rms(std::span<const double> samples, const DigitalWeighting& filter, double rate) {
  require_samples(samples);
  return rms_of(apply_weighting(samples, filter, rate), rate);
}

double msdv(std::span<const double> samples, const DigitalWeighting& wf_filter, double rate) {
  require_samples(samples);
  return dose_of(apply_weighting(samples, wf_filter, rate), rate);
}

double comfort_index(double a_wx, double a_wy, double a_wz, const MetricsConfig& cfg) {
  if (a_wx < 0.0 || a_wy < 0.0 || a_wz < 0.0) {
    throw Error(ErrorCode::invalid_argument, "weighted accelerations must be >= 0");
  }
  const double x = cfg.kx * a_wx;
  const double y = cfg.ky * a_wy;
  const double z = cfg.kz * a_wz;
  return std::sqrt(x * x + y * y + z * z);
}

std::vector<ComfortGrade> classify_comfort(double a_v) {
  if (!(a_v >= 0.0)) throw Error(ErrorCode::invalid_argument, "A_v must be >= 0");
  std::vector<ComfortGrade> out;
  for (const auto& b : kBands) {
    const bool above = b.low_inclusive ? a_v >= b.low : a_v > b.low;
    const bool below = b.high_inclusive ? a_v <= b.high : a_v < b.high;
    if (above && below) out.push_back(b.grade);
  }
  return out;
}

std::size_t count_events(std::span<const double> samples, double threshold, CountMode mode) {
  if (!(threshold > 0.0)) throw Error(ErrorCode::invalid_argument, "threshold must be > 0");
  std::size_t count = 0;
  bool inside = false;
  for (double s : samples) {
    const bool over = std::abs(s) > threshold;
    if (mode == CountMode::sample) {
      count += over ? 1 : 0;
    } else {
      if (over && !inside) ++count;
      inside = over;
    }
  }
  return count;
}

double per_distance(double value, double distance_km) {
  if (!(distance_km > 0.0)) {
    throw Error(ErrorCode::zero_distance, "distance must be > 0 km for per-distance metrics");
  }
  return value / distance_km;
}

WindowedSeries windowed_metrics(const AccelTrace& trace, const FilterSet& filters,
                                const MetricsConfig& cfg) {
  validate(cfg);
  const std::size_t len = cfg.window_len;
  if (trace.size() < len) {
    throw Error(ErrorCode::trace_too_short, "trace has " + std::to_string(trace.size()) +
                                                " samples, window needs " + std::to_string(len));
  }
  std::array<std::vector<double>, 3> comfort;
  std::array<std::vector<double>, 3> sickness;
  for (auto axis : kAllAxes) {
    const auto a = static_cast<std::size_t>(axis);
    comfort[a] = apply_weighting(trace.axis(axis), filters.comfort[a], trace.rate());
    sickness[a] = apply_weighting(trace.axis(axis), filters.sickness[a], trace.rate());
  }

  WindowedSeries out;
  const std::size_t count = trace.size() / len;
  out.window_start_s.reserve(count);
  out.windows.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    const std::size_t first = w * len;
    WindowMetrics m;
    for (std::size_t a = 0; a < 3; ++a) {
      m.a_w[a] = rms_of(std::span<const double>(comfort[a]).subspan(first, len), trace.rate());
      m.msdv[a] = dose_of(std::span<const double>(sickness[a]).subspan(first, len), trace.rate());
    }
    out.window_start_s.push_back(trace.time_at(first));
    out.windows.push_back(m);
  }
  return out;
}

TripReport analyze_trip(const AccelTrace& trace, const TripManifest& manifest,
                        const MetricsConfig& cfg, const FilterSet& filters) {
  validate(cfg);
  if (std::abs(cfg.rate - trace.rate()) > 1e-9 * cfg.rate) {
    throw Error(ErrorCode::rate_mismatch, "metrics configured for " + std::to_string(cfg.rate) +
                                              " Hz but trace is " + std::to_string(trace.rate()) +
                                              " Hz");
  }
  std::array<std::vector<double>, 3> comfort;
  std::array<std::vector<double>, 3> sickness;
  for (auto axis : kAllAxes) {
    const auto a = static_cast<std::size_t>(axis);
    comfort[a] = apply_weighting(trace.axis(axis), filters.comfort[a], trace.rate());
    sickness[a] = apply_weighting(trace.axis(axis), filters.sickness[a], trace.rate());
  }
  const auto skip = static_cast<std::size_t>(std::ceil(cfg.settle_skip_seconds * cfg.rate - 1e-9));

  const auto report_range = [&](std::size_t first, std::size_t last, const std::string& what) {
    const std::size_t from = std::max(first, skip);
    if (last < from + 2) {
      throw Error(ErrorCode::too_few_samples,
                  what + ": fewer than 2 samples remain after the settle skip");
    }
    std::array<std::span<const double>, 3> cw;
    std::array<std::span<const double>, 3> sw;
    std::array<std::span<const double>, 3> raw;
    for (std::size_t a = 0; a < 3; ++a) {
      cw[a] = std::span<const double>(comfort[a]).subspan(from, last - from);
      sw[a] = std::span<const double>(sickness[a]).subspan(from, last - from);
      raw[a] = trace.axis(static_cast<Axis>(a)).subspan(first, last - first);
    }
    return make_report(cw, sw, raw, static_cast<double>(last - first) / cfg.rate, cfg);
  };

  TripReport out;
  out.driver_id = manifest.driver_id;
  out.car_id = manifest.car_id;
  double total_km = 0.0;
  for (const auto& section : manifest.sections) {
    const auto [first, last] = section_bounds(trace, section);
    auto r = report_range(first, last, "section '" + section.label + "'");
    r.per_km = per_km_of(r, section.distance_km);
    total_km += section.distance_km;
    out.sections.push_back({section, std::move(r)});
  }
  out.whole = report_range(0, trace.size(), "whole trip");
  if (total_km > 0.0) out.whole.per_km = per_km_of(out.whole, total_km);
  return out;
}

}  // namespace ridecomfort
