#include "ridecomfort/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include <json.hpp>

#include "ridecomfort/error.hpp"

namespace ridecomfort {

namespace {

std::string_view trim(std::string_view s) {
  const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r'; };
  const auto b = std::find_if(s.begin(), s.end(), not_space);
  const auto e = std::find_if(s.rbegin(), s.rend(), not_space).base();
  return b < e ? std::string_view(&*b, static_cast<std::size_t>(e - b)) : std::string_view{};
}

bool parse_double(std::string_view field, double& out) {
  field = trim(field);
  if (field.empty()) return false;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last && std::isfinite(out);
}

std::string row_error(const std::string& source, std::size_t line, const std::string& what) {
  return source + ":" + std::to_string(line) + ": " + what;
}

void append_number(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

double mean_of(std::span<const double> v) {
  double sum = 0.0;
  double comp = 0.0;
  // Neumaier summation keeps the mean accurate on long traces with a large offset.
  for (double s : v) {
    const double t = sum + s;
    comp += std::abs(sum) >= std::abs(s) ? (sum - t) + s : (s - t) + sum;
    sum = t;
  }
  return (sum + comp) / static_cast<double>(v.size());
}

std::vector<double> subtract_mean(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  for (int pass = 0; pass < 2; ++pass) {
    const double m = mean_of(out);
    for (double& s : out) s -= m;
  }
  return out;
}

}  // namespace

const char* axis_name(Axis axis) {
  switch (axis) {
    case Axis::x: return "x";
    case Axis::y: return "y";
    case Axis::z: return "z";
  }
  return "?";
}

AccelTrace::AccelTrace(double rate, double t0, std::vector<double> x, std::vector<double> y,
                       std::vector<double> z)
    : rate_(rate), t0_(t0), x_(std::move(x)), y_(std::move(y)), z_(std::move(z)) {
  if (!(rate_ > 0.0) || !std::isfinite(rate_)) {
    throw Error(ErrorCode::invalid_argument, "trace rate must be positive and finite");
  }
  if (!std::isfinite(t0_)) throw Error(ErrorCode::invalid_argument, "trace t0 must be finite");
  if (x_.size() != y_.size() || x_.size() != z_.size()) {
    throw Error(ErrorCode::invalid_argument, "trace axes must have equal lengths");
  }
  if (x_.size() < 2) throw Error(ErrorCode::too_few_samples, "trace needs at least 2 samples");
  for (const auto* axis : {&x_, &y_, &z_}) {
    if (!std::all_of(axis->begin(), axis->end(), [](double v) { return std::isfinite(v); })) {
      throw Error(ErrorCode::invalid_argument, "trace contains non-finite samples");
    }
  }
}

std::span<const double> AccelTrace::axis(Axis a) const noexcept {
  switch (a) {
    case Axis::x: return x_;
    case Axis::y: return y_;
    case Axis::z: return z_;
  }
  return x_;
}

RawLog parse_log(std::istream& in, const std::string& source_path) {
  RawLog log;
  log.source_path = source_path;

  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto content = trim(line);
    if (content.empty()) continue;
    if (!have_header) {
      if (content != "t,ax,ay,az") {
        throw Error(ErrorCode::malformed_row,
                    row_error(source_path, line_no, "expected header 't,ax,ay,az'"));
      }
      have_header = true;
      continue;
    }

    std::array<double, 4> values{};
    std::size_t field = 0;
    std::size_t start = 0;
    bool ok = true;
    while (ok) {
      const auto comma = content.find(',', start);
      const auto token = content.substr(start, comma == std::string_view::npos ? content.npos
                                                                               : comma - start);
      if (field >= values.size() || !parse_double(token, values[field])) ok = false;
      ++field;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!ok || field != values.size()) {
      throw Error(ErrorCode::malformed_row,
                  row_error(source_path, line_no,
                            "expected 4 finite numeric fields, got '" + std::string(content) + "'"));
    }
    if (!log.rows.empty() && !(values[0] > log.rows.back().t)) {
      throw Error(ErrorCode::non_monotonic_time,
                  row_error(source_path, line_no, "timestamp is not strictly increasing"));
    }
    log.rows.push_back({values[0], values[1], values[2], values[3]});
  }
  if (log.rows.empty()) throw Error(ErrorCode::empty_log, source_path + ": log has no samples");
  return log;
}

RawLog parse_log_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open log file " + path.string());
  return parse_log(in, path.string());
}

std::string serialize_log(const RawLog& log) {
  std::string out = "t,ax,ay,az\n";
  out.reserve(out.size() + log.rows.size() * 48);
  for (const auto& r : log.rows) {
    append_number(out, r.t);
    out += ',';
    append_number(out, r.ax);
    out += ',';
    append_number(out, r.ay);
    out += ',';
    append_number(out, r.az);
    out += '\n';
  }
  return out;
}

AccelTrace resample_uniform(const RawLog& log, double rate, double max_gap_s) {
  if (!(rate > 0.0)) throw Error(ErrorCode::invalid_argument, "resample rate must be > 0");
  const auto& rows = log.rows;
  if (rows.empty()) throw Error(ErrorCode::empty_log, log.source_path + ": log has no samples");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].t - rows[i - 1].t > max_gap_s) {
      throw Error(ErrorCode::gap_too_large,
                  log.source_path + ": gap of " + std::to_string(rows[i].t - rows[i - 1].t) +
                      " s before row " + std::to_string(i + 1) + " (t=" +
                      std::to_string(rows[i].t) + ")");
    }
  }

  const double t0 = rows.front().t;
  const double span = rows.back().t - t0;
  const auto n = static_cast<std::size_t>(std::floor(span * rate + 1e-9)) + 1;
  if (n < 2) {
    throw Error(ErrorCode::empty_log,
                log.source_path + ": log spans fewer than 2 samples at the requested rate");
  }

  // Grid points within tol of a row time take that row's values exactly.
  const double tol = 1e-9 / rate;
  std::vector<double> x(n), y(n), z(n);
  std::size_t j = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = t0 + static_cast<double>(k) / rate;
    while (j + 1 < rows.size() && rows[j + 1].t <= t + tol) ++j;
    const auto& a = rows[j];
    if (std::abs(t - a.t) <= tol || j + 1 == rows.size()) {
      x[k] = a.ax;
      y[k] = a.ay;
      z[k] = a.az;
      continue;
    }
    const auto& b = rows[j + 1];
    const double frac = (t - a.t) / (b.t - a.t);
    x[k] = a.ax + (b.ax - a.ax) * frac;
    y[k] = a.ay + (b.ay - a.ay) * frac;
    z[k] = a.az + (b.az - a.az) * frac;
  }
  return AccelTrace(rate, t0, std::move(x), std::move(y), std::move(z));
}

AccelTrace detrend_gravity(const AccelTrace& trace, DetrendMode mode) {
  if (mode == DetrendMode::none) return trace;
  return AccelTrace(trace.rate(), trace.t0(), subtract_mean(trace.x()), subtract_mean(trace.y()),
                    subtract_mean(trace.z()));
}

std::pair<std::size_t, std::size_t> section_bounds(const AccelTrace& trace,
                                                   const SectionSpec& section) {
  const double rate = trace.rate();
  const double t_lo = trace.t0();
  const double t_hi = trace.t0() + trace.duration();
  const double tol = 1e-6 / rate;
  if (!(section.t_start < section.t_end) || section.t_start < t_lo - tol ||
      section.t_end > t_hi + tol) {
    throw Error(ErrorCode::out_of_range,
                "section '" + section.label + "' [" + std::to_string(section.t_start) + ", " +
                    std::to_string(section.t_end) + ") is outside trace span [" +
                    std::to_string(t_lo) + ", " + std::to_string(t_hi) + ")");
  }
  const auto index_at = [&](double t) {
    const double pos = std::ceil((t - t_lo) * rate - 1e-6);
    return static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(trace.size())));
  };
  const auto first = index_at(section.t_start);
  const auto last = index_at(section.t_end);
  if (last < first + 2) {
    throw Error(ErrorCode::out_of_range,
                "section '" + section.label + "' covers fewer than 2 samples");
  }
  return {first, last};
}

AccelTrace slice_section(const AccelTrace& trace, const SectionSpec& section) {
  const auto [first, last] = section_bounds(trace, section);
  const auto cut = [&](std::span<const double> v) {
    return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(first),
                               v.begin() + static_cast<std::ptrdiff_t>(last));
  };
  return AccelTrace(trace.rate(), trace.time_at(first), cut(trace.x()), cut(trace.y()),
                    cut(trace.z()));
}

RawLog trace_to_log(const AccelTrace& trace, const std::string& source_path) {
  RawLog log;
  log.source_path = source_path;
  log.rows.reserve(trace.size());
  for (std::size_t k = 0; k < trace.size(); ++k) {
    log.rows.push_back({trace.time_at(k), trace.x()[k], trace.y()[k], trace.z()[k]});
  }
  return log;
}

void validate_manifest(const TripManifest& m) {
  if (m.driver_id.empty() || m.car_id.empty()) {
    throw Error(ErrorCode::malformed_manifest, "manifest driver_id and car_id must be non-empty");
  }
  for (std::size_t i = 0; i < m.sections.size(); ++i) {
    const auto& s = m.sections[i];
    if (!(s.t_start < s.t_end)) {
      throw Error(ErrorCode::malformed_manifest, "section '" + s.label + "': t_start >= t_end");
    }
    if (!(s.distance_km > 0.0) || !std::isfinite(s.distance_km)) {
      throw Error(ErrorCode::malformed_manifest,
                  "section '" + s.label + "': distance_km must be > 0");
    }
    if (i > 0 && s.t_start < m.sections[i - 1].t_end) {
      throw Error(ErrorCode::malformed_manifest,
                  "section '" + s.label + "' overlaps or precedes section '" +
                      m.sections[i - 1].label + "'");
    }
  }
}

TripManifest parse_manifest(std::istream& in, const std::string& source_path) {
  using nlohmann::json;
  TripManifest m;
  try {
    const json doc = json::parse(in);
    m.driver_id = doc.at("driver_id").get<std::string>();
    m.car_id = doc.at("car_id").get<std::string>();
    m.log_ref = doc.value("log_ref", doc.value("log", std::string{}));
    for (const auto& js : doc.at("sections")) {
      SectionSpec s;
      s.label = js.at("label").get<std::string>();
      s.t_start = js.at("t_start").get<double>();
      s.t_end = js.at("t_end").get<double>();
      s.distance_km = js.at("distance_km").get<double>();
      if (js.contains("avg_speed_kmh") && !js.at("avg_speed_kmh").is_null()) {
        s.avg_speed_kmh = js.at("avg_speed_kmh").get<double>();
      }
      m.sections.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::malformed_manifest, source_path + ": " + e.what());
  }
  try {
    validate_manifest(m);
  } catch (const Error& e) {
    throw Error(e.code(), source_path + ": " + e.what());
  }
  return m;
}

TripManifest parse_manifest_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open manifest file " + path.string());
  return parse_manifest(in, path.string());
}

std::string serialize_manifest(const TripManifest& m) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["driver_id"] = m.driver_id;
  doc["car_id"] = m.car_id;
  doc["log_ref"] = m.log_ref;
  doc["sections"] = ordered_json::array();
  for (const auto& s : m.sections) {
    ordered_json js;
    js["label"] = s.label;
    js["t_start"] = s.t_start;
    js["t_end"] = s.t_end;
    js["distance_km"] = s.distance_km;
    if (s.avg_speed_kmh) js["avg_speed_kmh"] = *s.avg_speed_kmh;
    doc["sections"].push_back(std::move(js));
  }
  return doc.dump(2) + "\n";
}

}  // namespace ridecomfort
