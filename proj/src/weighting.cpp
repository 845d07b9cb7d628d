#include "ridecomfort/weighting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>

#include <Eigen/Dense>
#include <json.hpp>

#include "ridecomfort/error.hpp"

namespace ridecomfort {

namespace {

using cplx = std::complex<double>;

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Butterworth quality factor of the band-limiting pair.
constexpr double kQ12 = std::numbers::sqrt2 / 2.0;

enum class StageRole { highpass, band_lowpass, transition, step };

// Analog second-order section in descending powers of s:
// (num[0] s^2 + num[1] s + num[2]) / (s^2 + den[1] s + den[2]).
struct AnalogStage {
  StageRole role;
  std::array<double, 3> num;
  std::array<double, 3> den;
  double warp_omega;

  cplx eval(cplx s) const {
    return ((num[0] * s + num[1]) * s + num[2]) / ((den[0] * s + den[1]) * s + den[2]);
  }
  bool lowpass_type() const { return num[0] == 0.0; }
};

std::vector<AnalogStage> analog_stages(const WeightingSpec& spec) {
  std::vector<AnalogStage> stages;
  if (spec.f1 > 0.0) {
    const double w1 = kTwoPi * spec.f1;
    stages.push_back({StageRole::highpass, {1.0, 0.0, 0.0}, {1.0, w1 / kQ12, w1 * w1}, w1});
  }
  if (std::isfinite(spec.f2)) {
    const double w2 = kTwoPi * spec.f2;
    stages.push_back({StageRole::band_lowpass, {0.0, 0.0, w2 * w2}, {1.0, w2 / kQ12, w2 * w2}, w2});
  }
  if (std::isfinite(spec.f4)) {
    const double w4 = kTwoPi * spec.f4;
    std::array<double, 3> num{0.0, 0.0, w4 * w4};
    if (std::isfinite(spec.f3)) num[1] = w4 * w4 / (kTwoPi * spec.f3);
    stages.push_back({StageRole::transition, num, {1.0, w4 / spec.q4, w4 * w4}, w4});
  }
  if (std::isfinite(spec.f5)) {
    const double w5 = kTwoPi * spec.f5;
    const double w6 = kTwoPi * spec.f6;
    stages.push_back({StageRole::step,
                      {1.0, w5 / spec.q5, w5 * w5},
                      {1.0, w6 / spec.q6, w6 * w6},
                      std::sqrt(w5 * w6)});
  }
  return stages;
}

Biquad normalized(std::array<double, 3> b, std::array<double, 3> a) {
  return {b[0] / a[0], b[1] / a[0], b[2] / a[0], a[1] / a[0], a[2] / a[0]};
}

Biquad bilinear(const AnalogStage& st, double rate) {
  const double half_t = 0.5 / rate;
  // Pre-warp so the stage corner maps exactly; corners at or above Nyquist
  // cannot be pre-warped and fall back to the plain transform.
  const double k = st.warp_omega * half_t < 0.49 * std::numbers::pi
                       ? st.warp_omega / std::tan(st.warp_omega * half_t)
                       : 2.0 * rate;
  const auto map = [k](const std::array<double, 3>& c) {
    const double c2 = c[0] * k * k;
    const double c1 = c[1] * k;
    return std::array<double, 3>{c2 + c1 + c[2], 2.0 * (c[2] - c2), c2 - c1 + c[2]};
  };
  return normalized(map(st.num), map(st.den));
}

// Poles by z = exp(sT); numerator chosen so |B(e^jw)|^2 fits the analog squared
// magnitude times |A(e^jw)|^2 in the least-squares relative sense on [0, pi/2],
// then spectrally factored into real coefficients.
std::optional<Biquad> magnitude_matched(const AnalogStage& st, double rate) {
  const double t = 1.0 / rate;
  const cplx disc = std::sqrt(cplx(st.den[1] * st.den[1] - 4.0 * st.den[2], 0.0));
  const cplx p1 = (-st.den[1] + disc) / 2.0;
  const cplx p2 = (-st.den[1] - disc) / 2.0;
  const cplx z1 = std::exp(p1 * t);
  const cplx z2 = std::exp(p2 * t);
  const double a1 = -(z1 + z2).real();
  const double a2 = (z1 * z2).real();

  const auto den_mag2 = [&](double theta) {
    const cplx e = std::exp(cplx(0.0, -theta));
    return std::norm(1.0 + a1 * e + a2 * e * e);
  };

  constexpr int kGrid = 256;
  Eigen::MatrixXd m(kGrid, 3);
  Eigen::VectorXd rhs = Eigen::VectorXd::Ones(kGrid);
  for (int i = 0; i < kGrid; ++i) {
    const double theta = 0.5 * std::numbers::pi * i / (kGrid - 1);
    const double target = std::norm(st.eval(cplx(0.0, theta * rate))) * den_mag2(theta);
    if (!(target > 0.0) || !std::isfinite(target)) return std::nullopt;
    m(i, 0) = 1.0 / target;
    m(i, 1) = std::cos(theta) / target;
    m(i, 2) = std::cos(2.0 * theta) / target;
  }
  const Eigen::Vector3d c = m.colPivHouseholderQr().solve(rhs);

  // |B|^2 = c0 + c1 cos w + c2 cos 2w must be a valid power response.
  double peak = 0.0;
  double trough = std::numeric_limits<double>::max();
  for (int i = 0; i <= 1024; ++i) {
    const double w = std::numbers::pi * i / 1024.0;
    const double v = c(0) + c(1) * std::cos(w) + c(2) * std::cos(2.0 * w);
    peak = std::max(peak, v);
    trough = std::min(trough, v);
  }
  if (!(peak > 0.0) || trough < -1e-12 * peak) return std::nullopt;

  const double at_dc = std::sqrt(std::max(c(0) + c(1) + c(2), 0.0));
  const double at_nyq = std::sqrt(std::max(c(0) - c(1) + c(2), 0.0));
  const double prod = c(2) / 2.0;  // b0 * b2
  for (const double sign : {1.0, -1.0}) {
    const double b_nyq = sign * at_nyq;
    const double sum = (at_dc + b_nyq) / 2.0;  // b0 + b2
    const double b1 = (at_dc - b_nyq) / 2.0;
    double d = sum * sum - 4.0 * prod;
    if (d < -1e-12 * sum * sum) continue;
    d = std::sqrt(std::max(d, 0.0));
    double b0 = (sum + d) / 2.0;
    double b2 = (sum - d) / 2.0;
    if (std::abs(b0) < std::abs(b2)) std::swap(b0, b2);
    return Biquad{b0, b1, b2, a1, a2};
  }
  return std::nullopt;
}

bool same_rate(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(a, b); }

bool positive_or_inf(double f) { return f > 0.0 && !std::isnan(f); }

std::optional<double> read_corner(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key)) return std::nullopt;
  const auto& v = doc.at(key);
  if (v.is_string()) {
    auto s = v.get<std::string>();
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (s == "inf" || s == "infinity") return kInf;
    throw Error(ErrorCode::invalid_argument, std::string("field ") + key + " must be a number or \"inf\"");
  }
  return v.get<double>();
}

}  // namespace

const char* to_string(WeightingKind kind) {
  switch (kind) {
    case WeightingKind::wa_horizontal: return "Wa_horizontal";
    case WeightingKind::wk_vertical: return "Wk_vertical";
    case WeightingKind::wf_sickness: return "Wf_sickness";
    case WeightingKind::custom: return "Custom";
  }
  return "Custom";
}

WeightingSpec WeightingSpec::wa_horizontal() {
  return {WeightingKind::wa_horizontal, 0.4, 100.0, 2.0, 2.0, kInf, kInf, 0.63, 1.0, 1.0};
}

WeightingSpec WeightingSpec::wk_vertical() {
  return {WeightingKind::wk_vertical, 0.4, 100.0, 12.5, 12.5, 2.37, 3.35, 0.63, 0.91, 0.91};
}

WeightingSpec WeightingSpec::wf_sickness() {
  return {WeightingKind::wf_sickness, 0.08, 0.63, kInf, 0.25, 0.0625, 0.1, 0.86, 0.80, 0.80};
}

WeightingSpec WeightingSpec::identity() { return {}; }

void validate(const WeightingSpec& s) {
  const auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::invalid_argument, "invalid weighting spec: " + msg);
  };
  if (!(s.f1 >= 0.0) || !std::isfinite(s.f1)) fail("f1 must be finite and >= 0");
  if (!positive_or_inf(s.f2)) fail("f2 must be > 0 or inf");
  if (!(s.f1 < s.f2)) fail("f1 must be below f2");
  if (!positive_or_inf(s.f3) || !positive_or_inf(s.f4)) fail("f3/f4 must be > 0 or inf");
  if (std::isfinite(s.f3) && !std::isfinite(s.f4)) fail("finite f3 requires finite f4");
  if (!positive_or_inf(s.f5) || !positive_or_inf(s.f6)) fail("f5/f6 must be > 0 or inf");
  if (std::isfinite(s.f5) != std::isfinite(s.f6)) fail("f5 and f6 must both be finite or both inf");
  for (const double q : {s.q4, s.q5, s.q6}) {
    if (!(q > 0.0) || !std::isfinite(q)) fail("quality factors must be finite and > 0");
  }
}

cplx Biquad::response(double theta) const {
  const cplx e = std::exp(cplx(0.0, -theta));
  return (b0 + (b1 + b2 * e) * e) / (1.0 + (a1 + a2 * e) * e);
}

bool Biquad::stable() const {
  // Jury conditions for a monic quadratic: both roots strictly inside |z| = 1.
  return std::abs(a2) < 1.0 && std::abs(a1) < 1.0 + a2;
}

double analog_gain(const WeightingSpec& spec, double f) {
  validate(spec);
  if (f < 0.0) throw Error(ErrorCode::invalid_argument, "analog_gain: f must be >= 0");
  const cplx s(0.0, kTwoPi * f);
  cplx h(1.0, 0.0);
  for (const auto& st : analog_stages(spec)) h *= st.eval(s);
  return std::abs(h);
}

DigitalWeighting design_filter(const WeightingSpec& spec, double rate, Discretization method) {
  validate(spec);
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw Error(ErrorCode::invalid_argument, "design_filter: rate must be > 0");
  }
  DigitalWeighting out{spec, rate, method, {}};
  for (const auto& st : analog_stages(spec)) {
    // Sampling already band-limits when the lowpass corner sits at/above Nyquist.
    if (st.role == StageRole::band_lowpass && spec.f2 >= rate / 2.0) continue;
    std::optional<Biquad> bq;
    if (method == Discretization::magnitude_matched && st.lowpass_type()) {
      bq = magnitude_matched(st, rate);
    }
    if (!bq) bq = bilinear(st, rate);
    if (!bq->stable()) {
      throw Error(ErrorCode::unstable_design,
                  std::string("unstable stage for ") + to_string(spec.kind) + " at " +
                      std::to_string(rate) + " Hz");
    }
    out.stages.push_back(*bq);
  }
  return out;
}

double digital_gain(const DigitalWeighting& filter, double f) {
  const double theta = kTwoPi * f / filter.rate;
  double g = 1.0;
  for (const auto& st : filter.stages) g *= std::abs(st.response(theta));
  return g;
}

std::vector<double> apply_weighting(std::span<const double> samples, const DigitalWeighting& filter,
                                    double rate) {
  if (!same_rate(rate, filter.rate)) {
    throw Error(ErrorCode::rate_mismatch, "filter designed for " + std::to_string(filter.rate) +
                                              " Hz applied to " + std::to_string(rate) +
                                              " Hz samples");
  }
  std::vector<double> y(samples.begin(), samples.end());
  for (const auto& st : filter.stages) {
    // Transposed direct form II.
    double s1 = 0.0;
    double s2 = 0.0;
    for (double& v : y) {
      const double in = v;
      const double out = st.b0 * in + s1;
      s1 = st.b1 * in - st.a1 * out + s2;
      s2 = st.b2 * in - st.a2 * out;
      v = out;
    }
  }
  return y;
}

WeightingSpec parse_weighting_spec(std::istream& in, const std::string& source_path) {
  using nlohmann::json;
  WeightingSpec spec;
  try {
    const json doc = json::parse(in);
    const auto kind = doc.value("kind", std::string("Custom"));
    if (kind == "Wa_horizontal") {
      spec = WeightingSpec::wa_horizontal();
    } else if (kind == "Wk_vertical") {
      spec = WeightingSpec::wk_vertical();
    } else if (kind == "Wf_sickness") {
      spec = WeightingSpec::wf_sickness();
    } else if (kind != "Custom") {
      throw Error(ErrorCode::invalid_argument, "unknown weighting kind '" + kind + "'");
    }
    const std::pair<const char*, double*> corners[] = {{"f1", &spec.f1}, {"f2", &spec.f2},
                                                       {"f3", &spec.f3}, {"f4", &spec.f4},
                                                       {"f5", &spec.f5}, {"f6", &spec.f6}};
    for (const auto& [key, dst] : corners) {
      if (auto v = read_corner(doc, key)) *dst = *v;
    }
    const std::pair<const char*, double*> qs[] = {{"Q4", &spec.q4}, {"Q5", &spec.q5}, {"Q6", &spec.q6}};
    for (const auto& [key, dst] : qs) {
      if (doc.contains(key)) *dst = doc.at(key).get<double>();
    }
    if (kind == "Custom") spec.kind = WeightingKind::custom;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_argument, source_path + ": " + e.what());
  } catch (const Error& e) {
    throw Error(e.code(), source_path + ": " + e.what());
  }
  try {
    validate(spec);
  } catch (const Error& e) {
    throw Error(e.code(), source_path + ": " + e.what());
  }
  return spec;
}

WeightingSpec load_weighting_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open weighting file " + path.string());
  return parse_weighting_spec(in, path.string());
}

}  // namespace ridecomfort
