#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "ridecomfort/error.hpp"
#include "ridecomfort/weighting.hpp"

using namespace ridecomfort;
using oracle::error_code_of;
using cd = std::complex<double>;

namespace {

// Cascade magnitude written out factor by factor; corners at infinity drop out.
double cascade_oracle(const WeightingSpec& p, double f) {
  const cd s(0.0, 2.0 * oracle::kPi * f);
  const double w1 = 2.0 * oracle::kPi * p.f1;
  const double w2 = 2.0 * oracle::kPi * p.f2;
  const double w3 = 2.0 * oracle::kPi * p.f3;
  const double w4 = 2.0 * oracle::kPi * p.f4;
  const double w5 = 2.0 * oracle::kPi * p.f5;
  const double w6 = 2.0 * oracle::kPi * p.f6;
  const double r2 = std::sqrt(2.0);
  cd h = 1.0;
  if (p.f1 > 0.0) h *= s * s / (s * s + r2 * w1 * s + w1 * w1);
  if (std::isfinite(p.f2)) h *= w2 * w2 / (s * s + r2 * w2 * s + w2 * w2);
  if (std::isfinite(p.f4)) {
    const cd numer = std::isfinite(p.f3) ? 1.0 + s / w3 : cd(1.0);
    h *= numer / (1.0 + s / (p.q4 * w4) + s * s / (w4 * w4));
  }
  if (std::isfinite(p.f5)) {
    h *= (s * s + s * w5 / p.q5 + w5 * w5) / (s * s + s * w6 / p.q6 + w6 * w6);
  }
  return std::abs(h);
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return out;
}

double measured_gain(const WeightingSpec& spec, double f, double rate) {
  const auto filt = design_filter(spec, rate);
  // At least 60 s or 12 periods of settling, then 8 whole periods of fit.
  const double settle = std::max(60.0, 12.0 / f);
  const auto n = static_cast<std::size_t>((settle + 8.0 / f) * rate);
  const auto x = oracle::sine(f, 1.0, rate, n);
  const auto y = apply_weighting(x, filt, rate);
  return oracle::fit_sine_amplitude(y, f, rate, static_cast<std::size_t>(settle * rate));
}

const WeightingSpec kBuiltIns[] = {WeightingSpec::wa_horizontal(), WeightingSpec::wk_vertical(),
                                   WeightingSpec::wf_sickness()};

}  // namespace

TEST_CASE("analog_gain agrees with the factor-by-factor cascade") {
  for (const auto& spec : kBuiltIns) {
    for (double f : log_spaced(0.005, 400.0, 60)) {
      CHECK(analog_gain(spec, f) == doctest::Approx(cascade_oracle(spec, f)).epsilon(1e-12));
    }
  }
}

TEST_CASE("analog_gain matches tabulated whole-body weighting values") {
  // ISO 2631-1 weighting tables (factor x 1000 in the standard).
  struct Row {
    double f;
    double gain;
  };
  const Row wk[] = {{0.5, 0.418}, {1.0, 0.482}, {2.0, 0.531}, {4.0, 0.967},
                    {6.3, 1.054}, {8.0, 1.036}, {16.0, 0.768}, {31.5, 0.405}};
  const Row wd[] = {{0.5, 0.853}, {1.0, 1.011}, {2.0, 0.890}, {4.0, 0.512}, {8.0, 0.253}};
  const Row wf[] = {{0.1, 0.695}, {0.125, 0.895}, {0.16, 1.006}, {0.2, 0.992},
                    {0.25, 0.854}, {0.315, 0.619}, {0.5, 0.224}};
  for (const auto& r : wk) CHECK(analog_gain(WeightingSpec::wk_vertical(), r.f) == doctest::Approx(r.gain).epsilon(0.005));
  for (const auto& r : wd) CHECK(analog_gain(WeightingSpec::wa_horizontal(), r.f) == doctest::Approx(r.gain).epsilon(0.005));
  for (const auto& r : wf) CHECK(analog_gain(WeightingSpec::wf_sickness(), r.f) == doctest::Approx(r.gain).epsilon(0.005));
}

TEST_CASE("analog_gain shape") {
  for (const auto& spec : kBuiltIns) CHECK(analog_gain(spec, 0.0) == 0.0);
  CHECK(analog_gain(WeightingSpec::wk_vertical(), 5000.0) < 1e-3);
  const double wf_peak = analog_gain(WeightingSpec::wf_sickness(), 0.16);
  CHECK(wf_peak == doctest::Approx(1.0).epsilon(0.01));
  CHECK(analog_gain(WeightingSpec::wf_sickness(), 1.0) < 0.1 * wf_peak);
  CHECK(error_code_of([] { analog_gain(WeightingSpec::wk_vertical(), -1.0); }) ==
        ErrorCode::invalid_argument);
}

TEST_CASE("digital response tracks the analog cascade within 5% up to a quarter of the rate") {
  for (double rate : {100.0, 200.0, 500.0}) {
    for (const auto& spec : kBuiltIns) {
      const auto filt = design_filter(spec, rate);
      for (double f : log_spaced(0.02, rate / 4.0, 40)) {
        const double a = analog_gain(spec, f);
        CHECK(std::abs(digital_gain(filt, f) - a) <= 0.05 * a);
      }
    }
  }
}

TEST_CASE("measured steady-state sine gain") {
  SUBCASE("Wk at 1 Hz") {
    const auto spec = WeightingSpec::wk_vertical();
    CHECK(measured_gain(spec, 1.0, 100.0) == doctest::Approx(analog_gain(spec, 1.0)).epsilon(0.05));
  }
  SUBCASE("Wa at 0.05 Hz") {
    const auto spec = WeightingSpec::wa_horizontal();
    CHECK(measured_gain(spec, 0.05, 100.0) ==
          doctest::Approx(analog_gain(spec, 0.05)).epsilon(0.05));
  }
  SUBCASE("pure band-limiter at its geometric mid-band") {
    WeightingSpec spec;
    spec.f1 = 0.4;
    spec.f2 = 100.0;
    const double f = std::sqrt(0.4 * 100.0);
    CHECK(measured_gain(spec, f, 400.0) == doctest::Approx(analog_gain(spec, f)).epsilon(0.05));
  }
}

TEST_CASE("every designed stage is stable") {
  for (auto method : {Discretization::magnitude_matched, Discretization::bilinear}) {
    for (double rate : {20.0, 50.0, 100.0, 1000.0}) {
      for (const auto& spec : kBuiltIns) {
        const auto filt = design_filter(spec, rate, method);
        for (const auto& st : filt.stages) CHECK(st.stable());
      }
    }
  }
}

TEST_CASE("bilinear design is exact at DC and close at low frequency") {
  const auto spec = WeightingSpec::wf_sickness();
  const auto filt = design_filter(spec, 100.0, Discretization::bilinear);
  CHECK(digital_gain(filt, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(digital_gain(filt, 0.16) == doctest::Approx(analog_gain(spec, 0.16)).epsilon(0.01));
}

TEST_CASE("identity weighting passes samples through") {
  const auto filt = design_filter(WeightingSpec::identity(), 100.0);
  CHECK(filt.stages.empty());
  const auto x = oracle::sine(3.0, 2.0, 100.0, 300);
  const auto y = apply_weighting(x, filt, 100.0);
  for (std::size_t k = 0; k < x.size(); ++k) CHECK(y[k] == x[k]);
}

TEST_CASE("filtering is linear and time-invariant") {
  const auto filt = design_filter(WeightingSpec::wk_vertical(), 100.0);
  std::mt19937_64 gen(3);
  std::normal_distribution<double> nd;
  std::vector<double> a(4000), b(4000);
  for (auto& v : a) v = nd(gen);
  for (auto& v : b) v = nd(gen);

  const auto zero = apply_weighting(std::vector<double>(500, 0.0), filt, 100.0);
  for (double v : zero) CHECK(v == 0.0);

  const auto ya = apply_weighting(a, filt, 100.0);
  const auto yb = apply_weighting(b, filt, 100.0);
  for (double c : {-3.0, 0.25, 17.0}) {
    std::vector<double> ca(a);
    for (auto& v : ca) v *= c;
    const auto yca = apply_weighting(ca, filt, 100.0);
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(std::abs(yca[k] - c * ya[k]) <= 1e-9 * std::max(1.0, std::abs(c * ya[k])));
    }
  }
  std::vector<double> sum(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) sum[k] = a[k] + b[k];
  const auto ysum = apply_weighting(sum, filt, 100.0);
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(ysum[k] == doctest::Approx(ya[k] + yb[k]).epsilon(1e-9));

  // A delayed input gives the same output, delayed.
  std::vector<double> delayed(a.size() + 37, 0.0);
  std::copy(a.begin(), a.end(), delayed.begin() + 37);
  const auto yd = apply_weighting(delayed, filt, 100.0);
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(yd[k + 37] == doctest::Approx(ya[k]).epsilon(1e-12));
}

TEST_CASE("rate mismatch is rejected") {
  const auto filt = design_filter(WeightingSpec::wk_vertical(), 100.0);
  const std::vector<double> x(10, 1.0);
  CHECK(error_code_of([&] { apply_weighting(x, filt, 200.0); }) == ErrorCode::rate_mismatch);
}

TEST_CASE("lowpass corner at or above Nyquist is dropped") {
  const auto filt = design_filter(WeightingSpec::wa_horizontal(), 100.0);
  const auto spec = WeightingSpec::wa_horizontal();
  CHECK(digital_gain(filt, 10.0) == doctest::Approx(analog_gain(spec, 10.0)).epsilon(0.05));
  const auto fine = design_filter(spec, 1000.0);
  CHECK(fine.stages.size() == filt.stages.size() + 1);
}

TEST_CASE("spec validation") {
  const auto bad = [](auto mutate) {
    auto s = WeightingSpec::wk_vertical();
    mutate(s);
    return error_code_of([&] { validate(s); });
  };
  CHECK(bad([](WeightingSpec& s) { s.f1 = -1.0; }) == ErrorCode::invalid_argument);
  CHECK(bad([](WeightingSpec& s) { s.f1 = 200.0; }) == ErrorCode::invalid_argument);
  CHECK(bad([](WeightingSpec& s) { s.q4 = 0.0; }) == ErrorCode::invalid_argument);
  CHECK(bad([](WeightingSpec& s) { s.f4 = kInf; }) == ErrorCode::invalid_argument);
  CHECK(bad([](WeightingSpec& s) { s.f6 = kInf; }) == ErrorCode::invalid_argument);
  CHECK(bad([](WeightingSpec& s) { s.f2 = NAN; }) == ErrorCode::invalid_argument);
  CHECK_FALSE(bad([](WeightingSpec&) {}).has_value());
  CHECK(error_code_of([] { design_filter(WeightingSpec::wk_vertical(), 0.0); }) ==
        ErrorCode::invalid_argument);
}

TEST_CASE("weighting spec files") {
  std::istringstream custom(R"({"kind": "Custom", "f1": 0.4, "f2": "inf", "f3": "inf",
                               "f4": 2, "Q4": 0.63})");
  const auto s = parse_weighting_spec(custom);
  CHECK(s.kind == WeightingKind::custom);
  CHECK(s.f1 == 0.4);
  CHECK(std::isinf(s.f2));
  CHECK(s.f4 == 2.0);
  CHECK(s.q4 == 0.63);
  CHECK(std::isinf(s.f5));

  std::istringstream named(R"({"kind": "Wk_vertical"})");
  const auto k = parse_weighting_spec(named);
  CHECK(analog_gain(k, 4.0) == analog_gain(WeightingSpec::wk_vertical(), 4.0));

  std::istringstream unknown(R"({"kind": "Wz"})");
  CHECK(error_code_of([&] { parse_weighting_spec(unknown); }) == ErrorCode::invalid_argument);
  std::istringstream bad_value(R"({"f1": "fast"})");
  CHECK(error_code_of([&] { parse_weighting_spec(bad_value); }) == ErrorCode::invalid_argument);
  std::istringstream inconsistent(R"({"f1": 5, "f2": 1})");
  CHECK(error_code_of([&] { parse_weighting_spec(inconsistent); }) == ErrorCode::invalid_argument);
}
