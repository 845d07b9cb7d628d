#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ridecomfort/density.hpp"
#include "ridecomfort/error.hpp"
#include "ridecomfort/synth.hpp"

using namespace ridecomfort;
using oracle::error_code_of;

namespace {

KdeConfig fixed(double hx, double hy = 1.0) {
  KdeConfig cfg;
  cfg.bandwidth = {hx, hy};
  return cfg;
}

std::pair<double, double> mode_of(const KdeGrid& g) {
  const auto it = std::max_element(g.density.begin(), g.density.end());
  const auto idx = static_cast<std::size_t>(it - g.density.begin());
  const std::size_t ny = g.axes[1].size();
  return {g.axes[0][idx / ny], g.axes[1][idx % ny]};
}

TripInput synth_trip(double gain, const std::string& driver) {
  auto p = TripProfile::single(Archetype::interurban, 600.0, 8.0, 5).with_style_gain(gain);
  p.driver_id = driver;
  auto [trace, manifest] = gen_trip(p);
  return {std::move(trace), std::move(manifest)};
}

}  // namespace

TEST_CASE("single-sample 1-D KDE peaks at 1/(h sqrt(2 pi))") {
  for (double h : {0.05, 0.3, 2.0}) {
    const std::vector<double> one{1.7};
    const auto g = kde_1d(one, fixed(h));
    CHECK(g.bandwidth_used[0] == h);
    CHECK(std::abs(g.peak() - 1.0 / (h * std::sqrt(2.0 * oracle::kPi))) <= 1e-9);
  }
}

TEST_CASE("1-D KDE equals the kernel sum evaluated directly") {
  const std::vector<double> xs{-0.4, 0.1, 0.15, 1.2, 2.0};
  const double h = 0.37;
  const auto g = kde_1d(xs, fixed(h));
  for (std::size_t i = 0; i < g.axes[0].size(); ++i) {
    double ref = 0.0;
    for (double x : xs) ref += oracle::gauss(g.axes[0][i] - x, h);
    ref /= static_cast<double>(xs.size());
    CHECK(std::abs(g.at(i) - ref) <= 1e-12);
  }
}

TEST_CASE("n copies of one sample match n = 1") {
  GridAxis axis{-3.0, 3.0, 61};
  KdeConfig cfg = fixed(0.4);
  cfg.grid[0] = axis;
  const auto one = kde_1d(std::vector<double>{0.25}, cfg);
  const auto many = kde_1d(std::vector<double>(17, 0.25), cfg);
  for (std::size_t i = 0; i < one.density.size(); ++i) {
    CHECK(many.density[i] == doctest::Approx(one.density[i]).epsilon(1e-12));
  }
}

TEST_CASE("two symmetric samples give a symmetric density") {
  KdeConfig cfg = fixed(0.5);
  cfg.grid[0] = GridAxis{-4.0, 4.0, 81};
  const auto g = kde_1d(std::vector<double>{-1.0, 1.0}, cfg);
  const std::size_t n = g.axes[0].size();
  for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(g.at(i) - g.at(n - 1 - i)) <= 1e-12);
}

TEST_CASE("single-sample 2-D KDE peaks at 1/(2 pi hx hy)") {
  const std::vector<Point2> one{{0.8, 2.5}};
  const double hx = 0.2, hy = 0.7;
  const auto g = kde_2d(one, fixed(hx, hy));
  CHECK(std::abs(g.peak() - 1.0 / (2.0 * oracle::kPi * hx * hy)) <= 1e-9);
  const auto [mx, my] = mode_of(g);
  CHECK(mx == doctest::Approx(0.8));
  CHECK(my == doctest::Approx(2.5));
}

TEST_CASE("2-D density is symmetric for samples on y = x") {
  const std::vector<Point2> pts{{0.1, 0.1}, {0.5, 0.5}, {0.55, 0.55}, {1.3, 1.3}};
  KdeConfig cfg = fixed(0.3, 0.3);
  cfg.grid = {GridAxis{-1.0, 2.5, 36}, GridAxis{-1.0, 2.5, 36}};
  const auto g = kde_2d(pts, cfg);
  for (std::size_t i = 0; i < 36; ++i) {
    for (std::size_t j = 0; j < 36; ++j) CHECK(std::abs(g.at(i, j) - g.at(j, i)) <= 1e-12);
  }
}

TEST_CASE("wide-grid integrals are 1") {
  std::mt19937_64 gen(31);
  std::normal_distribution<double> nd(1.0, 0.5);
  std::vector<double> xs(40);
  std::vector<Point2> pts(40);
  for (std::size_t i = 0; i < 40; ++i) {
    xs[i] = nd(gen);
    pts[i] = {nd(gen), 3.0 * nd(gen)};
  }
  const auto g1 = kde_1d(xs);
  CHECK(g1.integral() == doctest::Approx(1.0).epsilon(0.01));

  // Five bandwidths of padding around the data.
  const double hx = bandwidth_silverman(xs);
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  KdeConfig cfg;
  cfg.grid[0] = GridAxis{*lo - 5 * hx, *hi + 5 * hx, 201};
  CHECK(kde_1d(xs, cfg).integral() == doctest::Approx(1.0).epsilon(0.01));

  const auto g2 = kde_2d(pts);
  CHECK(g2.integral() == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("Silverman bandwidth against a hand calculation") {
  // {0, 2}: sd = sqrt(2); quartiles 0.5 and 1.5 so IQR = 1; min(sqrt 2, 1/1.34) = 1/1.34.
  const std::vector<double> two{0.0, 2.0};
  const double expected = 0.9 * (1.0 / 1.34) * std::pow(2.0, -0.2);
  CHECK(std::abs(bandwidth_silverman(two) - expected) <= 1e-9);
  CHECK(std::abs(bandwidth_silverman(two) - 0.58469813952724747) <= 1e-9);

  // {1, 2, 3, 4, 100}: sd large, IQR = 4 - 2 = 2, so the IQR branch decides.
  const std::vector<double> five{1, 2, 3, 4, 100};
  CHECK(std::abs(bandwidth_silverman(five) - 0.9 * (2.0 / 1.34) * std::pow(5.0, -0.2)) <= 1e-9);

  // {0, 0, 0, 1}: IQR = 0.25, sd = 0.5.
  const std::vector<double> lumpy{0, 0, 0, 1};
  CHECK(std::abs(bandwidth_silverman(lumpy) - 0.9 * (0.25 / 1.34) * std::pow(4.0, -0.2)) <= 1e-9);

  // IQR = 0 falls back to sd.
  const std::vector<double> spike{0, 0, 0, 0, 0, 10};
  const double sd = std::sqrt((5 * (10.0 / 6) * (10.0 / 6) + (50.0 / 6) * (50.0 / 6)) / 5.0);
  CHECK(std::abs(bandwidth_silverman(spike) - 0.9 * sd * std::pow(6.0, -0.2)) <= 1e-9);
}

TEST_CASE("Silverman bandwidth is scale-covariant and shift-invariant") {
  std::mt19937_64 gen(8);
  std::lognormal_distribution<double> ln;
  std::vector<double> xs(57);
  for (auto& v : xs) v = ln(gen);
  const double h = bandwidth_silverman(xs);
  for (double c : {0.01, 3.0, 1000.0}) {
    std::vector<double> ys(xs);
    for (auto& v : ys) v = c * v + 5.0;
    CHECK(bandwidth_silverman(ys) == doctest::Approx(c * h).epsilon(1e-9));
  }
}

TEST_CASE("quantile convention") {
  CHECK(quantile_linear({3, 1, 2, 4}, 0.25) == doctest::Approx(1.75));
  CHECK(quantile_linear({3, 1, 2, 4}, 0.0) == 1.0);
  CHECK(quantile_linear({3, 1, 2, 4}, 1.0) == 4.0);
  CHECK(quantile_linear({5}, 0.5) == 5.0);
}

TEST_CASE("KDE errors") {
  CHECK(error_code_of([] { bandwidth_silverman(std::vector<double>(5, 1.0)); }) ==
        ErrorCode::degenerate_bandwidth);
  CHECK(error_code_of([] { kde_1d(std::vector<double>(5, 1.0)); }) == ErrorCode::degenerate_bandwidth);
  CHECK(error_code_of([] { kde_1d(std::vector<double>{}); }) == ErrorCode::empty_sample_set);
  CHECK(error_code_of([] { kde_2d(std::vector<Point2>{}); }) == ErrorCode::empty_sample_set);
  CHECK(error_code_of([] { kde_1d(std::vector<double>{1.0}, fixed(-1.0)); }) ==
        ErrorCode::invalid_argument);
  KdeConfig bad_grid = fixed(1.0);
  bad_grid.grid[0] = GridAxis{1.0, 1.0, 10};
  CHECK(error_code_of([&] { kde_1d(std::vector<double>{1.0}, bad_grid); }) == ErrorCode::invalid_argument);
}

TEST_CASE("KDE is invariant under sample order") {
  std::vector<Point2> pts;
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int i = 0; i < 30; ++i) pts.push_back({u(gen), u(gen)});
  const auto a = kde_2d(pts);
  std::shuffle(pts.begin(), pts.end(), gen);
  const auto b = kde_2d(pts);
  CHECK(a.density == b.density);
}

TEST_CASE("windowed MSDV samples and groups") {
  const auto filters = FilterSet::standard(100.0);
  const MetricsConfig cfg;
  const std::vector<TripInput> trips{synth_trip(1.0, "calm"), synth_trip(1.5, "aggressive")};

  SUBCASE("windows fully inside sections") {
    const auto samples = msdv_window_samples(trips, filters, cfg, GroupBy::driver);
    REQUIRE(samples.size() == 2);
    CHECK(samples.at("calm").size() == 600 * 100 / 1024);
    const auto& calm = samples.at("calm");
    const auto& aggr = samples.at("aggressive");
    for (std::size_t i = 0; i < calm.size(); ++i) {
      CHECK(aggr[i].x == doctest::Approx(1.5 * calm[i].x).epsilon(1e-9));
      CHECK(aggr[i].y == doctest::Approx(1.5 * calm[i].y).epsilon(1e-9));
    }
    const auto all = msdv_window_samples(trips, filters, cfg, GroupBy::all);
    CHECK(all.at("all").size() == 2 * calm.size());
    const auto pairs = msdv_window_samples(trips, filters, cfg, GroupBy::driver_car);
    CHECK(pairs.count("calm/C1") == 1);
  }
  SUBCASE("aggressive group's mode sits at larger MSDV") {
    const auto grids = msdv_density(trips, filters, cfg, GroupBy::driver);
    const auto [cx, cy] = mode_of(grids.at("calm"));
    const auto [ax, ay] = mode_of(grids.at("aggressive"));
    CHECK(ax > cx);
    CHECK(ay > cy);
  }
  SUBCASE("identical trips in two groups give identical grids") {
    const std::vector<TripInput> twins{synth_trip(1.0, "A"), synth_trip(1.0, "B")};
    const auto grids = msdv_density(twins, filters, cfg, GroupBy::driver);
    CHECK(grids.at("A").density == grids.at("B").density);
    CHECK(grids.at("A").axes == grids.at("B").axes);
  }
  SUBCASE("one window gives the single-sample peak") {
    auto p = TripProfile::single(Archetype::highway, 10.24, 0.2, 3);
    auto [trace, manifest] = gen_trip(p);
    const std::vector<TripInput> one{{trace, manifest}};
    KdeConfig kde = fixed(0.05, 0.08);
    const auto grids = msdv_density(one, filters, cfg, GroupBy::section, kde);
    REQUIRE(grids.size() == 1);
    CHECK(std::abs(grids.begin()->second.peak() - 1.0 / (2.0 * oracle::kPi * 0.05 * 0.08)) <= 1e-9);
  }
  SUBCASE("a group with a single window cannot use the Silverman rule") {
    auto p = TripProfile::single(Archetype::highway, 10.24, 0.2, 3);
    auto [trace, manifest] = gen_trip(p);
    const std::vector<TripInput> one{{trace, manifest}};
    CHECK(error_code_of([&] { msdv_density(one, filters, cfg, GroupBy::section); }) ==
          ErrorCode::degenerate_bandwidth);
  }
}

TEST_CASE("group names round-trip") {
  for (auto g : {GroupBy::section, GroupBy::driver, GroupBy::car, GroupBy::driver_car, GroupBy::all}) {
    CHECK(group_by_from_string(to_string(g)) == g);
  }
  CHECK(error_code_of([] { group_by_from_string("road"); }) == ErrorCode::invalid_argument);
}
