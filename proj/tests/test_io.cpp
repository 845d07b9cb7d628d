#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "ridecomfort/error.hpp"
#include "ridecomfort/io.hpp"

using namespace ridecomfort;
using oracle::error_code_of;
namespace fs = std::filesystem;

namespace {

TripReport sample_report() {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  const auto report = [&](double km) {
    ComfortReport r;
    r.a_w = {u(gen), u(gen), u(gen)};
    r.a_v = u(gen) / 3.0;
    r.labels = classify_comfort(r.a_v);
    r.msdv = {u(gen) * 10, u(gen), 1.0 / 3.0};
    r.n_events = {3, 0, 17};
    r.duration_s = 217.0;
    r.per_km = PerKm{km, {r.msdv[0] / km, r.msdv[1] / km, r.msdv[2] / km}, {3 / km, 0, 17 / km}};
    return r;
  };
  TripReport t;
  t.driver_id = "D1";
  t.car_id = "C2";
  t.sections.push_back({{"S1", 0.0, 217.0, 3.7, {}}, report(3.7)});
  t.sections.push_back({{"S2", 217.0, 637.0, 5.2, {}}, report(5.2)});
  t.whole = report(8.9);
  return t;
}

void check_same(const ComfortReport& a, const ComfortReport& b) {
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a.a_w[i] == b.a_w[i]);
    CHECK(a.msdv[i] == b.msdv[i]);
    CHECK(a.n_events[i] == b.n_events[i]);
    CHECK(a.per_km->msdv[i] == b.per_km->msdv[i]);
    CHECK(a.per_km->n_events[i] == b.per_km->n_events[i]);
  }
  CHECK(a.a_v == b.a_v);
  CHECK(a.labels == b.labels);
  CHECK(a.duration_s == b.duration_s);
  CHECK(a.per_km->distance_km == b.per_km->distance_km);
}

void check_same(const TripReport& a, const TripReport& b) {
  CHECK(a.driver_id == b.driver_id);
  CHECK(a.car_id == b.car_id);
  REQUIRE(a.sections.size() == b.sections.size());
  for (std::size_t i = 0; i < a.sections.size(); ++i) {
    CHECK(a.sections[i].section.label == b.sections[i].section.label);
    CHECK(a.sections[i].section.t_start == b.sections[i].section.t_start);
    CHECK(a.sections[i].section.t_end == b.sections[i].section.t_end);
    check_same(a.sections[i].report, b.sections[i].report);
  }
  check_same(a.whole, b.whole);
}

}  // namespace

TEST_CASE("numbers use 9 significant digits") {
  CHECK(format_number(1.0 / 3.0) == "0.333333333");
  CHECK(format_number(217.0) == "217");
  CHECK(format_number(1.23456789012e-7) == "1.23456789e-07");
  CHECK(round_to_output(2.0 / 3.0) == 0.666666667);
}

TEST_CASE("JSON and CSV reports carry identical numbers") {
  const auto r = sample_report();
  const auto from_json = report_from_json(report_to_json(r));
  const auto from_csv = report_from_csv(report_to_csv(r));
  check_same(from_json, from_csv);
  CHECK(from_json.whole.a_w[0] == round_to_output(r.whole.a_w[0]));
  // A second pass is a fixed point.
  CHECK(report_to_json(from_json) == report_to_json(r));
  CHECK(report_to_csv(from_csv) == report_to_csv(r));
}

TEST_CASE("report field names carry units") {
  const auto json = report_to_json(sample_report());
  for (const char* key : {"a_wx_ms2", "A_v_ms2", "msdv_z_ms15", "n_x", "n_z_per_km",
                          "msdv_y_ms15_per_km", "distance_km", "duration_s", "labels"}) {
    CHECK(json.find(std::string("\"") + key + "\"") != std::string::npos);
  }
  const auto csv = report_to_csv(sample_report());
  CHECK(csv.rfind("scope,label,driver_id,car_id,t_start_s,t_end_s,duration_s,distance_km,", 0) == 0);
  CHECK(csv.find("section,S2,D1,C2,217,637,") != std::string::npos);
}

TEST_CASE("malformed report input") {
  CHECK(error_code_of([] { report_from_json("{\"driver_id\": 1}"); }) == ErrorCode::malformed_row);
  CHECK(error_code_of([] { report_from_json("not json"); }) == ErrorCode::malformed_row);
  auto csv = report_to_csv(sample_report());
  csv.replace(csv.find("section,S1,D1,C2,0,"), 19, "section,S1,D1,C2,x,");
  try {
    report_from_csv(csv, "r.csv");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::malformed_row);
    CHECK(std::string(e.what()).find("r.csv:2") != std::string::npos);
  }
  CHECK(error_code_of([] { grade_from_string("meh"); }) == ErrorCode::invalid_argument);
}

TEST_CASE("atomic writes and load_report dispatch") {
  const auto dir = fs::temp_directory_path() / "ridecomfort_test_io";
  fs::remove_all(dir);
  const auto r = sample_report();
  write_file_atomic(dir / "nested" / "r.json", report_to_json(r));
  write_file_atomic(dir / "nested" / "r.csv", report_to_csv(r));
  CHECK_FALSE(fs::exists(dir / "nested" / "r.json.tmp"));
  check_same(load_report(dir / "nested" / "r.json"), load_report(dir / "nested" / "r.csv"));
  write_file_atomic(dir / "nested" / "r.json", "overwritten");
  CHECK(read_file(dir / "nested" / "r.json") == "overwritten");
  CHECK(error_code_of([&] { read_file(dir / "missing.json"); }) == ErrorCode::io);
  fs::remove_all(dir);
}

TEST_CASE("PSD, spectrogram and KDE CSV layout") {
  PsdEstimate p{{0.0, 0.5, 1.0}, {1.0, 2.0, 3.0}, 1.0, 1};
  const auto psd = psd_to_csv({{"x", p}, {"z", p}});
  CHECK(psd == "axis\\freq_hz,0,0.5,1\nx,1,2,3\nz,1,2,3\n");

  Spectrogram sg{{0.5, 1.5}, {0.0, 1.0}, {{-120.0, -3.0}, {-1.0, 0.25}}};
  CHECK(spectrogram_to_csv(sg) == "time_s\\freq_hz,0,1\n0.5,-120,-3\n1.5,-1,0.25\n");

  KdeGrid g1{{{0.0, 1.0}}, {0.25, 0.75}, {0.1}};
  CHECK(kde_to_csv(g1, "v") == "v,density\n0,0.25\n1,0.75\n");
  KdeGrid g2{{{0.0, 1.0}, {5.0, 6.0, 7.0}}, {1, 2, 3, 4, 5, 6}, {0.1, 0.2}};
  CHECK(kde_to_csv(g2, "mx", "my") == "my\\mx,0,1\n5,1,4\n6,2,5\n7,3,6\n");
}

TEST_CASE("comparison outputs") {
  ComparisonMatrix m;
  m.entity_kind = EntityKind::driver;
  m.epsilon = 0.05;
  m.entities = {"A", "B"};
  m.pairs = {{"A", "B", Metric::a_v, 25.0, 50.0, 25.0, 4}};
  CHECK(comparison_to_csv({m}) ==
        "entity_kind,i,j,metric,pct_i,pct_j,pct_nd,epsilon\ndriver,A,B,A_v,25,50,25,0.05\n");
  const auto json = comparison_to_json({m});
  CHECK(json.find("\"pct_nd\": 25.0") != std::string::npos);
  CHECK(json.find("\"situations\": 4") != std::string::npos);
}
