#include "ridecomfort/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ridecomfort/error.hpp"

namespace ridecomfort {

namespace {

using nlohmann::ordered_json;

constexpr const char* kAxisSuffix[] = {"x", "y", "z"};

const char* const kCsvColumns[] = {
    "scope",          "label",          "driver_id",      "car_id",
    "t_start_s",      "t_end_s",        "duration_s",     "distance_km",
    "a_wx_ms2",       "a_wy_ms2",       "a_wz_ms2",       "A_v_ms2",
    "msdv_x_ms15",    "msdv_y_ms15",    "msdv_z_ms15",    "n_x",
    "n_y",            "n_z",            "msdv_x_ms15_per_km", "msdv_y_ms15_per_km",
    "msdv_z_ms15_per_km", "n_x_per_km", "n_y_per_km",     "n_z_per_km",
    "labels",
};
constexpr std::size_t kCsvColumnCount = std::size(kCsvColumns);

ordered_json report_fields(const ComfortReport& r) {
  ordered_json j;
  j["duration_s"] = round_to_output(r.duration_s);
  for (std::size_t a = 0; a < 3; ++a) {
    j[std::string("a_w") + kAxisSuffix[a] + "_ms2"] = round_to_output(r.a_w[a]);
  }
  j["A_v_ms2"] = round_to_output(r.a_v);
  auto labels = ordered_json::array();
  for (auto g : r.labels) labels.push_back(to_string(g));
  j["labels"] = labels;
  for (std::size_t a = 0; a < 3; ++a) {
    j[std::string("msdv_") + kAxisSuffix[a] + "_ms15"] = round_to_output(r.msdv[a]);
  }
  for (std::size_t a = 0; a < 3; ++a) j[std::string("n_") + kAxisSuffix[a]] = r.n_events[a];
  if (r.per_km) {
    j["distance_km"] = round_to_output(r.per_km->distance_km);
    for (std::size_t a = 0; a < 3; ++a) {
      j[std::string("msdv_") + kAxisSuffix[a] + "_ms15_per_km"] = round_to_output(r.per_km->msdv[a]);
    }
    for (std::size_t a = 0; a < 3; ++a) {
      j[std::string("n_") + kAxisSuffix[a] + "_per_km"] = round_to_output(r.per_km->n_events[a]);
    }
  }
  return j;
}

ComfortReport report_from_fields(const ordered_json& j) {
  ComfortReport r;
  r.duration_s = j.at("duration_s").get<double>();
  for (std::size_t a = 0; a < 3; ++a) {
    r.a_w[a] = j.at(std::string("a_w") + kAxisSuffix[a] + "_ms2").get<double>();
    r.msdv[a] = j.at(std::string("msdv_") + kAxisSuffix[a] + "_ms15").get<double>();
    r.n_events[a] = j.at(std::string("n_") + kAxisSuffix[a]).get<std::size_t>();
  }
  r.a_v = j.at("A_v_ms2").get<double>();
  for (const auto& l : j.at("labels")) r.labels.push_back(grade_from_string(l.get<std::string>()));
  if (j.contains("distance_km")) {
    PerKm p;
    p.distance_km = j.at("distance_km").get<double>();
    for (std::size_t a = 0; a < 3; ++a) {
      p.msdv[a] = j.at(std::string("msdv_") + kAxisSuffix[a] + "_ms15_per_km").get<double>();
      p.n_events[a] = j.at(std::string("n_") + kAxisSuffix[a] + "_per_km").get<double>();
    }
    r.per_km = p;
  }
  return r;
}

void append_csv_row(std::string& out, const std::string& scope, const std::string& label,
                    const TripReport& trip, double t_start, double t_end, const ComfortReport& r) {
  std::vector<std::string> cells = {scope,
                                    label,
                                    trip.driver_id,
                                    trip.car_id,
                                    format_number(t_start),
                                    format_number(t_end),
                                    format_number(r.duration_s),
                                    r.per_km ? format_number(r.per_km->distance_km) : ""};
  for (double v : r.a_w) cells.push_back(format_number(v));
  cells.push_back(format_number(r.a_v));
  for (double v : r.msdv) cells.push_back(format_number(v));
  for (auto n : r.n_events) cells.push_back(std::to_string(n));
  for (std::size_t a = 0; a < 3; ++a) cells.push_back(r.per_km ? format_number(r.per_km->msdv[a]) : "");
  for (std::size_t a = 0; a < 3; ++a) {
    cells.push_back(r.per_km ? format_number(r.per_km->n_events[a]) : "");
  }
  std::string labels;
  for (std::size_t i = 0; i < r.labels.size(); ++i) {
    if (i) labels += ';';
    labels += to_string(r.labels[i]);
  }
  cells.push_back(labels);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_cell(const std::string& cell, const std::string& source, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::malformed_row,
                source + ":" + std::to_string(line) + ": bad number '" + cell + "'");
  }
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

double round_to_output(double v) { return std::stod(format_number(v)); }

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::io, "failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ComfortGrade grade_from_string(const std::string& label) {
  for (auto g : {ComfortGrade::not_uncomfortable, ComfortGrade::a_little_uncomfortable,
                 ComfortGrade::fairly_uncomfortable, ComfortGrade::uncomfortable,
                 ComfortGrade::very_uncomfortable, ComfortGrade::extremely_uncomfortable}) {
    if (label == to_string(g)) return g;
  }
  throw Error(ErrorCode::invalid_argument, "unknown comfort label '" + label + "'");
}

std::string report_to_json(const TripReport& report) {
  ordered_json doc;
  doc["driver_id"] = report.driver_id;
  doc["car_id"] = report.car_id;
  doc["sections"] = ordered_json::array();
  for (const auto& s : report.sections) {
    ordered_json j;
    j["label"] = s.section.label;
    j["t_start_s"] = round_to_output(s.section.t_start);
    j["t_end_s"] = round_to_output(s.section.t_end);
    j.update(report_fields(s.report));
    doc["sections"].push_back(std::move(j));
  }
  doc["trip"] = report_fields(report.whole);
  return doc.dump(2) + "\n";
}

std::string report_to_csv(const TripReport& report) {
  std::string out;
  for (std::size_t i = 0; i < kCsvColumnCount; ++i) {
    if (i) out += ',';
    out += kCsvColumns[i];
  }
  out += '\n';
  for (const auto& s : report.sections) {
    append_csv_row(out, "section", s.section.label, report, s.section.t_start, s.section.t_end,
                   s.report);
  }
  append_csv_row(out, "trip", "", report, 0.0, report.whole.duration_s, report.whole);
  return out;
}

TripReport report_from_json(const std::string& text, const std::string& source) {
  try {
    const auto doc = ordered_json::parse(text);
    TripReport r;
    r.driver_id = doc.at("driver_id").get<std::string>();
    r.car_id = doc.at("car_id").get<std::string>();
    for (const auto& j : doc.at("sections")) {
      SectionReport s;
      s.section.label = j.at("label").get<std::string>();
      s.section.t_start = j.at("t_start_s").get<double>();
      s.section.t_end = j.at("t_end_s").get<double>();
      s.report = report_from_fields(j);
      if (s.report.per_km) s.section.distance_km = s.report.per_km->distance_km;
      r.sections.push_back(std::move(s));
    }
    r.whole = report_from_fields(doc.at("trip"));
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::malformed_row, source + ": " + e.what());
  }
}

TripReport report_from_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  TripReport trip;
  bool header = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c = split(line, ',');
    if (c.size() != kCsvColumnCount) {
      throw Error(ErrorCode::malformed_row, source + ":" + std::to_string(line_no) + ": expected " +
                                                std::to_string(kCsvColumnCount) + " columns");
    }
    if (header) {
      header = false;
      continue;
    }
    const auto num = [&](std::size_t i) { return parse_cell(c[i], source, line_no); };
    ComfortReport r;
    r.duration_s = num(6);
    for (std::size_t a = 0; a < 3; ++a) {
      r.a_w[a] = num(8 + a);
      r.msdv[a] = num(12 + a);
      r.n_events[a] = static_cast<std::size_t>(num(15 + a));
    }
    r.a_v = num(11);
    if (!c[7].empty()) {
      PerKm p;
      p.distance_km = num(7);
      for (std::size_t a = 0; a < 3; ++a) {
        p.msdv[a] = num(18 + a);
        p.n_events[a] = num(21 + a);
      }
      r.per_km = p;
    }
    for (const auto& l : split(c[24], ';')) {
      if (!l.empty()) r.labels.push_back(grade_from_string(l));
    }
    trip.driver_id = c[2];
    trip.car_id = c[3];
    if (c[0] == "trip") {
      trip.whole = r;
    } else {
      SectionReport s;
      s.section.label = c[1];
      s.section.t_start = num(4);
      s.section.t_end = num(5);
      if (r.per_km) s.section.distance_km = r.per_km->distance_km;
      s.report = r;
      trip.sections.push_back(std::move(s));
    }
  }
  return trip;
}

TripReport load_report(const std::filesystem::path& path) {
  const auto text = read_file(path);
  if (path.extension() == ".csv") return report_from_csv(text, path.string());
  return report_from_json(text, path.string());
}

std::string psd_to_csv(const std::vector<std::pair<std::string, PsdEstimate>>& psds) {
  std::string out = "axis\\freq_hz";
  if (psds.empty()) return out + "\n";
  for (double f : psds.front().second.freqs) out += "," + format_number(f);
  out += '\n';
  for (const auto& [name, psd] : psds) {
    out += name;
    for (double p : psd.power) out += "," + format_number(p);
    out += '\n';
  }
  return out;
}

std::string spectrogram_to_csv(const Spectrogram& sg) {
  std::string out = "time_s\\freq_hz";
  for (double f : sg.freqs) out += "," + format_number(f);
  out += '\n';
  for (std::size_t c = 0; c < sg.times.size(); ++c) {
    out += format_number(sg.times[c]);
    for (double p : sg.power_db[c]) out += "," + format_number(p);
    out += '\n';
  }
  return out;
}

std::string kde_to_csv(const KdeGrid& grid, const std::string& x_name, const std::string& y_name) {
  std::string out;
  if (grid.dims() == 1) {
    out = x_name + ",density\n";
    for (std::size_t i = 0; i < grid.axes[0].size(); ++i) {
      out += format_number(grid.axes[0][i]) + "," + format_number(grid.at(i)) + "\n";
    }
    return out;
  }
  out = y_name + "\\" + x_name;
  for (double x : grid.axes[0]) out += "," + format_number(x);
  out += '\n';
  for (std::size_t j = 0; j < grid.axes[1].size(); ++j) {
    out += format_number(grid.axes[1][j]);
    for (std::size_t i = 0; i < grid.axes[0].size(); ++i) out += "," + format_number(grid.at(i, j));
    out += '\n';
  }
  return out;
}

std::string comparison_to_csv(const std::vector<ComparisonMatrix>& matrices) {
  std::string out = "entity_kind,i,j,metric,pct_i,pct_j,pct_nd,epsilon\n";
  for (const auto& m : matrices) {
    for (const auto& p : m.pairs) {
      out += std::string(to_string(m.entity_kind)) + "," + p.i + "," + p.j + "," +
             to_string(p.metric) + "," + format_number(p.pct_i_gt_j) + "," +
             format_number(p.pct_j_gt_i) + "," + format_number(p.pct_nondeterminant) + "," +
             format_number(m.epsilon) + "\n";
    }
  }
  return out;
}

std::string comparison_to_json(const std::vector<ComparisonMatrix>& matrices) {
  auto doc = ordered_json::array();
  for (const auto& m : matrices) {
    ordered_json jm;
    jm["entity_kind"] = to_string(m.entity_kind);
    jm["epsilon"] = round_to_output(m.epsilon);
    jm["entities"] = m.entities;
    jm["pairs"] = ordered_json::array();
    for (const auto& p : m.pairs) {
      ordered_json jp;
      jp["i"] = p.i;
      jp["j"] = p.j;
      jp["metric"] = to_string(p.metric);
      jp["pct_i"] = round_to_output(p.pct_i_gt_j);
      jp["pct_j"] = round_to_output(p.pct_j_gt_i);
      jp["pct_nd"] = round_to_output(p.pct_nondeterminant);
      jp["situations"] = p.situations;
      jm["pairs"].push_back(std::move(jp));
    }
    doc.push_back(std::move(jm));
  }
  return doc.dump(2) + "\n";
}

}  // namespace ridecomfort
