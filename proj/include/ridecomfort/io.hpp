#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ridecomfort/compare.hpp"
#include "ridecomfort/density.hpp"
#include "ridecomfort/metrics.hpp"
#include "ridecomfort/spectral.hpp"

namespace ridecomfort {

/// Numbers in every output file use 9 significant digits ("%.9g").
std::string format_number(double v);

/// Value after a round trip through format_number.
double round_to_output(double v);

/// Writes to a sibling temporary file, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

// Comfort reports. Field names carry units: a_wx_ms2, msdv_x_ms15, n_x, n_x_per_km, ...
std::string report_to_json(const TripReport& report);
std::string report_to_csv(const TripReport& report);
TripReport report_from_json(const std::string& text, const std::string& source = "<json>");
TripReport report_from_csv(const std::string& text, const std::string& source = "<csv>");
/// Dispatches on the extension (.json or .csv).
TripReport load_report(const std::filesystem::path& path);

ComfortGrade grade_from_string(const std::string& label);

/// Rows = axes, header row = frequencies.
std::string psd_to_csv(const std::vector<std::pair<std::string, PsdEstimate>>& psds);
/// First row = frequencies, first column = segment-centre times.
std::string spectrogram_to_csv(const Spectrogram& sg);
/// 1-D: x,density pairs. 2-D: header row = x grid, first column = y grid.
std::string kde_to_csv(const KdeGrid& grid, const std::string& x_name = "x",
                       const std::string& y_name = "y");

/// Long form: entity_kind,i,j,metric,pct_i,pct_j,pct_nd,epsilon
std::string comparison_to_csv(const std::vector<ComparisonMatrix>& matrices);
std::string comparison_to_json(const std::vector<ComparisonMatrix>& matrices);

}  // namespace ridecomfort
