#include "ridecomfort/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ridecomfort/compare.hpp"
#include "ridecomfort/density.hpp"
#include "ridecomfort/error.hpp"
#include "ridecomfort/ingest.hpp"
#include "ridecomfort/io.hpp"
#include "ridecomfort/metrics.hpp"
#include "ridecomfort/spectral.hpp"
#include "ridecomfort/synth.hpp"
#include "ridecomfort/weighting.hpp"

namespace ridecomfort {

namespace {

namespace fs = std::filesystem;

// Flag combinations CLI11 cannot express; reported like parse errors (exit 2).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOpts {
  double rate = kDefaultRate;
  std::string detrend = "mean";
  std::string discretization = "matched";
  std::string wa_spec;
  std::string wk_spec;
  std::string wf_spec;
  std::string out;
  double max_gap = kMaxGapSeconds;
};

struct MetricOpts {
  double kx = 1.0;
  double ky = 1.0;
  double kz = 1.0;
  double threshold = 2.0;
  std::size_t window_len = 1024;
  std::string count_mode = "excursion";
  double settle_skip = 0.0;
};

struct SpectralOpts {
  std::size_t welch_m = 1024;
  std::size_t welch_s = 512;
  std::string window = "hann";
};

struct KdeOpts {
  std::string group_by = "section";
  double hx = 0.0;
  double hy = 0.0;
  std::size_t grid_points = kDefaultGridPoints;
  CLI::Option* hx_opt = nullptr;
  CLI::Option* hy_opt = nullptr;
};

void add_common(CLI::App* app, CommonOpts& o, bool with_filters) {
  app->add_option("--rate", o.rate, "Analysis sample rate after resampling [Hz]")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app->add_option("--detrend", o.detrend, "Gravity removal: mean (per-axis mean subtraction) or none")
      ->capture_default_str()
      ->check(CLI::IsMember({"mean", "none"}));
  app->add_option("--max-gap", o.max_gap, "Largest tolerated gap between log rows [s]")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app->add_option("--out", o.out,
                  std::string("Output directory [path]; default $") + kOutDirEnv + " or '.'");
  if (!with_filters) return;
  app->add_option("--discretization", o.discretization,
                  "Weighting filter design: matched (magnitude-matched lowpass stages) or bilinear")
      ->capture_default_str()
      ->check(CLI::IsMember({"matched", "bilinear"}));
  app->add_option("--wa-spec", o.wa_spec, "Horizontal comfort weighting parameter file [JSON path]")
      ->check(CLI::ExistingFile);
  app->add_option("--wk-spec", o.wk_spec, "Vertical comfort weighting parameter file [JSON path]")
      ->check(CLI::ExistingFile);
  app->add_option("--wf-spec", o.wf_spec, "Motion sickness weighting parameter file [JSON path]")
      ->check(CLI::ExistingFile);
}

void add_metric(CLI::App* app, MetricOpts& o) {
  app->add_option("--kx", o.kx, "Comfort index multiplier for x [dimensionless]")->capture_default_str();
  app->add_option("--ky", o.ky, "Comfort index multiplier for y [dimensionless]")->capture_default_str();
  app->add_option("--kz", o.kz, "Comfort index multiplier for z [dimensionless]")->capture_default_str();
  app->add_option("--threshold", o.threshold, "Event threshold on raw |acceleration| [m/s^2]")
      ->capture_default_str();
  app->add_option("--window-len", o.window_len, "Samples per analysis window [samples]")
      ->capture_default_str();
  app->add_option("--count-mode", o.count_mode,
                  "Event counting: excursion (one per run above threshold) or sample")
      ->capture_default_str()
      ->check(CLI::IsMember({"excursion", "sample"}));
  app->add_option("--settle-skip", o.settle_skip,
                  "Initial weighted output excluded from a_w and MSDV [s]")
      ->capture_default_str();
}

void add_spectral(CLI::App* app, SpectralOpts& o) {
  app->add_option("--welch-m", o.welch_m, "Welch segment length M [samples]")->capture_default_str();
  app->add_option("--welch-s", o.welch_s, "Welch segment shift S [samples]")->capture_default_str();
  app->add_option("--window", o.window, "Taper: hann, hamming, blackman or rectangular")
      ->capture_default_str()
      ->check(CLI::IsMember({"hann", "hamming", "blackman", "rectangular"}));
}

void add_kde(CLI::App* app, KdeOpts& o) {
  app->add_option("--group-by", o.group_by, "Density groups: section, driver, car, driver_car or all")
      ->capture_default_str()
      ->check(CLI::IsMember({"section", "driver", "car", "driver_car", "all"}));
  o.hx_opt = app->add_option("--hx", o.hx,
                             "Bandwidth for windowed MSDV_x [m/s^1.5]; default Silverman rule")
                 ->check(CLI::PositiveNumber);
  o.hy_opt = app->add_option("--hy", o.hy,
                             "Bandwidth for windowed MSDV_y [m/s^1.5]; default Silverman rule")
                 ->check(CLI::PositiveNumber);
  app->add_option("--grid-points", o.grid_points, "Grid nodes per axis [count]")
      ->capture_default_str()
      ->check(CLI::Range(2, 4097));
}

fs::path out_dir(const CommonOpts& c) {
  if (!c.out.empty()) return c.out;
  if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') return env;
  return ".";
}

MetricsConfig metrics_config(const CommonOpts& c, const MetricOpts& m) {
  MetricsConfig cfg;
  cfg.kx = m.kx;
  cfg.ky = m.ky;
  cfg.kz = m.kz;
  cfg.event_threshold = m.threshold;
  cfg.window_len = m.window_len;
  cfg.rate = c.rate;
  cfg.count_mode = m.count_mode == "sample" ? CountMode::sample : CountMode::excursion;
  cfg.settle_skip_seconds = m.settle_skip;
  validate(cfg);
  return cfg;
}

WelchConfig welch_config(const SpectralOpts& s) {
  WelchConfig cfg{s.welch_m, s.welch_s, window_kind_from_string(s.window)};
  validate(cfg);
  return cfg;
}

KdeConfig kde_config(const KdeOpts& k) {
  KdeConfig cfg;
  if (k.hx_opt->count() > 0) cfg.bandwidth[0] = k.hx;
  if (k.hy_opt->count() > 0) cfg.bandwidth[1] = k.hy;
  cfg.default_points = k.grid_points;
  return cfg;
}

FilterSet make_filters(const CommonOpts& c) {
  const auto method =
      c.discretization == "bilinear" ? Discretization::bilinear : Discretization::magnitude_matched;
  const auto load = [](const std::string& path, WeightingSpec fallback) {
    return path.empty() ? fallback : load_weighting_spec(path);
  };
  const auto wa = design_filter(load(c.wa_spec, WeightingSpec::wa_horizontal()), c.rate, method);
  const auto wk = design_filter(load(c.wk_spec, WeightingSpec::wk_vertical()), c.rate, method);
  const auto wf = design_filter(load(c.wf_spec, WeightingSpec::wf_sickness()), c.rate, method);
  FilterSet f;
  f.comfort = {wa, wa, wk};
  f.sickness = {wf, wf, wf};
  return f;
}

AccelTrace load_trace(const fs::path& log_path, const CommonOpts& c) {
  const auto raw = parse_log_file(log_path);
  const auto mode = c.detrend == "none" ? DetrendMode::none : DetrendMode::mean_subtract;
  return detrend_gravity(resample_uniform(raw, c.rate, c.max_gap), mode);
}

TripInput load_trip(const fs::path& manifest_path, const std::string& log_override,
                    const CommonOpts& c) {
  auto manifest = parse_manifest_file(manifest_path);
  fs::path log_path = log_override;
  if (log_path.empty()) {
    log_path = manifest.log_ref;
    if (log_path.is_relative()) log_path = manifest_path.parent_path() / log_path;
  }
  return {load_trace(log_path, c), std::move(manifest)};
}

std::string sanitize(const std::string& label) {
  std::string s = label;
  for (char& ch : s) {
    const bool keep = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                      (ch >= '0' && ch <= '9') || ch == '-' || ch == '_' || ch == '.';
    if (!keep) ch = '_';
  }
  return s;
}

void emit(std::ostream& out, const fs::path& path, const std::string& content) {
  write_file_atomic(path, content);
  out << "wrote " << path.string() << "\n";
}

void write_report(std::ostream& out, const fs::path& dir, const TripReport& r,
                  const std::string& format) {
  if (format == "csv") {
    emit(out, dir / "report.csv", report_to_csv(r));
  } else {
    emit(out, dir / "report.json", report_to_json(r));
  }
}

std::string psd_csv(const AccelTrace& trace, const WelchConfig& welch) {
  std::vector<std::pair<std::string, PsdEstimate>> psds;
  for (Axis a : kAllAxes) psds.emplace_back(axis_name(a), welch_psd(trace.axis(a), trace.rate(), welch));
  return psd_to_csv(psds);
}

void write_spectrograms(std::ostream& out, const fs::path& dir, const AccelTrace& trace,
                        const WelchConfig& welch, std::size_t hop, const std::string& axis) {
  for (Axis a : kAllAxes) {
    if (axis != "all" && axis != axis_name(a)) continue;
    const auto sg = spectrogram(trace.axis(a), trace.rate(), welch, hop, trace.t0());
    emit(out, dir / (std::string("spectrogram_") + axis_name(a) + ".csv"), spectrogram_to_csv(sg));
  }
}

void write_kde(std::ostream& out, const fs::path& dir, std::span<const TripInput> trips,
              const FilterSet& filters, const MetricsConfig& cfg, const KdeOpts& k) {
  const auto grids =
      msdv_density(trips, filters, cfg, group_by_from_string(k.group_by), kde_config(k));
  for (const auto& [group, grid] : grids) {
    emit(out, dir / ("kde_" + sanitize(group) + ".csv"), kde_to_csv(grid, "msdv_x", "msdv_y"));
  }
}

AccelTrace trace_for_section(const TripInput& trip, const std::string& section) {
  if (section.empty()) return trip.trace;
  for (const auto& s : trip.manifest.sections) {
    if (s.label == section) return slice_section(trip.trace, s);
  }
  throw Error(ErrorCode::out_of_range, "section '" + section + "' not in manifest");
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw UsageError("bad number '" + cell + "' in list '" + text + "'");
    }
  }
  return out;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ride comfort and motion sickness metrics from 3-axis accelerometer logs",
               "ridecomfort"};
  app.require_subcommand(1);

  CommonOpts common;
  MetricOpts metric;
  SpectralOpts spectral;
  KdeOpts kde;
  KdeOpts report_kde;
  report_kde.group_by = "all";
  std::string format = "json";
  std::string manifest_path;
  std::string log_path;
  std::string section;
  std::vector<std::string> manifests;
  std::vector<std::string> reports;
  std::string entity = "driver";
  std::string metrics_list;
  double epsilon = 0.05;
  std::string sweep;
  std::size_t hop = 512;
  std::string axis = "all";

  const auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Report format: json or csv")
        ->capture_default_str()
        ->check(CLI::IsMember({"json", "csv"}));
  };
  const auto add_trip_inputs = [&](CLI::App* sub, bool required) {
    auto* m = sub->add_option("--manifest", manifest_path, "Trip manifest [JSON path]");
    if (required) m->required();
    sub->add_option("--log", log_path,
                    "Accelerometer log [CSV path]; default is the manifest's log_ref, "
                    "relative to the manifest directory");
  };

  auto* analyze = app.add_subcommand("analyze", "Per-section and whole-trip comfort report");
  add_trip_inputs(analyze, true);
  add_common(analyze, common, true);
  add_metric(analyze, metric);
  add_format(analyze);

  auto* compare = app.add_subcommand("compare", "Pairwise dominance matrix across drivers, cars or sections");
  compare->add_option("--reports", reports, "Comfort reports from analyze [JSON/CSV paths]");
  compare->add_option("--manifests", manifests, "Trip manifests to analyze first [JSON paths]");
  compare->add_option("--entity", entity, "Compared entity: driver, car or section")
      ->capture_default_str()
      ->check(CLI::IsMember({"driver", "car", "section"}));
  compare->add_option("--metrics", metrics_list,
                      "Comma-separated metrics (A_v,a_wx,a_wy,a_wz,msdv_x,msdv_y,msdv_z,n_x,n_y,n_z); "
                      "default all");
  compare->add_option("--epsilon", epsilon,
                      "Non-determinant band as a fraction of the larger value [dimensionless]")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 0.999999));
  compare->add_option("--sweep", sweep,
                      "Comma-separated epsilon list [dimensionless]; overrides --epsilon");
  add_common(compare, common, true);
  add_metric(compare, metric);
  add_format(compare);

  auto* psd = app.add_subcommand("psd", "Welch power spectral density per axis [(m/s^2)^2/Hz]");
  add_trip_inputs(psd, false);
  psd->add_option("--section", section, "Restrict to one manifest section [label]");
  add_common(psd, common, false);
  add_spectral(psd, spectral);

  auto* spec = app.add_subcommand("spectrogram", "Short-segment periodograms over time [dB]");
  add_trip_inputs(spec, false);
  spec->add_option("--section", section, "Restrict to one manifest section [label]");
  spec->add_option("--hop", hop, "Column spacing [samples]")->capture_default_str()->check(CLI::PositiveNumber);
  spec->add_option("--axis", axis, "Axis: x, y, z or all")
      ->capture_default_str()
      ->check(CLI::IsMember({"x", "y", "z", "all"}));
  add_common(spec, common, false);
  add_spectral(spec, spectral);

  auto* kde_cmd = app.add_subcommand("kde", "Bivariate density of windowed (MSDV_x, MSDV_y)");
  kde_cmd->add_option("--manifests", manifests, "Trip manifests [JSON paths]")->required();
  add_kde(kde_cmd, kde);
  add_common(kde_cmd, common, true);
  add_metric(kde_cmd, metric);

  std::string profile = "reference";
  double duration = 0.0;
  double distance = 10.0;
  std::uint64_t seed = 1;
  double style_gain = 1.0;
  std::string driver = "D1";
  std::string car = "C1";
  std::string stem = "trip";
  std::string signal;
  std::string amplitudes = "1";
  std::string frequencies = "1";
  std::string signal_axis = "x";
  auto* synth = app.add_subcommand("synth", "Seeded synthetic trip: <stem>.csv log and <stem>.json manifest");
  synth->add_option("--profile", profile, "Route: reference (four sections) or one archetype")
      ->capture_default_str()
      ->check(CLI::IsMember({"reference", "highway", "interurban", "curvy", "urban"}));
  auto* duration_opt = synth->add_option(
      "--duration", duration,
      "Trip length [s]; reference route scaled to it, archetype default 600, signal default 60");
  duration_opt->check(CLI::PositiveNumber);
  synth->add_option("--distance", distance, "Distance for an archetype or signal section [km]")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  synth->add_option("--seed", seed, "Random seed [integer]")->capture_default_str();
  synth->add_option("--style-gain", style_gain, "Driving style amplitude multiplier [dimensionless]")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  synth->add_option("--driver", driver, "Driver id")->capture_default_str();
  synth->add_option("--car", car, "Car id")->capture_default_str();
  synth->add_option("--stem", stem, "Output file stem")->capture_default_str();
  synth->add_option("--signal", signal,
                    "Test signal instead of a trip: sine, multisine, white_noise, step or excursion_train")
      ->check(CLI::IsMember({"sine", "multisine", "white_noise", "step", "excursion_train"}));
  synth->add_option("--amplitude", amplitudes, "Signal amplitudes, comma-separated [m/s^2]")
      ->capture_default_str();
  synth->add_option("--frequency", frequencies, "Signal frequencies, comma-separated [Hz]")
      ->capture_default_str();
  synth->add_option("--axis", signal_axis, "Signal axis: x, y or z")
      ->capture_default_str()
      ->check(CLI::IsMember({"x", "y", "z"}));
  add_common(synth, common, false);

  auto* report = app.add_subcommand("report", "All analyses of one trip written into one directory");
  add_trip_inputs(report, true);
  report->add_option("--hop", hop, "Spectrogram column spacing [samples]")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  add_common(report, common, true);
  add_metric(report, metric);
  add_spectral(report, spectral);
  add_kde(report, report_kde);
  add_format(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    const fs::path dir = out_dir(common);

    if (analyze->parsed()) {
      const auto trip = load_trip(manifest_path, log_path, common);
      const auto r = analyze_trip(trip.trace, trip.manifest, metrics_config(common, metric),
                                  make_filters(common));
      write_report(out, dir, r, format);
    } else if (compare->parsed()) {
      if (reports.empty() && manifests.empty()) throw UsageError("compare needs --reports or --manifests");
      const auto cfg = metrics_config(common, metric);
      std::vector<TripReport> trips;
      for (const auto& path : reports) trips.push_back(load_report(path));
      if (!manifests.empty()) {
        const auto filters = make_filters(common);
        for (const auto& path : manifests) {
          const auto trip = load_trip(path, "", common);
          trips.push_back(analyze_trip(trip.trace, trip.manifest, cfg, filters));
        }
      }
      std::vector<Metric> metrics;
      if (metrics_list.empty()) {
        metrics.assign(std::begin(kAllMetrics), std::end(kAllMetrics));
      } else {
        std::stringstream in(metrics_list);
        std::string name;
        while (std::getline(in, name, ',')) metrics.push_back(metric_from_string(name));
      }
      std::vector<double> epsilons = sweep.empty() ? std::vector<double>{epsilon} : parse_list(sweep);
      std::sort(epsilons.begin(), epsilons.end());
      const auto kind = entity_kind_from_string(entity);
      const auto result = threshold_sweep(situations_of(trips), kind, metrics, epsilons);
      if (format == "csv") {
        emit(out, dir / "comparison.csv", comparison_to_csv(result.matrices));
      } else {
        emit(out, dir / "comparison.json", comparison_to_json(result.matrices));
      }
    } else if (psd->parsed() || spec->parsed()) {
      if (manifest_path.empty() == log_path.empty() && manifest_path.empty()) {
        throw UsageError("need --manifest or --log");
      }
      std::optional<TripInput> trip;
      if (!manifest_path.empty()) {
        trip = load_trip(manifest_path, log_path, common);
      } else {
        if (!section.empty()) throw UsageError("--section needs --manifest");
        auto trace = load_trace(log_path, common);
        trip = TripInput{std::move(trace), {}};
      }
      const auto trace = trace_for_section(*trip, section);
      const auto welch = welch_config(spectral);
      if (psd->parsed()) {
        emit(out, dir / "psd.csv", psd_csv(trace, welch));
      } else {
        write_spectrograms(out, dir, trace, welch, hop, axis);
      }
    } else if (kde_cmd->parsed()) {
      std::vector<TripInput> trips;
      for (const auto& path : manifests) trips.push_back(load_trip(path, "", common));
      write_kde(out, dir, trips, make_filters(common), metrics_config(common, metric), kde);
    } else if (synth->parsed()) {
      AccelTrace trace{common.rate, 0.0, {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}};
      TripManifest manifest;
      if (!signal.empty()) {
        SignalSpec s;
        s.kind = signal_kind_from_string(signal);
        s.amplitudes = parse_list(amplitudes);
        s.frequencies = parse_list(frequencies);
        s.duration = duration_opt->count() > 0 ? duration : 60.0;
        s.rate = common.rate;
        s.seed = seed;
        s.axis = signal_axis == "z" ? Axis::z : signal_axis == "y" ? Axis::y : Axis::x;
        trace = gen_signal(s);
        manifest.driver_id = driver;
        manifest.car_id = car;
        manifest.sections.push_back({"S1", 0.0, trace.duration(), distance, std::nullopt});
      } else {
        TripProfile p;
        if (profile == "reference") {
          p = TripProfile::reference(seed, common.rate);
          if (duration_opt->count() > 0) p = p.with_total_duration(duration);
        } else {
          p = TripProfile::single(archetype_from_string(profile),
                                  duration_opt->count() > 0 ? duration : 600.0, distance, seed,
                                  common.rate);
        }
        p.driver_id = driver;
        p.car_id = car;
        p = p.with_style_gain(style_gain);
        auto generated = gen_trip(p);
        trace = std::move(generated.first);
        manifest = std::move(generated.second);
      }
      manifest.log_ref = stem + ".csv";
      emit(out, dir / (stem + ".csv"), serialize_log(trace_to_log(trace)));
      emit(out, dir / (stem + ".json"), serialize_manifest(manifest));
    } else if (report->parsed()) {
      const auto trip = load_trip(manifest_path, log_path, common);
      const auto cfg = metrics_config(common, metric);
      const auto filters = make_filters(common);
      const auto welch = welch_config(spectral);
      write_report(out, dir, analyze_trip(trip.trace, trip.manifest, cfg, filters), format);
      emit(out, dir / "psd.csv", psd_csv(trip.trace, welch));
      write_spectrograms(out, dir, trip.trace, welch, hop, "all");
      try {
        write_kde(out, dir, std::span<const TripInput>(&trip, 1), filters, cfg, report_kde);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::too_few_samples && e.code() != ErrorCode::degenerate_bandwidth &&
            e.code() != ErrorCode::empty_sample_set && e.code() != ErrorCode::trace_too_short) {
          throw;
        }
        err << "note: density skipped: " << e.what() << "\n";
      }
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace ridecomfort
