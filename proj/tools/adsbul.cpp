// adsbul: uncompensated-latency toolkit for ADS-B reports.
//
//   adsbul ingest   --reports R.jsonl --tracks T.jsonl --out DIR
//   adsbul latency  --reports R.jsonl --tracks T.jsonl --out DIR
//   adsbul anomaly  --reports R.jsonl --out DIR
//   adsbul simulate --scenario S.json --out DIR
//   adsbul validate
//
// Every flag can also come from a JSON file given with --config, keyed by the
// flag's long name (e.g. {"gap-threshold": 90}). Flags on the command line win.
//
// Exit codes: 0 success, 1 input error, 2 internal failure, 3 validation failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "adsbul/anomaly.hpp"
#include "adsbul/io.hpp"
#include "adsbul/pipeline.hpp"
#include "adsbul/validate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace adsbul;

namespace {

enum ExitCode { kOk = 0, kInputError = 1, kInternalError = 2, kValidationFailed = 3 };

struct Settings {
  std::string config;
  std::string reports;
  std::string tracks;
  std::string scenario;
  std::string out = "out";
  std::string epu_table;
  double max_malformed_fraction = 0.1;
  double gap_threshold = kDefaultGapThreshold;
  int nacp_min = 8;
  int nacp_max = 11;
  int min_tracks = 2;
  bool allow_utc_coupled = false;
  double accel_margin = kDefaultAccelMargin;
  double grid_rate = 10.0;
  double bracket_lo = -1.0;
  double bracket_hi = 1.0;
  double tol = 0.001;
  double bin_width = 0.010;
  double speed_floor = 30.0;
  double epoch_tolerance = 0.001;
  double speed_threshold = 50.0;
  std::vector<int> compliant_links{2};
  bool all_icaos = false;
  int jobs = 1;
  double tolerance_scale = 1.0;
  std::vector<int> only;
  std::string work_dir;
  bool verbose = false;
};

// Lets --config fill any option the command line left unset.
class ConfigBinder {
 public:
  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& name, T& target, const std::string& help) {
    auto* opt = app->add_option("--" + name, target, help)->capture_default_str();
    bindings_[app].push_back({name, opt, [&target](const json& j) { target = j.get<T>(); }});
    return opt;
  }

  CLI::Option* add_flag(CLI::App* app, const std::string& name, bool& target, const std::string& help) {
    auto* opt = app->add_flag("--" + name, target, help);
    bindings_[app].push_back({name, opt, [&target](const json& j) { target = j.get<bool>(); }});
    return opt;
  }

  void apply(CLI::App* app, const std::string& path) const {
    if (path.empty()) return;
    const auto doc = io::load_json(path);
    if (!doc.is_object()) throw Error(ErrorCode::invalid_input, "--config must hold a JSON object");
    const auto it = bindings_.find(app);
    if (it == bindings_.end()) return;
    for (const auto& b : it->second) {
      if (b.option->count() > 0 || !doc.contains(b.name)) continue;
      try {
        b.assign(doc.at(b.name));
      } catch (const json::exception& e) {
        throw Error(ErrorCode::invalid_input, "config key '" + b.name + "': " + e.what());
      }
    }
  }

 private:
  struct Binding {
    std::string name;
    CLI::Option* option;
    std::function<void(const json&)> assign;
  };
  std::map<const CLI::App*, std::vector<Binding>> bindings_;
};

PipelineConfig pipeline_config(const Settings& s) {
  PipelineConfig c;
  c.parse.max_malformed_fraction = s.max_malformed_fraction;
  c.gap_threshold = s.gap_threshold;
  c.criteria.nacp_min = s.nacp_min;
  c.criteria.nacp_max = s.nacp_max;
  c.criteria.min_tracks_per_icao = s.min_tracks;
  c.criteria.require_non_utc_coupled = !s.allow_utc_coupled;
  c.fit.accel_margin = s.accel_margin;
  c.fit.grid_rate_hz = s.grid_rate;
  c.latency.bracket_lo = s.bracket_lo;
  c.latency.bracket_hi = s.bracket_hi;
  c.latency.tol = s.tol;
  c.latency.bin_width = s.bin_width;
  c.latency.speed_floor = s.speed_floor;
  c.anomaly.epoch_tolerance = s.epoch_tolerance;
  c.anomaly.speed_offset_threshold = s.speed_threshold;
  c.anomaly.compliant_link_versions = {s.compliant_links.begin(), s.compliant_links.end()};
  c.anomaly.all_icaos = s.all_icaos;
  c.jobs = s.jobs;
  return c;
}

EpuTable epu_table(const Settings& s) { return s.epu_table.empty() ? EpuTable::defaults() : EpuTable::load(s.epu_table); }

void require_inputs(const Settings& s, bool need_tracks) {
  if (!s.scenario.empty()) throw Error(ErrorCode::invalid_input, "--scenario belongs to the simulate command");
  if (s.reports.empty()) throw Error(ErrorCode::invalid_input, "--reports is required");
  if (need_tracks && s.tracks.empty()) throw Error(ErrorCode::invalid_input, "--tracks is required");
}

void log(const Settings& s, const std::string& message) {
  if (s.verbose) std::cerr << message << '\n';
}

std::string track_stem(const Track& t) { return t.icao.str() + "_" + std::to_string(t.track_index); }

int cmd_ingest(const Settings& s) {
  require_inputs(s, true);
  const auto config = pipeline_config(s);
  const auto data = ingest_files(s.reports, s.tracks, config);
  const fs::path out(s.out);
  fs::create_directories(out);

  std::size_t written = 0;
  for (const auto& track : data.tracks) {
    if (!data.filter.accepted.contains(track.icao)) continue;
    std::ostringstream points, reports;
    io::write_jsonl(points, track.points, [&](const TrackPoint& p) { return io::to_json(track.icao, p); });
    io::write_jsonl(reports, data.reports_for(track), [](const AdsbReport& r) { return io::to_json(r); });
    io::write_text_file(out / "tracks" / (track_stem(track) + ".tracks.jsonl"), points.str());
    io::write_text_file(out / "tracks" / (track_stem(track) + ".reports.jsonl"), reports.str());
    ++written;
  }

  auto summary = io::to_json(data.filter.summary);
  summary["tracks_total"] = data.tracks.size();
  summary["tracks_written"] = written;
  summary["malformed_report_lines"] = data.malformed_reports.size();
  summary["malformed_track_lines"] = data.malformed_tracks.size();
  json rejected = json::object();
  for (const auto& [icao, reason] : data.filter.rejected) rejected[icao.str()] = reason;
  summary["rejected"] = rejected;
  json accepted = json::array();
  for (const auto& icao : data.filter.accepted) accepted.push_back(icao.str());
  summary["accepted"] = accepted;
  io::write_text_file(out / "summary.json", summary.dump(2) + "\n");
  log(s, "ingest: " + std::to_string(data.filter.summary.accepted_icaos) + " of " +
             std::to_string(data.filter.summary.unique_icaos) + " aircraft accepted");
  return kOk;
}

int cmd_latency(const Settings& s) {
  require_inputs(s, true);
  const auto config = pipeline_config(s);
  const auto table = epu_table(s);
  const auto data = ingest_files(s.reports, s.tracks, config);
  const auto run = run_latency(data, table, config);
  const fs::path out(s.out);
  fs::create_directories(out);

  std::ostringstream estimates;
  estimates << io::kEstimatesCsvHeader << '\n';
  for (const auto& r : run.results) io::write_estimates_csv(estimates, r.estimates, false);
  io::write_text_file(out / "estimates.csv", estimates.str());

  auto fleet = io::to_json(run.fleet);
  json skipped = json::array();
  for (const auto& sk : run.skipped) {
    skipped.push_back({{"icao", sk.icao.str()}, {"track_index", sk.track_index}, {"reason", sk.reason}});
  }
  fleet["skipped"] = skipped;
  io::write_text_file(out / "fleet.json", fleet.dump(2) + "\n");

  // Per-track mean +- one std, grouped by aircraft.
  std::ostringstream means;
  means << "sequence,icao,track_index,n_used,mean_ul_ms,std_ul_ms,mtpes_ul_ms,epu_ul_ms,mean_class\n";
  std::ostringstream hist;
  hist << "icao,track_index,bin_lo_s,bin_hi_s,count\n";
  for (const auto& group : run.fleet.aircraft) {
    for (const auto& e : group.tracks) {
      const auto& t = e.summary;
      means << e.sequence << ',' << t.icao.str() << ',' << t.track_index << ',' << t.n_used << ','
            << io::format_number(t.mean_ul * 1e3) << ',' << io::format_number(t.std_ul * 1e3) << ','
            << io::format_number(t.mtpes_ul * 1e3) << ',' << (t.epu_ul ? io::format_number(*t.epu_ul * 1e3) : "")
            << ',' << to_string(e.mean_class) << '\n';
      for (std::size_t b = 0; b < t.histogram.counts.size(); ++b) {
        hist << t.icao.str() << ',' << t.track_index << ',' << io::format_number(t.histogram.edges[b]) << ','
             << io::format_number(t.histogram.edges[b + 1]) << ',' << t.histogram.counts[b] << '\n';
      }
    }
  }
  io::write_text_file(out / "track_means.csv", means.str());
  io::write_text_file(out / "histograms.csv", hist.str());
  log(s, "latency: " + std::to_string(run.results.size()) + " tracks estimated, " + std::to_string(run.skipped.size()) +
             " skipped");
  return kOk;
}

int cmd_anomaly(const Settings& s) {
  require_inputs(s, false);
  const auto config = pipeline_config(s);
  auto parsed = read_reports_file(s.reports, config.parse);
  unwrap_day_rollover(parsed.records);
  const auto grouped = group_reports(std::move(parsed.records));
  const auto findings = run_anomaly_suite(grouped, config.anomaly);
  const fs::path out(s.out);
  fs::create_directories(out);

  std::ostringstream lines;
  io::write_jsonl(lines, findings, [](const AnomalyFinding& f) { return io::to_json(f); });
  io::write_text_file(out / "findings.jsonl", lines.str());

  std::ostringstream epochs, speeds;
  epochs << "icao,toa_s,toa_fraction_s\n";
  speeds << "icao,toa_s,reported_mps,calculated_mps\n";
  std::set<Icao> examined;
  for (const auto& f : findings) examined.insert(f.icao);
  for (const auto& icao : examined) {
    const auto& list = grouped.at(icao);
    for (const auto& r : list) epochs << icao.str() << ',' << io::format_number(r.toa) << ','
                                      << io::format_number(r.toa - std::floor(r.toa)) << '\n';
    for (const auto& sample : speed_samples(list)) {
      speeds << icao.str() << ',' << io::format_number(sample.toa) << ',' << io::format_number(sample.reported) << ','
             << io::format_number(sample.calculated) << '\n';
    }
  }
  io::write_text_file(out / "epoch_fractions.csv", epochs.str());
  io::write_text_file(out / "speed_comparison.csv", speeds.str());
  log(s, "anomaly: " + std::to_string(findings.size()) + " findings");
  return kOk;
}

int cmd_simulate(const Settings& s) {
  if (s.scenario.empty()) throw Error(ErrorCode::invalid_input, "--scenario is required");
  if (!s.reports.empty() || !s.tracks.empty()) {
    throw Error(ErrorCode::invalid_input, "simulate takes --scenario, not --reports/--tracks");
  }
  const auto scenarios = io::load_scenarios(s.scenario);
  const auto files = io::write_simulation(scenarios, s.out, epu_table(s));
  log(s, "simulate: wrote " + files.reports.string());
  return kOk;
}

int cmd_validate(const Settings& s) {
  ValidationOptions options;
  options.table = epu_table(s);
  options.tolerance_scale = s.tolerance_scale;
  options.only = {s.only.begin(), s.only.end()};
  if (!s.work_dir.empty()) options.work_dir = s.work_dir;
  const auto report = run_validation(options);
  std::cout << format_table(report);
  return report.all_pass() ? kOk : kValidationFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uncompensated latency estimation and anomaly checks for ADS-B reports"};
  app.require_subcommand(1);
  Settings s;
  ConfigBinder binder;

  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--config", s.config, "JSON file with default values for any flag");
    cmd->add_flag("-v,--verbose", s.verbose, "Progress on stderr");
    binder.add(cmd, "epu-table", s.epu_table, "EPU table file (nacp_<k> = meters|unbounded)");
  };
  auto inputs = [&](CLI::App* cmd, bool tracks) {
    binder.add(cmd, "reports", s.reports, "Report JSONL file");
    if (tracks) binder.add(cmd, "tracks", s.tracks, "Track JSONL file");
    binder.add(cmd, "scenario", s.scenario, "Scenario JSON (simulate only)");
    binder.add(cmd, "out", s.out, "Output directory");
    binder.add(cmd, "max-malformed-fraction", s.max_malformed_fraction, "Corrupt-input threshold");
  };
  auto filtering = [&](CLI::App* cmd) {
    binder.add(cmd, "gap-threshold", s.gap_threshold, "Seconds between points that split tracks");
    binder.add(cmd, "nacp-min", s.nacp_min, "Lowest accepted NACp");
    binder.add(cmd, "nacp-max", s.nacp_max, "Highest accepted NACp");
    binder.add(cmd, "min-tracks", s.min_tracks, "Tracks required per aircraft");
    binder.add_flag(cmd, "allow-utc-coupled", s.allow_utc_coupled, "Keep UTC-coupled aircraft");
  };
  auto anomaly_flags = [&](CLI::App* cmd) {
    binder.add(cmd, "epoch-tolerance", s.epoch_tolerance, "Seconds from a 200 ms epoch still counted on-epoch");
    binder.add(cmd, "speed-threshold", s.speed_threshold, "Median speed offset (m/s) that flags a mismatch");
    binder.add(cmd, "compliant-link-versions", s.compliant_links, "Link versions considered compliant");
    binder.add_flag(cmd, "all-icaos", s.all_icaos, "Check every aircraft, not only UTC-coupled ones");
  };

  auto* ingest_cmd = app.add_subcommand("ingest", "Parse, segment and filter reports and tracks");
  common(ingest_cmd);
  inputs(ingest_cmd, true);
  filtering(ingest_cmd);

  auto* latency_cmd = app.add_subcommand("latency", "Estimate uncompensated latency per report and per track");
  common(latency_cmd);
  inputs(latency_cmd, true);
  filtering(latency_cmd);
  binder.add(latency_cmd, "accel-margin", s.accel_margin, "m/s^2 added around the reported acceleration range");
  binder.add(latency_cmd, "grid-rate", s.grid_rate, "Hz of the acceleration check grid");
  binder.add(latency_cmd, "bracket-lo", s.bracket_lo, "Lower MTPES search bound, s");
  binder.add(latency_cmd, "bracket-hi", s.bracket_hi, "Upper MTPES search bound, s");
  binder.add(latency_cmd, "tol", s.tol, "MTPES tolerance, s");
  binder.add(latency_cmd, "bin-width", s.bin_width, "Histogram bin width, s");
  binder.add(latency_cmd, "speed-floor", s.speed_floor, "Reports slower than this (m/s) are excluded");
  binder.add(latency_cmd, "jobs", s.jobs, "Tracks processed concurrently");

  auto* anomaly_cmd = app.add_subcommand("anomaly", "Check UTC-coupled aircraft for report anomalies");
  common(anomaly_cmd);
  inputs(anomaly_cmd, false);
  anomaly_flags(anomaly_cmd);

  auto* simulate_cmd = app.add_subcommand("simulate", "Generate synthetic reports, tracks and ground truth");
  common(simulate_cmd);
  inputs(simulate_cmd, true);

  auto* validate_cmd = app.add_subcommand("validate", "Run the synthetic acceptance suite");
  common(validate_cmd);
  binder.add(validate_cmd, "tolerance-scale", s.tolerance_scale, "Multiply every tolerance (<1 tightens)");
  binder.add(validate_cmd, "only", s.only, "Run only these criterion numbers");
  binder.add(validate_cmd, "work-dir", s.work_dir, "Scratch directory for the determinism check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    for (auto* cmd : app.get_subcommands()) {
      binder.apply(cmd, s.config);
      if (cmd == ingest_cmd) return cmd_ingest(s);
      if (cmd == latency_cmd) return cmd_latency(s);
      if (cmd == anomaly_cmd) return cmd_anomaly(s);
      if (cmd == simulate_cmd) return cmd_simulate(s);
      if (cmd == validate_cmd) return cmd_validate(s);
    }
  } catch (const Error& e) {
    std::cerr << "adsbul: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::invalid_input:
      case ErrorCode::invalid_nacp:
      case ErrorCode::io:
      case ErrorCode::corrupt_input:
        return kInputError;
      default:
        return kInternalError;
    }
  } catch (const std::exception& e) {
    std::cerr << "adsbul: internal error: " << e.what() << '\n';
    return kInternalError;
  }
  return kInternalError;
}
