#include "adsbul/pipeline.hpp"

#include <algorithm>
#include <optional>

namespace adsbul {

std::vector<AdsbReport> IngestedData::reports_for(const Track& track) const {
  const auto it = reports.find(track.icao);
  if (it == reports.end()) return {};
  return reports_within(it->second, track);
}

IngestedData ingest(std::vector<AdsbReport> reports, std::vector<IcaoPoint> points, const PipelineConfig& config) {
  unwrap_day_rollover(reports);
  unwrap_day_rollover(points);
  IngestedData data;
  data.reports = group_reports(std::move(reports));
  data.tracks = segment_tracks(group_track_points(points), config.gap_threshold);
  data.filter = filter_aircraft(data.reports, data.tracks, config.criteria);
  return data;
}

IngestedData ingest_files(const std::string& reports_path, const std::string& tracks_path, const PipelineConfig& config) {
  auto reports = read_reports_file(reports_path, config.parse);
  auto points = read_track_points_file(tracks_path, config.parse);
  auto data = ingest(std::move(reports.records), std::move(points.records), config);
  data.malformed_reports = std::move(reports.malformed);
  data.malformed_tracks = std::move(points.malformed);
  return data;
}

LatencyRun run_latency(const IngestedData& data, const EpuTable& table, const PipelineConfig& config) {
  std::vector<const Track*> work;
  for (const auto& t : data.tracks) {
    if (data.filter.accepted.contains(t.icao)) work.push_back(&t);
  }

  std::vector<std::optional<TrackLatencyResult>> results(work.size());
  std::vector<std::string> failures(work.size());
  const int jobs = std::max(1, config.jobs);
  auto fit_options = config.fit;
  auto latency_options = config.latency;
  // Parallelism moves to the track level when more than one job runs.
  if (jobs > 1) fit_options.parallel = latency_options.parallel = false;

  const auto count = static_cast<std::ptrdiff_t>(work.size());
#pragma omp parallel for schedule(dynamic) num_threads(jobs) if (jobs > 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const Track& track = *work[static_cast<std::size_t>(i)];
    try {
      const auto reports = data.reports_for(track);
      if (reports.size() < 4) throw Error(ErrorCode::insufficient_data, "fewer than 4 reports inside the track");
      const auto ptt = fit_pseudo_truth(track, reports, table, fit_options);
      results[static_cast<std::size_t>(i)] = estimate_track(track, reports, ptt, table, latency_options);
    } catch (const std::exception& e) {
      failures[static_cast<std::size_t>(i)] = e.what();
    }
  }

  LatencyRun run;
  std::vector<TrackLatencySummary> summaries;
  for (std::size_t i = 0; i < work.size(); ++i) {
    if (results[i]) {
      summaries.push_back(results[i]->summary);
      run.results.push_back(std::move(*results[i]));
    } else {
      run.skipped.push_back({work[i]->icao, work[i]->track_index, failures[i]});
    }
  }
  run.fleet = aggregate_fleet(summaries);
  return run;
}

}  // namespace adsbul
