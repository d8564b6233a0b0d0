#pragma once

#include <map>
#include <string>
#include <vector>

#include "adsbul/anomaly.hpp"
#include "adsbul/ingest.hpp"
#include "adsbul/latency.hpp"
#include "adsbul/pseudo_truth.hpp"

namespace adsbul {

struct PipelineConfig {
  ParseOptions parse;
  double gap_threshold = kDefaultGapThreshold;
  FilterCriteria criteria;
  PseudoTruthOptions fit;
  LatencyOptions latency;
  AnomalyConfig anomaly;
  int jobs = 1;
};

struct IngestedData {
  std::map<Icao, std::vector<AdsbReport>> reports;  // grouped, sorted by TOA
  std::vector<Track> tracks;                        // every segmented track
  FilterResult filter;
  std::vector<MalformedLine> malformed_reports;
  std::vector<MalformedLine> malformed_tracks;

  /// Reports of the track's aircraft that fall inside the track's time span.
  std::vector<AdsbReport> reports_for(const Track& track) const;
};

/// Day-rollover unwrapping, grouping, segmentation and aircraft filtering.
IngestedData ingest(std::vector<AdsbReport> reports, std::vector<IcaoPoint> points, const PipelineConfig& config);
IngestedData ingest_files(const std::string& reports_path, const std::string& tracks_path, const PipelineConfig& config);

struct SkippedTrack {
  Icao icao;
  int track_index = 0;
  std::string reason;
};

struct LatencyRun {
  std::vector<TrackLatencyResult> results;  // accepted tracks, in (icao, track_index) order
  std::vector<SkippedTrack> skipped;
  FleetReport fleet;
};

/// Pseudo-truth fit plus all three estimators for every track of every
/// accepted aircraft. Tracks that cannot be processed are listed under
/// skipped and never abort the run. Tracks fan out over config.jobs threads.
LatencyRun run_latency(const IngestedData& data, const EpuTable& table, const PipelineConfig& config);

}  // namespace adsbul
