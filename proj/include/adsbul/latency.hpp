#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adsbul/model.hpp"
#include "adsbul/pseudo_truth.hpp"

namespace adsbul {

namespace exclusion {
inline constexpr const char* outside_pseudo_truth = "outside_pseudo_truth";
inline constexpr const char* speed_too_low = "speed_too_low";
}  // namespace exclusion

/// Per-report uncompensated latency. Positive when the reported position
/// trails the reference along the direction of motion (under-compensation).
struct LatencyEstimate {
  Icao icao;
  int track_index = 0;
  double toa = 0.0;
  double ul = 0.0;                 // s
  double along_track_error = 0.0;  // m
  double speed_used = 0.0;         // m/s, reported speed
  bool excluded = false;
  std::string reason;
};

struct LatencyOptions {
  double speed_floor = 30.0;  // m/s
  double bin_width = 0.010;   // s
  double bracket_lo = -1.0;   // s
  double bracket_hi = 1.0;    // s
  double tol = 0.001;         // s
  double coarse_step = 0.010; // s, bracketing scan ahead of the golden-section search
  double epu_containment = 0.95;
  bool parallel = true;
};

/// Along-track position error method for one report.
LatencyEstimate atpe_single(const AdsbReport& report, const PseudoTruthTrack& ptt, int track_index = 0,
                            double speed_floor = LatencyOptions{}.speed_floor);

/// Bins of fixed width aligned so that 0 is an edge. edges.size() == counts.size() + 1.
struct Histogram {
  double bin_width = 0.0;
  std::vector<double> edges;
  std::vector<std::size_t> counts;
};

Histogram make_histogram(std::span<const double> values, double bin_width);

struct AtpeResult {
  std::vector<LatencyEstimate> estimates;
  std::size_t n_used = 0;
  double mean_ul = 0.0;
  double std_ul = 0.0;  // population standard deviation
  Histogram histogram;
};

/// Throws empty_track when no report survives the exclusions.
AtpeResult atpe_track(std::span<const AdsbReport> reports, const PseudoTruthTrack& ptt, int track_index = 0,
                      const LatencyOptions& options = {});

struct MtpesResult {
  double ul = 0.0;
  double residual = 0.0;  // m^2, objective at ul
  std::size_t n_used = 0;
};

/// Reports whose shifted time toa - dT stays inside the pseudo-truth for every dT in the bracket.
std::vector<AdsbReport> reports_inside_bracket(std::span<const AdsbReport> reports, const PseudoTruthTrack& ptt,
                                               const LatencyOptions& options);

/// Track-level latency minimizing sum |P(toa_n - dT) - P*_n|^2 over the bracket.
/// Throws empty_track when fewer than 4 reports survive edge exclusion.
MtpesResult mtpes(std::span<const AdsbReport> reports, const PseudoTruthTrack& ptt, const LatencyOptions& options = {});

struct EpuConstrainedResult {
  std::optional<double> ul;          // nullopt: no shift satisfies the containment requirement
  double best_containment = 0.0;     // highest fraction of reports within their EPU over the bracket
  std::size_t n_used = 0;
};

/// Lowest-objective shift among those where at least options.epu_containment
/// of the reports lie within their NACp's EPU of the shifted pseudo-truth.
EpuConstrainedResult epu_constrained_latency(std::span<const AdsbReport> reports, const PseudoTruthTrack& ptt,
                                             const EpuTable& table, const LatencyOptions& options = {});

struct TrackLatencySummary {
  Icao icao;
  int track_index = 0;
  std::size_t n_used = 0;
  double mean_ul = 0.0;
  double std_ul = 0.0;
  Histogram histogram;
  double mtpes_ul = 0.0;
  double mtpes_residual = 0.0;
  std::optional<double> epu_ul;
  FitDiagnostics fit;
};

struct TrackLatencyResult {
  TrackLatencySummary summary;
  std::vector<LatencyEstimate> estimates;
};

/// ATPE, MTPES and the EPU-constrained variant for one track.
TrackLatencyResult estimate_track(const Track& track, std::span<const AdsbReport> reports, const PseudoTruthTrack& ptt,
                                  const EpuTable& table, const LatencyOptions& options = {});

struct FleetEntry {
  std::size_t sequence = 0;  // position along the chart's x axis
  TrackLatencySummary summary;
  UlClass mean_class = UlClass::within;
};

struct AircraftGroup {
  Icao icao;
  std::vector<FleetEntry> tracks;
};

struct FleetReport {
  std::vector<AircraftGroup> aircraft;  // first-appearance order
  std::size_t n_tracks = 0;
  double mean_of_means = 0.0;
  double std_of_means = 0.0;
  std::map<UlClass, std::size_t> class_counts;
};

FleetReport aggregate_fleet(std::span<const TrackLatencySummary> summaries, const UlBudget& budget = {});

}  // namespace adsbul
