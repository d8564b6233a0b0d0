#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adsbul/model.hpp"

namespace adsbul {

enum class AnomalyKind { epoch_quantization, speed_mismatch, link_noncompliance };

std::string_view to_string(AnomalyKind kind);

enum class FindingStatus { evaluated, insufficient_data };

std::string_view to_string(FindingStatus status);

struct AnomalyFinding {
  Icao icao;
  AnomalyKind kind = AnomalyKind::epoch_quantization;
  bool triggered = false;
  FindingStatus status = FindingStatus::evaluated;
  std::size_t n_reports = 0;

  // epoch_quantization
  double on_epoch_fraction = 0.0;
  std::vector<double> epoch_residuals;  // s, distance of each TOA to the nearest 200 ms epoch
  // speed_mismatch
  double median_speed_offset = 0.0;     // m/s
  std::size_t speed_pairs = 0;
  // link_noncompliance
  std::map<int, std::size_t> link_versions;
};

inline constexpr double kUtcEpoch = 0.2;  // s

struct AnomalyConfig {
  double epoch_tolerance = 0.001;      // s
  std::size_t epoch_min_reports = 10;
  double speed_offset_threshold = 50.0;  // m/s
  std::set<int> compliant_link_versions{2};
  bool all_icaos = false;
};

/// Distance from toa to the nearest multiple of 200 ms. Adding whole seconds
/// to toa leaves it unchanged.
double epoch_residual(double toa);

/// Triggered iff every TOA sits within tolerance of a 200 ms UTC epoch.
AnomalyFinding check_epoch_quantization(std::span<const AdsbReport> reports, double tolerance,
                                        std::size_t min_reports = AnomalyConfig{}.epoch_min_reports);

struct SpeedSample {
  double toa = 0.0;       // later report of the pair
  double reported = 0.0;  // m/s
  double calculated = 0.0;
};

/// Inter-report speeds for consecutive reports with distinct TOAs. Reports must be sorted by TOA.
std::vector<SpeedSample> speed_samples(std::span<const AdsbReport> reports);

/// Triggered iff the median |calculated - reported| speed exceeds the threshold.
AnomalyFinding check_speed_consistency(std::span<const AdsbReport> reports, double threshold);

AnomalyFinding check_link_version(std::span<const AdsbReport> reports, const std::set<int>& compliant);

/// All three checks for every UTC-coupled aircraft (every aircraft when config.all_icaos).
std::vector<AnomalyFinding> run_anomaly_suite(const std::map<Icao, std::vector<AdsbReport>>& reports,
                                              const AnomalyConfig& config = {});

}  // namespace adsbul
