#include "adsbul/anomaly.hpp"

#include <algorithm>
#include <cmath>

namespace adsbul {

std::string_view to_string(AnomalyKind kind) {
  switch (kind) {
    case AnomalyKind::epoch_quantization: return "epoch_quantization";
    case AnomalyKind::speed_mismatch: return "speed_mismatch";
    case AnomalyKind::link_noncompliance: return "link_noncompliance";
  }
  return "unknown";
}

std::string_view to_string(FindingStatus status) {
  return status == FindingStatus::evaluated ? "evaluated" : "insufficient_data";
}

double epoch_residual(double toa) {
  // Distance to the double nearest k / 5, the same expression the stamper
  // uses, so a stamped epoch scores exactly zero.
  return std::abs(toa - std::round(toa * 5.0) / 5.0);
}

AnomalyFinding check_epoch_quantization(std::span<const AdsbReport> reports, double tolerance,
                                        std::size_t min_reports) {
  AnomalyFinding f;
  f.kind = AnomalyKind::epoch_quantization;
  f.n_reports = reports.size();
  if (!reports.empty()) f.icao = reports.front().icao;
  if (reports.size() < min_reports) {
    f.status = FindingStatus::insufficient_data;
    return f;
  }
  std::size_t on_epoch = 0;
  f.epoch_residuals.reserve(reports.size());
  for (const auto& r : reports) {
    const double res = epoch_residual(r.toa);
    f.epoch_residuals.push_back(res);
    if (res <= tolerance) ++on_epoch;
  }
  f.on_epoch_fraction = static_cast<double>(on_epoch) / static_cast<double>(reports.size());
  f.triggered = on_epoch == reports.size();
  return f;
}

std::vector<SpeedSample> speed_samples(std::span<const AdsbReport> reports) {
  std::vector<SpeedSample> out;
  for (std::size_t i = 0; i + 1 < reports.size(); ++i) {
    const auto& a = reports[i];
    const auto& b = reports[i + 1];
    const double dt = b.toa - a.toa;
    if (!(dt > 0.0)) continue;
    out.push_back({b.toa, norm(b.vel), norm(b.pos - a.pos) / dt});
  }
  return out;
}

namespace {

double median(std::vector<double> v) {
  const std::size_t n = v.size();
  std::sort(v.begin(), v.end());
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

AnomalyFinding check_speed_consistency(std::span<const AdsbReport> reports, double threshold) {
  AnomalyFinding f;
  f.kind = AnomalyKind::speed_mismatch;
  f.n_reports = reports.size();
  if (!reports.empty()) f.icao = reports.front().icao;
  const auto samples = speed_samples(reports);
  f.speed_pairs = samples.size();
  if (samples.empty()) {
    f.status = FindingStatus::insufficient_data;
    return f;
  }
  std::vector<double> offsets;
  offsets.reserve(samples.size());
  for (const auto& s : samples) offsets.push_back(std::abs(s.calculated - s.reported));
  f.median_speed_offset = median(std::move(offsets));
  f.triggered = f.median_speed_offset > threshold;
  return f;
}

AnomalyFinding check_link_version(std::span<const AdsbReport> reports, const std::set<int>& compliant) {
  AnomalyFinding f;
  f.kind = AnomalyKind::link_noncompliance;
  f.n_reports = reports.size();
  if (reports.empty()) {
    f.status = FindingStatus::insufficient_data;
    return f;
  }
  f.icao = reports.front().icao;
  for (const auto& r : reports) {
    ++f.link_versions[r.link_version];
    if (!compliant.contains(r.link_version)) f.triggered = true;
  }
  return f;
}

std::vector<AnomalyFinding> run_anomaly_suite(const std::map<Icao, std::vector<AdsbReport>>& reports,
                                              const AnomalyConfig& config) {
  std::vector<AnomalyFinding> findings;
  for (const auto& [icao, list] : reports) {
    const bool coupled = std::any_of(list.begin(), list.end(), [](const AdsbReport& r) { return r.utc_coupled; });
    if (!coupled && !config.all_icaos) continue;
    for (auto f : {check_epoch_quantization(list, config.epoch_tolerance, config.epoch_min_reports),
                   check_speed_consistency(list, config.speed_offset_threshold),
                   check_link_version(list, config.compliant_link_versions)}) {
      f.icao = icao;
      findings.push_back(std::move(f));
    }
  }
  return findings;
}

}  // namespace adsbul
