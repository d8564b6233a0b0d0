#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "adsbul/anomaly.hpp"
#include "adsbul/ingest.hpp"
#include "adsbul/latency.hpp"
#include "adsbul/pseudo_truth.hpp"
#include "adsbul/simgen.hpp"

namespace adsbul::io {

using nlohmann::json;

// Line schemas shared with ingest.
json to_json(const AdsbReport& r);
json to_json(Icao icao, const TrackPoint& p);
json to_json(const GroundTruthRecord& g);

json to_json(const IngestSummary& s);
json to_json(const FitDiagnostics& d);
json to_json(const Histogram& h);
json to_json(const TrackLatencySummary& s);
json to_json(const FleetReport& f);
json to_json(const AnomalyFinding& f);

SyntheticScenario scenario_from_json(const json& j);
json to_json(const SyntheticScenario& s);

/// Either a single scenario object or {"scenarios": [...]}.
std::vector<SyntheticScenario> scenarios_from_json(const json& j);
std::vector<SyntheticScenario> load_scenarios(const std::string& path);

json load_json(const std::string& path);

/// Writes one compact JSON document per line.
template <class Range, class Convert>
void write_jsonl(std::ostream& out, const Range& items, Convert convert) {
  for (const auto& item : items) out << convert(item).dump() << '\n';
}

inline constexpr const char* kEstimatesCsvHeader = "icao,track_index,toa_s,ul_s,e_at_m,speed_mps,excluded,reason";

void write_estimates_csv(std::ostream& out, const std::vector<LatencyEstimate>& estimates, bool header = true);

/// Shortest round-trip decimal form of a double, as used in every output file.
std::string format_number(double v);

/// Throws io on failure.
void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

struct SimulationFiles {
  std::filesystem::path reports;
  std::filesystem::path tracks;
  std::filesystem::path ground_truth;
  std::filesystem::path manifest;
};

/// reports.jsonl, tracks.jsonl, ground_truth.jsonl and simulation.json (the
/// scenarios as run plus the random algorithm) under out_dir.
SimulationFiles write_simulation(const std::vector<SyntheticScenario>& scenarios, const std::filesystem::path& out_dir,
                                 const EpuTable& table = EpuTable::defaults());

}  // namespace adsbul::io
