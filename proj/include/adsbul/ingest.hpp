#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "adsbul/model.hpp"

namespace adsbul {

struct MalformedLine {
  std::size_t line = 0;  // 1-based
  std::string message;
};

template <class Record>
struct ParseResult {
  std::vector<Record> records;
  std::vector<MalformedLine> malformed;
  std::size_t lines_read = 0;  // non-blank lines
};

struct ParseOptions {
  /// Parsing fails with corrupt_input when malformed / non-blank lines exceeds this.
  double max_malformed_fraction = 0.1;
};

/// Report JSONL: one object per line. Order is preserved, bad lines are
/// collected with their line numbers.
ParseResult<AdsbReport> parse_reports(std::istream& in, const ParseOptions& options = {});

struct IcaoPoint {
  Icao icao;
  TrackPoint point;
};

/// Track JSONL. Parsing never reorders; ordering problems surface in segment_tracks.
ParseResult<IcaoPoint> parse_track_points(std::istream& in, const ParseOptions& options = {});

ParseResult<AdsbReport> read_reports_file(const std::string& path, const ParseOptions& options = {});
ParseResult<IcaoPoint> read_track_points_file(const std::string& path, const ParseOptions& options = {});

/// Adds 86400 s after every backwards jump larger than half a day, in stream order.
void unwrap_day_rollover(std::vector<double*>& times);
void unwrap_day_rollover(std::vector<AdsbReport>& reports);
void unwrap_day_rollover(std::vector<IcaoPoint>& points);

std::map<Icao, std::vector<AdsbReport>> group_reports(std::vector<AdsbReport> reports);
std::map<Icao, std::vector<TrackPoint>> group_track_points(const std::vector<IcaoPoint>& points);

inline constexpr double kDefaultGapThreshold = 60.0;
inline constexpr std::size_t kMinTrackPoints = 4;

/// Splits each aircraft's points wherever consecutive samples are more than
/// gap_threshold apart. Points are sorted by time first; repeated timestamps
/// keep the first sample. Tracks shorter than kMinTrackPoints are dropped.
std::vector<Track> segment_tracks(const std::map<Icao, std::vector<TrackPoint>>& points,
                                  double gap_threshold = kDefaultGapThreshold);

/// Reports whose TOA falls inside [track.t_begin(), track.t_end()].
std::vector<AdsbReport> reports_within(const std::vector<AdsbReport>& sorted_reports, const Track& track);

struct FilterCriteria {
  bool require_1090es = true;
  int nacp_min = 8;
  int nacp_max = 11;
  bool require_non_utc_coupled = true;
  int min_tracks_per_icao = 2;
};

namespace reject_reason {
inline constexpr const char* no_reports = "no_reports";
inline constexpr const char* not_1090es = "not_1090es";
inline constexpr const char* utc_coupled = "utc_coupled";
inline constexpr const char* nacp_out_of_range = "nacp_out_of_range";
inline constexpr const char* too_few_tracks = "too_few_tracks";
}  // namespace reject_reason

struct IngestSummary {
  std::size_t total_reports = 0;
  std::size_t unique_icaos = 0;
  std::size_t utc_coupled_icaos = 0;
  std::size_t accepted_icaos = 0;
  std::map<std::string, std::size_t> rejected_reason_counts;
};

struct FilterResult {
  std::set<Icao> accepted;
  std::map<Icao, std::string> rejected;  // first failing criterion per aircraft
  IngestSummary summary;
};

/// An aircraft passes when every report inside its tracks meets the link,
/// NACp and coupling criteria and it owns enough tracks. Reports must be
/// grouped and sorted by TOA.
FilterResult filter_aircraft(const std::map<Icao, std::vector<AdsbReport>>& reports,
                             const std::vector<Track>& tracks, const FilterCriteria& criteria = {});

}  // namespace adsbul
