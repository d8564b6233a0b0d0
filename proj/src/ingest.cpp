#include "adsbul/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include <json.hpp>

namespace adsbul {

namespace {

using nlohmann::json;

double number_field(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorCode::invalid_input, std::string("missing field '") + key + "'");
  if (!it->is_number()) throw Error(ErrorCode::invalid_input, std::string("field '") + key + "' is not a number");
  return it->get<double>();
}

int int_field(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorCode::invalid_input, std::string("missing field '") + key + "'");
  if (!it->is_number_integer()) throw Error(ErrorCode::invalid_input, std::string("field '") + key + "' is not an integer");
  return it->get<int>();
}

Icao icao_field(const json& j) {
  const auto it = j.find("icao");
  if (it == j.end() || !it->is_string()) throw Error(ErrorCode::invalid_input, "missing string field 'icao'");
  return Icao::parse(it->get_ref<const std::string&>());
}

bool is_1090es(std::string link) {
  std::string norm;
  for (char c : link) {
    if (c == '-' || c == '_' || c == ' ') continue;
    norm.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return norm == "1090ES";
}

AdsbReport report_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::invalid_input, "line is not a JSON object");
  AdsbReport r;
  r.icao = icao_field(j);
  r.toa = number_field(j, "toa_s");
  r.pos = {number_field(j, "x_m"), number_field(j, "y_m")};
  r.vel = {number_field(j, "vx_mps"), number_field(j, "vy_mps")};
  r.nacp = int_field(j, "nacp");
  const auto uc = j.find("utc_coupled");
  if (uc == j.end() || !uc->is_boolean()) throw Error(ErrorCode::invalid_input, "missing boolean field 'utc_coupled'");
  r.utc_coupled = uc->get<bool>();
  r.link_version = int_field(j, "link_version");
  if (const auto link = j.find("link"); link != j.end()) {
    if (!link->is_string()) throw Error(ErrorCode::invalid_input, "field 'link' is not a string");
    r.link_1090es = is_1090es(link->get<std::string>());
  }
  if (const auto tag = j.find("source_tag"); tag != j.end() && tag->is_string()) r.source_tag = tag->get<std::string>();
  validate(r);
  return r;
}

IcaoPoint point_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::invalid_input, "line is not a JSON object");
  IcaoPoint p;
  p.icao = icao_field(j);
  p.point.t = number_field(j, "t_s");
  p.point.pos = {number_field(j, "x_m"), number_field(j, "y_m")};
  p.point.vel = {number_field(j, "vx_mps"), number_field(j, "vy_mps")};
  if (!std::isfinite(p.point.t) || !finite(p.point.pos) || !finite(p.point.vel)) {
    throw Error(ErrorCode::invalid_input, "non-finite track point");
  }
  return p;
}

template <class Record, class Convert>
ParseResult<Record> parse_lines(std::istream& in, const ParseOptions& options, Convert convert) {
  if (!in) throw Error(ErrorCode::io, "unreadable input stream");
  ParseResult<Record> result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++result.lines_read;
    try {
      result.records.push_back(convert(json::parse(line)));
    } catch (const json::exception& e) {
      result.malformed.push_back({line_no, e.what()});
    } catch (const Error& e) {
      result.malformed.push_back({line_no, e.what()});
    }
  }
  if (in.bad()) throw Error(ErrorCode::io, "read error");
  if (result.lines_read > 0) {
    const double fraction = static_cast<double>(result.malformed.size()) / static_cast<double>(result.lines_read);
    if (fraction > options.max_malformed_fraction) {
      throw Error(ErrorCode::corrupt_input, std::to_string(result.malformed.size()) + " of " +
                                                std::to_string(result.lines_read) + " lines malformed (first at line " +
                                                std::to_string(result.malformed.front().line) +
                                                ": " + result.malformed.front().message + ")");
    }
  }
  return result;
}

template <class Parse>
auto read_file(const std::string& path, Parse parse) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path);
  return parse(in);
}

}  // namespace

ParseResult<AdsbReport> parse_reports(std::istream& in, const ParseOptions& options) {
  return parse_lines<AdsbReport>(in, options, report_from_json);
}

ParseResult<IcaoPoint> parse_track_points(std::istream& in, const ParseOptions& options) {
  return parse_lines<IcaoPoint>(in, options, point_from_json);
}

ParseResult<AdsbReport> read_reports_file(const std::string& path, const ParseOptions& options) {
  return read_file(path, [&](std::istream& in) { return parse_reports(in, options); });
}

ParseResult<IcaoPoint> read_track_points_file(const std::string& path, const ParseOptions& options) {
  return read_file(path, [&](std::istream& in) { return parse_track_points(in, options); });
}

void unwrap_day_rollover(std::vector<double*>& times) {
  double offset = 0.0;
  double prev_raw = 0.0;
  bool first = true;
  for (double* t : times) {
    const double raw = *t;
    if (!first && raw < prev_raw - kSecondsPerDay / 2) offset += kSecondsPerDay;
    prev_raw = raw;
    first = false;
    *t = raw + offset;
  }
}

void unwrap_day_rollover(std::vector<AdsbReport>& reports) {
  std::vector<double*> times;
  times.reserve(reports.size());
  for (auto& r : reports) times.push_back(&r.toa);
  unwrap_day_rollover(times);
}

void unwrap_day_rollover(std::vector<IcaoPoint>& points) {
  std::vector<double*> times;
  times.reserve(points.size());
  for (auto& p : points) times.push_back(&p.point.t);
  unwrap_day_rollover(times);
}

std::map<Icao, std::vector<AdsbReport>> group_reports(std::vector<AdsbReport> reports) {
  std::map<Icao, std::vector<AdsbReport>> grouped;
  for (auto& r : reports) grouped[r.icao].push_back(std::move(r));
  for (auto& [icao, list] : grouped) {
    std::stable_sort(list.begin(), list.end(), [](const AdsbReport& a, const AdsbReport& b) { return a.toa < b.toa; });
  }
  return grouped;
}

std::map<Icao, std::vector<TrackPoint>> group_track_points(const std::vector<IcaoPoint>& points) {
  std::map<Icao, std::vector<TrackPoint>> grouped;
  for (const auto& p : points) grouped[p.icao].push_back(p.point);
  return grouped;
}

std::vector<Track> segment_tracks(const std::map<Icao, std::vector<TrackPoint>>& points, double gap_threshold) {
  if (!(gap_threshold > 0.0)) throw Error(ErrorCode::invalid_input, "gap threshold must be positive");
  std::vector<Track> tracks;
  for (const auto& [icao, raw] : points) {
    auto sorted = raw;
    std::stable_sort(sorted.begin(), sorted.end(), [](const TrackPoint& a, const TrackPoint& b) { return a.t < b.t; });
    sorted.erase(std::unique(sorted.begin(), sorted.end(), [](const TrackPoint& a, const TrackPoint& b) { return a.t == b.t; }),
                 sorted.end());

    int next_index = 0;
    auto flush = [&](std::vector<TrackPoint>& current) {
      if (current.size() >= kMinTrackPoints) {
        tracks.push_back(Track{icao, next_index++, std::move(current)});
      }
      current.clear();
    };
    std::vector<TrackPoint> current;
    for (const auto& p : sorted) {
      if (!current.empty() && p.t - current.back().t > gap_threshold) flush(current);
      current.push_back(p);
    }
    flush(current);
  }
  return tracks;
}

std::vector<AdsbReport> reports_within(const std::vector<AdsbReport>& sorted_reports, const Track& track) {
  const auto lo = std::lower_bound(sorted_reports.begin(), sorted_reports.end(), track.t_begin(),
                                   [](const AdsbReport& r, double t) { return r.toa < t; });
  const auto hi = std::upper_bound(lo, sorted_reports.end(), track.t_end(),
                                   [](double t, const AdsbReport& r) { return t < r.toa; });
  return {lo, hi};
}

FilterResult filter_aircraft(const std::map<Icao, std::vector<AdsbReport>>& reports, const std::vector<Track>& tracks,
                             const FilterCriteria& criteria) {
  if (criteria.nacp_min > criteria.nacp_max) throw Error(ErrorCode::invalid_input, "nacp_min > nacp_max");

  std::map<Icao, std::vector<const Track*>> tracks_by_icao;
  for (const auto& t : tracks) tracks_by_icao[t.icao].push_back(&t);

  std::set<Icao> all;
  FilterResult result;
  for (const auto& [icao, list] : reports) {
    all.insert(icao);
    result.summary.total_reports += list.size();
    if (std::any_of(list.begin(), list.end(), [](const AdsbReport& r) { return r.utc_coupled; })) {
      ++result.summary.utc_coupled_icaos;
    }
  }
  for (const auto& [icao, list] : tracks_by_icao) all.insert(icao);
  result.summary.unique_icaos = all.size();

  static const std::vector<AdsbReport> kNoReports;
  for (const auto& icao : all) {
    const auto rit = reports.find(icao);
    const auto& own_reports = rit == reports.end() ? kNoReports : rit->second;
    const auto tit = tracks_by_icao.find(icao);
    const std::size_t n_tracks = tit == tracks_by_icao.end() ? 0 : tit->second.size();

    bool link_bad = false, utc_bad = false, nacp_bad = false;
    std::size_t analyzed = 0;
    if (tit != tracks_by_icao.end()) {
      for (const Track* track : tit->second) {
        for (const auto& r : reports_within(own_reports, *track)) {
          ++analyzed;
          link_bad |= criteria.require_1090es && !r.link_1090es;
          utc_bad |= criteria.require_non_utc_coupled && r.utc_coupled;
          nacp_bad |= r.nacp < criteria.nacp_min || r.nacp > criteria.nacp_max;
        }
      }
    }

    const char* reason = nullptr;
    if (link_bad) reason = reject_reason::not_1090es;
    else if (utc_bad) reason = reject_reason::utc_coupled;
    else if (nacp_bad) reason = reject_reason::nacp_out_of_range;
    else if (n_tracks < static_cast<std::size_t>(criteria.min_tracks_per_icao)) reason = reject_reason::too_few_tracks;
    else if (analyzed == 0) reason = reject_reason::no_reports;

    if (reason) {
      result.rejected.emplace(icao, reason);
      ++result.summary.rejected_reason_counts[reason];
    } else {
      result.accepted.insert(icao);
    }
  }
  result.summary.accepted_icaos = result.accepted.size();
  return result;
}

}  // namespace adsbul
