#include <doctest.h>

#include <sstream>

#include "adsbul/ingest.hpp"

using namespace adsbul;

namespace {

std::string report_line(const char* icao, double toa, int nacp, bool utc, int link = 2) {
  std::ostringstream s;
  s.precision(17);
  s << R"({"icao": ")" << icao << R"(", "toa_s": )" << toa
    << R"(, "x_m": 1000.0, "y_m": -2500.0, "vx_mps": 120.0, "vy_mps": -5.0, "nacp": )" << nacp
    << R"(, "utc_coupled": )" << (utc ? "true" : "false") << R"(, "link_version": )" << link << "}\n";
  return s.str();
}

std::map<Icao, std::vector<TrackPoint>> one_aircraft(const std::vector<double>& times) {
  std::vector<TrackPoint> pts;
  for (double t : times) pts.push_back({t, {t, 0.0}, {1.0, 0.0}});
  return {{Icao(0xA1), pts}};
}

std::vector<double> range(double a, double b, double step = 1.0) {
  std::vector<double> out;
  for (double t = a; t <= b + 1e-9; t += step) out.push_back(t);
  return out;
}

}  // namespace

TEST_CASE("parse_reports maps the schema") {
  std::istringstream in(report_line("A637E1", 46800.40625, 9, false));
  const auto r = parse_reports(in);
  REQUIRE(r.records.size() == 1);
  const auto& a = r.records[0];
  CHECK(a.icao.str() == "A637E1");
  CHECK(a.toa == 46800.40625);
  CHECK(a.nacp == 9);
  CHECK_FALSE(a.utc_coupled);
  CHECK(a.pos == Vec2{1000.0, -2500.0});
  CHECK(a.vel == Vec2{120.0, -5.0});
  CHECK(a.link_version == 2);
  CHECK(a.link_1090es);
  CHECK(r.malformed.empty());
}

TEST_CASE("parse_reports on an empty stream") {
  std::istringstream in("");
  const auto r = parse_reports(in);
  CHECK(r.records.empty());
  CHECK(r.malformed.empty());
  CHECK(r.lines_read == 0);
}

TEST_CASE("malformed lines are collected with line numbers") {
  std::string text;
  for (int i = 0; i < 10; ++i) text += report_line("A637E1", 46800.0 + i, 9, false);
  text += report_line("A637E1", 46811.0, 13, false);  // line 11
  for (int i = 0; i < 10; ++i) text += report_line("A637E1", 46820.0 + i, 9, false);
  std::istringstream in(text);
  const auto r = parse_reports(in);
  CHECK(r.records.size() == 20);
  REQUIRE(r.malformed.size() == 1);
  CHECK(r.malformed[0].line == 11);
}

TEST_CASE("too many malformed lines is corrupt input") {
  std::string text = report_line("A637E1", 1.0, 9, false) + "not json\n{\"icao\": 5}\n";
  std::istringstream in(text);
  try {
    (void)parse_reports(in);
    FAIL("expected corrupt_input");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::corrupt_input);
  }
  std::istringstream again(text);
  CHECK(parse_reports(again, ParseOptions{1.0}).records.size() == 1);
}

TEST_CASE("missing file is an io error") {
  try {
    (void)read_reports_file("/nonexistent/reports.jsonl");
    FAIL("expected io error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::io);
  }
}

TEST_CASE("optional link field") {
  std::string line = report_line("A637E1", 1.0, 9, false);
  line.insert(line.size() - 2, R"(, "link": "UAT")");
  std::istringstream in(line);
  const auto r = parse_reports(in);
  REQUIRE(r.records.size() == 1);
  CHECK_FALSE(r.records[0].link_1090es);
}

TEST_CASE("parse_track_points") {
  std::istringstream in(R"({"icao": "A637E1", "t_s": 100.0, "x_m": 0, "y_m": 0, "vx_mps": 100, "vy_mps": 0})"
                        "\n"
                        R"({"icao": "A637E1", "t_s": 99.0, "x_m": 0, "y_m": 0, "vx_mps": 100, "vy_mps": 0})"
                        "\n");
  const auto r = parse_track_points(in);
  REQUIRE(r.records.size() == 2);
  CHECK(r.records[0].point.t == 100.0);  // not reordered
  CHECK(r.records[1].point.t == 99.0);
  CHECK(r.records[0].point.vel == Vec2{100.0, 0.0});
  std::istringstream empty("");
  CHECK(parse_track_points(empty).records.empty());
}

TEST_CASE("segment_tracks") {
  SUBCASE("one gap above the threshold gives two tracks") {
    auto times = range(0, 100);
    for (double t : range(1000, 1100)) times.push_back(t);
    const auto tracks = segment_tracks(one_aircraft(times), 60.0);
    REQUIRE(tracks.size() == 2);
    CHECK(tracks[0].track_index == 0);
    CHECK(tracks[1].track_index == 1);
    CHECK(tracks[0].points.size() == 101);
    CHECK(tracks[1].t_begin() == 1000.0);
  }
  SUBCASE("continuous data gives one track") {
    CHECK(segment_tracks(one_aircraft(range(0, 600)), 60.0).size() == 1);
  }
  SUBCASE("three isolated points give nothing") {
    CHECK(segment_tracks(one_aircraft({0.0, 500.0, 1000.0}), 60.0).empty());
  }
  SUBCASE("a gap exactly at the threshold does not split") {
    CHECK(segment_tracks(one_aircraft({0, 1, 2, 3, 63, 64, 65, 66}), 60.0).size() == 1);
  }
  SUBCASE("unsorted input is sorted and duplicates dropped") {
    const auto tracks = segment_tracks(one_aircraft({3, 1, 2, 0, 2, 4}), 60.0);
    REQUIRE(tracks.size() == 1);
    std::vector<double> ts;
    for (const auto& p : tracks[0].points) ts.push_back(p.t);
    CHECK(ts == std::vector<double>{0, 1, 2, 3, 4});
  }
}

TEST_CASE("segmentation properties") {
  // random gaps; every retained point appears exactly once and in time order
  std::vector<double> times;
  double t = 0.0;
  unsigned state = 12345;
  for (int i = 0; i < 500; ++i) {
    state = state * 1103515245u + 12345u;
    const unsigned r = (state >> 16) % 100;
    t += r < 5 ? 61.0 + r * 10.0 : 1.0 + r * 0.01;
    times.push_back(t);
  }
  const auto tracks = segment_tracks(one_aircraft(times), 60.0);
  std::vector<double> joined;
  for (const auto& tr : tracks) {
    CHECK(tr.points.size() >= kMinTrackPoints);
    for (std::size_t i = 1; i < tr.points.size(); ++i) CHECK(tr.points[i].t - tr.points[i - 1].t <= 60.0);
    for (const auto& p : tr.points) joined.push_back(p.t);
  }
  CHECK(std::is_sorted(joined.begin(), joined.end()));
  CHECK(std::adjacent_find(joined.begin(), joined.end()) == joined.end());
  for (double x : joined) CHECK(std::find(times.begin(), times.end(), x) != times.end());
}

TEST_CASE("day rollover unwrapping") {
  std::vector<AdsbReport> reports(3);
  reports[0].toa = 86399.5;
  reports[1].toa = 0.25;
  reports[2].toa = 0.75;
  unwrap_day_rollover(reports);
  CHECK(reports[1].toa == 86400.25);
  CHECK(reports[2].toa == 86400.75);

  std::vector<AdsbReport> jitter(2);  // small backwards step is not a rollover
  jitter[0].toa = 100.0;
  jitter[1].toa = 99.0;
  unwrap_day_rollover(jitter);
  CHECK(jitter[1].toa == 99.0);
}

namespace {

struct Fleet {
  std::map<Icao, std::vector<AdsbReport>> reports;
  std::vector<Track> tracks;
};

Fleet make_fleet(int nacp, bool utc, int n_tracks, int link = 2) {
  Fleet f;
  const Icao icao(0xB0B);
  std::map<Icao, std::vector<TrackPoint>> pts;
  for (int k = 0; k < n_tracks; ++k) {
    for (double t : range(k * 1000.0, k * 1000.0 + 20.0)) {
      pts[icao].push_back({t, {}, {}});
      AdsbReport r;
      r.icao = icao;
      r.toa = t + 0.3;
      r.nacp = nacp;
      r.utc_coupled = utc;
      r.link_version = link;
      f.reports[icao].push_back(r);
    }
  }
  f.tracks = segment_tracks(pts);
  return f;
}

}  // namespace

TEST_CASE("filter_aircraft") {
  SUBCASE("NACp 9, non-UTC, two tracks is accepted") {
    const auto f = make_fleet(9, false, 2);
    const auto r = filter_aircraft(f.reports, f.tracks);
    CHECK(r.accepted.size() == 1);
    CHECK(r.summary.accepted_icaos == 1);
    CHECK(r.summary.unique_icaos == 1);
    CHECK(r.summary.total_reports == 42);
  }
  SUBCASE("UTC coupled is rejected") {
    const auto f = make_fleet(9, true, 2);
    const auto r = filter_aircraft(f.reports, f.tracks);
    CHECK(r.accepted.empty());
    CHECK(r.rejected.begin()->second == "utc_coupled");
    CHECK(r.summary.rejected_reason_counts.at("utc_coupled") == 1);
    CHECK(r.summary.utc_coupled_icaos == 1);
  }
  SUBCASE("one track is too few") {
    const auto f = make_fleet(9, false, 1);
    const auto r = filter_aircraft(f.reports, f.tracks);
    CHECK(r.rejected.begin()->second == "too_few_tracks");
  }
  SUBCASE("a single out-of-range NACp rejects the aircraft") {
    auto f = make_fleet(9, false, 2);
    f.reports.begin()->second[5].nacp = 7;
    const auto r = filter_aircraft(f.reports, f.tracks);
    CHECK(r.rejected.begin()->second == "nacp_out_of_range");
  }
  SUBCASE("reports outside every track do not count") {
    auto f = make_fleet(9, false, 2);
    AdsbReport stray = f.reports.begin()->second.front();
    stray.toa = 5000.0;
    stray.nacp = 3;
    f.reports.begin()->second.push_back(stray);
    CHECK(filter_aircraft(f.reports, f.tracks).accepted.size() == 1);
  }
  SUBCASE("non-1090ES link") {
    auto f = make_fleet(9, false, 2);
    for (auto& r : f.reports.begin()->second) r.link_1090es = false;
    CHECK(filter_aircraft(f.reports, f.tracks).rejected.begin()->second == "not_1090es");
  }
  SUBCASE("idempotent") {
    const auto f = make_fleet(9, false, 2);
    const auto first = filter_aircraft(f.reports, f.tracks);
    std::map<Icao, std::vector<AdsbReport>> kept;
    for (const auto& icao : first.accepted) kept[icao] = f.reports.at(icao);
    CHECK(filter_aircraft(kept, f.tracks).accepted == first.accepted);
  }
}

TEST_CASE("reports_within is inclusive") {
  Track tr{Icao(1), 0, {{10, {}, {}}, {11, {}, {}}, {12, {}, {}}, {13, {}, {}}}};
  std::vector<AdsbReport> reps(5);
  const double toas[] = {9.9, 10.0, 11.5, 13.0, 13.1};
  for (int i = 0; i < 5; ++i) reps[i].toa = toas[i];
  const auto in = reports_within(reps, tr);
  REQUIRE(in.size() == 3);
  CHECK(in.front().toa == 10.0);
  CHECK(in.back().toa == 13.0);
}
