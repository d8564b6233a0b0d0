#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "adsbul/ingest.hpp"
#include "adsbul/io.hpp"

using namespace adsbul;
namespace fs = std::filesystem;

TEST_CASE("report JSON round-trips through the parser") {
  AdsbReport r;
  r.icao = Icao(0xA637E1);
  r.toa = 46800.40625;
  r.pos = {1000.0, -2500.0};
  r.vel = {120.0, -5.0};
  r.nacp = 9;
  r.link_version = 1;
  const auto j = io::to_json(r);
  CHECK(j.at("icao") == "A637E1");
  CHECK(j.at("toa_s") == 46800.40625);
  CHECK(j.at("vy_mps") == -5.0);
  std::istringstream in(j.dump() + "\n");
  const auto back = parse_reports(in).records.at(0);
  CHECK(back.toa == r.toa);
  CHECK(back.pos == r.pos);
  CHECK(back.link_version == 1);
}

TEST_CASE("track point JSON") {
  const auto j = io::to_json(Icao(0xA637E1), TrackPoint{46800.5, {1010.0, -2501.0}, {120.1, -5.2}});
  CHECK(j.at("t_s") == 46800.5);
  std::istringstream in(j.dump() + "\n");
  CHECK(parse_track_points(in).records.at(0).point.vel == Vec2{120.1, -5.2});
}

TEST_CASE("format_number is shortest round-trip") {
  CHECK(io::format_number(0.1) == "0.1");
  CHECK(io::format_number(46800.40625) == "46800.40625");
  CHECK(std::stod(io::format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("estimates csv") {
  LatencyEstimate e;
  e.icao = Icao(0xA637E1);
  e.track_index = 2;
  e.toa = 46800.5;
  e.ul = 0.2;
  e.along_track_error = 20.0;
  e.speed_used = 100.0;
  LatencyEstimate x = e;
  x.excluded = true;
  x.reason = "speed_too_low";
  std::ostringstream out;
  io::write_estimates_csv(out, {e, x});
  std::istringstream lines(out.str());
  std::string header, first, second;
  std::getline(lines, header);
  std::getline(lines, first);
  std::getline(lines, second);
  CHECK(header == "icao,track_index,toa_s,ul_s,e_at_m,speed_mps,excluded,reason");
  CHECK(first == "A637E1,2,46800.5,0.2,20,100,false,");
  CHECK(second.find(",true,speed_too_low") != std::string::npos);
}

TEST_CASE("scenario JSON") {
  const auto j = nlohmann::json::parse(R"({
    "icao": "A00042", "seed": 9, "nacp": 10, "utc_coupled": true, "desync_offset_s": 0.05, "link_version": 1,
    "profile": {"kind": "coordinated_turn", "speed_mps": 150, "heading_rad": 1.0, "turn_rate_radps": 0.02,
                "duration_s": 60, "report_rate_hz": 2, "initial_position_m": [10, 20]},
    "ul_model": {"kind": "uniform", "lo_s": -0.1, "hi_s": 0.2}
  })");
  const auto sc = io::scenario_from_json(j);
  CHECK(sc.icao == Icao(0xA00042));
  CHECK(sc.seed == 9);
  CHECK(sc.profile.kind == TrajectoryKind::coordinated_turn);
  CHECK(sc.profile.initial_position == Vec2{10.0, 20.0});
  CHECK(sc.ul_model.kind == UlModelKind::uniform);
  CHECK(sc.ul_model.hi == 0.2);
  CHECK(sc.desync_offset == 0.05);
  const auto again = io::scenario_from_json(io::to_json(sc));
  CHECK(io::to_json(again) == io::to_json(sc));
  CHECK(io::scenarios_from_json(nlohmann::json{{"scenarios", {j, j}}}).size() == 2);
  CHECK_THROWS_AS(io::scenario_from_json(nlohmann::json::parse(R"({"profile": {"kind": "loop"}})")), Error);
  CHECK_THROWS_AS(io::scenario_from_json(nlohmann::json::parse(R"({"nacp": "nine"})")), Error);
}

TEST_CASE("simulation files are deterministic and parse back") {
  SyntheticScenario a, b;
  b.icao = Icao(0xA00002);
  b.utc_coupled = true;
  b.profile.duration = 30.0;
  const auto dir = fs::temp_directory_path() / "adsbul-test-io";
  fs::remove_all(dir);
  const auto files = io::write_simulation({a, b}, dir / "one");
  io::write_simulation({a, b}, dir / "two");
  for (const char* name : {"reports.jsonl", "tracks.jsonl", "ground_truth.jsonl", "simulation.json"})
    CHECK(io::read_text_file(dir / "one" / name) == io::read_text_file(dir / "two" / name));
  const auto reports = read_reports_file(files.reports.string());
  CHECK(reports.malformed.empty());
  CHECK(std::is_sorted(reports.records.begin(), reports.records.end(),
                       [](const auto& x, const auto& y) { return x.toa < y.toa; }));
  const auto manifest = io::load_json(files.manifest.string());
  CHECK(manifest.at("random_algorithm") == kRandomAlgorithm);
  const auto truth = io::read_text_file(files.ground_truth);
  CHECK(truth.find("\"t_star_s\"") != std::string::npos);
  CHECK(truth.find("\"true_x_m\"") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("io errors") {
  try {
    (void)io::read_text_file("/nonexistent/file");
    FAIL("expected io error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::io);
  }
  CHECK_THROWS_AS(io::load_json("/nonexistent/file.json"), Error);
}
