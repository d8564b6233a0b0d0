#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#ifndef ADSBUL_CLI
#error "ADSBUL_CLI must name the CLI binary"
#endif

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "adsbul-cli-test";

int run(const std::string& args) {
  const std::string cmd = std::string(ADSBUL_CLI) + " " + args + " >" + (kWork / "stdout.txt").string() + " 2>" +
                          (kWork / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::size_t count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += !line.empty();
  return n;
}

// two non-UTC aircraft with two tracks each plus one UTC-coupled v1 aircraft
const char* kScenario = R"({"scenarios": [
  {"icao": "A00001", "seed": 1, "ul_model": {"kind": "constant", "value_s": 0.1},
   "profile": {"kind": "straight", "duration_s": 120, "start_time_s": 46800}},
  {"icao": "A00001", "seed": 2, "ul_model": {"kind": "constant", "value_s": 0.1},
   "profile": {"kind": "straight", "duration_s": 120, "start_time_s": 48000, "heading_rad": 1.2}},
  {"icao": "A00002", "seed": 3, "ul_model": {"kind": "constant", "value_s": -0.05},
   "profile": {"kind": "straight", "duration_s": 120, "start_time_s": 46900.3}},
  {"icao": "A00002", "seed": 4, "ul_model": {"kind": "constant", "value_s": -0.05},
   "profile": {"kind": "coordinated_turn", "turn_rate_radps": 0.003, "duration_s": 120, "start_time_s": 49000}},
  {"icao": "A00003", "seed": 5, "utc_coupled": true, "link_version": 1, "desync_offset_s": 0.05,
   "position_sigma_m": 0, "profile": {"kind": "straight", "speed_mps": 200, "duration_s": 60, "report_rate_hz": 5, "start_time_s": 47000}}
]})";

struct Setup {
  Setup() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
    write(kWork / "scenario.json", kScenario);
  }
};

}  // namespace

TEST_CASE_FIXTURE(Setup, "simulate, ingest, latency and anomaly end to end") {
  const auto sim = kWork / "sim";
  REQUIRE(run("simulate --scenario " + (kWork / "scenario.json").string() + " --out " + sim.string()) == 0);
  for (const char* f : {"reports.jsonl", "tracks.jsonl", "ground_truth.jsonl", "simulation.json"})
    CHECK(fs::exists(sim / f));
  const std::string inputs = " --reports " + (sim / "reports.jsonl").string() + " --tracks " + (sim / "tracks.jsonl").string();

  REQUIRE(run("ingest" + inputs + " --out " + (kWork / "ingest").string()) == 0);
  const auto summary = nlohmann::json::parse(slurp(kWork / "ingest" / "summary.json"));
  CHECK(summary.at("unique_icaos") == 3);
  CHECK(summary.at("accepted_icaos") == 2);
  CHECK(summary.at("rejected").at("A00003") == "utc_coupled");
  CHECK(fs::exists(kWork / "ingest" / "tracks" / "A00001_0.tracks.jsonl"));
  CHECK(fs::exists(kWork / "ingest" / "tracks" / "A00002_1.reports.jsonl"));

  REQUIRE(run("latency" + inputs + " --out " + (kWork / "latency").string()) == 0);
  const auto fleet = nlohmann::json::parse(slurp(kWork / "latency" / "fleet.json"));
  CHECK(fleet.at("n_tracks") == 4);
  CHECK(count_lines(kWork / "latency" / "track_means.csv") == 5);
  CHECK(count_lines(kWork / "latency" / "estimates.csv") > 400);
  CHECK(fs::exists(kWork / "latency" / "histograms.csv"));

  REQUIRE(run("anomaly --reports " + (sim / "reports.jsonl").string() + " --out " + (kWork / "anomaly").string()) == 0);
  std::ifstream findings(kWork / "anomaly" / "findings.jsonl");
  int triggered = 0, lines = 0;
  for (std::string line; std::getline(findings, line); ++lines) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.at("icao") == "A00003");
    triggered += j.at("triggered").get<bool>();
  }
  CHECK(lines == 3);
  CHECK(triggered == 3);
  CHECK(count_lines(kWork / "anomaly" / "epoch_fractions.csv") == 300);  // header + 299: both end emissions fall outside the profile
}

TEST_CASE_FIXTURE(Setup, "config file supplies defaults and flags override it") {
  const auto sim = kWork / "sim";
  REQUIRE(run("simulate --scenario " + (kWork / "scenario.json").string() + " --out " + sim.string()) == 0);
  const std::string inputs = " --reports " + (sim / "reports.jsonl").string() + " --tracks " + (sim / "tracks.jsonl").string();
  write(kWork / "strict.json", R"({"min-tracks": 3})");
  REQUIRE(run("ingest --config " + (kWork / "strict.json").string() + inputs + " --out " + (kWork / "a").string()) == 0);
  CHECK(nlohmann::json::parse(slurp(kWork / "a" / "summary.json")).at("accepted_icaos") == 0);
  REQUIRE(run("ingest --config " + (kWork / "strict.json").string() + " --min-tracks 2" + inputs + " --out " +
              (kWork / "b").string()) == 0);
  CHECK(nlohmann::json::parse(slurp(kWork / "b" / "summary.json")).at("accepted_icaos") == 2);
  write(kWork / "bad.json", R"({"min-tracks": "many"})");
  CHECK(run("ingest --config " + (kWork / "bad.json").string() + inputs) == 1);
}

TEST_CASE_FIXTURE(Setup, "exit codes") {
  CHECK(run("ingest --reports /nonexistent.jsonl --tracks /nonexistent.jsonl --out " + kWork.string()) == 1);
  CHECK(run("latency --tracks x.jsonl") == 1);
  CHECK(run("simulate --out " + kWork.string()) == 1);
  CHECK(run("frobnicate") == 1);
  CHECK(run("--help") == 0);
  write(kWork / "garbage.jsonl", "not json\nnor this\n");
  CHECK(run("anomaly --reports " + (kWork / "garbage.jsonl").string() + " --out " + kWork.string()) == 1);
  CHECK(slurp(kWork / "stderr.txt").find("corrupt") != std::string::npos);
  // a failing criterion is exit 3: an impossibly tight tolerance on the spline suite
  CHECK(run("validate --only 5 --tolerance-scale 1e-12") == 3);
  CHECK(run("validate --only 3") == 0);
  CHECK(slurp(kWork / "stdout.txt").find("PASS") != std::string::npos);
}
