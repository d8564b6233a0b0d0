#include "adsbul/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace adsbul::io {

std::string format_number(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

json to_json(const AdsbReport& r) {
  json j = {{"icao", r.icao.str()}, {"toa_s", r.toa},   {"x_m", r.pos.x},
            {"y_m", r.pos.y},       {"vx_mps", r.vel.x}, {"vy_mps", r.vel.y},
            {"nacp", r.nacp},       {"utc_coupled", r.utc_coupled}, {"link_version", r.link_version}};
  if (!r.link_1090es) j["link"] = "UAT";
  if (!r.source_tag.empty()) j["source_tag"] = r.source_tag;
  return j;
}

json to_json(Icao icao, const TrackPoint& p) {
  return {{"icao", icao.str()}, {"t_s", p.t}, {"x_m", p.pos.x}, {"y_m", p.pos.y}, {"vx_mps", p.vel.x}, {"vy_mps", p.vel.y}};
}

json to_json(const GroundTruthRecord& g) {
  return {{"icao", g.icao.str()},      {"toa_s", g.toa}, {"ul_s", g.ul}, {"t_star_s", g.t_star}, {"t_r_s", g.t_r},
          {"true_x_m", g.true_position.x}, {"true_y_m", g.true_position.y}};
}

json to_json(const IngestSummary& s) {
  return {{"total_reports", s.total_reports},
          {"unique_icaos", s.unique_icaos},
          {"utc_coupled_icaos", s.utc_coupled_icaos},
          {"accepted_icaos", s.accepted_icaos},
          {"rejected_reason_counts", s.rejected_reason_counts}};
}

namespace {

json bounds_json(const AccelBounds& b) {
  auto axis = [](const AxisBounds& a) { return json::array({a.lo, a.hi}); };
  return {{"x", axis(b.x)}, {"y", axis(b.y)}};
}

}  // namespace

json to_json(const FitDiagnostics& d) {
  return {{"s_final", d.s_final},
          {"residual_sum_x", d.residual_sum_x},
          {"residual_sum_y", d.residual_sum_y},
          {"iterations", d.iterations},
          {"accel_bounds", bounds_json(d.accel_bounds)}};
}

json to_json(const Histogram& h) { return {{"bin_width_s", h.bin_width}, {"edges_s", h.edges}, {"counts", h.counts}}; }

json to_json(const TrackLatencySummary& s) {
  json j = {{"icao", s.icao.str()},
            {"track_index", s.track_index},
            {"n_used", s.n_used},
            {"mean_ul_s", s.mean_ul},
            {"std_ul_s", s.std_ul},
            {"histogram", to_json(s.histogram)},
            {"mtpes_ul_s", s.mtpes_ul},
            {"mtpes_residual_m2", s.mtpes_residual},
            {"fit", to_json(s.fit)}};
  j["epu_variant"] = s.epu_ul ? json{{"ul_s", *s.epu_ul}} : json("infeasible");
  return j;
}

json to_json(const FleetReport& f) {
  json aircraft = json::array();
  for (const auto& g : f.aircraft) {
    json tracks = json::array();
    for (const auto& e : g.tracks) {
      auto t = to_json(e.summary);
      t["sequence"] = e.sequence;
      t["mean_class"] = to_string(e.mean_class);
      tracks.push_back(std::move(t));
    }
    aircraft.push_back({{"icao", g.icao.str()}, {"tracks", std::move(tracks)}});
  }
  json counts = json::object();
  for (const auto& [cls, n] : f.class_counts) counts[std::string(to_string(cls))] = n;
  return {{"n_tracks", f.n_tracks},
          {"mean_of_means_s", f.mean_of_means},
          {"std_of_means_s", f.std_of_means},
          {"class_counts", counts},
          {"aircraft", std::move(aircraft)}};
}

json to_json(const AnomalyFinding& f) {
  json evidence = json::object();
  switch (f.kind) {
    case AnomalyKind::epoch_quantization:
      evidence = {{"on_epoch_fraction", f.on_epoch_fraction}, {"residuals_s", f.epoch_residuals}};
      break;
    case AnomalyKind::speed_mismatch:
      evidence = {{"median_offset_mps", f.median_speed_offset}, {"pairs", f.speed_pairs}};
      break;
    case AnomalyKind::link_noncompliance: {
      json hist = json::object();
      for (const auto& [v, n] : f.link_versions) hist[std::to_string(v)] = n;
      evidence = {{"link_versions", hist}};
      break;
    }
  }
  return {{"icao", f.icao.str()},
          {"kind", to_string(f.kind)},
          {"triggered", f.triggered},
          {"status", to_string(f.status)},
          {"n_reports", f.n_reports},
          {"evidence", evidence}};
}

namespace {

TrajectoryKind trajectory_kind(const std::string& s) {
  if (s == "straight") return TrajectoryKind::straight;
  if (s == "coordinated_turn") return TrajectoryKind::coordinated_turn;
  if (s == "piecewise") return TrajectoryKind::piecewise;
  throw Error(ErrorCode::invalid_input, "unknown trajectory kind '" + s + "'");
}

const char* trajectory_kind_name(TrajectoryKind k) {
  switch (k) {
    case TrajectoryKind::straight: return "straight";
    case TrajectoryKind::coordinated_turn: return "coordinated_turn";
    case TrajectoryKind::piecewise: return "piecewise";
  }
  return "straight";
}

UlModelKind ul_kind(const std::string& s) {
  if (s == "constant") return UlModelKind::constant;
  if (s == "uniform") return UlModelKind::uniform;
  if (s == "per_report_list") return UlModelKind::per_report_list;
  throw Error(ErrorCode::invalid_input, "unknown UL model kind '" + s + "'");
}

const char* ul_kind_name(UlModelKind k) {
  switch (k) {
    case UlModelKind::constant: return "constant";
    case UlModelKind::uniform: return "uniform";
    case UlModelKind::per_report_list: return "per_report_list";
  }
  return "constant";
}

}  // namespace

SyntheticScenario scenario_from_json(const json& j) {
  try {
    if (!j.is_object()) throw Error(ErrorCode::invalid_input, "scenario must be a JSON object");
    SyntheticScenario s;
    if (j.contains("icao")) s.icao = Icao::parse(j.at("icao").get<std::string>());
    if (j.contains("profile")) {
      const auto& p = j.at("profile");
      auto& pr = s.profile;
      pr.kind = trajectory_kind(p.value("kind", std::string("straight")));
      if (p.contains("initial_position_m")) {
        const auto xy = p.at("initial_position_m").get<std::vector<double>>();
        if (xy.size() != 2) throw Error(ErrorCode::invalid_input, "initial_position_m must have 2 entries");
        pr.initial_position = {xy[0], xy[1]};
      }
      pr.speed = p.value("speed_mps", pr.speed);
      pr.heading = p.value("heading_rad", pr.heading);
      pr.turn_rate = p.value("turn_rate_radps", pr.turn_rate);
      pr.duration = p.value("duration_s", pr.duration);
      pr.report_rate_hz = p.value("report_rate_hz", pr.report_rate_hz);
      pr.start_time = p.value("start_time_s", pr.start_time);
      if (p.contains("legs")) {
        for (const auto& leg : p.at("legs")) {
          pr.legs.push_back({leg.at("duration_s").get<double>(), leg.value("turn_rate_radps", 0.0)});
        }
      }
    }
    if (j.contains("ul_model")) {
      const auto& u = j.at("ul_model");
      s.ul_model.kind = ul_kind(u.value("kind", std::string("constant")));
      s.ul_model.value = u.value("value_s", 0.0);
      s.ul_model.lo = u.value("lo_s", 0.0);
      s.ul_model.hi = u.value("hi_s", 0.0);
      if (u.contains("values_s")) s.ul_model.values = u.at("values_s").get<std::vector<double>>();
    }
    s.nacp = j.value("nacp", s.nacp);
    s.utc_coupled = j.value("utc_coupled", s.utc_coupled);
    s.desync_offset = j.value("desync_offset_s", s.desync_offset);
    s.link_version = j.value("link_version", s.link_version);
    s.seed = j.value("seed", s.seed);
    if (j.contains("position_sigma_m") && !j.at("position_sigma_m").is_null()) {
      s.position_sigma = j.at("position_sigma_m").get<double>();
    }
    s.velocity_sigma = j.value("velocity_sigma_mps", s.velocity_sigma);
    s.tracker_sigma = j.value("tracker_sigma_m", s.tracker_sigma);
    s.tracker_rate_hz = j.value("tracker_rate_hz", s.tracker_rate_hz);
    if (s.nacp < 0 || s.nacp > EpuTable::kMaxNacp) throw Error(ErrorCode::invalid_nacp, "scenario nacp out of range");
    validate(s.profile);
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_input, std::string("scenario: ") + e.what());
  }
}

json to_json(const SyntheticScenario& s) {
  const auto& p = s.profile;
  json legs = json::array();
  for (const auto& leg : p.legs) legs.push_back({{"duration_s", leg.duration}, {"turn_rate_radps", leg.turn_rate}});
  return {{"icao", s.icao.str()},
          {"profile",
           {{"kind", trajectory_kind_name(p.kind)},
            {"initial_position_m", {p.initial_position.x, p.initial_position.y}},
            {"speed_mps", p.speed},
            {"heading_rad", p.heading},
            {"turn_rate_radps", p.turn_rate},
            {"duration_s", p.duration},
            {"report_rate_hz", p.report_rate_hz},
            {"start_time_s", p.start_time},
            {"legs", legs}}},
          {"ul_model",
           {{"kind", ul_kind_name(s.ul_model.kind)},
            {"value_s", s.ul_model.value},
            {"lo_s", s.ul_model.lo},
            {"hi_s", s.ul_model.hi},
            {"values_s", s.ul_model.values}}},
          {"nacp", s.nacp},
          {"utc_coupled", s.utc_coupled},
          {"desync_offset_s", s.desync_offset},
          {"link_version", s.link_version},
          {"seed", s.seed},
          {"position_sigma_m", s.position_sigma ? json(*s.position_sigma) : json(nullptr)},
          {"velocity_sigma_mps", s.velocity_sigma},
          {"tracker_sigma_m", s.tracker_sigma},
          {"tracker_rate_hz", s.tracker_rate_hz}};
}

std::vector<SyntheticScenario> scenarios_from_json(const json& j) {
  std::vector<SyntheticScenario> out;
  if (j.is_object() && j.contains("scenarios")) {
    for (const auto& item : j.at("scenarios")) out.push_back(scenario_from_json(item));
  } else {
    out.push_back(scenario_from_json(j));
  }
  return out;
}

json load_json(const std::string& path) {
  const auto text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_input, path + ": " + e.what());
  }
}

std::vector<SyntheticScenario> load_scenarios(const std::string& path) { return scenarios_from_json(load_json(path)); }

void write_estimates_csv(std::ostream& out, const std::vector<LatencyEstimate>& estimates, bool header) {
  if (header) out << kEstimatesCsvHeader << '\n';
  for (const auto& e : estimates) {
    out << e.icao.str() << ',' << e.track_index << ',' << format_number(e.toa) << ',' << format_number(e.ul) << ','
        << format_number(e.along_track_error) << ',' << format_number(e.speed_used) << ','
        << (e.excluded ? "true" : "false") << ',' << e.reason << '\n';
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::io, "write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SimulationFiles write_simulation(const std::vector<SyntheticScenario>& scenarios, const std::filesystem::path& out_dir,
                                 const EpuTable& table) {
  std::vector<AdsbReport> reports;
  std::vector<GroundTruthRecord> truth;
  std::vector<std::pair<Icao, TrackPoint>> points;
  for (const auto& sc : scenarios) {
    auto sim = generate_reports(sc, table);
    reports.insert(reports.end(), sim.reports.begin(), sim.reports.end());
    truth.insert(truth.end(), sim.truth.begin(), sim.truth.end());
    for (const auto& p : generate_track_points(sc)) points.emplace_back(sc.icao, p);
  }
  // Interleave aircraft the way a recording would; reports and truth rows stay paired.
  std::vector<std::size_t> order(reports.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return reports[a].toa < reports[b].toa; });
  std::stable_sort(points.begin(), points.end(), [](const auto& a, const auto& b) { return a.second.t < b.second.t; });

  std::ostringstream rep, gt, trk;
  for (auto i : order) {
    rep << to_json(reports[i]).dump() << '\n';
    gt << to_json(truth[i]).dump() << '\n';
  }
  for (const auto& [icao, p] : points) trk << to_json(icao, p).dump() << '\n';

  json manifest = {{"random_algorithm", kRandomAlgorithm}, {"scenarios", json::array()}};
  for (const auto& sc : scenarios) manifest["scenarios"].push_back(to_json(sc));

  SimulationFiles files{out_dir / "reports.jsonl", out_dir / "tracks.jsonl", out_dir / "ground_truth.jsonl",
                        out_dir / "simulation.json"};
  write_text_file(files.reports, rep.str());
  write_text_file(files.tracks, trk.str());
  write_text_file(files.ground_truth, gt.str());
  write_text_file(files.manifest, manifest.dump(2) + "\n");
  return files;
}

}  // namespace adsbul::io
