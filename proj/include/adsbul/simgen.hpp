#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adsbul/model.hpp"

namespace adsbul {

enum class TrajectoryKind { straight, coordinated_turn, piecewise };

/// One constant-turn-rate leg of a piecewise profile; turn_rate 0 is a straight leg.
struct TrajectoryLeg {
  double duration = 0.0;   // s
  double turn_rate = 0.0;  // rad/s, positive turns counter-clockwise
};

/// Constant-speed planar kinematics. Heading is measured counter-clockwise
/// from the +x axis. Times passed to the truth functions are relative to the
/// profile start; start_time anchors them to UTC seconds of day.
struct TrajectoryProfile {
  TrajectoryKind kind = TrajectoryKind::straight;
  Vec2 initial_position;
  double speed = 100.0;     // m/s
  double heading = 0.0;     // rad
  double turn_rate = 0.0;   // rad/s, coordinated_turn only
  double duration = 240.0;  // s
  double report_rate_hz = 2.0;
  double start_time = 46800.0;  // 13:00 UTC
  std::vector<TrajectoryLeg> legs;  // piecewise only; must cover duration
};

void validate(const TrajectoryProfile& profile);

Vec2 truth_position(const TrajectoryProfile& profile, double t);
Vec2 truth_velocity(const TrajectoryProfile& profile, double t);
Vec2 truth_acceleration(const TrajectoryProfile& profile, double t);

enum class UlModelKind { constant, uniform, per_report_list };

struct UlModel {
  UlModelKind kind = UlModelKind::constant;
  double value = 0.0;            // constant
  double lo = 0.0, hi = 0.0;     // uniform
  std::vector<double> values;    // per_report_list, cycled if shorter than the stream
};

struct SyntheticScenario {
  Icao icao{0xA00001};
  TrajectoryProfile profile;
  UlModel ul_model;
  int nacp = 9;
  bool utc_coupled = false;
  /// Alternating position-to-TOA mismatch: report n carries the position
  /// for t* - (-1)^n * desync_offset while its TOA is stamped normally.
  double desync_offset = 0.0;
  int link_version = 2;
  std::uint64_t seed = 1;
  std::optional<double> position_sigma;  // overrides EPU(nacp)/2.45 when set
  double velocity_sigma = 0.0;           // m/s per axis
  double tracker_sigma = 20.0;           // m per axis
  double tracker_rate_hz = 1.0;
};

inline constexpr const char* kRandomAlgorithm = "mt19937_64+std::normal_distribution";

struct GroundTruthRecord {
  Icao icao;
  double toa = 0.0;       // stamped TOA
  double ul = 0.0;        // injected
  double t_star = 0.0;    // true time of the reported position, before desync
  double t_r = 0.0;       // unrounded emission time
  Vec2 true_position;     // truth at the time the reported position refers to
};

struct SimulatedReports {
  std::vector<AdsbReport> reports;
  std::vector<GroundTruthRecord> truth;
};

/// Stamped TOA for an emission time: nearest 1/128 s, or nearest 200 ms epoch
/// when UTC coupled.
double stamp_toa(double t_r, bool utc_coupled);

/// Deterministic in the scenario (including seed). Emissions whose true time
/// falls outside the profile duration are skipped.
SimulatedReports generate_reports(const SyntheticScenario& scenario, const EpuTable& table = EpuTable::defaults());

/// Truth sampled at rate_hz from the profile start plus N(0, sigma^2) per axis;
/// velocities are the truth velocities.
std::vector<TrackPoint> generate_track_points(const SyntheticScenario& scenario, double sigma, double rate_hz);

/// Same, using the scenario's tracker_sigma and tracker_rate_hz.
std::vector<TrackPoint> generate_track_points(const SyntheticScenario& scenario);

}  // namespace adsbul
