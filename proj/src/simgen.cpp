#include "adsbul/simgen.hpp"

#include <cmath>
#include <random>

namespace adsbul {

namespace {

struct State {
  Vec2 pos;
  double heading = 0.0;
};

// Closed-form advance along a constant-turn-rate arc.
State advance(State s, double speed, double turn_rate, double dt) {
  if (turn_rate == 0.0) {
    s.pos = s.pos + (speed * dt) * Vec2{std::cos(s.heading), std::sin(s.heading)};
    return s;
  }
  const double r = speed / turn_rate;
  const double h1 = s.heading + turn_rate * dt;
  s.pos = s.pos + Vec2{r * (std::sin(h1) - std::sin(s.heading)), r * (std::cos(s.heading) - std::cos(h1))};
  s.heading = h1;
  return s;
}

struct Locate {
  State state;
  double turn_rate = 0.0;
};

Locate locate(const TrajectoryProfile& p, double t) {
  if (!(t >= 0.0 && t <= p.duration)) {
    throw Error(ErrorCode::out_of_domain, "t = " + std::to_string(t) + " outside [0, " + std::to_string(p.duration) + "]");
  }
  State s{p.initial_position, p.heading};
  switch (p.kind) {
    case TrajectoryKind::straight: return {advance(s, p.speed, 0.0, t), 0.0};
    case TrajectoryKind::coordinated_turn: return {advance(s, p.speed, p.turn_rate, t), p.turn_rate};
    case TrajectoryKind::piecewise: {
      double elapsed = 0.0;
      for (std::size_t i = 0; i < p.legs.size(); ++i) {
        const auto& leg = p.legs[i];
        if (t <= elapsed + leg.duration || i + 1 == p.legs.size()) {
          return {advance(s, p.speed, leg.turn_rate, t - elapsed), leg.turn_rate};
        }
        s = advance(s, p.speed, leg.turn_rate, leg.duration);
        elapsed += leg.duration;
      }
      break;
    }
  }
  throw Error(ErrorCode::invalid_input, "piecewise profile has no legs");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

void validate(const TrajectoryProfile& p) {
  if (!(p.speed > 0.0)) throw Error(ErrorCode::invalid_input, "profile speed must be > 0");
  if (!(p.duration > 0.0)) throw Error(ErrorCode::invalid_input, "profile duration must be > 0");
  if (!(p.report_rate_hz > 0.0)) throw Error(ErrorCode::invalid_input, "report rate must be > 0");
  if (!(p.start_time >= 0.0)) throw Error(ErrorCode::invalid_input, "start time must be >= 0");
  if (p.kind == TrajectoryKind::piecewise) {
    if (p.legs.empty()) throw Error(ErrorCode::invalid_input, "piecewise profile needs legs");
    double total = 0.0;
    for (const auto& leg : p.legs) {
      if (!(leg.duration > 0.0)) throw Error(ErrorCode::invalid_input, "leg duration must be > 0");
      total += leg.duration;
    }
    if (total + 1e-9 < p.duration) throw Error(ErrorCode::invalid_input, "legs do not cover the profile duration");
  }
}

Vec2 truth_position(const TrajectoryProfile& profile, double t) { return locate(profile, t).state.pos; }

Vec2 truth_velocity(const TrajectoryProfile& profile, double t) {
  const double h = locate(profile, t).state.heading;
  return {profile.speed * std::cos(h), profile.speed * std::sin(h)};
}

Vec2 truth_acceleration(const TrajectoryProfile& profile, double t) {
  const auto [state, omega] = locate(profile, t);
  const double k = profile.speed * omega;
  return {-k * std::sin(state.heading), k * std::cos(state.heading)};
}

double stamp_toa(double t_r, bool utc_coupled) {
  return utc_coupled ? std::round(t_r * 5.0) / 5.0 : std::round(t_r * 128.0) / 128.0;
}

SimulatedReports generate_reports(const SyntheticScenario& sc, const EpuTable& table) {
  const auto& p = sc.profile;
  validate(p);
  double sigma = 0.0;
  if (sc.position_sigma) {
    sigma = *sc.position_sigma;
  } else {
    const auto epu = epu_lookup(table, sc.nacp);
    if (!epu) throw Error(ErrorCode::invalid_input, "NACp 0 has no EPU; set position_sigma explicitly");
    sigma = epu_axis_sigma(*epu);
  }
  if (!(sigma >= 0.0) || !(sc.velocity_sigma >= 0.0)) throw Error(ErrorCode::invalid_input, "noise sigma must be >= 0");
  if (sc.ul_model.kind == UlModelKind::per_report_list && sc.ul_model.values.empty()) {
    throw Error(ErrorCode::invalid_input, "per_report_list UL model needs values");
  }

  std::mt19937_64 rng(sc.seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(sc.ul_model.lo, sc.ul_model.hi);

  SimulatedReports out;
  const auto emissions = static_cast<std::size_t>(std::floor(p.duration * p.report_rate_hz + 1e-9));
  std::size_t emitted = 0;
  for (std::size_t k = 0; k <= emissions; ++k) {
    const double t_r = static_cast<double>(k) / p.report_rate_hz;
    double ul = 0.0;
    switch (sc.ul_model.kind) {
      case UlModelKind::constant: ul = sc.ul_model.value; break;
      case UlModelKind::uniform: ul = uniform(rng); break;
      case UlModelKind::per_report_list: ul = sc.ul_model.values[k % sc.ul_model.values.size()]; break;
    }
    const double t_star = t_r - ul;
    const double jitter = (emitted % 2 == 0 ? 1.0 : -1.0) * sc.desync_offset;
    const double t_pos = t_star - jitter;
    if (!(t_pos >= 0.0 && t_pos <= p.duration)) continue;

    const Vec2 truth = truth_position(p, t_pos);
    const Vec2 vel = truth_velocity(p, t_pos);
    AdsbReport r;
    r.icao = sc.icao;
    r.toa = stamp_toa(p.start_time + t_r, sc.utc_coupled);
    r.pos = truth + Vec2{sigma * unit(rng), sigma * unit(rng)};
    r.vel = vel + Vec2{sc.velocity_sigma * unit(rng), sc.velocity_sigma * unit(rng)};
    r.nacp = sc.nacp;
    r.utc_coupled = sc.utc_coupled;
    r.link_version = sc.link_version;
    r.source_tag = "simgen";
    out.reports.push_back(r);
    out.truth.push_back({sc.icao, r.toa, ul, p.start_time + t_star, p.start_time + t_r, truth});
    ++emitted;
  }
  return out;
}

std::vector<TrackPoint> generate_track_points(const SyntheticScenario& sc, double sigma, double rate_hz) {
  const auto& p = sc.profile;
  validate(p);
  if (!(rate_hz > 0.0)) throw Error(ErrorCode::invalid_input, "tracker rate must be > 0");
  if (!(sigma >= 0.0)) throw Error(ErrorCode::invalid_input, "tracker sigma must be >= 0");
  // independent stream from the report noise
  std::mt19937_64 rng(splitmix64(sc.seed ^ 0x7472616B6572ULL));
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<TrackPoint> points;
  const auto n = static_cast<std::size_t>(std::floor(p.duration * rate_hz + 1e-9));
  points.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) / rate_hz;
    const Vec2 truth = truth_position(p, t);
    points.push_back({p.start_time + t, truth + Vec2{sigma * unit(rng), sigma * unit(rng)}, truth_velocity(p, t)});
  }
  return points;
}

std::vector<TrackPoint> generate_track_points(const SyntheticScenario& scenario) {
  return generate_track_points(scenario, scenario.tracker_sigma, scenario.tracker_rate_hz);
}

}  // namespace adsbul
