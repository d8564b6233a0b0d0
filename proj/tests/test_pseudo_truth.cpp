#include <doctest.h>

#include <cmath>

#include "adsbul/ingest.hpp"
#include "adsbul/kernels.hpp"
#include "adsbul/pseudo_truth.hpp"
#include "adsbul/simgen.hpp"

using namespace adsbul;

namespace {

SyntheticScenario straight(std::uint64_t seed, double tracker_sigma) {
  SyntheticScenario sc;
  sc.profile.speed = 120.0;
  sc.profile.heading = 0.3;
  sc.profile.duration = 120.0;
  sc.seed = seed;
  sc.tracker_sigma = tracker_sigma;
  return sc;
}

struct Fixture {
  Track track;
  std::vector<AdsbReport> reports;
};

Fixture fixture(const SyntheticScenario& sc) {
  const auto sim = generate_reports(sc);
  Fixture f{Track{sc.icao, 0, generate_track_points(sc)}, {}};
  f.reports = reports_within(sim.reports, f.track);
  return f;
}

}  // namespace

TEST_CASE("reported_accel_bounds") {
  std::vector<AdsbReport> reports(11);
  for (int i = 0; i <= 10; ++i) {
    reports[i].toa = i;
    reports[i].vel = {100.0, 5.0};
  }
  SUBCASE("constant velocity gives +-margin") {
    const auto b = reported_accel_bounds(reports, 0.5);
    CHECK(b.x.lo == -0.5);
    CHECK(b.x.hi == 0.5);
    CHECK(b.y.lo == -0.5);
    CHECK(b.y.hi == 0.5);
  }
  SUBCASE("uniform rise of vx") {
    for (int i = 0; i <= 10; ++i) reports[i].vel.x = 100.0 + i;
    const auto b = reported_accel_bounds(reports, 0.0);
    CHECK(b.x.lo == doctest::Approx(1.0));
    CHECK(b.x.hi == doctest::Approx(1.0));
    const auto w = reported_accel_bounds(reports, 0.25);
    CHECK(w.x.lo == doctest::Approx(0.75));
    CHECK(w.x.hi == doctest::Approx(1.25));
  }
  SUBCASE("all TOAs equal") {
    for (auto& r : reports) r.toa = 5.0;
    try {
      (void)reported_accel_bounds(reports, 0.5);
      FAIL("expected insufficient_data");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::insufficient_data);
    }
  }
}

TEST_CASE("bounds contain the generator's lateral acceleration in a turn") {
  SyntheticScenario sc = straight(3, 0.0);
  sc.profile.kind = TrajectoryKind::coordinated_turn;
  sc.profile.turn_rate = 0.03;
  const auto sim = generate_reports(sc);
  const auto b = reported_accel_bounds(sim.reports, 0.0);
  for (double t = 0.0; t <= sc.profile.duration; t += 0.5) {
    const auto a = truth_acceleration(sc.profile, t);
    CHECK(a.x >= b.x.lo - 0.5);
    CHECK(a.x <= b.x.hi + 0.5);
    CHECK(a.y >= b.y.lo - 0.5);
    CHECK(a.y <= b.y.hi + 0.5);
  }
}

TEST_CASE("noiseless constant velocity terminates at s = 0") {
  auto sc = straight(1, 0.0);
  sc.position_sigma = 0.0;
  const auto f = fixture(sc);
  const auto ptt = fit_pseudo_truth(f.track, f.reports, EpuTable::defaults());
  CHECK(ptt.s_final == 0.0);
  CHECK(ptt.iterations == 1);
  CHECK(ptt.residual_sum_x == 0.0);
}

TEST_CASE("noisy track terminates with acceleration inside the bounds on the grid") {
  const auto f = fixture(straight(2, 20.0));
  const auto ptt = fit_pseudo_truth(f.track, f.reports, EpuTable::defaults());
  CHECK(ptt.s_final > 0.0);
  CHECK(ptt.iterations > 1);
  CHECK(ptt.residual_sum_x <= ptt.s_final * (1 + 1e-6));
  CHECK(ptt.residual_sum_y <= ptt.s_final * (1 + 1e-6));
  // independent grid scan of order-2 evaluations at 20 Hz plus knots
  std::vector<double> grid = ptt.x.knots();
  for (double t = ptt.t_min(); t <= ptt.t_max(); t += 0.05) grid.push_back(t);
  for (double t : grid) {
    const auto a = ptt.acceleration(t);
    CHECK(ptt.accel_bounds.x.contains(a.x));
    CHECK(ptt.accel_bounds.y.contains(a.y));
  }
  // schedule: s_final = s1 * 2^(iterations - 2)
  const double sigma = 30.0 / 2.45;
  const double s1 = static_cast<double>(f.track.points.size()) * sigma * sigma;
  CHECK(ptt.s_final == doctest::Approx(s1 * std::pow(2.0, ptt.iterations - 2)));
  const auto d = diagnostics(ptt);
  CHECK(d.s_final == ptt.s_final);
  CHECK(d.max_violation == 0.0);
}

TEST_CASE("inconsistent bounds raise smoothing-failed with diagnostics") {
  // reports claim vx rises 1 m/s^2, so x-acceleration must stay in [0.5, 1.5];
  // the track is straight and every natural spline has zero acceleration at its ends
  const auto sc = straight(4, 20.0);
  auto sim = generate_reports(sc);
  for (auto& r : sim.reports) r.vel.x += r.toa - sc.profile.start_time;
  const Track track{sc.icao, 0, generate_track_points(sc)};
  try {
    (void)fit_pseudo_truth(track, reports_within(sim.reports, track), EpuTable::defaults());
    FAIL("expected smoothing failure");
  } catch (const SmoothingFailed& e) {
    CHECK(e.code() == ErrorCode::smoothing_failed);
    CHECK(e.last().iterations == 18);
    CHECK(e.last().max_violation > 0.0);
  }
}

TEST_CASE("acceleration grid covers knots and the 10 Hz lattice") {
  const std::vector<double> t{0.0, 0.33, 1.0, 2.0};
  const auto g = fit_smoothing_spline(t, t, 0.0);
  const auto grid = acceleration_grid(g, 10.0);
  CHECK(std::is_sorted(grid.begin(), grid.end()));
  CHECK(std::find(grid.begin(), grid.end(), 0.33) != grid.end());
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == 2.0);
  CHECK(grid.size() == 22);  // 21 lattice points + one off-lattice knot
}

TEST_CASE("serial and parallel pseudo-truth fits are identical") {
  const auto f = fixture(straight(5, 20.0));
  PseudoTruthOptions serial;
  serial.parallel = false;
  const auto a = fit_pseudo_truth(f.track, f.reports, EpuTable::defaults(), serial);
  const auto b = fit_pseudo_truth(f.track, f.reports, EpuTable::defaults());
  CHECK(a.s_final == b.s_final);
  CHECK(a.iterations == b.iterations);
  for (double t = a.t_min(); t <= a.t_max(); t += 1.7) CHECK(a.position(t) == b.position(t));
}

TEST_CASE("interpolate_track") {
  std::vector<TrackPoint> pts;
  for (int i = 0; i < 10; ++i) pts.push_back({i * 1.0, {i * 2.0, -i * 1.0}, {}});
  const auto ptt = interpolate_track(pts);
  CHECK(ptt.position(4.5).x == doctest::Approx(9.0));
  CHECK(ptt.velocity(4.5).y == doctest::Approx(-1.0));
}
