#include "adsbul/pseudo_truth.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "adsbul/kernels.hpp"

namespace adsbul {

namespace {

struct AxisSamples {
  std::vector<double> t, x, y;
};

AxisSamples split_axes(std::span<const TrackPoint> points) {
  AxisSamples s;
  s.t.reserve(points.size());
  s.x.reserve(points.size());
  s.y.reserve(points.size());
  for (const auto& p : points) {
    s.t.push_back(p.t);
    s.x.push_back(p.pos.x);
    s.y.push_back(p.pos.y);
  }
  return s;
}

int modal_nacp(std::span<const AdsbReport> reports) {
  std::map<int, int> counts;
  for (const auto& r : reports) ++counts[r.nacp];
  // ties resolve to the higher NACp (tighter bound)
  int best = -1, best_count = 0;
  for (const auto& [nacp, count] : counts) {
    if (count >= best_count) {
      best = nacp;
      best_count = count;
    }
  }
  return best;
}

}  // namespace

PseudoTruthTrack interpolate_track(std::span<const TrackPoint> points) {
  const auto s = split_axes(points);
  auto x = fit_smoothing_spline(s.t, s.x, 0.0);
  auto y = fit_smoothing_spline(s.t, s.y, 0.0);
  return PseudoTruthTrack{std::move(x), std::move(y), 0.0, 0.0, 0.0, AccelBounds{}, 1};
}

AccelBounds reported_accel_bounds(std::span<const AdsbReport> reports, double margin) {
  if (!(margin >= 0.0)) throw Error(ErrorCode::invalid_input, "acceleration margin must be >= 0");
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  bool any = false;
  for (std::size_t i = 0; i + 1 < reports.size(); ++i) {
    const double dt = reports[i + 1].toa - reports[i].toa;
    if (!(dt > 0.0)) continue;
    const double ax = (reports[i + 1].vel.x - reports[i].vel.x) / dt;
    const double ay = (reports[i + 1].vel.y - reports[i].vel.y) / dt;
    xmin = std::min(xmin, ax);
    xmax = std::max(xmax, ax);
    ymin = std::min(ymin, ay);
    ymax = std::max(ymax, ay);
    any = true;
  }
  if (!any) throw Error(ErrorCode::insufficient_data, "need two reports with distinct TOAs for acceleration bounds");
  return {{xmin - margin, xmax + margin}, {ymin - margin, ymax + margin}};
}

std::vector<double> acceleration_grid(const Spline1D& spline, double rate_hz) {
  if (!(rate_hz > 0.0)) throw Error(ErrorCode::invalid_input, "grid rate must be positive");
  const double t0 = spline.t_min();
  const double t1 = spline.t_max();
  const double step = 1.0 / rate_hz;
  std::vector<double> grid(spline.knots());
  const auto n = static_cast<std::size_t>(std::floor((t1 - t0) * rate_hz));
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = t0 + static_cast<double>(k) * step;
    if (t <= t1) grid.push_back(t);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

FitDiagnostics diagnostics(const PseudoTruthTrack& ptt) {
  return {ptt.s_final, ptt.residual_sum_x, ptt.residual_sum_y, ptt.iterations, ptt.accel_bounds, 0.0};
}

PseudoTruthTrack fit_pseudo_truth(const Track& track, std::span<const AdsbReport> reports, const EpuTable& table,
                                  const PseudoTruthOptions& options) {
  if (track.points.size() < 4) throw Error(ErrorCode::insufficient_data, "track needs >= 4 points");
  if (reports.empty()) throw Error(ErrorCode::insufficient_data, "no reports to derive acceleration bounds");
  const auto& sched = options.schedule;
  if (!(sched.growth > 1.0) || sched.max_steps < 0) throw Error(ErrorCode::invalid_input, "bad smoothing schedule");

  const auto bounds = reported_accel_bounds(reports, options.accel_margin);
  const auto samples = split_axes(track.points);
  const auto exec = kernels::exec_for(options.parallel);

  double initial_s = 0.0;
  if (sched.initial_s) {
    initial_s = *sched.initial_s;
  } else {
    const auto epu = epu_lookup(table, modal_nacp(reports));
    if (!epu) throw Error(ErrorCode::invalid_input, "modal NACp has no EPU bound; cannot seed the smoothing schedule");
    const double sigma = epu_axis_sigma(*epu);
    initial_s = static_cast<double>(samples.t.size()) * sigma * sigma;
  }
  if (!(initial_s > 0.0)) throw Error(ErrorCode::invalid_input, "initial smoothing budget must be positive");

  FitDiagnostics last;
  last.accel_bounds = bounds;
  double s = 0.0;
  for (int iteration = 1; iteration <= sched.max_steps + 2; ++iteration) {
    auto x = fit_smoothing_spline(samples.t, samples.x, s);
    auto y = fit_smoothing_spline(samples.t, samples.y, s);
    const auto grid = acceleration_grid(x, options.grid_rate_hz);
    const double violation =
        std::max(kernels::bound_violation(x, grid, bounds.x, exec), kernels::bound_violation(y, grid, bounds.y, exec));

    last.s_final = s;
    last.residual_sum_x = residual_sum(x, samples.t, samples.x);
    last.residual_sum_y = residual_sum(y, samples.t, samples.y);
    last.iterations = iteration;
    last.max_violation = violation;
    if (violation == 0.0) {
      return PseudoTruthTrack{std::move(x), std::move(y), s, last.residual_sum_x, last.residual_sum_y, bounds, iteration};
    }
    s = iteration == 1 ? initial_s : s * sched.growth;
  }
  throw SmoothingFailed("acceleration still outside reported bounds at smoothing ceiling s = " +
                            std::to_string(last.s_final) + " (excess " + std::to_string(last.max_violation) +
                            " m/s^2)",
                        last);
}

}  // namespace adsbul
