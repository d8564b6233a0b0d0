#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "adsbul/model.hpp"
#include "adsbul/spline.hpp"

namespace adsbul {

struct AxisBounds {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double a) const { return a >= lo && a <= hi; }
};

struct AccelBounds {
  AxisBounds x;
  AxisBounds y;
};

/// Reference trajectory P(t) = [x(t), y(t)] built from tracker data.
struct PseudoTruthTrack {
  Spline1D x;
  Spline1D y;
  double s_final = 0.0;  // m^2
  double residual_sum_x = 0.0;
  double residual_sum_y = 0.0;
  AccelBounds accel_bounds;
  int iterations = 0;

  double t_min() const { return std::max(x.t_min(), y.t_min()); }
  double t_max() const { return std::min(x.t_max(), y.t_max()); }
  bool contains(double t) const { return t >= t_min() && t <= t_max(); }

  Vec2 position(double t) const { return {x.evaluate(t, 0), y.evaluate(t, 0)}; }
  Vec2 velocity(double t) const { return {x.evaluate(t, 1), y.evaluate(t, 1)}; }
  Vec2 acceleration(double t) const { return {x.evaluate(t, 2), y.evaluate(t, 2)}; }
};

/// Interpolating pseudo-truth (s = 0) with unbounded acceleration limits.
/// Used to wrap a known trajectory sampled densely.
PseudoTruthTrack interpolate_track(std::span<const TrackPoint> points);

/// Per-axis [min - margin, max + margin] of the finite-difference
/// accelerations of the reported velocities. Reports must be sorted by TOA.
/// Throws insufficient_data when no two reports have distinct TOAs.
AccelBounds reported_accel_bounds(std::span<const AdsbReport> reports, double margin);

inline constexpr double kDefaultAccelMargin = 0.5;

struct SmoothingSchedule {
  /// First positive budget; when unset it is n * sigma^2 with sigma derived
  /// from the EPU of the reports' most common NACp.
  std::optional<double> initial_s;
  double growth = 2.0;
  int max_steps = 16;  // ceiling = initial_s * growth^max_steps
};

struct PseudoTruthOptions {
  double accel_margin = kDefaultAccelMargin;
  double grid_rate_hz = 10.0;
  SmoothingSchedule schedule;
  bool parallel = true;
};

struct FitDiagnostics {
  double s_final = 0.0;
  double residual_sum_x = 0.0;
  double residual_sum_y = 0.0;
  int iterations = 0;
  AccelBounds accel_bounds;
  double max_violation = 0.0;  // m/s^2 beyond the bounds, 0 when satisfied
};

class SmoothingFailed : public Error {
 public:
  SmoothingFailed(const std::string& what, FitDiagnostics last)
      : Error(ErrorCode::smoothing_failed, what), last_(last) {}
  const FitDiagnostics& last() const { return last_; }

 private:
  FitDiagnostics last_;
};

/// Evaluation times for the acceleration check: a uniform grid at rate_hz over
/// the track domain plus every knot.
std::vector<double> acceleration_grid(const Spline1D& spline, double rate_hz);

/// Starts from the interpolating fit and grows the shared smoothing budget
/// until both axes' acceleration stays inside the reported bounds on the grid.
/// Throws SmoothingFailed when the schedule ceiling is reached first.
PseudoTruthTrack fit_pseudo_truth(const Track& track, std::span<const AdsbReport> reports, const EpuTable& table,
                                  const PseudoTruthOptions& options = {});

FitDiagnostics diagnostics(const PseudoTruthTrack& ptt);

}  // namespace adsbul
