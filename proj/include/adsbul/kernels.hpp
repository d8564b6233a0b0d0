#pragma once

// Data-parallel inner loops. Every kernel has a serial reference path and an
// OpenMP path; both produce bit-identical results because reductions are
// always summed serially in index order.

#include <span>
#include <vector>

#include "adsbul/model.hpp"
#include "adsbul/pseudo_truth.hpp"
#include "adsbul/spline.hpp"

namespace adsbul::kernels {

enum class Exec { serial, parallel };

inline Exec exec_for(bool parallel) { return parallel ? Exec::parallel : Exec::serial; }

/// g''(grid[i]) into out[i].
void second_derivative(const Spline1D& g, std::span<const double> grid, std::span<double> out, Exec exec);

/// Largest distance by which g'' leaves [lo, hi] on the grid; 0 if it never does.
double bound_violation(const Spline1D& g, std::span<const double> grid, AxisBounds bounds, Exec exec);

/// Signed along-track error (P(t) - p) . v/|v| for each report. Every toa must be inside the track domain.
void along_track_errors(const PseudoTruthTrack& ptt, std::span<const double> toa, std::span<const Vec2> pos,
                        std::span<const Vec2> vel, std::span<double> out, Exec exec);

/// |P(toa - shift) - pos|^2 for each report.
void shifted_squared_errors(const PseudoTruthTrack& ptt, std::span<const double> toa, std::span<const Vec2> pos,
                            double shift, std::span<double> out, Exec exec);

/// Sum of shifted_squared_errors.
double shift_objective(const PseudoTruthTrack& ptt, std::span<const double> toa, std::span<const Vec2> pos,
                       double shift, Exec exec);

/// shift_objective for every candidate shift, parallel across candidates.
void objective_scan(const PseudoTruthTrack& ptt, std::span<const double> toa, std::span<const Vec2> pos,
                    std::span<const double> shifts, std::span<double> out, Exec exec);

/// Fraction of reports with |P(toa - shift) - pos| <= bound[i], for every candidate shift.
void containment_scan(const PseudoTruthTrack& ptt, std::span<const double> toa, std::span<const Vec2> pos,
                      std::span<const double> bound, std::span<const double> shifts, std::span<double> out, Exec exec);

}  // namespace adsbul::kernels
