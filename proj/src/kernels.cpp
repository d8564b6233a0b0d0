#include "adsbul/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace adsbul::kernels {

namespace {

using Index = std::ptrdiff_t;

// Runs body(i) for i in [0, n). The serial path is the reference; the
// parallel path must write disjoint outputs only.
template <class Body>
void for_each_index(std::size_t n, Exec exec, Body&& body) {
  const Index count = static_cast<Index>(n);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
  } else {
    for (Index i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
  }
}

double serial_sum(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum;
}

double squared_error(const PseudoTruthTrack& ptt, double t, Vec2 p) {
  const Vec2 e = ptt.position(t) - p;
  return dot(e, e);
}

}  // namespace

void second_derivative(const Spline1D& g, std::span<const double> grid, std::span<double> out, Exec exec) {
  for_each_index(grid.size(), exec, [&](std::size_t i) { out[i] = g.evaluate(grid[i], 2); });
}

double bound_violation(const Spline1D& g, std::span<const double> grid, AxisBounds bounds, Exec exec) {
  std::vector<double> excess(grid.size());
  for_each_index(grid.size(), exec, [&](std::size_t i) {
    const double a = g.evaluate(grid[i], 2);
    excess[i] = std::max({0.0, a - bounds.hi, bounds.lo - a});
  });
  return excess.empty() ? 0.0 : *std::max_element(excess.begin(), excess.end());
}

void along_track_errors(const PseudoTruthTrack& ptt, std::span<const double> toa, std::span<const Vec2> pos,
                        std::span<const Vec2> vel, std::span<double> out, Exec exec) {
  for_each_index(toa.size(), exec, [&](std::size_t i) {
    const Vec2 e = ptt.position(toa[i]) - pos[i];
    const double speed = norm(vel[i]);
    out[i] = dot(e, vel[i]) / speed;
  });
}

void shifted_squared_errors(const PseudoTruthTrack& ptt, std::span<const double> toa, std::span<const Vec2> pos,
                            double shift, std::span<double> out, Exec exec) {
  for_each_index(toa.size(), exec, [&](std::size_t i) { out[i] = squared_error(ptt, toa[i] - shift, pos[i]); });
}

double shift_objective(const PseudoTruthTrack& ptt, std::span<const double> toa, std::span<const Vec2> pos,
                       double shift, Exec exec) {
  std::vector<double> terms(toa.size());
  shifted_squared_errors(ptt, toa, pos, shift, terms, exec);
  return serial_sum(terms);
}

void objective_scan(const PseudoTruthTrack& ptt, std::span<const double> toa, std::span<const Vec2> pos,
                    std::span<const double> shifts, std::span<double> out, Exec exec) {
  for_each_index(shifts.size(), exec, [&](std::size_t k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < toa.size(); ++i) sum += squared_error(ptt, toa[i] - shifts[k], pos[i]);
    out[k] = sum;
  });
}

void containment_scan(const PseudoTruthTrack& ptt, std::span<const double> toa, std::span<const Vec2> pos,
                      std::span<const double> bound, std::span<const double> shifts, std::span<double> out,
                      Exec exec) {
  for_each_index(shifts.size(), exec, [&](std::size_t k) {
    std::size_t inside = 0;
    for (std::size_t i = 0; i < toa.size(); ++i) {
      if (std::sqrt(squared_error(ptt, toa[i] - shifts[k], pos[i])) <= bound[i]) ++inside;
    }
    out[k] = toa.empty() ? 0.0 : static_cast<double>(inside) / static_cast<double>(toa.size());
  });
}

}  // namespace adsbul::kernels
