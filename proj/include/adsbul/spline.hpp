#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "adsbul/error.hpp"

namespace adsbul {

/// Piecewise cubic on [knots.front(), knots.back()], C2 across interior knots.
/// Piece i covers [knots[i], knots[i+1]] and is stored in powers of (t - knots[i]).
class Spline1D {
 public:
  static constexpr int kDegree = 3;

  /// Natural cubic spline through (knots[i], values[i]) with the given knot
  /// second derivatives. Requires >= 2 strictly increasing knots.
  static Spline1D from_values_and_curvature(std::span<const double> knots, std::span<const double> values,
                                            std::span<const double> second_derivatives);

  double t_min() const { return knots_.front(); }
  double t_max() const { return knots_.back(); }
  bool contains(double t) const { return t >= t_min() && t <= t_max(); }

  /// Derivative of the given order (0, 1 or 2). Throws out_of_domain outside [t_min, t_max].
  double evaluate(double t, int order = 0) const;

  const std::vector<double>& knots() const { return knots_; }
  /// {a, b, c, d} with p(u) = a + b u + c u^2 + d u^3.
  const std::array<double, 4>& piece(std::size_t i) const { return coeffs_[i]; }
  std::size_t pieces() const { return coeffs_.size(); }

 private:
  Spline1D() = default;

  std::vector<double> knots_;
  std::vector<std::array<double, 4>> coeffs_;
};

/// Cubic smoothing spline: minimizes the integrated squared second derivative
/// subject to sum (v_i - g(t_i))^2 <= s. s = 0 interpolates. Throws
/// insufficient_data below 4 samples and invalid_abscissa on non-increasing t.
Spline1D fit_smoothing_spline(std::span<const double> t, std::span<const double> v, double s);

/// sum (v_i - g(t_i))^2 evaluated through the spline itself.
double residual_sum(const Spline1D& g, std::span<const double> t, std::span<const double> v);

}  // namespace adsbul
