#include "adsbul/spline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace adsbul {

Spline1D Spline1D::from_values_and_curvature(std::span<const double> knots, std::span<const double> values,
                                             std::span<const double> second_derivatives) {
  const std::size_t n = knots.size();
  if (n < 2 || values.size() != n || second_derivatives.size() != n) {
    throw Error(ErrorCode::insufficient_data, "spline needs >= 2 knots with matching values");
  }
  Spline1D s;
  s.knots_.assign(knots.begin(), knots.end());
  s.coeffs_.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = knots[i + 1] - knots[i];
    if (!(h > 0.0)) throw Error(ErrorCode::invalid_abscissa, "knots must be strictly increasing");
    const double g0 = second_derivatives[i];
    const double g1 = second_derivatives[i + 1];
    s.coeffs_[i] = {values[i], (values[i + 1] - values[i]) / h - h * (2.0 * g0 + g1) / 6.0, g0 / 2.0,
                    (g1 - g0) / (6.0 * h)};
  }
  return s;
}

double Spline1D::evaluate(double t, int order) const {
  if (!contains(t)) {
    throw Error(ErrorCode::out_of_domain, "t = " + std::to_string(t) + " outside [" + std::to_string(t_min()) + ", " +
                                              std::to_string(t_max()) + "]");
  }
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  std::size_t i = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
  i = std::min(i, coeffs_.size() - 1);
  const auto& [a, b, c, d] = coeffs_[i];
  const double u = t - knots_[i];
  switch (order) {
    case 0: return a + u * (b + u * (c + u * d));
    case 1: return b + u * (2.0 * c + 3.0 * d * u);
    case 2: return 2.0 * c + 6.0 * d * u;
    default: throw Error(ErrorCode::invalid_input, "derivative order must be 0, 1 or 2");
  }
}

namespace {

// Banded system R + alpha Q^T Q for the interior second derivatives (Reinsch).
// Q is n x (n-2) with column j touching rows j, j+1, j+2 (0-based interior index);
// R is the (n-2) x (n-2) tridiagonal Gram matrix of the hat functions.
class ReinschSystem {
 public:
  ReinschSystem(std::span<const double> t, std::span<const double> v) : n_(t.size()), v_(v) {
    h_.resize(n_ - 1);
    for (std::size_t i = 0; i + 1 < n_; ++i) h_[i] = t[i + 1] - t[i];
    const std::size_t m = n_ - 2;
    qtv_.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      const auto [q0, q1, q2] = q_column(j);
      qtv_[j] = q0 * v[j] + q1 * v[j + 1] + q2 * v[j + 2];
    }
  }

  struct Solution {
    std::vector<double> gamma;   // interior second derivatives
    std::vector<double> fitted;  // spline values at the knots
    double residual = 0.0;
  };

  Solution solve(double alpha) const {
    const std::size_t m = n_ - 2;
    std::vector<double> d0(m), d1(m, 0.0), d2(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      const auto [a0, a1, a2] = q_column(j);
      d0[j] = (h_[j] + h_[j + 1]) / 3.0 + alpha * (a0 * a0 + a1 * a1 + a2 * a2);
      if (j + 1 < m) {
        const auto [b0, b1, b2] = q_column(j + 1);
        d1[j] = h_[j + 1] / 6.0 + alpha * (a1 * b0 + a2 * b1);
        (void)b2;
      }
      if (j + 2 < m) {
        const auto [c0, c1, c2] = q_column(j + 2);
        d2[j] = alpha * a2 * c0;
        (void)c1;
        (void)c2;
      }
    }

    // LDL^T of the symmetric pentadiagonal matrix, in place.
    std::vector<double> l1(m, 0.0), l2(m, 0.0), dd(m);
    for (std::size_t j = 0; j < m; ++j) {
      double diag = d0[j];
      if (j >= 1) diag -= l1[j - 1] * l1[j - 1] * dd[j - 1];
      if (j >= 2) diag -= l2[j - 2] * l2[j - 2] * dd[j - 2];
      dd[j] = diag;
      if (j + 1 < m) {
        double off = d1[j];
        if (j >= 1) off -= l2[j - 1] * l1[j - 1] * dd[j - 1];
        l1[j] = off / diag;
      }
      if (j + 2 < m) l2[j] = d2[j] / diag;
    }
    Solution sol;
    auto& x = sol.gamma;
    x = qtv_;
    for (std::size_t j = 0; j < m; ++j) {
      if (j >= 1) x[j] -= l1[j - 1] * x[j - 1];
      if (j >= 2) x[j] -= l2[j - 2] * x[j - 2];
    }
    for (std::size_t j = 0; j < m; ++j) x[j] /= dd[j];
    for (std::size_t j = m; j-- > 0;) {
      if (j + 1 < m) x[j] -= l1[j] * x[j + 1];
      if (j + 2 < m) x[j] -= l2[j] * x[j + 2];
    }

    // fitted = v - alpha Q gamma
    sol.fitted.assign(v_.begin(), v_.end());
    if (alpha > 0.0) {
      for (std::size_t j = 0; j < m; ++j) {
        const auto [q0, q1, q2] = q_column(j);
        sol.fitted[j] -= alpha * q0 * x[j];
        sol.fitted[j + 1] -= alpha * q1 * x[j];
        sol.fitted[j + 2] -= alpha * q2 * x[j];
      }
    }
    for (std::size_t i = 0; i < n_; ++i) {
      const double r = v_[i] - sol.fitted[i];
      sol.residual += r * r;
    }
    return sol;
  }

  double mean_spacing() const {
    double sum = 0.0;
    for (double h : h_) sum += h;
    return sum / static_cast<double>(h_.size());
  }

 private:
  std::array<double, 3> q_column(std::size_t j) const {
    const double a = 1.0 / h_[j];
    const double b = 1.0 / h_[j + 1];
    return {a, -a - b, b};
  }

  std::size_t n_;
  std::span<const double> v_;
  std::vector<double> h_;
  std::vector<double> qtv_;
};

// Least-squares line through the samples; the limit of the smoothing spline
// as the roughness penalty grows without bound.
std::pair<double, double> fit_line(std::span<const double> t, std::span<const double> v) {
  const double n = static_cast<double>(t.size());
  double tm = 0.0, vm = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    tm += t[i];
    vm += v[i];
  }
  tm /= n;
  vm /= n;
  double stt = 0.0, stv = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - tm) * (t[i] - tm);
    stv += (t[i] - tm) * (v[i] - vm);
  }
  const double slope = stv / stt;
  return {vm - slope * tm, slope};
}

Spline1D assemble(std::span<const double> t, std::span<const double> fitted, std::span<const double> interior_gamma) {
  std::vector<double> gamma(t.size(), 0.0);
  std::copy(interior_gamma.begin(), interior_gamma.end(), gamma.begin() + 1);
  return Spline1D::from_values_and_curvature(t, fitted, gamma);
}

}  // namespace

Spline1D fit_smoothing_spline(std::span<const double> t, std::span<const double> v, double s) {
  if (t.size() != v.size()) throw Error(ErrorCode::invalid_input, "time and value arrays differ in length");
  if (t.size() < 4) throw Error(ErrorCode::insufficient_data, "smoothing spline needs >= 4 samples");
  if (!(s >= 0.0) || !std::isfinite(s)) throw Error(ErrorCode::invalid_input, "smoothing budget must be finite and >= 0");
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    if (!(t[i + 1] > t[i])) throw Error(ErrorCode::invalid_abscissa, "sample times must be strictly increasing");
  }

  const ReinschSystem system(t, v);
  if (s == 0.0) {
    const auto sol = system.solve(0.0);
    return assemble(t, sol.fitted, sol.gamma);
  }

  const auto [intercept, slope] = fit_line(t, v);
  std::vector<double> line(t.size());
  double line_residual = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    line[i] = intercept + slope * t[i];
    line_residual += (v[i] - line[i]) * (v[i] - line[i]);
  }
  if (line_residual <= s) {
    const std::vector<double> flat(t.size() - 2, 0.0);
    return assemble(t, line, flat);
  }

  // The residual grows monotonically with the penalty weight; bracket the
  // weight where it reaches s, then refine in log space.
  const double h = system.mean_spacing();
  double lo = h * h * h;
  double hi = lo;
  auto sol_lo = system.solve(lo);
  while (sol_lo.residual > s && lo > 1e-300) {
    hi = lo;
    lo /= 16.0;
    sol_lo = system.solve(lo);
  }
  if (hi == lo) {
    hi = lo * 16.0;
    while (system.solve(hi).residual <= s) {
      lo = hi;
      hi *= 16.0;
      if (hi > 1e300) break;
    }
    sol_lo = system.solve(lo);
  }

  // Illinois-modified regula falsi on log(residual) - log(s) versus log(alpha).
  double x_lo = std::log(lo), x_hi = std::log(hi);
  double f_lo = std::log(std::max(sol_lo.residual, std::numeric_limits<double>::min())) - std::log(s);
  double f_hi = std::log(system.solve(hi).residual) - std::log(s);
  double gap_lo = f_lo;  // true value at x_lo; f_lo itself gets Illinois-scaled
  int side = 0;
  for (int iter = 0; iter < 200; ++iter) {
    if (std::abs(gap_lo) < 1e-12 || x_hi - x_lo < 1e-13) break;
    double x = (x_lo * f_hi - x_hi * f_lo) / (f_hi - f_lo);
    if (!(x > x_lo && x < x_hi)) x = 0.5 * (x_lo + x_hi);
    auto sol = system.solve(std::exp(x));
    const double f = std::log(sol.residual) - std::log(s);
    if (f <= 0.0) {
      x_lo = x;
      f_lo = f;
      gap_lo = f;
      sol_lo = std::move(sol);
      if (side == -1) f_hi /= 2.0;
      side = -1;
    } else {
      x_hi = x;
      f_hi = f;
      if (side == 1) f_lo /= 2.0;
      side = 1;
    }
  }
  return assemble(t, sol_lo.fitted, sol_lo.gamma);
}

double residual_sum(const Spline1D& g, std::span<const double> t, std::span<const double> v) {
  double sum = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = v[i] - g.evaluate(t[i]);
    sum += r * r;
  }
  return sum;
}

}  // namespace adsbul
