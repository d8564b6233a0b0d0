#include <doctest.h>

#include <cmath>
#include <random>

#include "adsbul/spline.hpp"
#include "oracles.hpp"

using namespace adsbul;

namespace {

const std::vector<double> kT{0, 1, 2.5, 3, 4.5, 6, 7, 8.25};
const std::vector<double> kY{1.0, 2.2, 1.7, 3.9, 4.4, 3.1, 5.6, 6.0};

std::vector<double> at_knots(const Spline1D& g, const std::vector<double>& t) {
  std::vector<double> out;
  for (double x : t) out.push_back(g.evaluate(x));
  return out;
}

}  // namespace

TEST_CASE("interpolation through arbitrary points") {
  const std::vector<double> t{0.0, 0.7, 1.1, 2.9, 3.0};
  const std::vector<double> y{5.0, -2.0, 8.5, 0.25, 1e3};
  const auto g = fit_smoothing_spline(t, y, 0.0);
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(g.evaluate(t[i]) == doctest::Approx(y[i]).epsilon(1e-12));
  CHECK(residual_sum(g, t, y) <= 1e-18 * 1e6);
}

TEST_CASE("evaluate on an interpolated line") {
  const std::vector<double> t{0, 1, 2, 3};
  const auto g = fit_smoothing_spline(t, t, 0.0);
  CHECK(g.evaluate(1.5, 0) == doctest::Approx(1.5));
  CHECK(g.evaluate(1.5, 1) == doctest::Approx(1.0));
  CHECK(std::abs(g.evaluate(1.5, 2)) < 1e-12);
}

TEST_CASE("evaluation outside the domain is an error") {
  const std::vector<double> t{0, 1, 2, 3};
  const auto g = fit_smoothing_spline(t, t, 0.0);
  for (double bad : {-1e-9, 3.000001, 100.0}) {
    try {
      (void)g.evaluate(bad);
      FAIL("expected out_of_domain");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::out_of_domain);
    }
  }
  CHECK_NOTHROW((void)g.evaluate(3.0));
  CHECK_NOTHROW((void)g.evaluate(0.0));
}

TEST_CASE("argument errors") {
  const std::vector<double> three{0, 1, 2};
  try {
    (void)fit_smoothing_spline(three, three, 0.0);
    FAIL("expected insufficient_data");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::insufficient_data);
  }
  const std::vector<double> dup{0, 1, 1, 2};
  try {
    (void)fit_smoothing_spline(dup, dup, 0.0);
    FAIL("expected invalid_abscissa");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_abscissa);
  }
  const std::vector<double> t{0, 1, 2, 3};
  CHECK_THROWS_AS(fit_smoothing_spline(t, t, -1.0), Error);
}

TEST_CASE("linear data is reproduced for every s") {
  std::vector<double> t, v;
  for (int i = 0; i < 30; ++i) {
    t.push_back(i * 0.37 + (i % 4) * 0.05);
    v.push_back(3.0 * t.back() + 1.0);
  }
  for (double s : {0.0, 1e-6, 1.0, 1e3, 1e12}) {
    const auto g = fit_smoothing_spline(t, v, s);
    for (double x = t.front(); x <= t.back(); x += 0.01) {
      CHECK(g.evaluate(x) == doctest::Approx(3.0 * x + 1.0).epsilon(1e-12));
      CHECK(std::abs(g.evaluate(x, 2)) < 1e-9);
    }
  }
}

TEST_CASE("smoothing fit matches the dense penalized-least-squares oracle") {
  // oracle values computed with oracle::smoothing_values and frozen here
  const std::vector<std::pair<double, std::vector<double>>> frozen{
      {0.5,
       {1.055315983829, 2.034140571672, 2.169492993100, 3.515591360817, 4.344880220309, 3.333392089381,
        5.397001285531, 6.050185495361}},
      {2.0,
       {1.104894837570, 1.886406773819, 2.550635298146, 3.265822577946, 4.133491776580, 3.755386056460,
        5.096987353679, 6.106375325801}},
      // budget above the least-squares line residual (4.928): the line itself
      {8.0,
       {1.268752459662, 1.819139446412, 2.644719926538, 2.919913419913, 3.745493900039, 4.571074380165,
        5.121461366916, 5.809445100354}},
  };
  for (const auto& [s, expected] : frozen) {
    CAPTURE(s);
    const auto g = fit_smoothing_spline(kT, kY, s);
    const auto got = at_knots(g, kT);
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-7));
    CHECK(residual_sum(g, kT, kY) <= s * (1 + 1e-6));
  }
  // the live oracle agrees too
  const auto live = oracle::smoothing_values(kT, kY, 1.0);
  const auto got = at_knots(fit_smoothing_spline(kT, kY, 1.0), kT);
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(live[i]).epsilon(1e-7));
}

TEST_CASE("noisy parabola") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 5.0);
  const double a = 0.8;
  std::vector<double> t, v;
  for (int i = 0; i < 200; ++i) {
    t.push_back(i * 0.5);
    v.push_back(a * t.back() * t.back() + noise(rng));
  }
  const double s = 200.0 * 25.0;
  const auto g = fit_smoothing_spline(t, v, s);
  // direct residual summation
  double direct = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) direct += std::pow(v[i] - g.evaluate(t[i]), 2);
  CHECK(direct <= s * (1 + 1e-6));
  CHECK(direct == doctest::Approx(s).epsilon(1e-6));  // budget binds

  const double mid = 50.0;
  auto f = [&](double x) { return g.evaluate(x); };
  CHECK(g.evaluate(mid, 2) == doctest::Approx(oracle::central_difference(f, mid, 1e-3, 2)).epsilon(1e-3));
  CHECK(g.evaluate(mid, 1) == doctest::Approx(oracle::central_difference(f, mid, 1e-3, 1)).epsilon(1e-6));
  CHECK(g.evaluate(mid, 2) == doctest::Approx(2 * a).epsilon(0.25));
}

TEST_CASE("C2 continuity at every interior knot") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-50.0, 50.0), gap(0.2, 2.0);
  std::vector<double> t{0.0}, v{u(rng)};
  for (int i = 1; i < 60; ++i) {
    t.push_back(t.back() + gap(rng));
    v.push_back(u(rng));
  }
  for (double s : {0.0, 500.0, 20000.0}) {
    const auto g = fit_smoothing_spline(t, v, s);
    const auto& knots = g.knots();
    for (std::size_t i = 1; i + 1 < knots.size(); ++i) {
      // left piece at its right end vs right piece at u = 0
      const auto& L = g.piece(i - 1);
      const auto& R = g.piece(i);
      const double h = knots[i] - knots[i - 1];
      const double left[3] = {L[0] + L[1] * h + L[2] * h * h + L[3] * h * h * h, L[1] + 2 * L[2] * h + 3 * L[3] * h * h,
                              2 * L[2] + 6 * L[3] * h};
      const double right[3] = {R[0], R[1], 2 * R[2]};
      for (int k = 0; k < 3; ++k) {
        const double scale = std::max({1.0, std::abs(left[k]), std::abs(right[k])});
        CHECK(std::abs(left[k] - right[k]) <= 1e-6 * scale);
      }
    }
    // natural ends
    CHECK(std::abs(g.evaluate(t.front(), 2)) < 1e-9);
    CHECK(std::abs(g.evaluate(t.back(), 2)) < 1e-6);
  }
}

TEST_CASE("residual is monotone in s") {
  double prev = -1.0;
  for (double s : {0.0, 0.1, 0.5, 1.0, 3.0, 4.9}) {
    const double r = residual_sum(fit_smoothing_spline(kT, kY, s), kT, kY);
    CHECK(r >= prev - 1e-12);
    CHECK(r <= s * (1 + 1e-6) + 1e-12);
    prev = r;
  }
}

TEST_CASE("from_values_and_curvature") {
  const std::vector<double> knots{0, 1, 2};
  const std::vector<double> values{0, 1, 0};
  const std::vector<double> curvature{0, -3, 0};
  const auto g = Spline1D::from_values_and_curvature(knots, values, curvature);
  CHECK(g.evaluate(1.0) == doctest::Approx(1.0));
  CHECK(g.evaluate(1.0, 2) == doctest::Approx(-3.0));
  CHECK(g.evaluate(0.5, 2) == doctest::Approx(-1.5));
  CHECK(g.pieces() == 2);
}
