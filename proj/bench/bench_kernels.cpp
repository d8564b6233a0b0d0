// Serial vs OpenMP paths of the hot latency kernels.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "adsbul/kernels.hpp"

using namespace adsbul;

namespace {

struct Workload {
  PseudoTruthTrack ptt;
  std::vector<double> toa, bound, shifts;
  std::vector<Vec2> pos, vel;
};

const Workload& workload() {
  static const Workload w = [] {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> noise(0.0, 12.0);
    std::vector<TrackPoint> pts;
    for (int k = 0; k <= 3600; ++k) pts.push_back({double(k), {150.0 * k + 300.0 * std::sin(k / 60.0), 40.0 * k}, {}});
    Workload w{interpolate_track(pts), {}, {}, {}, {}, {}};
    for (int i = 0; i < 7000; ++i) {
      const double t = 2.0 + i * 0.5;
      w.toa.push_back(t);
      w.pos.push_back(w.ptt.position(t - 0.12) + Vec2{noise(rng), noise(rng)});
      w.vel.push_back(w.ptt.velocity(t));
      w.bound.push_back(30.0);
    }
    for (int k = -100; k <= 100; ++k) w.shifts.push_back(k * 0.01);
    return w;
  }();
  return w;
}

kernels::Exec exec(const benchmark::State& state) {
  return state.range(0) ? kernels::Exec::parallel : kernels::Exec::serial;
}

void BM_objective_scan(benchmark::State& state) {
  const auto& w = workload();
  std::vector<double> out(w.shifts.size());
  for (auto _ : state) {
    kernels::objective_scan(w.ptt, w.toa, w.pos, w.shifts, out, exec(state));
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_containment_scan(benchmark::State& state) {
  const auto& w = workload();
  std::vector<double> out(w.shifts.size());
  for (auto _ : state) {
    kernels::containment_scan(w.ptt, w.toa, w.pos, w.bound, w.shifts, out, exec(state));
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_along_track_errors(benchmark::State& state) {
  const auto& w = workload();
  std::vector<double> out(w.toa.size());
  for (auto _ : state) {
    kernels::along_track_errors(w.ptt, w.toa, w.pos, w.vel, out, exec(state));
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_bound_violation(benchmark::State& state) {
  const auto& w = workload();
  const auto grid = acceleration_grid(w.ptt.x, 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::bound_violation(w.ptt.x, grid, {-0.05, 0.05}, exec(state)));
}

}  // namespace

BENCHMARK(BM_objective_scan)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_containment_scan)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_along_track_errors)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_bound_violation)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
