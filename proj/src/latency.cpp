#include "adsbul/latency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adsbul/golden.hpp"
#include "adsbul/kernels.hpp"

namespace adsbul {

namespace {

struct ReportArrays {
  std::vector<double> toa;
  std::vector<Vec2> pos;
  std::vector<Vec2> vel;
};

ReportArrays to_arrays(std::span<const AdsbReport> reports) {
  ReportArrays a;
  a.toa.reserve(reports.size());
  a.pos.reserve(reports.size());
  a.vel.reserve(reports.size());
  for (const auto& r : reports) {
    a.toa.push_back(r.toa);
    a.pos.push_back(r.pos);
    a.vel.push_back(r.vel);
  }
  return a;
}

void check_bracket(const LatencyOptions& o) {
  if (!(o.bracket_lo < o.bracket_hi)) throw Error(ErrorCode::invalid_input, "bracket must satisfy lo < hi");
  if (!(o.tol > 0.0) || !(o.coarse_step > 0.0)) throw Error(ErrorCode::invalid_input, "tolerances must be positive");
}

std::vector<double> shift_grid(double lo, double hi, double step) {
  std::vector<double> grid;
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  grid.reserve(n + 2);
  for (std::size_t k = 0; k <= n; ++k) grid.push_back(lo + static_cast<double>(k) * step);
  if (hi - grid.back() > 1e-12) grid.push_back(hi);
  return grid;
}

// Fills identity fields and applies the exclusion rules; the latency itself is left at zero.
LatencyEstimate screen(const AdsbReport& report, const PseudoTruthTrack& ptt, int track_index, double speed_floor) {
  LatencyEstimate est;
  est.icao = report.icao;
  est.track_index = track_index;
  est.toa = report.toa;
  est.speed_used = norm(report.vel);
  if (!ptt.contains(report.toa)) {
    est.excluded = true;
    est.reason = exclusion::outside_pseudo_truth;
  } else if (!(est.speed_used >= speed_floor)) {
    est.excluded = true;
    est.reason = exclusion::speed_too_low;
  }
  return est;
}

}  // namespace

LatencyEstimate atpe_single(const AdsbReport& report, const PseudoTruthTrack& ptt, int track_index,
                            double speed_floor) {
  auto est = screen(report, ptt, track_index, speed_floor);
  if (est.excluded) return est;
  const Vec2 e = ptt.position(report.toa) - report.pos;
  est.along_track_error = dot(e, report.vel) / est.speed_used;
  est.ul = est.along_track_error / est.speed_used;
  return est;
}

Histogram make_histogram(std::span<const double> values, double bin_width) {
  if (!(bin_width > 0.0)) throw Error(ErrorCode::invalid_input, "bin width must be positive");
  Histogram h;
  h.bin_width = bin_width;
  if (values.empty()) return h;
  auto bin_of = [&](double v) { return static_cast<long long>(std::floor(v / bin_width)); };
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  const long long first = bin_of(*mn);
  const long long last = bin_of(*mx);
  h.counts.assign(static_cast<std::size_t>(last - first + 1), 0);
  for (long long k = first; k <= last + 1; ++k) h.edges.push_back(static_cast<double>(k) * bin_width);
  for (double v : values) ++h.counts[static_cast<std::size_t>(bin_of(v) - first)];
  return h;
}

AtpeResult atpe_track(std::span<const AdsbReport> reports, const PseudoTruthTrack& ptt, int track_index,
                      const LatencyOptions& options) {
  AtpeResult result;
  result.estimates.reserve(reports.size());

  // Screen exclusions first so the kernel only sees in-domain reports.
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    result.estimates.push_back(screen(reports[i], ptt, track_index, options.speed_floor));
    if (!result.estimates.back().excluded) usable.push_back(i);
  }
  if (usable.empty()) throw Error(ErrorCode::empty_track, "no usable reports for ATPE");

  std::vector<AdsbReport> kept;
  kept.reserve(usable.size());
  for (auto i : usable) kept.push_back(reports[i]);
  const auto arrays = to_arrays(kept);
  std::vector<double> e_at(kept.size());
  kernels::along_track_errors(ptt, arrays.toa, arrays.pos, arrays.vel, e_at, kernels::exec_for(options.parallel));

  std::vector<double> uls;
  uls.reserve(kept.size());
  for (std::size_t k = 0; k < usable.size(); ++k) {
    auto& est = result.estimates[usable[k]];
    est.along_track_error = e_at[k];
    est.ul = e_at[k] / est.speed_used;
    uls.push_back(est.ul);
  }

  result.n_used = uls.size();
  double sum = 0.0;
  for (double u : uls) sum += u;
  result.mean_ul = sum / static_cast<double>(uls.size());
  double ss = 0.0;
  for (double u : uls) ss += (u - result.mean_ul) * (u - result.mean_ul);
  result.std_ul = std::sqrt(ss / static_cast<double>(uls.size()));
  result.histogram = make_histogram(uls, options.bin_width);
  return result;
}

std::vector<AdsbReport> reports_inside_bracket(std::span<const AdsbReport> reports, const PseudoTruthTrack& ptt,
                                               const LatencyOptions& options) {
  std::vector<AdsbReport> kept;
  for (const auto& r : reports) {
    if (r.toa - options.bracket_hi >= ptt.t_min() && r.toa - options.bracket_lo <= ptt.t_max()) kept.push_back(r);
  }
  return kept;
}

MtpesResult mtpes(std::span<const AdsbReport> reports, const PseudoTruthTrack& ptt, const LatencyOptions& options) {
  check_bracket(options);
  const auto kept = reports_inside_bracket(reports, ptt, options);
  if (kept.size() < 4) throw Error(ErrorCode::empty_track, "fewer than 4 reports inside the MTPES bracket");
  const auto a = to_arrays(kept);
  const auto exec = kernels::exec_for(options.parallel);

  // Coarse scan guards against local minima from spline wiggle.
  const auto grid = shift_grid(options.bracket_lo, options.bracket_hi, options.coarse_step);
  std::vector<double> values(grid.size());
  kernels::objective_scan(ptt, a.toa, a.pos, grid, values, exec);
  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());

  const double lo = std::max(options.bracket_lo, grid[best] - options.coarse_step);
  const double hi = std::min(options.bracket_hi, grid[best] + options.coarse_step);
  const auto refined = golden_section_minimize(
      [&](double shift) { return kernels::shift_objective(ptt, a.toa, a.pos, shift, exec); }, lo, hi, options.tol);

  MtpesResult result;
  result.n_used = kept.size();
  if (refined.fx <= values[best]) {
    result.ul = refined.x;
    result.residual = refined.fx;
  } else {
    result.ul = grid[best];
    result.residual = values[best];
  }
  return result;
}

EpuConstrainedResult epu_constrained_latency(std::span<const AdsbReport> reports, const PseudoTruthTrack& ptt,
                                             const EpuTable& table, const LatencyOptions& options) {
  check_bracket(options);
  const auto kept = reports_inside_bracket(reports, ptt, options);
  if (kept.size() < 4) throw Error(ErrorCode::empty_track, "fewer than 4 reports inside the MTPES bracket");
  const auto a = to_arrays(kept);
  const auto exec = kernels::exec_for(options.parallel);
  std::vector<double> bound;
  bound.reserve(kept.size());
  for (const auto& r : kept) bound.push_back(epu_lookup(table, r.nacp).value_or(std::numeric_limits<double>::infinity()));

  EpuConstrainedResult result;
  result.n_used = kept.size();

  // The unconstrained minimizer wins outright whenever it is feasible.
  const auto unconstrained = mtpes(kept, ptt, options);
  const double candidate[] = {unconstrained.ul};
  double containment = 0.0;
  kernels::containment_scan(ptt, a.toa, a.pos, bound, candidate, std::span<double>(&containment, 1), exec);
  if (containment >= options.epu_containment) {
    result.ul = unconstrained.ul;
    result.best_containment = containment;
  }

  const auto grid = shift_grid(options.bracket_lo, options.bracket_hi, options.tol);
  std::vector<double> fractions(grid.size()), objective(grid.size());
  kernels::containment_scan(ptt, a.toa, a.pos, bound, grid, fractions, exec);
  result.best_containment = std::max(result.best_containment, *std::max_element(fractions.begin(), fractions.end()));
  if (result.ul) return result;

  kernels::objective_scan(ptt, a.toa, a.pos, grid, objective, exec);
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (fractions[k] >= options.epu_containment && objective[k] < best_value) {
      best_value = objective[k];
      result.ul = grid[k];
    }
  }
  return result;
}

TrackLatencyResult estimate_track(const Track& track, std::span<const AdsbReport> reports, const PseudoTruthTrack& ptt,
                                  const EpuTable& table, const LatencyOptions& options) {
  auto atpe = atpe_track(reports, ptt, track.track_index, options);
  const auto shift = mtpes(reports, ptt, options);
  const auto constrained = epu_constrained_latency(reports, ptt, table, options);

  TrackLatencyResult out;
  auto& s = out.summary;
  s.icao = track.icao;
  s.track_index = track.track_index;
  s.n_used = atpe.n_used;
  s.mean_ul = atpe.mean_ul;
  s.std_ul = atpe.std_ul;
  s.histogram = std::move(atpe.histogram);
  s.mtpes_ul = shift.ul;
  s.mtpes_residual = shift.residual;
  s.epu_ul = constrained.ul;
  s.fit = diagnostics(ptt);
  out.estimates = std::move(atpe.estimates);
  return out;
}

FleetReport aggregate_fleet(std::span<const TrackLatencySummary> summaries, const UlBudget& budget) {
  FleetReport report;
  std::map<Icao, std::size_t> slot;
  double sum = 0.0;
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    const auto& s = summaries[i];
    auto [it, inserted] = slot.try_emplace(s.icao, report.aircraft.size());
    if (inserted) report.aircraft.push_back({s.icao, {}});
    const auto cls = classify_ul(s.mean_ul, budget);
    report.aircraft[it->second].tracks.push_back({0, s, cls});
    ++report.class_counts[cls];
    sum += s.mean_ul;
  }
  std::size_t seq = 0;
  for (auto& group : report.aircraft) {
    for (auto& entry : group.tracks) entry.sequence = seq++;
  }
  report.n_tracks = summaries.size();
  if (!summaries.empty()) {
    report.mean_of_means = sum / static_cast<double>(summaries.size());
    double ss = 0.0;
    for (const auto& s : summaries) ss += (s.mean_ul - report.mean_of_means) * (s.mean_ul - report.mean_of_means);
    report.std_of_means = std::sqrt(ss / static_cast<double>(summaries.size()));
  }
  return report;
}

}  // namespace adsbul
