#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adsbul/error.hpp"

namespace adsbul {

inline constexpr double kMetersPerNauticalMile = 1852.0;
inline constexpr double kSecondsPerDay = 86400.0;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double k, Vec2 a) { return {k * a.x, k * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline bool finite(Vec2 a) { return std::isfinite(a.x) && std::isfinite(a.y); }

/// 24-bit ICAO aircraft address.
class Icao {
 public:
  Icao() = default;
  explicit Icao(std::uint32_t value);

  /// Parses 1 to 6 hex digits, case-insensitive. Throws invalid_input.
  static Icao parse(std::string_view hex);

  std::uint32_t value() const noexcept { return value_; }
  /// Six upper-case hex digits, e.g. "A637E1".
  std::string str() const;

  friend auto operator<=>(const Icao&, const Icao&) = default;

 private:
  std::uint32_t value_ = 0;
};

struct AdsbReport {
  Icao icao;
  double toa = 0.0;  // UTC seconds of day
  Vec2 pos;          // m, local tangent plane
  Vec2 vel;          // m/s
  int nacp = 0;
  bool utc_coupled = false;
  int link_version = 2;
  bool link_1090es = true;
  std::string source_tag;
};

/// Throws invalid_input if the report violates the record invariants.
void validate(const AdsbReport& report);

struct TrackPoint {
  double t = 0.0;
  Vec2 pos;
  Vec2 vel;
};

struct Track {
  Icao icao;
  int track_index = 0;
  std::vector<TrackPoint> points;

  double t_begin() const { return points.front().t; }
  double t_end() const { return points.back().t; }
};

/// NACp to 95% horizontal containment radius. NACp 0 carries no bound.
class EpuTable {
 public:
  static constexpr int kMaxNacp = 11;

  /// Bounds indexed by NACp; std::nullopt means unbounded.
  explicit EpuTable(const std::array<std::optional<double>, kMaxNacp + 1>& bounds);

  /// Parses the `nacp_<k> = <meters|unbounded>` text format.
  static EpuTable parse(std::string_view text);
  static EpuTable load(const std::string& path);
  /// The checked-in default table (data/epu_table.conf, embedded at build time).
  static const EpuTable& defaults();

  const std::array<std::optional<double>, kMaxNacp + 1>& bounds() const { return bounds_; }

 private:
  std::array<std::optional<double>, kMaxNacp + 1> bounds_;
};

/// Returns the EPU radius in meters, or std::nullopt for unbounded (NACp 0).
/// Throws invalid_nacp outside [0, 11].
std::optional<double> epu_lookup(const EpuTable& table, int nacp);

/// Per-axis Gaussian sigma whose isotropic 2-D distribution has the given
/// 95% circular containment radius.
inline constexpr double kEpuToAxisSigma = 2.45;
inline double epu_axis_sigma(double epu_m) { return epu_m / kEpuToAxisSigma; }

struct UlBudget {
  double min_ul = -0.200;
  double max_ul = 0.400;
};

enum class UlClass { within, under_compensated_excess, over_compensated_excess };

std::string_view to_string(UlClass c);

/// Budget endpoints are inclusive.
UlClass classify_ul(double ul, const UlBudget& budget = {});

}  // namespace adsbul
