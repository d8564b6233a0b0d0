#include "adsbul/model.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "epu_table_default.hpp"

namespace adsbul {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_input: return "invalid-input";
    case ErrorCode::invalid_nacp: return "invalid-nacp";
    case ErrorCode::io: return "io";
    case ErrorCode::corrupt_input: return "corrupt-input";
    case ErrorCode::insufficient_data: return "insufficient-data";
    case ErrorCode::invalid_abscissa: return "invalid-abscissa";
    case ErrorCode::out_of_domain: return "out-of-domain";
    case ErrorCode::smoothing_failed: return "smoothing-failed";
    case ErrorCode::empty_track: return "empty-track";
  }
  return "unknown";
}

Icao::Icao(std::uint32_t value) : value_(value) {
  if (value > 0xFFFFFF) throw Error(ErrorCode::invalid_input, "ICAO address exceeds 24 bits");
}

Icao Icao::parse(std::string_view hex) {
  if (hex.empty() || hex.size() > 6) {
    throw Error(ErrorCode::invalid_input, "ICAO must be 1-6 hex digits: '" + std::string(hex) + "'");
  }
  std::uint32_t v = 0;
  auto [ptr, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), v, 16);
  if (ec != std::errc{} || ptr != hex.data() + hex.size()) {
    throw Error(ErrorCode::invalid_input, "bad ICAO hex '" + std::string(hex) + "'");
  }
  return Icao(v);
}

std::string Icao::str() const {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%06X", value_);
  return buf;
}

void validate(const AdsbReport& r) {
  if (r.nacp < 0 || r.nacp > EpuTable::kMaxNacp) {
    throw Error(ErrorCode::invalid_nacp, "nacp " + std::to_string(r.nacp) + " outside [0, 11]");
  }
  if (!std::isfinite(r.toa) || r.toa < 0.0) throw Error(ErrorCode::invalid_input, "toa must be finite and >= 0");
  if (!finite(r.pos) || !finite(r.vel)) throw Error(ErrorCode::invalid_input, "non-finite position or velocity");
}

EpuTable::EpuTable(const std::array<std::optional<double>, kMaxNacp + 1>& bounds) : bounds_(bounds) {
  for (int k = 1; k <= kMaxNacp; ++k) {
    const auto& b = bounds_[k];
    if (b && (!std::isfinite(*b) || *b <= 0.0)) {
      throw Error(ErrorCode::invalid_input, "EPU bound for nacp_" + std::to_string(k) + " must be positive");
    }
    if (k == 1) continue;
    const auto& prev = bounds_[k - 1];
    if (prev && (!b || *b > *prev)) {
      throw Error(ErrorCode::invalid_input, "EPU table not monotone at nacp_" + std::to_string(k));
    }
  }
}

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

}  // namespace

EpuTable EpuTable::parse(std::string_view text) {
  std::array<std::optional<double>, kMaxNacp + 1> bounds{};
  std::array<bool, kMaxNacp + 1> seen{};
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    const auto where = "EPU table line " + std::to_string(line_no);
    if (eq == std::string_view::npos) throw Error(ErrorCode::invalid_input, where + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (!key.starts_with("nacp_")) throw Error(ErrorCode::invalid_input, where + ": unknown key");
    int k = -1;
    const auto digits = key.substr(5);
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec != std::errc{} || p != digits.data() + digits.size() || k < 0 || k > kMaxNacp) {
      throw Error(ErrorCode::invalid_input, where + ": bad key '" + std::string(key) + "'");
    }
    if (seen[k]) throw Error(ErrorCode::invalid_input, where + ": duplicate key");
    seen[k] = true;
    if (value == "unbounded") {
      bounds[k] = std::nullopt;
    } else {
      double m = 0.0;
      auto [vp, vec] = std::from_chars(value.data(), value.data() + value.size(), m);
      if (vec != std::errc{} || vp != value.data() + value.size()) {
        throw Error(ErrorCode::invalid_input, where + ": bad value '" + std::string(value) + "'");
      }
      bounds[k] = m;
    }
  }
  for (int k = 0; k <= kMaxNacp; ++k) {
    if (!seen[k]) throw Error(ErrorCode::invalid_input, "EPU table missing nacp_" + std::to_string(k));
  }
  return EpuTable(bounds);
}

EpuTable EpuTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read EPU table " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const EpuTable& EpuTable::defaults() {
  static const EpuTable table = parse(detail::kDefaultEpuTableText);
  return table;
}

std::optional<double> epu_lookup(const EpuTable& table, int nacp) {
  if (nacp < 0 || nacp > EpuTable::kMaxNacp) {
    throw Error(ErrorCode::invalid_nacp, "nacp " + std::to_string(nacp) + " outside [0, 11]");
  }
  return table.bounds()[nacp];
}

std::string_view to_string(UlClass c) {
  switch (c) {
    case UlClass::within: return "within";
    case UlClass::under_compensated_excess: return "under_compensated_excess";
    case UlClass::over_compensated_excess: return "over_compensated_excess";
  }
  return "unknown";
}

UlClass classify_ul(double ul, const UlBudget& budget) {
  if (!std::isfinite(ul)) throw Error(ErrorCode::invalid_input, "non-finite UL");
  if (ul > budget.max_ul) return UlClass::under_compensated_excess;
  if (ul < budget.min_ul) return UlClass::over_compensated_excess;
  return UlClass::within;
}

}  // namespace adsbul
