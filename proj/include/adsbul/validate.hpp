#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "adsbul/model.hpp"

namespace adsbul {

struct CriterionResult {
  int id = 0;
  std::string name;
  std::string expected;
  std::string measured;
  bool pass = false;
  double seconds = 0.0;
};

struct ValidationOptions {
  EpuTable table = EpuTable::defaults();
  /// Multiplies every tolerance; values below 1 tighten the suite.
  double tolerance_scale = 1.0;
  /// Scratch space for the determinism check.
  std::filesystem::path work_dir = std::filesystem::temp_directory_path() / "adsbul-validate";
  /// Empty runs everything.
  std::set<int> only;
  bool parallel = true;
};

struct ValidationReport {
  std::vector<CriterionResult> criteria;
  double seconds = 0.0;

  bool all_pass() const;
};

/// Synthetic-oracle acceptance scenarios 1-9, each self-generated from fixed seeds.
ValidationReport run_validation(const ValidationOptions& options = {});

/// Fixed-width table: criterion, expected, measured, pass/fail.
std::string format_table(const ValidationReport& report);

}  // namespace adsbul
