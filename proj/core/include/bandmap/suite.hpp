#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bandmap/arch.hpp"
#include "bandmap/mapping.hpp"

namespace bandmap {

/// (n, m) pairs of the default C_nK_m kernel suite.
const std::vector<std::pair<int, int>>& default_suite();

struct SuiteRow {
  std::string kernel;
  int mii = 0;
  int ii_bandmap = 0;   // 0 = not mapped
  int ii_baseline = 0;
  int routing_bandmap = 0;
  int routing_baseline = 0;
  double reduction = 0.0;  // percent, 0 when the baseline needs no routing
  bool mii_missed = false;
};

struct SuiteTable {
  std::vector<SuiteRow> rows;
  double mean_reduction = 0.0;  // over rows whose baseline routes
};

SuiteTable run_suite(const std::vector<std::pair<int, int>>& kernels, const ArchConfig& arch, std::uint64_t seed = 1);

std::string emit_suite_json(const SuiteTable& table, const ArchConfig& arch, std::uint64_t seed);

}  // namespace bandmap
