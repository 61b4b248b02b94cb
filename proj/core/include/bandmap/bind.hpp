// bind.hpp - binding and the top-level mapping driver.
//
// map_application walks ii upward from the MII. At each ii it schedules,
// pre-allocates routing ops, binds through the conflict graph, and repairs
// incomplete bindings with extra route ops before giving up on that ii.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bandmap/mapping.hpp"
#include "bandmap/route.hpp"

namespace bandmap {

struct BindOptions {
  std::uint64_t seed = 1;
  std::uint64_t budget = 0;  // tabu iterations, 0 = 50 per vertex
  int restarts = 3;          // tabu runs with seeds seed, seed+1, ...
};

struct Incomplete {
  std::vector<std::string> unmapped;
  std::size_t mis_size = 0;
  std::size_t op_count = 0;
};

struct BindResult {
  std::variant<Mapping, Incomplete> outcome;
  std::size_t cg_vertices = 0;
  std::size_t cg_edges = 0;
  std::size_t mis_size = 0;

  bool complete() const { return std::holds_alternative<Mapping>(outcome); }
};

BindResult bind(const AugmentedSchedule& aug, const ArchConfig& arch, const BindOptions& options = {});

/// Signal returned by handle_incomplete when the current ii is exhausted.
struct Escalate {
  std::string reason;
};

using RepairOutcome = std::variant<AugmentedSchedule, Escalate>;

/// Inserts a route op on the most conflicted dependence of each unmapped PE
/// op and reschedules at the same ii. `round` counts earlier repairs at this
/// ii; from round 3 on the answer is always Escalate.
RepairOutcome handle_incomplete(const Incomplete& state, const AugmentedSchedule& aug, const ArchConfig& arch,
                                PortPolicy policy, int round = 0);

inline constexpr int kMaxRepairRounds = 3;

struct MapOptions {
  Mode mode = Mode::bandmap;
  std::uint64_t seed = 1;
  int max_ii = 0;  // 0 = mii + 8
  std::string kernel;
};

MapReport map_application(const Dfg& dfg, const ArchConfig& arch, const MapOptions& options);

}  // namespace bandmap
