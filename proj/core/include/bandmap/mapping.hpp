#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bandmap/conflict_graph.hpp"
#include "bandmap/schedule.hpp"

namespace bandmap {

enum class Mode { bandmap, baseline };

std::string_view to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view s);
PortPolicy port_policy(Mode mode);

struct Mapping {
  int ii = 1;
  std::map<std::string, Vertex> assignment;
  Schedule schedule;  // schedule.dfg is the final augmented DFG

  const Dfg& dfg() const { return schedule.dfg; }
};

struct Attempt {
  int ii = 0;
  int mis_size = 0;
  int ops = 0;
  std::string outcome;  // mapped, incomplete, schedule_failed, route_failed
  bool operator==(const Attempt&) const = default;
};

struct MapReport {
  std::string kernel;
  Mode mode = Mode::bandmap;
  std::optional<Mapping> mapping;
  int mii = 0;
  int achieved_ii = 0;  // 0 when no mapping was found
  int routing_pes = 0;
  std::vector<Attempt> attempts;
  std::string failure;
  std::vector<std::string> violations;  // filled by callers that re-check the mapping

  bool ok() const { return mapping.has_value(); }
};

}  // namespace bandmap
