// route.hpp - routing-resource pre-allocation.
//
// Inserts route ops (PEs that copy a value) where no single transfer medium
// can deliver data: shortfall inputs whose consumers do not all fit on the
// allocated input buses, consumers reading several inputs, inputs feeding
// outputs directly, and values whose lifetime exceeds one LRF.

#pragma once

#include <string>
#include <variant>

#include "bandmap/arch.hpp"
#include "bandmap/dfg.hpp"
#include "bandmap/schedule.hpp"

namespace bandmap {

struct AugmentedSchedule {
  Schedule schedule;     // schedule.dfg holds the augmented graph
  int route_count = 0;   // route ops inserted by the call that produced this

  const Dfg& dfg() const { return schedule.dfg; }
};

struct RouteFailure {
  std::string reason;
  std::optional<ScheduleFailure> schedule_failure;
};

using RouteOutcome = std::variant<AugmentedSchedule, RouteFailure>;

/// Mesh degree plus the other readers of a column output bus.
int route_fanout_cap(const ArchConfig& arch);

/// Number of route ops needed to serve `residual` consumers of a vin that
/// already feeds `direct` consumers over `q` buses. Each route occupies one
/// bus reader itself.
struct RoutePlan {
  int routes = 0;
  int direct = 0;
  int served = 0;
};
RoutePlan plan_routes(int rd, int q, const ArchConfig& arch);

/// Adds a route op on the edge `src -> dst` (all parallel edges). Returns the
/// route id.
std::string insert_route_on_edge(Dfg& dfg, const std::string& src, const std::string& dst);

/// Structural normalization independent of the schedule: consumers reading
/// more than one vin, vins feeding vouts directly, and ops draining several
/// vouts get route ops. Returns the number inserted.
int isolate_bus_transfers(Dfg& dfg);

RouteOutcome insert_routing_ops(const Schedule& sched, const ArchConfig& arch,
                                PortPolicy policy = PortPolicy::bandwidth_allocation);

int count_routing_ops(const Dfg& dfg);

}  // namespace bandmap
