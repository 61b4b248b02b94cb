// schedule.hpp - MII bounds and modulo list scheduling with input-bandwidth
// allocation.
//
// A vin and the computing ops it feeds form a cluster that is placed in one
// cycle: data on an input bus is consumed the cycle it arrives. When a vin's
// reuse degree exceeds the PEs reachable from one input bus, bandwidth
// allocation claims several input ports for it and the vin is split into one
// copy per port.

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "bandmap/arch.hpp"
#include "bandmap/dfg.hpp"

namespace bandmap {

/// bandwidth_allocation: multi-port allocation for reused inputs.
/// single_port: every vin gets exactly one port (the comparison baseline).
enum class PortPolicy { bandwidth_allocation, single_port };

struct PortAllocation {
  int q = 0;  // 0 = no port available at this slot
  bool shortfall = false;
  bool operator==(const PortAllocation&) const = default;
};

PortAllocation allocate_ports(int rd, int pes_per_ibus, int available_iports,
                              PortPolicy policy = PortPolicy::bandwidth_allocation);

int res_mii(const Dfg& dfg, const ArchConfig& arch);
int rec_mii(const Dfg& dfg);
int mii(const Dfg& dfg, const ArchConfig& arch);

/// True when some cycle is positive under weights latency(u) - ii * distance.
bool has_positive_cycle(const Dfg& dfg, int ii);

struct SplitGroup {
  std::string vin;
  std::vector<std::string> consumers;
};

struct SplitResult {
  Dfg dfg;
  std::vector<SplitGroup> groups;  // groups[0] keeps the original vin
};

/// Partitions `ordered_consumers` (defaults to all consumers by id) greedily
/// into q groups of at most pes_per_ibus and gives each group but the first a
/// new vin copy. Consumers not listed stay attached to the original vin.
SplitResult split_vio(const Dfg& dfg, const std::string& vin, int q, int pes_per_ibus,
                      std::optional<std::vector<std::string>> ordered_consumers = std::nullopt);

struct Schedule {
  int ii = 1;
  Dfg dfg;  // the scheduled graph, vin copies included
  std::map<std::string, int> start_time;
  std::map<std::string, int> port_alloc;  // per vin of the input graph
  std::set<std::string> shortfall;
  std::map<std::string, std::vector<SplitGroup>> split_groups;
  int pe_limit = 0;

  int start(const std::string& op) const { return start_time.at(op); }
  int slot(const std::string& op) const { return start_time.at(op) % ii; }
};

struct ScheduleFailure {
  std::string op;
  int ii = 0;
  std::string reason;
  std::vector<int> pe_used;
  std::vector<int> iport_used;
  std::vector<int> oport_used;
};

using ScheduleOutcome = std::variant<Schedule, ScheduleFailure>;

/// pe_limit caps PE ops per modulo slot below the array size (0 = no cap);
/// it is kept in the result so rescheduling after repairs honours it.
ScheduleOutcome schedule(const Dfg& dfg, const ArchConfig& arch, int ii,
                         PortPolicy policy = PortPolicy::bandwidth_allocation, int pe_limit = 0);

}  // namespace bandmap
