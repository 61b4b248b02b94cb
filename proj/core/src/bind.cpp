#include "bandmap/bind.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "bandmap/mis.hpp"
#include "bandmap/validate.hpp"

namespace bandmap {

std::string_view to_string(Mode mode) { return mode == Mode::bandmap ? "bandmap" : "baseline"; }

std::optional<Mode> parse_mode(std::string_view s) {
  if (s == "bandmap") return Mode::bandmap;
  if (s == "baseline") return Mode::baseline;
  return std::nullopt;
}

PortPolicy port_policy(Mode mode) {
  return mode == Mode::bandmap ? PortPolicy::bandwidth_allocation : PortPolicy::single_port;
}

BindResult bind(const AugmentedSchedule& aug, const ArchConfig& arch, const BindOptions& options) {
  BindingContext ctx(aug.schedule, arch);
  const auto cg = build_conflict_graph(ctx);
  const std::size_t target = ctx.op_count();

  MisResult best;
  if (cg.size() <= kExactMisLimit) {
    best = exact_mis(cg.graph);
  } else {
    for (int r = 0; r < std::max(1, options.restarts); ++r) {
      auto res = tabu_mis(cg.graph, options.seed + static_cast<std::uint64_t>(r), options.budget, target);
      if (r == 0 || res.size > best.size) best = std::move(res);
      if (best.size >= target) break;
    }
  }

  BindResult out;
  out.cg_vertices = cg.size();
  out.cg_edges = cg.graph.edge_count();
  out.mis_size = best.size;

  Mapping mapping;
  mapping.ii = aug.schedule.ii;
  mapping.schedule = aug.schedule;
  for (auto v : best.chosen) mapping.assignment.emplace(op_of(cg.vertices[v]), cg.vertices[v]);

  Incomplete inc;
  inc.mis_size = best.size;
  inc.op_count = target;
  for (const auto& n : aug.dfg().nodes()) {
    if (!mapping.assignment.count(n.id)) inc.unmapped.push_back(n.id);
  }
  std::sort(inc.unmapped.begin(), inc.unmapped.end());
  if (!inc.unmapped.empty()) {
    out.outcome = std::move(inc);
    return out;
  }
  // Register-file capacity is not pairwise; the checker has the final word.
  if (!check_mapping(mapping, arch).empty()) {
    out.outcome = std::move(inc);
    return out;
  }
  out.outcome = std::move(mapping);
  return out;
}

RepairOutcome handle_incomplete(const Incomplete& state, const AugmentedSchedule& aug, const ArchConfig& arch,
                                PortPolicy policy, int round) {
  if (state.unmapped.empty()) throw Error("handle_incomplete: no unmapped ops");
  if (round >= kMaxRepairRounds) return Escalate{"repair rounds exhausted at ii=" + std::to_string(aug.schedule.ii)};

  BindingContext ctx(aug.schedule, arch);
  const auto candidates = enumerate_candidates(ctx);
  std::map<std::string, std::vector<const QuadVertex*>> quads;
  for (const auto& v : candidates) {
    if (const auto* q = std::get_if<QuadVertex>(&v)) quads[q->op].push_back(q);
  }
  const auto& dfg = aug.dfg();

  auto conflicts_on = [&](const DepEdge& e) {
    std::size_t count = 0;
    for (const auto* p : quads[e.src]) {
      for (const auto* c : quads[e.dst]) {
        if (dependence_conflict(*p, *c, e.distance, ctx)) ++count;
      }
    }
    return count;
  };

  std::set<std::pair<std::string, std::string>> targets;
  for (const auto& op : state.unmapped) {
    if (!dfg.node(op).occupies_pe()) continue;
    std::optional<DepEdge> tightest;
    std::size_t worst = 0;
    for (const auto& e : dfg.edges()) {
      if (e.src != op && e.dst != op) continue;
      if (!dfg.node(e.src).occupies_pe() || !dfg.node(e.dst).occupies_pe()) continue;
      const auto n = conflicts_on(e);
      if (n > worst || (n == worst && n > 0 && tightest && e < *tightest)) {
        worst = n;
        tightest = e;
      }
    }
    if (tightest) targets.emplace(tightest->src, tightest->dst);
  }
  if (targets.empty()) return Escalate{"no repairable dependence among unmapped ops"};

  Dfg repaired = dfg;
  for (const auto& [src, dst] : targets) insert_route_on_edge(repaired, src, dst);

  auto sched = schedule(repaired, arch, aug.schedule.ii, policy, aug.schedule.pe_limit);
  if (auto* fail = std::get_if<ScheduleFailure>(&sched)) {
    return Escalate{"rescheduling after repair failed at op '" + fail->op + "'"};
  }
  auto routed = insert_routing_ops(std::get<Schedule>(sched), arch, policy);
  if (auto* fail = std::get_if<RouteFailure>(&routed)) return Escalate{fail->reason};
  auto next = std::get<AugmentedSchedule>(std::move(routed));
  for (const auto& [vin, groups] : aug.schedule.split_groups) {
    next.schedule.split_groups.emplace(vin, groups);
    next.schedule.port_alloc[vin] = aug.schedule.port_alloc.at(vin);
  }
  next.route_count += aug.route_count + static_cast<int>(targets.size());
  return next;
}

namespace {

enum class CapResult { mapped, unbound, unschedulable };

// One schedule/route/bind pass at a fixed ii and per-slot PE cap. With
// repair set, incomplete bindings go through handle_incomplete.
CapResult try_cap(const Dfg& normalized, const ArchConfig& arch, int ii, int cap, PortPolicy policy, bool repair,
                  const BindOptions& bind_options, Attempt& attempt, std::optional<Mapping>& out) {
  auto sched = schedule(normalized, arch, ii, policy, cap);
  if (std::holds_alternative<ScheduleFailure>(sched)) return CapResult::unschedulable;
  auto routed = insert_routing_ops(std::get<Schedule>(sched), arch, policy);
  if (std::holds_alternative<RouteFailure>(routed)) {
    if (attempt.outcome == "schedule_failed") attempt.outcome = "route_failed";
    return CapResult::unbound;
  }
  auto aug = std::get<AugmentedSchedule>(std::move(routed));
  for (int round = 0;; ++round) {
    auto bound = bind(aug, arch, bind_options);
    attempt.mis_size = static_cast<int>(bound.mis_size);
    attempt.ops = static_cast<int>(aug.dfg().nodes().size());
    if (auto* mapping = std::get_if<Mapping>(&bound.outcome)) {
      attempt.outcome = "mapped";
      out = std::move(*mapping);
      return CapResult::mapped;
    }
    const auto& inc = std::get<Incomplete>(bound.outcome);
    if (inc.unmapped.empty()) {
      attempt.outcome = "rejected";
      return CapResult::unbound;
    }
    attempt.outcome = "incomplete";
    if (!repair) return CapResult::unbound;
    auto repaired = handle_incomplete(inc, aug, arch, policy, round);
    if (std::holds_alternative<Escalate>(repaired)) return CapResult::unbound;
    aug = std::get<AugmentedSchedule>(std::move(repaired));
  }
}

}  // namespace

MapReport map_application(const Dfg& dfg, const ArchConfig& arch, const MapOptions& options) {
  MapReport report;
  report.kernel = options.kernel;
  report.mode = options.mode;
  report.mii = mii(dfg, arch);
  const int max_ii = options.max_ii > 0 ? options.max_ii : report.mii + 8;
  if (max_ii < report.mii) throw Error("max_ii " + std::to_string(max_ii) + " is below the MII " + std::to_string(report.mii));
  const auto policy = port_policy(options.mode);

  Dfg normalized = dfg;
  isolate_bus_transfers(normalized);
  const int base_ops = static_cast<int>(normalized.nodes().size());
  int pe_ops = 0;
  for (const auto& n : normalized.nodes()) pe_ops += n.occupies_pe() ? 1 : 0;

  BindOptions bind_options;
  bind_options.seed = options.seed;
  ArchConfig without_grf = arch;
  without_grf.grf_capacity = 0;

  for (int ii = report.mii; ii <= max_ii; ++ii) {
    // A schedule packed to the full array can be unbindable even when the
    // slots have room, so fewer PE ops per slot are tried before raising ii.
    // Route repairs cost PEs; every cap is tried without them first.
    const int floor_cap = std::max(1, (pe_ops + ii - 1) / ii);
    Attempt attempt{ii, 0, base_ops, "schedule_failed"};
    for (bool repair : {false, true}) {
      for (int cap = arch.pe_count(); cap >= floor_cap; --cap) {
        std::optional<Mapping> mapping;
        auto r = CapResult::unbound;
        if (arch.grf_capacity > 0) {
          // A mapping that never touches the GRF stays valid with one.
          r = try_cap(normalized, without_grf, ii, cap, policy, repair, bind_options, attempt, mapping);
        }
        if (r != CapResult::mapped) {
          const auto g = try_cap(normalized, arch, ii, cap, policy, repair, bind_options, attempt, mapping);
          if (g == CapResult::mapped || r == CapResult::unbound) r = g;
        }
        if (r == CapResult::unschedulable) break;
        if (r == CapResult::mapped) {
          report.attempts.push_back(attempt);
          report.achieved_ii = ii;
          report.routing_pes = count_routing_ops(mapping->dfg());
          report.mapping = std::move(mapping);
          return report;
        }
      }
    }
    report.attempts.push_back(attempt);
  }
  report.failure = "no complete mapping for ii in [" + std::to_string(report.mii) + ", " +
                   std::to_string(max_ii) + "]";
  return report;
}

}  // namespace bandmap
