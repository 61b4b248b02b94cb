#include "bandmap/route.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace bandmap {

namespace {

constexpr int kMaxRouteRounds = 4;

int ceil_div(int a, int b) { return (a + b - 1) / b; }

}  // namespace

int route_fanout_cap(const ArchConfig& arch) { return 4 + arch.rows - 1; }

RoutePlan plan_routes(int rd, int q, const ArchConfig& arch) {
  const int capacity = q * arch.pes_per_ibus();
  if (rd <= capacity) return {0, rd, 0};
  const int fanout = route_fanout_cap(arch);
  for (int r = 1; r <= capacity; ++r) {
    const int direct = capacity - r;
    if (direct + r * fanout >= rd) return {r, direct, rd - direct};
  }
  // Every bus reader is a route and they still cannot cover the residual.
  return {capacity, 0, rd};
}

int count_routing_ops(const Dfg& dfg) { return static_cast<int>(dfg.count(OpKind::route)); }

std::string insert_route_on_edge(Dfg& dfg, const std::string& src, const std::string& dst) {
  const auto id = dfg.fresh_id("route_" + src + "_" + dst);
  dfg.add_node({id, OpKind::route, 1, std::nullopt});
  std::set<int> distances;
  auto& edges = dfg.mutable_edges();
  for (std::size_t e = edges.size(); e-- > 0;) {
    if (edges[e].src == src && edges[e].dst == dst) {
      distances.insert(edges[e].distance);
      dfg.remove_edge(e);
    }
  }
  dfg.add_edge({src, id, 0});
  for (int d : distances) dfg.add_edge({id, dst, d});
  return id;
}

int isolate_bus_transfers(Dfg& dfg) {
  int inserted = 0;
  auto nodes = dfg.nodes();  // copy: the loop mutates the graph
  for (const auto& n : nodes) {
    if (n.occupies_pe()) {
      std::vector<std::string> vins;
      for (const auto& p : dfg.producers(n.id)) {
        if (dfg.node(p).kind == OpKind::vin) vins.push_back(p);
      }
      std::sort(vins.begin(), vins.end());
      for (std::size_t k = 1; k < vins.size(); ++k) {
        insert_route_on_edge(dfg, vins[k], n.id);
        ++inserted;
      }
    }
    if (n.kind == OpKind::vin) {
      std::set<std::string> targets;
      for (const auto& e : dfg.edges()) {
        if (e.src != n.id) continue;
        if (dfg.node(e.dst).kind == OpKind::vout || e.distance > 0) targets.insert(e.dst);
      }
      for (const auto& t : targets) {
        insert_route_on_edge(dfg, n.id, t);
        ++inserted;
      }
    } else if (n.occupies_pe()) {
      std::vector<std::string> vouts;
      for (const auto& c : dfg.consumers(n.id)) {
        if (dfg.node(c).kind == OpKind::vout) vouts.push_back(c);
      }
      std::sort(vouts.begin(), vouts.end());
      for (std::size_t k = 1; k < vouts.size(); ++k) {
        insert_route_on_edge(dfg, n.id, vouts[k]);
        ++inserted;
      }
    }
  }
  return inserted;
}

namespace {

// Shortfall handling: consumers of a vin that were not placed in the vin's
// cycle are served by route ops reading the vin's bus.
int insert_shortfall_routes(Dfg& dfg, const Schedule& sched, const ArchConfig& arch) {
  int inserted = 0;
  const int fanout = route_fanout_cap(arch);
  const int bus_width = arch.pes_per_ibus();

  // Group vins by the datum they carry.
  std::map<std::string, std::vector<std::string>> families;
  for (const auto& n : sched.dfg.nodes()) {
    if (n.kind == OpKind::vin) families[n.origin.value_or(n.id)].push_back(n.id);
  }

  for (auto& [origin, members] : families) {
    std::sort(members.begin(), members.end());
    std::map<std::string, std::vector<std::string>> direct;
    std::vector<std::pair<std::string, std::string>> deferred;  // (vin, consumer)
    for (const auto& v : members) {
      direct[v];
      for (const auto& e : sched.dfg.edges()) {
        if (e.src != v || e.distance != 0 || !sched.dfg.node(e.dst).occupies_pe()) continue;
        if (sched.start(e.dst) == sched.start(v)) {
          direct[v].push_back(e.dst);
        } else {
          deferred.emplace_back(v, e.dst);
        }
      }
    }
    if (deferred.empty()) continue;

    // Feed routes from the copy with the most room on its bus.
    std::string feeder = members.front();
    for (const auto& v : members) {
      if (direct[v].size() < direct[feeder].size()) feeder = v;
    }
    auto& fed = direct[feeder];
    std::sort(fed.begin(), fed.end());
    int routes = ceil_div(static_cast<int>(deferred.size()), fanout);
    while (static_cast<int>(fed.size()) + routes > bus_width && !fed.empty()) {
      deferred.emplace_back(feeder, fed.back());
      fed.pop_back();
      routes = ceil_div(static_cast<int>(deferred.size()), fanout);
    }
    std::sort(deferred.begin(), deferred.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    for (int r = 0; r < routes; ++r) {
      const auto id = dfg.fresh_id("route_" + origin);
      dfg.add_node({id, OpKind::route, 1, std::nullopt});
      dfg.add_edge({feeder, id, 0});
      ++inserted;
      const auto lo = static_cast<std::size_t>(r * fanout);
      const auto hi = std::min(deferred.size(), lo + static_cast<std::size_t>(fanout));
      for (auto k = lo; k < hi; ++k) {
        for (auto& e : dfg.mutable_edges()) {
          if (e.src == deferred[k].first && e.dst == deferred[k].second && e.distance == 0) e.src = id;
        }
      }
    }
  }
  return inserted;
}

int insert_lifetime_routes(Dfg& dfg, const Schedule& sched, const ArchConfig& arch) {
  std::vector<std::pair<std::string, std::string>> long_edges;
  for (const auto& e : sched.dfg.edges()) {
    const auto& u = sched.dfg.node(e.src);
    const auto& v = sched.dfg.node(e.dst);
    if (!u.occupies_pe() || !v.occupies_pe()) continue;
    const int live = sched.start(e.dst) + e.distance * sched.ii - (sched.start(e.src) + u.latency) + 1;
    if (live > 0 && ceil_div(live, sched.ii) > arch.lrf_capacity) long_edges.emplace_back(e.src, e.dst);
  }
  std::sort(long_edges.begin(), long_edges.end());
  long_edges.erase(std::unique(long_edges.begin(), long_edges.end()), long_edges.end());
  for (const auto& [s, d] : long_edges) insert_route_on_edge(dfg, s, d);
  return static_cast<int>(long_edges.size());
}

}  // namespace

RouteOutcome insert_routing_ops(const Schedule& sched, const ArchConfig& arch, PortPolicy policy) {
  Schedule current = sched;
  int inserted_total = 0;
  for (int round = 0; round <= kMaxRouteRounds; ++round) {
    Dfg dfg = current.dfg;
    int inserted = isolate_bus_transfers(dfg);
    inserted += insert_shortfall_routes(dfg, current, arch);
    inserted += insert_lifetime_routes(dfg, current, arch);
    if (inserted == 0) {
      // Keep the bandwidth decisions taken on the original inputs.
      for (const auto& [vin, groups] : sched.split_groups) {
        current.split_groups.emplace(vin, groups);
        current.port_alloc[vin] = static_cast<int>(groups.size());
      }
      for (const auto& v : sched.shortfall) current.shortfall.insert(v);
      return AugmentedSchedule{std::move(current), inserted_total};
    }
    if (round == kMaxRouteRounds) break;
    inserted_total += inserted;
    auto next = schedule(dfg, arch, sched.ii, policy, sched.pe_limit);
    if (auto* fail = std::get_if<ScheduleFailure>(&next)) {
      return RouteFailure{"rescheduling after route insertion failed at op '" + fail->op + "': " + fail->reason,
                          *fail};
    }
    current = std::get<Schedule>(std::move(next));
  }
  return RouteFailure{"route insertion did not converge at ii=" + std::to_string(sched.ii), std::nullopt};
}

}  // namespace bandmap
