#include <algorithm>
#include <limits>

#include "bandmap/schedule.hpp"

namespace bandmap {

namespace {

int ceil_div(int a, int b) { return (a + b - 1) / b; }

}  // namespace

PortAllocation allocate_ports(int rd, int pes_per_ibus, int available_iports, PortPolicy policy) {
  if (rd < 1 || pes_per_ibus < 1 || available_iports < 0) {
    throw ScheduleError("allocate_ports: rd and pes_per_ibus must be ≥ 1, ports ≥ 0");
  }
  const int needed = ceil_div(rd, pes_per_ibus);
  if (available_iports == 0) return {0, true};
  if (policy == PortPolicy::single_port) return {1, needed > 1};
  if (rd <= pes_per_ibus) return {1, false};
  const int q = std::min(needed, available_iports);
  return {q, q < needed};
}

int res_mii(const Dfg& dfg, const ArchConfig& arch) {
  int pe_demand = 0;
  int port_claims = 0;
  int vouts = 0;
  for (const auto& n : dfg.nodes()) {
    switch (n.kind) {
      case OpKind::comp:
      case OpKind::route: ++pe_demand; break;
      case OpKind::vin: port_claims += ceil_div(std::max(1, reuse_degree(dfg, n.id)), arch.pes_per_ibus()); break;
      case OpKind::vout: ++vouts; break;
    }
  }
  return std::max({1, ceil_div(pe_demand, arch.pe_count()), ceil_div(port_claims, arch.n_iports),
                   ceil_div(vouts, arch.n_oports)});
}

bool has_positive_cycle(const Dfg& dfg, int ii) {
  // Longest-path Bellman-Ford from a virtual source connected to every node.
  const auto& nodes = dfg.nodes();
  const std::size_t n = nodes.size();
  std::vector<long long> dist(n, 0);
  struct W {
    std::size_t s, d;
    long long w;
  };
  std::vector<W> edges;
  for (const auto& e : dfg.edges()) {
    auto s = dfg.index_of(e.src);
    edges.push_back({s, dfg.index_of(e.dst),
                     static_cast<long long>(nodes[s].latency) - static_cast<long long>(ii) * e.distance});
  }
  for (std::size_t round = 0; round <= n; ++round) {
    bool changed = false;
    for (const auto& e : edges) {
      if (dist[e.s] + e.w > dist[e.d]) {
        dist[e.d] = dist[e.s] + e.w;
        changed = true;
      }
    }
    if (!changed) return false;
  }
  return true;
}

int rec_mii(const Dfg& dfg) {
  for (const auto& diag : validate_dfg(dfg)) {
    if (diag.find("combinational cycle") != std::string::npos) {
      throw DfgError("rec_mii: " + diag + " (cycle with total distance 0)");
    }
  }
  int hi = 1;
  for (const auto& n : dfg.nodes()) hi += n.latency;
  if (!has_positive_cycle(dfg, 1)) return 1;
  int lo = 1;  // infeasible
  while (hi - lo > 1) {
    int mid = lo + (hi - lo) / 2;
    if (has_positive_cycle(dfg, mid)) lo = mid;
    else hi = mid;
  }
  return hi;
}

int mii(const Dfg& dfg, const ArchConfig& arch) { return std::max(res_mii(dfg, arch), rec_mii(dfg)); }

}  // namespace bandmap
