#include "support.hpp"

#include <algorithm>
#include <functional>
#include <limits>

#include "bandmap/validate.hpp"

namespace bandmap::testing {

Graph random_graph(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution edge(p);
  Graph g(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (edge(rng)) g.add_edge(a, b);
    }
  }
  return g;
}

std::size_t brute_force_mis(const Graph& g) {
  const auto n = g.size();
  std::vector<std::uint32_t> nbr(n, 0);
  for (const auto& [a, b] : g.edge_list()) {
    nbr[a] |= 1U << b;
    nbr[b] |= 1U << a;
  }
  std::size_t best = 0;
  for (std::uint32_t set = 0; set < (1U << n); ++set) {
    bool ok = true;
    for (std::size_t v = 0; v < n && ok; ++v) {
      if ((set >> v & 1U) && (nbr[v] & set)) ok = false;
    }
    if (ok) best = std::max<std::size_t>(best, static_cast<std::size_t>(__builtin_popcount(set)));
  }
  return best;
}

std::vector<Graph> tabu_corpus() {
  std::vector<Graph> out;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 10 + static_cast<std::size_t>(i % 51);
    const double p = 0.05 + 0.05 * (i % 7);
    out.push_back(random_graph(n, p, 9000 + static_cast<std::uint64_t>(i)));
  }
  return out;
}

int cycle_ratio_rec_mii(const Dfg& dfg) {
  const auto n = dfg.nodes().size();
  const auto out = dfg.out_edges();
  int best = 1;
  // Simple cycles through `root` that only visit nodes with larger index.
  std::vector<bool> on_path(n, false);
  std::function<void(std::size_t, std::size_t, int, int)> walk = [&](std::size_t root, std::size_t u, int lat,
                                                                      int dist) {
    for (auto e : out[u]) {
      const auto& edge = dfg.edges()[e];
      const auto v = dfg.index_of(edge.dst);
      const int l = lat + dfg.nodes()[u].latency;
      const int d = dist + edge.distance;
      if (v == root) {
        if (d == 0) throw Error("cycle with zero distance");
        best = std::max(best, (l + d - 1) / d);
      } else if (v > root && !on_path[v]) {
        on_path[v] = true;
        walk(root, v, l, d);
        on_path[v] = false;
      }
    }
  };
  for (std::size_t r = 0; r < n; ++r) {
    on_path[r] = true;
    walk(r, r, 0, 0);
    on_path[r] = false;
  }
  return best;
}

int feasibility_rec_mii(const Dfg& dfg) {
  const auto n = dfg.nodes().size();
  int total = 0;
  for (const auto& node : dfg.nodes()) total += node.latency;
  constexpr long kNone = std::numeric_limits<long>::min() / 4;
  for (int ii = 1; ii <= std::max(total, 1); ++ii) {
    std::vector<std::vector<long>> w(n, std::vector<long>(n, kNone));
    for (const auto& e : dfg.edges()) {
      auto& cell = w[dfg.index_of(e.src)][dfg.index_of(e.dst)];
      cell = std::max(cell, static_cast<long>(dfg.node(e.src).latency) - static_cast<long>(ii) * e.distance);
    }
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        if (w[i][k] == kNone) continue;
        for (std::size_t j = 0; j < n; ++j) {
          if (w[k][j] == kNone) continue;
          w[i][j] = std::max(w[i][j], w[i][k] + w[k][j]);
        }
      }
    }
    bool positive = false;
    for (std::size_t i = 0; i < n; ++i) positive = positive || (w[i][i] != kNone && w[i][i] > 0);
    if (!positive) return ii;
  }
  return std::max(total, 1);
}

Dfg random_dfg(std::mt19937_64& rng, int max_ops, bool recurrences) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  Dfg d;
  const int n_vin = pick(0, std::min(2, max_ops - 1));
  const int n_vout = pick(0, std::min(2, max_ops - n_vin - 1));
  const int n_comp = pick(1, std::max(1, max_ops - n_vin - n_vout));
  std::vector<std::string> vins, comps;
  for (int i = 0; i < n_vin; ++i) {
    vins.push_back("I" + std::to_string(i));
    d.add_node({vins.back(), OpKind::vin, 0, std::nullopt});
  }
  for (int i = 0; i < n_comp; ++i) {
    comps.push_back("c" + std::to_string(i));
    d.add_node({comps.back(), OpKind::comp, pick(1, 4) == 1 ? 2 : 1, std::nullopt});
  }
  for (int i = 0; i < n_comp; ++i) {
    // Producers come from vins and earlier comps, so distance-0 edges stay acyclic.
    const int fan_in = pick(0, 2);
    for (int k = 0; k < fan_in; ++k) {
      const int choices = n_vin + i;
      if (choices == 0) break;
      const int c = pick(0, choices - 1);
      const auto& src = c < n_vin ? vins[static_cast<std::size_t>(c)] : comps[static_cast<std::size_t>(c - n_vin)];
      bool dup = false;
      for (const auto& e : d.edges()) dup = dup || (e.src == src && e.dst == comps[static_cast<std::size_t>(i)]);
      if (!dup) d.add_edge({src, comps[static_cast<std::size_t>(i)], 0});
    }
  }
  for (const auto& v : vins) {
    if (d.consumers(v).empty()) d.add_edge({v, comps[static_cast<std::size_t>(pick(0, n_comp - 1))], 0});
  }
  for (int i = 0; i < n_vout; ++i) {
    const auto id = "O" + std::to_string(i);
    d.add_node({id, OpKind::vout, 0, std::nullopt});
    d.add_edge({comps[static_cast<std::size_t>(pick(0, n_comp - 1))], id, 0});
  }
  if (recurrences && pick(0, 1) == 1) {
    const int a = pick(0, n_comp - 1);
    const int b = pick(a, n_comp - 1);
    d.add_edge({comps[static_cast<std::size_t>(b)], comps[static_cast<std::size_t>(a)], pick(1, 2)});
  }
  return d;
}

const std::vector<RecurrenceFixture>& recurrence_fixtures() {
  // Max over cycles of ceil(latency / distance).
  static const std::vector<RecurrenceFixture> fixtures{
      {"two-node loop", "node a comp 1\nnode b comp 1\nedge a b 0\nedge b a 1\n", 2},
      {"self loop over two iterations", "node a comp 1\nedge a a 2\n", 1},
      {"slow self loop", "node a comp 3\nedge a a 1\n", 3},
      {"three-node loop", "node a comp\nnode b comp\nnode c comp\nedge a b 0\nedge b c 0\nedge c a 1\n", 3},
      {"three-node loop, distance 2",
       "node a comp\nnode b comp\nnode c comp\nedge a b 0\nedge b c 0\nedge c a 2\n", 2},
      {"two loops, longer wins",
       "node a comp\nnode b comp\nnode c comp\nnode d comp\nnode e comp\n"
       "edge a b 0\nedge b a 1\nedge c d 0\nedge d e 0\nedge e c 1\n",
       3},
      {"mixed latencies", "node a comp 2\nnode b comp 3\nedge a b 0\nedge b a 1\n", 5},
      {"mixed latencies, distance 2", "node a comp 2\nnode b comp 3\nedge a b 0\nedge b a 2\n", 3},
      {"inner loop dominates",
       "node a comp\nnode b comp\nnode c comp\nedge a b 0\nedge b c 0\nedge c a 3\nedge b a 1\n", 2},
      {"loop with stream tail",
       "node I vin\nnode a comp 1\nnode b comp 2\nnode c comp 1\nnode d comp 2\nnode O vout\n"
       "edge I a 0\nedge a b 0\nedge b c 0\nedge c d 0\nedge d a 4\nedge d O 0\n",
       2},
  };
  return fixtures;
}

Dfg random_recurrent_dfg(std::mt19937_64& rng, int n) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  Dfg d;
  for (int i = 0; i < n; ++i) d.add_node({"n" + std::to_string(i), OpKind::comp, pick(1, 3), std::nullopt});
  for (int i = 1; i < n; ++i) d.add_edge({"n" + std::to_string(pick(0, i - 1)), "n" + std::to_string(i), 0});
  const int back = pick(0, 4);
  for (int k = 0; k < back; ++k) {
    const int a = pick(0, n - 1);
    const int b = pick(a, n - 1);
    d.add_edge({"n" + std::to_string(b), "n" + std::to_string(a), pick(1, 3)});
  }
  return d;
}

PairingStats pair_assignments(const Schedule& sched, const ArchConfig& arch) {
  BindingContext ctx(sched, arch);
  const auto cg = build_conflict_graph(ctx);
  std::vector<std::vector<std::size_t>> per_op(ctx.op_count());
  for (std::size_t v = 0; v < cg.size(); ++v) per_op[static_cast<std::size_t>(cg.vertex_op[v])].push_back(v);

  PairingStats stats;
  Mapping mapping;
  mapping.ii = sched.ii;
  mapping.schedule = sched;
  std::vector<std::size_t> chosen;
  std::function<void(std::size_t, std::size_t)> walk = [&](std::size_t op, std::size_t conflicts) {
    if (op == per_op.size()) {
      ++stats.assignments;
      const bool independent = conflicts == 0;
      const auto violations = check_mapping(mapping, arch);
      const bool clean = violations.empty();
      stats.independent += independent;
      stats.clean += clean;
      if (independent != clean) {
        (independent ? stats.independent_not_clean : stats.clean_not_independent)++;
        if (stats.first_mismatch.empty()) {
          std::string text = independent ? "independent but rejected:" : "clean but conflicting:";
          for (auto v : chosen) text += " " + label(cg.vertices[v]);
          if (!clean) text += " | " + std::string(to_string(violations.front().kind)) + " " + violations.front().detail;
          stats.first_mismatch = text;
        }
      }
      return;
    }
    for (auto v : per_op[op]) {
      std::size_t added = 0;
      for (auto w : chosen) added += cg.graph.adjacent(v, w) ? 1 : 0;
      chosen.push_back(v);
      mapping.assignment[ctx.id(static_cast<int>(op))] = cg.vertices[v];
      walk(op + 1, conflicts + added);
      chosen.pop_back();
    }
  };
  walk(0, 0);
  return stats;
}

CorpusResult soundness_corpus() {
  ArchConfig arch;
  arch.rows = 2;
  arch.cols = 2;
  arch.n_iports = 2;
  arch.n_oports = 2;
  CorpusResult result;
  std::mt19937_64 rng(77);
  constexpr std::uint64_t kMaxAssignments = 1U << 18;
  for (int sample = 0; sample < 2000 && result.dfgs < 200; ++sample) {
    auto dfg = random_dfg(rng, 5 + sample % 3, sample % 3 == 0);
    isolate_bus_transfers(dfg);
    if (dfg.nodes().size() > 8) continue;
    const int lo = mii(dfg, arch);
    for (int ii = lo; ii <= lo + 1; ++ii) {
      auto sched = schedule(dfg, arch, ii);
      if (!std::holds_alternative<Schedule>(sched)) continue;
      auto routed = insert_routing_ops(std::get<Schedule>(sched), arch);
      if (!std::holds_alternative<AugmentedSchedule>(routed)) continue;
      const auto& aug = std::get<AugmentedSchedule>(routed);
      if (aug.dfg().nodes().size() > 8) continue;
      BindingContext ctx(aug.schedule, arch);
      const auto candidates = enumerate_candidates(ctx);
      std::vector<std::uint64_t> per_op(ctx.op_count(), 0);
      for (const auto& v : candidates) ++per_op[static_cast<std::size_t>(ctx.index(op_of(v)))];
      std::uint64_t product = 1;
      for (auto c : per_op) product = std::min<std::uint64_t>(product * c, kMaxAssignments + 1);
      if (product > kMaxAssignments) continue;
      const auto stats = pair_assignments(aug.schedule, arch);
      ++result.dfgs;
      auto& t = result.total;
      t.assignments += stats.assignments;
      t.independent += stats.independent;
      t.clean += stats.clean;
      t.independent_not_clean += stats.independent_not_clean;
      t.clean_not_independent += stats.clean_not_independent;
      if (t.first_mismatch.empty()) t.first_mismatch = stats.first_mismatch;
    }
  }
  return result;
}

}  // namespace bandmap::testing
