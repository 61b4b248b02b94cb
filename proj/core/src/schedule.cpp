#include "bandmap/schedule.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>

namespace bandmap {

SplitResult split_vio(const Dfg& dfg, const std::string& vin, int q, int pes_per_ibus,
                      std::optional<std::vector<std::string>> ordered_consumers) {
  const auto& node = dfg.node(vin);
  if (node.kind != OpKind::vin) throw ScheduleError("split_vio: '" + vin + "' is not a vin");
  if (q < 1 || pes_per_ibus < 1) throw ScheduleError("split_vio: q and pes_per_ibus must be ≥ 1");

  std::vector<std::string> order;
  if (ordered_consumers) {
    order = *ordered_consumers;
  } else {
    order = dfg.consumers(vin);
    std::sort(order.begin(), order.end());
  }
  if (q > static_cast<int>(order.size()) && q > 1) {
    throw ScheduleError("split_vio: q=" + std::to_string(q) + " exceeds the " +
                        std::to_string(order.size()) + " consumers of '" + vin + "'");
  }
  if (static_cast<int>(order.size()) > q * pes_per_ibus) {
    throw ScheduleError("split_vio: " + std::to_string(order.size()) + " consumers do not fit " +
                        std::to_string(q) + " buses of " + std::to_string(pes_per_ibus) + " PEs");
  }

  SplitResult out{dfg, {}};
  out.groups.push_back({vin, {}});
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto g = i / static_cast<std::size_t>(pes_per_ibus);
    if (g >= out.groups.size()) {
      OpNode copy{out.dfg.fresh_id(vin + "_p" + std::to_string(g)), OpKind::vin, 0,
                  node.origin.value_or(vin)};
      out.groups.push_back({copy.id, {}});
      out.dfg.add_node(std::move(copy));
    }
    out.groups[g].consumers.push_back(order[i]);
  }
  for (std::size_t g = 1; g < out.groups.size(); ++g) {
    for (const auto& c : out.groups[g].consumers) {
      for (auto& e : out.dfg.mutable_edges()) {
        if (e.src == vin && e.dst == c) e.src = out.groups[g].vin;
      }
    }
  }
  return out;
}

namespace {

constexpr int kUnscheduled = std::numeric_limits<int>::min();

int ceil_div(int a, int b) { return (a + b - 1) / b; }

struct Task {
  std::vector<std::size_t> ops;  // vins first (by id), then consumers (by id)
  bool cluster = false;
  bool done = false;
  int height = 0;
  std::string key;  // smallest id, tie-break
};

class ModuloScheduler {
 public:
  ModuloScheduler(const Dfg& dfg, const ArchConfig& arch, int ii, PortPolicy policy, int pe_limit)
      : dfg_(dfg), arch_(arch), ii_(ii), policy_(policy),
        pe_cap_(pe_limit > 0 ? std::min(pe_limit, arch.pe_count()) : arch.pe_count()), nodes_(dfg.nodes()),
        in_(dfg.in_edges()), out_(dfg.out_edges()) {
    const auto n = nodes_.size();
    start_.assign(n, kUnscheduled);
    floor_.assign(n, 0);
    pe_used_.assign(static_cast<std::size_t>(ii), 0);
    iport_used_.assign(static_cast<std::size_t>(ii), 0);
    ibus_used_.assign(static_cast<std::size_t>(ii), 0);
    oport_used_.assign(static_cast<std::size_t>(ii), 0);
    compute_heights();
    build_tasks();
    for (int r = 0; r < arch.rows; ++r) {
      for (int c = 0; c < arch.cols; ++c) {
        auto near = neighbors(arch, {r, c});
        for (int rr = 0; rr < arch.rows; ++rr) {
          if (rr != r && std::find(near.begin(), near.end(), PeId{rr, c}) == near.end()) near.push_back({rr, c});
        }
        reach_ = std::max(reach_, static_cast<int>(near.size()));
      }
    }
  }

  ScheduleOutcome run() {
    while (true) {
      auto next = pick_task();
      if (!next) break;
      auto& task = tasks_[*next];
      std::optional<ScheduleFailure> fail =
          task.cluster ? place_cluster(*next) : place_single(task.ops.front());
      if (fail) return *fail;
      tasks_[*next].done = true;
    }
    return finish();
  }

 private:
  const Dfg& dfg_;
  const ArchConfig& arch_;
  int ii_;
  PortPolicy policy_;
  int pe_cap_;
  const std::vector<OpNode>& nodes_;
  std::vector<std::vector<std::size_t>> in_, out_;
  std::vector<int> start_, floor_, height_;
  std::vector<int> pe_used_, iport_used_, ibus_used_, oport_used_;
  std::vector<Task> tasks_;
  std::vector<int> task_of_;
  std::vector<bool> forced_;
  int reach_ = 0;  // most PEs one producer reaches in a cycle without the GRF

  std::map<std::string, int> port_alloc_;
  std::set<std::string> shortfall_;
  std::map<std::size_t, std::vector<std::string>> direct_;  // vin -> direct consumers

  std::size_t src(std::size_t e) const { return dfg_.index_of(dfg_.edges()[e].src); }
  std::size_t dst(std::size_t e) const { return dfg_.index_of(dfg_.edges()[e].dst); }
  int distance(std::size_t e) const { return dfg_.edges()[e].distance; }
  bool scheduled(std::size_t i) const { return start_[i] != kUnscheduled; }

  void compute_heights() {
    height_.assign(nodes_.size(), -1);
    std::function<int(std::size_t)> h = [&](std::size_t u) -> int {
      if (height_[u] >= 0) return height_[u];
      int best = 0;
      for (auto e : out_[u]) {
        if (distance(e) == 0) best = std::max(best, h(dst(e)));
      }
      return height_[u] = nodes_[u].latency + best;
    };
    for (std::size_t i = 0; i < nodes_.size(); ++i) h(i);
  }

  void build_tasks() {
    const auto n = nodes_.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
      return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    std::vector<bool> member(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      if (nodes_[i].kind != OpKind::vin) continue;
      member[i] = true;
      for (auto e : out_[i]) {
        auto c = dst(e);
        if (!nodes_[c].occupies_pe() || distance(e) != 0) continue;
        member[c] = true;
        parent[find(c)] = find(i);
      }
    }
    std::map<std::size_t, std::size_t> root_task;
    task_of_.assign(n, -1);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) {
      if ((nodes_[a].kind == OpKind::vin) != (nodes_[b].kind == OpKind::vin)) {
        return nodes_[a].kind == OpKind::vin;
      }
      return nodes_[a].id < nodes_[b].id;
    });
    for (auto i : order) {
      std::size_t t;
      if (member[i]) {
        auto r = find(i);
        auto it = root_task.find(r);
        if (it == root_task.end()) {
          it = root_task.emplace(r, tasks_.size()).first;
          tasks_.push_back({});
          tasks_.back().cluster = true;
        }
        t = it->second;
      } else {
        t = tasks_.size();
        tasks_.push_back({});
      }
      tasks_[t].ops.push_back(i);
      task_of_[i] = static_cast<int>(t);
    }
    for (auto& task : tasks_) refresh_task(task);
    forced_.assign(tasks_.size(), false);
  }

  void refresh_task(Task& task) {
    task.height = 0;
    task.key.clear();
    for (auto i : task.ops) {
      task.height = std::max(task.height, height_[i]);
      if (task.key.empty() || nodes_[i].id < task.key) task.key = nodes_[i].id;
    }
  }

  bool ready(std::size_t t) const {
    for (auto i : tasks_[t].ops) {
      for (auto e : in_[i]) {
        if (distance(e) != 0) continue;
        auto u = src(e);
        if (task_of_[u] == static_cast<int>(t)) continue;
        if (!scheduled(u)) return false;
      }
    }
    return true;
  }

  std::optional<std::size_t> pick_task() {
    std::optional<std::size_t> best;
    auto better = [&](std::size_t a, std::size_t b) {
      if (tasks_[a].height != tasks_[b].height) return tasks_[a].height > tasks_[b].height;
      return tasks_[a].key < tasks_[b].key;
    };
    bool any_left = false;
    for (std::size_t t = 0; t < tasks_.size(); ++t) {
      if (tasks_[t].done || tasks_[t].ops.empty()) continue;
      any_left = true;
      if (!ready(t)) continue;
      if (!best || better(t, *best)) best = t;
    }
    if (best || !any_left) return best;
    // A cluster can wait on an op that itself depends on a member of the
    // cluster; place the best blocked cluster with its blocked consumers
    // deferred.
    for (std::size_t t = 0; t < tasks_.size(); ++t) {
      if (tasks_[t].done || tasks_[t].ops.empty() || !tasks_[t].cluster) continue;
      if (!best || better(t, *best)) best = t;
    }
    if (best) forced_[*best] = true;
    return best;
  }

  // Bounds on start time implied by already scheduled neighbours.
  std::pair<long, long> bounds(std::size_t i) const {
    long lo = floor_[i];
    long hi = std::numeric_limits<long>::max();
    for (auto e : in_[i]) {
      auto u = src(e);
      if (scheduled(u)) lo = std::max<long>(lo, start_[u] + nodes_[u].latency - static_cast<long>(ii_) * distance(e));
    }
    for (auto e : out_[i]) {
      auto v = dst(e);
      if (scheduled(v)) hi = std::min<long>(hi, start_[v] + static_cast<long>(ii_) * distance(e) - nodes_[i].latency);
    }
    return {lo, hi};
  }

  int slot(long t) const { return static_cast<int>(t % ii_); }

  ScheduleFailure failure(std::size_t op, std::string reason) const {
    return {nodes_[op].id, ii_, std::move(reason), pe_used_, iport_used_, oport_used_};
  }

  // Consumers of one producer that share a slot must sit on distinct PEs the
  // producer can reach.
  bool within_reach(std::size_t i, int m) const {
    if (arch_.grf_capacity > 0) return true;
    for (auto e : in_[i]) {
      auto u = src(e);
      if (!scheduled(u) || !nodes_[u].occupies_pe()) continue;
      int same = 0;
      for (auto f : out_[u]) {
        auto v = dst(f);
        if (v != i && scheduled(v) && nodes_[v].occupies_pe() && slot(start_[v]) == m) ++same;
      }
      if (same >= reach_ + (slot(start_[u]) != m ? 1 : 0)) return false;
    }
    return true;
  }

  std::optional<ScheduleFailure> place_single(std::size_t i) {
    auto [lo, hi] = bounds(i);
    const auto& node = nodes_[i];
    for (long t = lo; t < lo + ii_ && t <= hi; ++t) {
      const int m = slot(t);
      bool ok = false;
      switch (node.kind) {
        case OpKind::comp:
        case OpKind::route:
          ok = pe_used_[m] < pe_cap_ && within_reach(i, m);
          if (ok) ++pe_used_[m];
          break;
        case OpKind::vout: ok = oport_used_[m] < arch_.n_oports; if (ok) ++oport_used_[m]; break;
        case OpKind::vin: {
          ok = iport_used_[m] < arch_.n_iports && ibus_used_[m] < arch_.rows * arch_.ibuses_per_row;
          if (ok) {
            ++iport_used_[m];
            ++ibus_used_[m];
            port_alloc_[node.id] = 1;
          }
          break;
        }
      }
      if (ok) {
        start_[i] = static_cast<int>(t);
        return std::nullopt;
      }
    }
    return failure(i, lo > hi ? "empty time window from loop-carried dependences"
                              : "no free resource in any modulo slot of the window");
  }

  std::optional<ScheduleFailure> place_cluster(std::size_t task_index) {
    auto& task = tasks_[task_index];
    std::vector<std::size_t> vins;
    std::vector<std::size_t> placeable;
    std::vector<std::size_t> blocked;
    for (auto i : task.ops) {
      if (nodes_[i].kind == OpKind::vin) {
        vins.push_back(i);
        continue;
      }
      bool ok = true;
      for (auto e : in_[i]) {
        auto u = src(e);
        if (distance(e) != 0) continue;
        if (task_of_[u] == static_cast<int>(task_index)) {
          // A member that reads another member cannot share its cycle.
          if (nodes_[u].occupies_pe() && nodes_[u].latency > 0) ok = false;
        } else if (forced_[task_index] && !scheduled(u)) {
          ok = false;
        }
      }
      (ok ? placeable : blocked).push_back(i);
    }

    long lo = 0;
    long hi = std::numeric_limits<long>::max();
    for (auto i : vins) {
      auto [l, h] = bounds(i);
      lo = std::max(lo, l);
      hi = std::min(hi, h);
    }
    for (auto i : placeable) {
      auto [l, h] = bounds(i);
      lo = std::max(lo, l);
      hi = std::min(hi, h);
    }

    auto is_fed_by = [&](std::size_t c, std::size_t v) {
      for (auto e : in_[c]) {
        if (src(e) == v && distance(e) == 0) return true;
      }
      return false;
    };

    struct Trial {
      long t = 0;
      std::vector<PortAllocation> alloc;
    };
    std::optional<Trial> full, fallback;
    for (long t = lo; t < lo + ii_ && t <= hi; ++t) {
      const int m = slot(t);
      int avail = std::min(arch_.n_iports - iport_used_[m],
                           arch_.rows * arch_.ibuses_per_row - ibus_used_[m]);
      const int free_pes = pe_cap_ - pe_used_[m];
      Trial trial{t, {}};
      bool ports_ok = true;
      bool short_any = false;
      for (auto v : vins) {
        int rd = 0;
        for (auto c : placeable) rd += is_fed_by(c, v) ? 1 : 0;
        auto a = allocate_ports(std::max(rd, 1), arch_.pes_per_ibus(), std::max(avail, 0), policy_);
        avail -= a.q;
        ports_ok = ports_ok && a.q >= 1;
        short_any = short_any || a.shortfall;
        trial.alloc.push_back(a);
      }
      if (!ports_ok) continue;
      const int need = static_cast<int>(placeable.size());
      if (!short_any && free_pes >= need && blocked.empty()) {
        full = trial;
        break;
      }
      if (!fallback && (need == 0 || free_pes >= 1)) fallback = trial;
    }
    auto chosen = full ? full : fallback;
    if (!chosen) {
      return failure(vins.front(), lo > hi ? "empty time window from loop-carried dependences"
                                           : "no input port or PE capacity in any modulo slot");
    }

    const long t = chosen->t;
    const int m = slot(t);
    std::map<std::size_t, int> cap;
    for (std::size_t k = 0; k < vins.size(); ++k) {
      start_[vins[k]] = static_cast<int>(t);
      cap[vins[k]] = chosen->alloc[k].q * arch_.pes_per_ibus();
    }
    std::vector<std::size_t> deferred = blocked;
    for (auto c : placeable) {
      bool ok = pe_used_[m] < pe_cap_;
      for (auto v : vins) {
        if (is_fed_by(c, v) && cap[v] <= 0) ok = false;
      }
      if (!ok) {
        deferred.push_back(c);
        continue;
      }
      for (auto v : vins) {
        if (is_fed_by(c, v)) {
          --cap[v];
          direct_[v].push_back(nodes_[c].id);
        }
      }
      start_[c] = static_cast<int>(t);
      ++pe_used_[m];
    }
    for (std::size_t k = 0; k < vins.size(); ++k) {
      const auto v = vins[k];
      const auto& direct = direct_[v];
      const int q = std::max(1, ceil_div(static_cast<int>(direct.size()), arch_.pes_per_ibus()));
      iport_used_[m] += q;
      ibus_used_[m] += q;
      port_alloc_[nodes_[v].id] = q;
      bool short_v = chosen->alloc[k].shortfall;
      for (auto c : deferred) short_v = short_v || is_fed_by(c, v);
      if (short_v) shortfall_.insert(nodes_[v].id);
    }
    // Deferred consumers are fed later through routing ops, at least one hop
    // after the data arrives.
    task.ops = vins;
    for (auto c : placeable) {
      if (scheduled(c)) task.ops.push_back(c);
    }
    std::sort(deferred.begin(), deferred.end(), [&](auto a, auto b) { return nodes_[a].id < nodes_[b].id; });
    for (auto c : deferred) {
      for (auto v : vins) {
        if (is_fed_by(c, v)) floor_[c] = std::max(floor_[c], static_cast<int>(t) + 1);
      }
      task_of_[c] = static_cast<int>(tasks_.size());
      Task single;
      single.ops.push_back(c);
      refresh_task(single);
      tasks_.push_back(std::move(single));
      forced_.push_back(false);
    }
    return std::nullopt;
  }

  ScheduleOutcome finish() {
    Schedule out;
    out.ii = ii_;
    out.dfg = dfg_;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (!scheduled(i)) return failure(i, "never became ready");
      out.start_time[nodes_[i].id] = start_[i];
    }
    out.port_alloc = port_alloc_;
    out.shortfall = shortfall_;
    out.pe_limit = pe_cap_ < arch_.pe_count() ? pe_cap_ : 0;
    for (const auto& [v, direct] : direct_) {
      const auto& id = nodes_[v].id;
      const int q = port_alloc_.at(id);
      if (q < 2) continue;
      auto split = split_vio(out.dfg, id, q, arch_.pes_per_ibus(), direct);
      out.dfg = std::move(split.dfg);
      for (const auto& g : split.groups) out.start_time[g.vin] = start_[v];
      out.split_groups[id] = std::move(split.groups);
    }
    return out;
  }
};

}  // namespace

ScheduleOutcome schedule(const Dfg& dfg, const ArchConfig& arch, int ii, PortPolicy policy, int pe_limit) {
  if (ii < 1) throw ScheduleError("ii must be ≥ 1");
  arch.validate();
  auto diags = validate_dfg(dfg);
  if (!diags.empty()) throw DfgError(diags.front());
  return ModuloScheduler(dfg, arch, ii, policy, pe_limit).run();
}

}  // namespace bandmap
