#include "bandmap/validate.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace bandmap {

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::pe_double_book: return "pe_double_book";
    case ViolationKind::bus_double_drive: return "bus_double_drive";
    case ViolationKind::port_double_use: return "port_double_use";
    case ViolationKind::dep_unrealized: return "dep_unrealized";
    case ViolationKind::lrf_overflow: return "lrf_overflow";
    case ViolationKind::grf_overflow: return "grf_overflow";
    case ViolationKind::port_bus_mismatch: return "port_bus_mismatch";
    case ViolationKind::unassigned_op: return "unassigned_op";
  }
  return "?";
}

namespace {

long floor_div(long a, long b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

std::string join(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) out += (out.empty() ? "" : ",") + id;
  return out;
}

std::string at_slot(int slot) { return " at slot " + std::to_string(slot); }

}  // namespace

int modulo_occupancy(int first, int last, int ii, int slot) {
  if (last < first) return 0;
  return static_cast<int>(floor_div(last - slot, ii) - floor_div(first - 1 - slot, ii));
}

namespace {

class MappingChecker {
 public:
  MappingChecker(const Mapping& m, const ArchConfig& arch)
      : m_(m), arch_(arch), dfg_(m.dfg()), ii_(m.ii) {}

  std::vector<Violation> run() {
    check_assignment();
    check_occupancy();
    check_port_bus();
    check_dependences();
    check_storage();
    return std::move(out_);
  }

 private:
  const Mapping& m_;
  const ArchConfig& arch_;
  const Dfg& dfg_;
  int ii_;
  std::vector<Violation> out_;
  std::map<std::string, const TupleVertex*> tuples_;
  std::map<std::string, const QuadVertex*> quads_;

  void report(ViolationKind kind, std::string detail) { out_.push_back({kind, std::move(detail)}); }

  int start(const std::string& op) const { return m_.schedule.start(op); }
  int slot(const std::string& op) const { return start(op) % ii_; }
  int ready(const std::string& op) const { return start(op) + dfg_.node(op).latency; }

  // Cycle in which an op's result sits on its output bus: the drain cycle of
  // its first output, otherwise the cycle it becomes ready.
  int bus_cycle(const std::string& op) const {
    std::optional<int> drain;
    for (const auto& e : dfg_.edges()) {
      if (e.src == op && dfg_.node(e.dst).kind == OpKind::vout) {
        drain = drain ? std::min(*drain, start(e.dst)) : start(e.dst);
      }
    }
    return drain.value_or(ready(op));
  }

  void check_assignment() {
    for (const auto& [op, v] : m_.assignment) {
      if (!dfg_.contains(op)) report(ViolationKind::unassigned_op, "assignment for unknown op " + op + at_slot(0));
    }
    for (const auto& n : dfg_.nodes()) {
      auto it = m_.assignment.find(n.id);
      const int s = slot(n.id);
      if (it == m_.assignment.end()) {
        report(ViolationKind::unassigned_op, "op " + n.id + " has no placement" + at_slot(s));
        continue;
      }
      const auto& v = it->second;
      std::string bad;
      if (op_of(v) != n.id) bad = "placement names op " + op_of(v);
      if (n.is_virtual()) {
        const auto* t = std::get_if<TupleVertex>(&v);
        const auto want = n.kind == OpKind::vin ? PortKind::iport : PortKind::oport;
        const int limit = n.kind == OpKind::vin ? arch_.n_iports : arch_.n_oports;
        if (!t) bad = "virtual op placed on a PE";
        else if (t->port.kind != want) bad = "wrong port kind";
        else if (t->port.index < 0 || t->port.index >= limit) bad = "port out of range";
        else if (t->time != s) bad = "placement slot differs from schedule";
        if (bad.empty()) tuples_[n.id] = t;
      } else {
        const auto* q = std::get_if<QuadVertex>(&v);
        if (!q) bad = "PE op placed on a port";
        else if (!in_grid(arch_, q->pe)) bad = "PE out of grid";
        else if (q->time != s) bad = "placement slot differs from schedule";
        else if (q->ibus && (q->ibus->kind != BusKind::ibus || q->ibus->line != q->pe.row ||
                             q->ibus->slot < 0 || q->ibus->slot >= arch_.ibuses_per_row)) {
          bad = "input bus not attached to the PE";
        } else if (q->obus && (q->obus->kind != BusKind::obus || q->obus->line != q->pe.col ||
                               q->obus->slot < 0 || q->obus->slot >= arch_.obuses_per_col)) {
          bad = "output bus not attached to the PE";
        }
        if (bad.empty()) quads_[n.id] = q;
      }
      if (!bad.empty()) report(ViolationKind::unassigned_op, "op " + n.id + ": " + bad + at_slot(s));
    }
  }

  void check_occupancy() {
    std::map<std::pair<int, PeId>, std::vector<std::string>> pe_use;
    std::map<std::pair<int, BusId>, std::set<std::string>> bus_values;
    std::map<std::pair<int, PortId>, std::vector<std::string>> port_use;

    for (const auto& [op, q] : quads_) {
      pe_use[{q->time, q->pe}].push_back(op);
      if (q->obus) bus_values[{bus_cycle(op) % ii_, *q->obus}].insert(op);
      if (q->ibus) {
        for (const auto& p : dfg_.producers(op)) {
          if (dfg_.node(p).kind == OpKind::vin) bus_values[{slot(p), *q->ibus}].insert(p);
        }
      }
    }
    for (const auto& [op, t] : tuples_) port_use[{t->time, t->port}].push_back(op);

    for (const auto& [key, ops] : pe_use) {
      if (ops.size() > 1) {
        report(ViolationKind::pe_double_book,
               to_string(key.second) + " holds {" + join(ops) + "}" + at_slot(key.first));
      }
    }
    for (const auto& [key, values] : bus_values) {
      if (values.size() > 1) {
        report(ViolationKind::bus_double_drive,
               to_string(key.second) + " carries {" + join({values.begin(), values.end()}) + "}" +
                   at_slot(key.first));
      }
    }
    for (const auto& [key, ops] : port_use) {
      if (ops.size() > 1) {
        report(ViolationKind::port_double_use,
               to_string(key.second) + " serves {" + join(ops) + "}" + at_slot(key.first));
      }
    }
  }

  void check_port_bus() {
    for (const auto& [vin, t] : tuples_) {
      if (dfg_.node(vin).kind != OpKind::vin) continue;
      std::set<BusId> buses;
      for (const auto& e : dfg_.edges()) {
        if (e.src != vin || e.distance != 0) continue;
        auto it = quads_.find(e.dst);
        if (it == quads_.end()) continue;
        if (!it->second->ibus) {
          report(ViolationKind::port_bus_mismatch,
                 "consumer " + e.dst + " of " + vin + " reads no input bus" + at_slot(t->time));
        } else {
          buses.insert(*it->second->ibus);
        }
      }
      if (buses.size() > 1) {
        report(ViolationKind::port_bus_mismatch,
               vin + " on " + to_string(t->port) + " is needed on " + std::to_string(buses.size()) +
                   " input buses" + at_slot(t->time));
      }
    }
    for (const auto& [vout, t] : tuples_) {
      if (dfg_.node(vout).kind != OpKind::vout) continue;
      for (const auto& p : dfg_.producers(vout)) {
        auto it = quads_.find(p);
        if (it != quads_.end() && !it->second->obus) {
          report(ViolationKind::port_bus_mismatch,
                 "producer " + p + " of " + vout + " drives no output bus" + at_slot(t->time));
        }
      }
    }
  }

  enum class Path { same_pe, mesh, column_bus, grf, none };

  Path transfer_path(const std::string& u, const std::string& v, int distance) const {
    const auto& pu = *quads_.at(u);
    const auto& pv = *quads_.at(v);
    const long consume = start(v) + static_cast<long>(distance) * ii_;
    if (consume < ready(u)) return Path::none;
    const std::vector<std::pair<Path, bool>> media = {
        {Path::same_pe, pu.pe == pv.pe},
        {Path::mesh, is_neighbor(pu.pe, pv.pe)},
        {Path::column_bus, pu.obus.has_value() && pu.pe.col == pv.pe.col && consume >= bus_cycle(u)},
        {Path::grf, arch_.grf_capacity > 0},
    };
    for (const auto& [path, ok] : media) {
      if (ok) return path;
    }
    return Path::none;
  }

  void check_dependences() {
    for (const auto& e : dfg_.edges()) {
      const auto& su = dfg_.node(e.src);
      const auto& sv = dfg_.node(e.dst);
      const std::string where = e.src + "->" + e.dst;
      const int s = slot(e.dst);
      if (su.kind == OpKind::vin) {
        if (!sv.occupies_pe() || e.distance != 0) {
          report(ViolationKind::dep_unrealized, where + ": input bus data reaches PEs only" + at_slot(s));
        } else if (start(e.dst) != start(e.src)) {
          report(ViolationKind::dep_unrealized,
                 where + ": consumer does not read the bus in the arrival cycle" + at_slot(s));
        }
        continue;
      }
      if (sv.kind == OpKind::vout) {
        if (!su.occupies_pe()) continue;  // reported by the vin branch
        if (start(e.dst) < ready(e.src) || bus_cycle(e.src) != start(e.dst)) {
          report(ViolationKind::dep_unrealized, where + ": drain cycle misses the value" + at_slot(s));
        }
        continue;
      }
      if (!quads_.count(e.src) || !quads_.count(e.dst)) continue;
      if (transfer_path(e.src, e.dst, e.distance) == Path::none) {
        report(ViolationKind::dep_unrealized,
               where + ": no medium from " + to_string(quads_.at(e.src)->pe) + " to " +
                   to_string(quads_.at(e.dst)->pe) + at_slot(s));
      }
    }
  }

  void check_storage() {
    std::map<std::pair<PeId, int>, int> lrf;
    std::vector<int> grf(static_cast<std::size_t>(ii_), 0);
    std::map<std::pair<PeId, int>, std::vector<std::string>> lrf_ops;
    std::map<int, std::vector<std::string>> grf_ops;

    for (const auto& [op, q] : quads_) {
      std::optional<int> last;
      bool needs_grf = false;
      for (const auto& e : dfg_.edges()) {
        if (e.src != op) continue;
        if (dfg_.node(e.dst).kind == OpKind::vout) {
          last = std::max(last.value_or(start(e.dst)), start(e.dst));
          continue;
        }
        const int consume = start(e.dst) + e.distance * ii_;
        last = std::max(last.value_or(consume), consume);
        if (quads_.count(e.dst) && transfer_path(op, e.dst, e.distance) == Path::grf) needs_grf = true;
      }
      if (!last) continue;
      for (int m = 0; m < ii_; ++m) {
        const int held = modulo_occupancy(ready(op), *last, ii_, m);
        if (held == 0) continue;
        if (needs_grf) {
          grf[static_cast<std::size_t>(m)] += held;
          grf_ops[m].push_back(op);
        } else {
          lrf[{q->pe, m}] += held;
          lrf_ops[{q->pe, m}].push_back(op);
        }
      }
    }
    for (const auto& [key, count] : lrf) {
      if (count > arch_.lrf_capacity) {
        report(ViolationKind::lrf_overflow,
               "LRF of " + to_string(key.first) + " holds " + std::to_string(count) + " > " +
                   std::to_string(arch_.lrf_capacity) + " values of {" + join(lrf_ops[key]) + "}" +
                   at_slot(key.second));
      }
    }
    for (int m = 0; m < ii_; ++m) {
      if (grf[static_cast<std::size_t>(m)] > arch_.grf_capacity) {
        report(ViolationKind::grf_overflow,
               "GRF holds " + std::to_string(grf[static_cast<std::size_t>(m)]) + " values of {" +
                   join(grf_ops[m]) + "}" + at_slot(m));
      }
    }
  }
};

}  // namespace

std::vector<Violation> check_mapping(const Mapping& mapping, const ArchConfig& arch) {
  return MappingChecker(mapping, arch).run();
}

std::vector<Violation> check_schedule(const Schedule& sched, const ArchConfig& arch) {
  std::vector<Violation> out;
  const auto& dfg = sched.dfg;
  const int ii = sched.ii;
  for (const auto& n : dfg.nodes()) {
    if (!sched.start_time.count(n.id)) {
      out.push_back({ViolationKind::unassigned_op, "op " + n.id + " has no start time at slot 0"});
    }
  }
  if (!out.empty()) return out;

  for (const auto& e : dfg.edges()) {
    if (e.distance != 0) continue;
    if (sched.start(e.dst) < sched.start(e.src) + dfg.node(e.src).latency) {
      out.push_back({ViolationKind::dep_unrealized,
                     e.src + "->" + e.dst + " starts before its operand is ready at slot " +
                         std::to_string(sched.slot(e.dst))});
    }
  }
  std::vector<int> pes(static_cast<std::size_t>(ii), 0), iports(pes), oports(pes);
  for (const auto& n : dfg.nodes()) {
    const auto m = static_cast<std::size_t>(sched.slot(n.id));
    if (n.occupies_pe()) ++pes[m];
    else if (n.kind == OpKind::vin) ++iports[m];
    else ++oports[m];
  }
  for (int m = 0; m < ii; ++m) {
    const auto k = static_cast<std::size_t>(m);
    if (pes[k] > arch.pe_count()) {
      out.push_back({ViolationKind::pe_double_book, std::to_string(pes[k]) + " PE ops for " +
                                                        std::to_string(arch.pe_count()) + " PEs at slot " +
                                                        std::to_string(m)});
    }
    if (iports[k] > arch.n_iports) {
      out.push_back({ViolationKind::port_double_use, std::to_string(iports[k]) + " vin claims for " +
                                                         std::to_string(arch.n_iports) + " iports at slot " +
                                                         std::to_string(m)});
    }
    if (oports[k] > arch.n_oports) {
      out.push_back({ViolationKind::port_double_use, std::to_string(oports[k]) + " vouts for " +
                                                         std::to_string(arch.n_oports) + " oports at slot " +
                                                         std::to_string(m)});
    }
  }
  for (const auto& [vin, groups] : sched.split_groups) {
    for (const auto& g : groups) {
      if (static_cast<int>(g.consumers.size()) > arch.pes_per_ibus()) {
        out.push_back({ViolationKind::port_bus_mismatch,
                       "split " + g.vin + " of " + vin + " feeds " + std::to_string(g.consumers.size()) +
                           " consumers at slot " + std::to_string(sched.slot(g.vin))});
      }
    }
  }
  return out;
}

}  // namespace bandmap
