#include "bandmap/conflict_graph.hpp"

#include <algorithm>
#include <sstream>

namespace bandmap {

const std::string& op_of(const Vertex& v) {
  return std::visit([](const auto& x) -> const std::string& { return x.op; }, v);
}

std::string label(const Vertex& v) {
  if (const auto* t = std::get_if<TupleVertex>(&v)) {
    return t->op + "@" + to_string(t->port) + "/t" + std::to_string(t->time);
  }
  const auto& q = std::get<QuadVertex>(v);
  std::string s = q.op + "@" + to_string(q.pe);
  if (q.ibus) s += "+" + to_string(*q.ibus);
  if (q.obus) s += "+" + to_string(*q.obus);
  return s + "/t" + std::to_string(q.time);
}

BindingContext::BindingContext(const Schedule& sched, const ArchConfig& arch) : sched_(sched), arch_(arch) {
  const auto& dfg = sched.dfg;
  const auto& nodes = dfg.nodes();
  ops_.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto& f = ops_[i];
    f.id = nodes[i].id;
    f.kind = nodes[i].kind;
    f.start = sched.start(f.id);
    f.ready = f.start + nodes[i].latency;
    f.drive = f.ready;
  }
  std::vector<int> first_vout(nodes.size(), -1);
  for (const auto& e : dfg.edges()) {
    const int s = index(e.src);
    const int d = index(e.dst);
    auto& fs = ops_[static_cast<std::size_t>(s)];
    auto& fd = ops_[static_cast<std::size_t>(d)];
    fs.succ.emplace_back(d, e.distance);
    if (fd.kind == OpKind::vout) {
      const int t = fd.start;
      fs.drive = fs.has_vout ? std::min(fs.drive, t) : t;
      fs.has_vout = true;
    } else if (fd.kind == OpKind::comp || fd.kind == OpKind::route) {
      fs.has_pe_consumer = true;
    }
    if (fs.kind == OpKind::vin && e.distance == 0 && (fd.kind == OpKind::comp || fd.kind == OpKind::route)) {
      if (fd.vin < 0 || nodes[static_cast<std::size_t>(s)].id < id(fd.vin)) fd.vin = s;
    }
  }
}

namespace {

// Flattened vertex: everything the predicates compare, as integers.
struct Key {
  bool tuple = false;
  int op = -1;
  int time = 0;
  int port = -1;   // kind * 4096 + index
  int pe = -1;
  int ibus = -1;
  int obus = -1;
  int obus_slot = -1;
  int pe_row = 0;
  int pe_col = 0;
};

Key make_key(const Vertex& v, const BindingContext& ctx) {
  Key k;
  const auto& arch = ctx.arch();
  if (const auto* t = std::get_if<TupleVertex>(&v)) {
    k.tuple = true;
    k.op = ctx.index(t->op);
    k.time = t->time;
    k.port = static_cast<int>(t->port.kind) * 4096 + t->port.index;
    return k;
  }
  const auto& q = std::get<QuadVertex>(v);
  k.op = ctx.index(q.op);
  k.time = q.time;
  k.pe = q.pe.row * arch.cols + q.pe.col;
  k.pe_row = q.pe.row;
  k.pe_col = q.pe.col;
  if (q.ibus) k.ibus = q.ibus->line * arch.ibuses_per_row + q.ibus->slot;
  if (q.obus) {
    k.obus = q.obus->line * arch.obuses_per_col + q.obus->slot;
    k.obus_slot = ctx.facts(k.op).drive % ctx.ii();
  }
  return k;
}

bool tuple_tuple(const Key& a, const Key& b) {
  if (a.op == b.op) return a.port != b.port || a.time != b.time;
  return a.time == b.time && a.port == b.port;
}

bool tuple_quad(const Key& t, const Key& q, const BindingContext& ctx) {
  const auto& tf = ctx.facts(t.op);
  const auto& qf = ctx.facts(q.op);
  if (tf.kind == OpKind::vin) {
    // The consumer must read the vin's bus in the cycle the port drives it.
    if (qf.vin == t.op) return q.ibus < 0 || qf.start != tf.start;
    return false;
  }
  for (const auto& [succ, dist] : qf.succ) {
    if (succ == t.op) return q.obus < 0 || qf.drive != tf.start;
  }
  // The drained bus of an unrelated vout is fixed by its producer's quad;
  // bus sharing is caught between the two quads.
  return false;
}

bool dependence(const Key& p, const Key& c, int distance, const BindingContext& ctx) {
  const auto& pf = ctx.facts(p.op);
  const auto& cf = ctx.facts(c.op);
  const long consume = cf.start + static_cast<long>(distance) * ctx.ii();
  if (consume < pf.ready) return true;
  if (p.pe == c.pe) return false;
  if (is_neighbor({p.pe_row, p.pe_col}, {c.pe_row, c.pe_col})) return false;
  if (p.obus >= 0 && p.pe_col == c.pe_col && consume >= pf.drive) return false;
  if (ctx.arch().grf_capacity > 0) return false;
  return true;
}

bool quad_quad(const Key& p, const Key& q, const BindingContext& ctx) {
  if (p.op == q.op) return p.pe != q.pe || p.ibus != q.ibus || p.obus != q.obus || p.time != q.time;
  if (p.time == q.time && p.pe == q.pe) return true;
  if (p.obus >= 0 && p.obus == q.obus && p.obus_slot == q.obus_slot) return true;
  if (p.ibus >= 0 && q.ibus >= 0) {
    const int pv = ctx.facts(p.op).vin;
    const int qv = ctx.facts(q.op).vin;
    if (pv != qv && p.ibus == q.ibus && p.time == q.time) return true;
    if (pv == qv && p.ibus != q.ibus) return true;
  }
  for (const auto& [succ, dist] : ctx.facts(p.op).succ) {
    if (succ == q.op && dependence(p, q, dist, ctx)) return true;
  }
  for (const auto& [succ, dist] : ctx.facts(q.op).succ) {
    if (succ == p.op && dependence(q, p, dist, ctx)) return true;
  }
  return false;
}

bool keys_conflict(const Key& a, const Key& b, const BindingContext& ctx) {
  if (a.tuple && b.tuple) return tuple_tuple(a, b);
  if (a.tuple) return tuple_quad(a, b, ctx);
  if (b.tuple) return tuple_quad(b, a, ctx);
  return quad_quad(a, b, ctx);
}

}  // namespace

bool tuple_tuple_conflict(const TupleVertex& a, const TupleVertex& b) {
  if (a.op == b.op) return a.port != b.port || a.time != b.time;
  return a.time == b.time && a.port == b.port;
}

bool tuple_quad_conflict(const TupleVertex& a, const QuadVertex& q, const BindingContext& ctx) {
  return tuple_quad(make_key(a, ctx), make_key(q, ctx), ctx);
}

bool quad_quad_conflict(const QuadVertex& p, const QuadVertex& q, const BindingContext& ctx) {
  return quad_quad(make_key(p, ctx), make_key(q, ctx), ctx);
}

bool vertices_conflict(const Vertex& a, const Vertex& b, const BindingContext& ctx) {
  return keys_conflict(make_key(a, ctx), make_key(b, ctx), ctx);
}

bool dependence_conflict(const QuadVertex& p, const QuadVertex& c, int distance, const BindingContext& ctx) {
  return dependence(make_key(p, ctx), make_key(c, ctx), distance, ctx);
}

std::vector<Vertex> enumerate_candidates(const BindingContext& ctx) {
  const auto& arch = ctx.arch();
  std::vector<int> order(ctx.op_count());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return ctx.id(a) < ctx.id(b); });

  std::vector<Vertex> out;
  for (int op : order) {
    const auto& f = ctx.facts(op);
    const int slot = f.start % ctx.ii();
    switch (f.kind) {
      case OpKind::vin:
        for (int p = 0; p < arch.n_iports; ++p) out.emplace_back(TupleVertex{{PortKind::iport, p}, f.id, slot});
        break;
      case OpKind::vout:
        for (int p = 0; p < arch.n_oports; ++p) out.emplace_back(TupleVertex{{PortKind::oport, p}, f.id, slot});
        break;
      case OpKind::comp:
      case OpKind::route:
        for (int r = 0; r < arch.rows; ++r) {
          for (int c = 0; c < arch.cols; ++c) {
            std::vector<std::optional<BusId>> ibuses;
            if (f.vin >= 0) {
              for (int s = 0; s < arch.ibuses_per_row; ++s) ibuses.push_back(BusId{BusKind::ibus, r, s});
            } else {
              ibuses.push_back(std::nullopt);
            }
            std::vector<std::optional<BusId>> obuses;
            if (!f.has_vout) obuses.push_back(std::nullopt);
            if (f.has_vout || f.has_pe_consumer) {
              for (int s = 0; s < arch.obuses_per_col; ++s) obuses.push_back(BusId{BusKind::obus, c, s});
            }
            for (const auto& ib : ibuses) {
              for (const auto& ob : obuses) out.emplace_back(QuadVertex{{r, c}, f.id, ib, ob, slot});
            }
          }
        }
        break;
    }
  }
  return out;
}

ConflictGraph build_conflict_graph(const BindingContext& ctx) {
  ConflictGraph cg;
  cg.vertices = enumerate_candidates(ctx);
  const auto n = cg.vertices.size();
  std::vector<Key> keys;
  keys.reserve(n);
  for (const auto& v : cg.vertices) {
    keys.push_back(make_key(v, ctx));
    cg.vertex_op.push_back(keys.back().op);
    if (cg.ops.empty() || cg.ops.back() != op_of(v)) cg.ops.push_back(op_of(v));
  }
  cg.graph = Graph(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (keys_conflict(keys[i], keys[j], ctx)) cg.graph.add_edge(i, j);
    }
  }
  return cg;
}

ConflictGraph build_conflict_graph(const AugmentedSchedule& aug, const Tec& tec, const ArchConfig& arch) {
  if (tec.ii != aug.schedule.ii) throw Error("TEC ii does not match the schedule");
  BindingContext ctx(aug.schedule, arch);
  return build_conflict_graph(ctx);
}

std::string emit_conflict_dot(const ConflictGraph& cg) {
  std::ostringstream out;
  out << "graph conflict {\n  node [shape=box, fontsize=9];\n";
  for (std::size_t i = 0; i < cg.size(); ++i) {
    out << "  v" << i << " [label=\"" << label(cg.vertices[i]) << "\"];\n";
  }
  for (const auto& [a, b] : cg.graph.edge_list()) out << "  v" << a << " -- v" << b << ";\n";
  out << "}\n";
  return out.str();
}

}  // namespace bandmap
