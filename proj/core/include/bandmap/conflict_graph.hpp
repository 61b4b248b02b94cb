// conflict_graph.hpp - candidate resource occupations and their conflicts.
//
// Binding a scheduled DFG to the time-extended CGRA is phrased as a maximum
// independent set problem. Every way an op can occupy hardware in its modulo
// slot becomes a vertex: a tuple (port, vin/vout, slot) or a quadruple
// (PE, comp/route op, ibus-or-none, obus-or-none, slot). Two vertices are
// adjacent when they cannot both be part of one mapping. An independent set
// that holds one vertex per op is a mapping.

#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bandmap/arch.hpp"
#include "bandmap/graph.hpp"
#include "bandmap/route.hpp"

namespace bandmap {

struct TupleVertex {
  PortId port;
  std::string op;
  int time = 0;  // modulo slot
  bool operator==(const TupleVertex&) const = default;
};

struct QuadVertex {
  PeId pe;
  std::string op;
  std::optional<BusId> ibus;
  std::optional<BusId> obus;
  int time = 0;  // modulo slot of the op itself
  bool operator==(const QuadVertex&) const = default;
};

using Vertex = std::variant<TupleVertex, QuadVertex>;

const std::string& op_of(const Vertex& v);
std::string label(const Vertex& v);

/// Schedule-derived facts the conflict predicates need, indexed by op.
class BindingContext {
 public:
  BindingContext(const Schedule& sched, const ArchConfig& arch);

  const Schedule& schedule() const { return sched_; }
  const Dfg& dfg() const { return sched_.dfg; }
  const ArchConfig& arch() const { return arch_; }
  int ii() const { return sched_.ii; }

  std::size_t op_count() const { return ops_.size(); }
  int index(const std::string& op) const { return static_cast<int>(sched_.dfg.index_of(op)); }
  const std::string& id(int op) const { return ops_[static_cast<std::size_t>(op)].id; }

  struct OpFacts {
    std::string id;
    OpKind kind = OpKind::comp;
    int start = 0;
    int ready = 0;   // start + latency
    int drive = 0;   // cycle the op's result is on its output bus
    int vin = -1;    // vin read over an input bus, if any
    bool has_vout = false;
    bool has_pe_consumer = false;
    std::vector<std::pair<int, int>> succ;  // (op, distance) for every edge
  };
  const OpFacts& facts(int op) const { return ops_[static_cast<std::size_t>(op)]; }

 private:
  const Schedule& sched_;
  ArchConfig arch_;
  std::vector<OpFacts> ops_;
};

std::vector<Vertex> enumerate_candidates(const BindingContext& ctx);

bool tuple_tuple_conflict(const TupleVertex& a, const TupleVertex& b);
bool tuple_quad_conflict(const TupleVertex& a, const QuadVertex& q, const BindingContext& ctx);
bool quad_quad_conflict(const QuadVertex& p, const QuadVertex& q, const BindingContext& ctx);
bool vertices_conflict(const Vertex& a, const Vertex& b, const BindingContext& ctx);

/// True when producer placement `p` cannot deliver its value to consumer
/// placement `c` over any medium for an edge with the given distance.
bool dependence_conflict(const QuadVertex& p, const QuadVertex& c, int distance, const BindingContext& ctx);

struct ConflictGraph {
  std::vector<Vertex> vertices;
  std::vector<int> vertex_op;     // op index per vertex
  std::vector<std::string> ops;   // ops of the DFG, in vertex order
  Graph graph;

  std::size_t size() const { return vertices.size(); }
};

ConflictGraph build_conflict_graph(const BindingContext& ctx);
ConflictGraph build_conflict_graph(const AugmentedSchedule& aug, const Tec& tec, const ArchConfig& arch);

std::string emit_conflict_dot(const ConflictGraph& cg);

}  // namespace bandmap
