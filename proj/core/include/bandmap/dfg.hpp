// dfg.hpp - loop-kernel dataflow graph.
//
// Node kinds: comp (computing op), vin / vout (virtual input / output ops that
// stand for streamed data bound to ports) and route (a PE spent copying one
// value). Edges carry an iteration distance; distance > 0 is loop-carried.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bandmap/error.hpp"

namespace bandmap {

enum class OpKind : std::uint8_t { comp, vin, vout, route };

std::string_view to_string(OpKind kind);
std::optional<OpKind> parse_op_kind(std::string_view s);

struct OpNode {
  std::string id;
  OpKind kind = OpKind::comp;
  int latency = 1;
  std::optional<std::string> origin;  // original vin when created by splitting

  bool is_virtual() const { return kind == OpKind::vin || kind == OpKind::vout; }
  bool occupies_pe() const { return kind == OpKind::comp || kind == OpKind::route; }
  bool operator==(const OpNode&) const = default;
};

struct DepEdge {
  std::string src;
  std::string dst;
  int distance = 0;
  auto operator<=>(const DepEdge&) const = default;
};

class Dfg {
 public:
  /// Throws DfgError on a duplicate id.
  void add_node(OpNode node);
  /// Edges are not checked here; validate_dfg reports dangling ones.
  void add_edge(DepEdge edge);
  void remove_edge(std::size_t index);

  const std::vector<OpNode>& nodes() const { return nodes_; }
  const std::vector<DepEdge>& edges() const { return edges_; }
  std::vector<DepEdge>& mutable_edges() { return edges_; }

  bool contains(std::string_view id) const;
  std::size_t index_of(std::string_view id) const;
  const OpNode& node(std::string_view id) const { return nodes_[index_of(id)]; }

  /// Edge indices leaving / entering each node, indexed like nodes().
  std::vector<std::vector<std::size_t>> out_edges() const;
  std::vector<std::vector<std::size_t>> in_edges() const;

  /// Distinct destination ids of edges leaving `id`, in edge order.
  std::vector<std::string> consumers(std::string_view id) const;
  std::vector<std::string> producers(std::string_view id) const;

  std::size_t count(OpKind kind) const;

  /// A fresh id that starts with `stem` and is not used yet.
  std::string fresh_id(std::string_view stem) const;

 private:
  std::vector<OpNode> nodes_;
  std::vector<DepEdge> edges_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Structural equality independent of insertion order.
bool same_graph(const Dfg& a, const Dfg& b);

Dfg parse_dfg(std::string_view text);
Dfg load_dfg(const std::string& path);
std::string emit_dfg(const Dfg& dfg);

std::vector<std::string> validate_dfg(const Dfg& dfg);

/// Number of distinct consumers of a vin node.
int reuse_degree(const Dfg& dfg, std::string_view op);

/// Convolution kernel with n input channels and m output channels. Each input
/// channel feeds one multiply per kernel; each kernel reduces its n products
/// with a sequential add chain into one vout.
Dfg gen_cnkm(int n, int m);
std::string cnkm_name(int n, int m);

}  // namespace bandmap
