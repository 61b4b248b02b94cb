#include "bandmap/dfg.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace bandmap {

std::string_view to_string(OpKind kind) {
  switch (kind) {
    case OpKind::comp: return "comp";
    case OpKind::vin: return "vin";
    case OpKind::vout: return "vout";
    case OpKind::route: return "route";
  }
  return "?";
}

std::optional<OpKind> parse_op_kind(std::string_view s) {
  if (s == "comp") return OpKind::comp;
  if (s == "vin") return OpKind::vin;
  if (s == "vout") return OpKind::vout;
  if (s == "route") return OpKind::route;
  return std::nullopt;
}

void Dfg::add_node(OpNode node) {
  if (index_.count(node.id)) throw DfgError("duplicate node id '" + node.id + "'");
  index_.emplace(node.id, nodes_.size());
  nodes_.push_back(std::move(node));
}

void Dfg::add_edge(DepEdge edge) { edges_.push_back(std::move(edge)); }

void Dfg::remove_edge(std::size_t index) { edges_.erase(edges_.begin() + static_cast<long>(index)); }

bool Dfg::contains(std::string_view id) const { return index_.find(id) != index_.end(); }

std::size_t Dfg::index_of(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw DfgError("unknown node '" + std::string(id) + "'");
  return it->second;
}

std::vector<std::vector<std::size_t>> Dfg::out_edges() const {
  std::vector<std::vector<std::size_t>> out(nodes_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) out[index_of(edges_[e].src)].push_back(e);
  return out;
}

std::vector<std::vector<std::size_t>> Dfg::in_edges() const {
  std::vector<std::vector<std::size_t>> in(nodes_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) in[index_of(edges_[e].dst)].push_back(e);
  return in;
}

std::vector<std::string> Dfg::consumers(std::string_view id) const {
  std::vector<std::string> out;
  for (const auto& e : edges_) {
    if (e.src == id && std::find(out.begin(), out.end(), e.dst) == out.end()) out.push_back(e.dst);
  }
  return out;
}

std::vector<std::string> Dfg::producers(std::string_view id) const {
  std::vector<std::string> out;
  for (const auto& e : edges_) {
    if (e.dst == id && std::find(out.begin(), out.end(), e.src) == out.end()) out.push_back(e.src);
  }
  return out;
}

std::size_t Dfg::count(OpKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [&](const OpNode& n) { return n.kind == kind; }));
}

std::string Dfg::fresh_id(std::string_view stem) const {
  std::string base(stem);
  if (!contains(base)) return base;
  for (int i = 1;; ++i) {
    std::string candidate = base + "_" + std::to_string(i);
    if (!contains(candidate)) return candidate;
  }
}

bool same_graph(const Dfg& a, const Dfg& b) { return emit_dfg(a) == emit_dfg(b); }

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

int to_int(const std::string& s, int line, const char* what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DfgError("line " + std::to_string(line) + ": bad " + what + " '" + s + "'");
  }
  return v;
}

// Kahn's algorithm over distance-0 edges; returns ids left on a cycle.
std::vector<std::string> combinational_cycle_nodes(const Dfg& dfg) {
  const auto& nodes = dfg.nodes();
  std::vector<int> indeg(nodes.size(), 0);
  std::vector<std::vector<std::size_t>> succ(nodes.size());
  for (const auto& e : dfg.edges()) {
    if (e.distance != 0 || !dfg.contains(e.src) || !dfg.contains(e.dst)) continue;
    auto s = dfg.index_of(e.src);
    auto d = dfg.index_of(e.dst);
    succ[s].push_back(d);
    ++indeg[d];
  }
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (indeg[i] == 0) stack.push_back(i);
  }
  std::size_t seen = 0;
  while (!stack.empty()) {
    auto u = stack.back();
    stack.pop_back();
    ++seen;
    for (auto v : succ[u]) {
      if (--indeg[v] == 0) stack.push_back(v);
    }
  }
  std::vector<std::string> left;
  if (seen == nodes.size()) return left;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (indeg[i] > 0) left.push_back(nodes[i].id);
  }
  return left;
}

}  // namespace

Dfg parse_dfg(std::string_view text) {
  Dfg dfg;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  std::vector<std::pair<int, DepEdge>> pending;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    auto toks = tokenize(raw);
    if (toks.empty()) continue;
    const auto where = "line " + std::to_string(line_no) + ": ";
    if (toks[0] == "node") {
      if (toks.size() < 3 || toks.size() > 5) throw DfgError(where + "expected 'node <id> <kind> [latency]'");
      auto kind = parse_op_kind(toks[2]);
      if (!kind) throw DfgError(where + "unknown node kind '" + toks[2] + "'");
      OpNode node{toks[1], *kind, (*kind == OpKind::vin || *kind == OpKind::vout) ? 0 : 1, std::nullopt};
      for (std::size_t i = 3; i < toks.size(); ++i) {
        if (toks[i].rfind("origin=", 0) == 0) {
          node.origin = toks[i].substr(7);
        } else {
          node.latency = to_int(toks[i], line_no, "latency");
        }
      }
      if (dfg.contains(node.id)) throw DfgError(where + "duplicate node id '" + node.id + "'");
      dfg.add_node(std::move(node));
    } else if (toks[0] == "edge") {
      if (toks.size() != 4) throw DfgError(where + "expected 'edge <src> <dst> <distance>'");
      pending.emplace_back(line_no, DepEdge{toks[1], toks[2], to_int(toks[3], line_no, "distance")});
    } else {
      throw DfgError(where + "unknown directive '" + toks[0] + "'");
    }
  }
  for (auto& [line, edge] : pending) {
    for (const auto* id : {&edge.src, &edge.dst}) {
      if (!dfg.contains(*id)) {
        throw DfgError("line " + std::to_string(line) + ": unknown node '" + *id + "'");
      }
    }
    dfg.add_edge(std::move(edge));
  }
  auto diags = validate_dfg(dfg);
  if (!diags.empty()) throw DfgError(diags.front());
  return dfg;
}

Dfg load_dfg(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DfgError("cannot open DFG file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_dfg(buf.str());
}

std::string emit_dfg(const Dfg& dfg) {
  std::vector<const OpNode*> nodes;
  for (const auto& n : dfg.nodes()) nodes.push_back(&n);
  std::sort(nodes.begin(), nodes.end(), [](auto* a, auto* b) { return a->id < b->id; });
  auto edges = dfg.edges();
  std::sort(edges.begin(), edges.end());

  std::ostringstream out;
  for (const auto* n : nodes) {
    out << "node " << n->id << ' ' << to_string(n->kind) << ' ' << n->latency;
    if (n->origin) out << " origin=" << *n->origin;
    out << '\n';
  }
  for (const auto& e : edges) out << "edge " << e.src << ' ' << e.dst << ' ' << e.distance << '\n';
  return out.str();
}

std::vector<std::string> validate_dfg(const Dfg& dfg) {
  std::vector<std::string> diags;
  std::set<std::string> ids;
  for (const auto& n : dfg.nodes()) {
    if (!ids.insert(n.id).second) diags.push_back("duplicate node id '" + n.id + "'");
    if (n.is_virtual() && n.latency != 0) {
      diags.push_back("virtual node '" + n.id + "' must have latency 0");
    }
    if (n.occupies_pe() && n.latency < 1) {
      diags.push_back("node '" + n.id + "' must have latency ≥ 1");
    }
  }

  bool dangling = false;
  for (const auto& e : dfg.edges()) {
    for (const auto* id : {&e.src, &e.dst}) {
      if (!dfg.contains(*id)) {
        diags.push_back("unknown node '" + *id + "' in edge " + e.src + "->" + e.dst);
        dangling = true;
      }
    }
    if (e.distance < 0) diags.push_back("negative distance on edge " + e.src + "->" + e.dst);
    if (e.src == e.dst && e.distance == 0) {
      diags.push_back("combinational cycle: self edge on '" + e.src + "' with distance 0");
    }
  }
  if (dangling) return diags;

  auto in = dfg.in_edges();
  auto out = dfg.out_edges();
  for (std::size_t i = 0; i < dfg.nodes().size(); ++i) {
    const auto& n = dfg.nodes()[i];
    switch (n.kind) {
      case OpKind::vin:
        if (!in[i].empty()) diags.push_back("vin '" + n.id + "' has incoming edges");
        break;
      case OpKind::vout:
        if (!out[i].empty()) diags.push_back("vout '" + n.id + "' has outgoing edges");
        if (in[i].size() != 1) {
          diags.push_back("vout '" + n.id + "' must have exactly one incoming edge, has " +
                          std::to_string(in[i].size()));
        }
        break;
      case OpKind::route:
        if (in[i].size() != 1) {
          diags.push_back("route '" + n.id + "' must have exactly one incoming edge, has " +
                          std::to_string(in[i].size()));
        }
        break;
      case OpKind::comp:
        break;
    }
  }

  auto cyc = combinational_cycle_nodes(dfg);
  // A distance-0 self edge is already reported above.
  if (!cyc.empty()) {
    std::string list;
    for (const auto& id : cyc) list += (list.empty() ? "" : ",") + id;
    diags.push_back("combinational cycle through {" + list + "}");
  }
  return diags;
}

int reuse_degree(const Dfg& dfg, std::string_view op) {
  const auto& n = dfg.node(op);
  if (n.kind != OpKind::vin) {
    throw DfgError("reuse degree is defined for vin nodes only, '" + n.id + "' is " +
                   std::string(to_string(n.kind)));
  }
  return static_cast<int>(dfg.consumers(op).size());
}

std::string cnkm_name(int n, int m) { return "C" + std::to_string(n) + "K" + std::to_string(m); }

Dfg gen_cnkm(int n, int m) {
  if (n < 1 || m < 1) throw DfgError("gen_cnkm requires n ≥ 1 and m ≥ 1");
  Dfg dfg;
  for (int c = 0; c < n; ++c) dfg.add_node({"I" + std::to_string(c), OpKind::vin, 0, std::nullopt});
  for (int k = 0; k < m; ++k) {
    const auto ks = std::to_string(k);
    std::string acc;
    for (int c = 0; c < n; ++c) {
      const auto mul = "mul_" + std::to_string(c) + "_" + ks;
      dfg.add_node({mul, OpKind::comp, 1, std::nullopt});
      dfg.add_edge({"I" + std::to_string(c), mul, 0});
      if (c == 0) {
        acc = mul;
        continue;
      }
      const auto add = "add_" + ks + "_" + std::to_string(c);
      dfg.add_node({add, OpKind::comp, 1, std::nullopt});
      dfg.add_edge({acc, add, 0});
      dfg.add_edge({mul, add, 0});
      acc = add;
    }
    const auto out = "O" + ks;
    dfg.add_node({out, OpKind::vout, 0, std::nullopt});
    dfg.add_edge({acc, out, 0});
  }
  return dfg;
}

}  // namespace bandmap
