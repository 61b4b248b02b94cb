#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "bandmap/route.hpp"
#include "bandmap/validate.hpp"

namespace bandmap {

using nlohmann::ordered_json;

Metrics metrics(const MapReport& report) {
  if (!report.mapping) throw Error("metrics: report has no mapping (" + report.failure + ")");
  const auto& m = *report.mapping;
  Metrics out;
  out.mii = report.mii;
  out.achieved_ii = report.achieved_ii;
  out.ratio = report.achieved_ii > 0 ? static_cast<double>(report.mii) / report.achieved_ii : 0.0;
  out.routing_pes = count_routing_ops(m.dfg());
  const auto slots = static_cast<std::size_t>(m.ii);
  out.iport_use.assign(slots, 0);
  out.oport_use.assign(slots, 0);
  out.ibus_use.assign(slots, 0);
  out.obus_use.assign(slots, 0);
  out.pe_use.assign(slots, 0);
  std::vector<std::set<BusId>> ibus(slots), obus(slots);
  for (const auto& [op, v] : m.assignment) {
    if (const auto* t = std::get_if<TupleVertex>(&v)) {
      auto& use = t->port.kind == PortKind::iport ? out.iport_use : out.oport_use;
      ++use[static_cast<std::size_t>(t->time)];
      continue;
    }
    const auto& q = std::get<QuadVertex>(v);
    ++out.pe_use[static_cast<std::size_t>(q.time)];
    if (q.ibus) ibus[static_cast<std::size_t>(q.time)].insert(*q.ibus);
    if (q.obus) {
      int drive = m.schedule.start(op) + m.dfg().node(op).latency;
      for (const auto& e : m.dfg().edges()) {
        if (e.src == op && m.dfg().node(e.dst).kind == OpKind::vout) drive = m.schedule.start(e.dst);
      }
      obus[static_cast<std::size_t>(drive % m.ii)].insert(*q.obus);
    }
  }
  for (std::size_t s = 0; s < slots; ++s) {
    out.ibus_use[s] = static_cast<int>(ibus[s].size());
    out.obus_use[s] = static_cast<int>(obus[s].size());
  }
  return out;
}

namespace {

ordered_json vertex_json(const Vertex& v, const Schedule& sched) {
  ordered_json j;
  if (const auto* t = std::get_if<TupleVertex>(&v)) {
    j["kind"] = t->port.kind == PortKind::iport ? "iport" : "oport";
    j["port"] = t->port.index;
    j["slot"] = t->time;
    j["start"] = sched.start(t->op);
    return j;
  }
  const auto& q = std::get<QuadVertex>(v);
  j["kind"] = "pe";
  j["pe"] = {q.pe.row, q.pe.col};
  j["ibus"] = q.ibus ? ordered_json(to_string(*q.ibus)) : ordered_json(nullptr);
  j["obus"] = q.obus ? ordered_json(to_string(*q.obus)) : ordered_json(nullptr);
  j["slot"] = q.time;
  j["start"] = sched.start(q.op);
  return j;
}

std::string json_report(const MapReport& r) {
  ordered_json j;
  j["kernel"] = r.kernel;
  j["mode"] = std::string(to_string(r.mode));
  j["mii"] = r.mii;
  j["achieved_ii"] = r.achieved_ii;
  j["ratio"] = r.achieved_ii > 0 ? static_cast<double>(r.mii) / r.achieved_ii : 0.0;
  j["routing_pes"] = r.routing_pes;
  j["attempts"] = ordered_json::array();
  for (const auto& a : r.attempts) {
    j["attempts"].push_back({{"ii", a.ii}, {"mis", a.mis_size}, {"ops", a.ops}, {"outcome", a.outcome}});
  }
  j["assignment"] = ordered_json::object();
  j["violations"] = r.violations;
  if (r.mapping) {
    const auto& m = *r.mapping;
    for (const auto& [op, v] : m.assignment) j["assignment"][op] = vertex_json(v, m.schedule);
    ordered_json ports = ordered_json::object();
    for (const auto& [vin, q] : m.schedule.port_alloc) ports[vin] = q;
    j["port_alloc"] = ports;
  } else {
    j["failure"] = r.failure;
  }
  return j.dump(2) + "\n";
}

std::string text_report(const MapReport& r) {
  std::ostringstream out;
  out << "kernel       " << (r.kernel.empty() ? "-" : r.kernel) << "\n"
      << "mode         " << to_string(r.mode) << "\n"
      << "mii          " << r.mii << "\n";
  if (r.mapping) {
    out << "achieved ii  " << r.achieved_ii << "\n"
        << "ratio        " << std::fixed << std::setprecision(3)
        << static_cast<double>(r.mii) / r.achieved_ii << "\n"
        << "routing PEs  " << r.routing_pes << "\n";
  } else {
    out << "FAILED       " << r.failure << "\n";
  }
  out << "\nattempts\n  " << std::left << std::setw(6) << "ii" << std::setw(8) << "|MIS|" << std::setw(8)
      << "|V_D|" << "outcome\n";
  for (const auto& a : r.attempts) {
    out << "  " << std::setw(6) << a.ii << std::setw(8) << a.mis_size << std::setw(8) << a.ops << a.outcome << "\n";
  }
  if (r.mapping) {
    const auto& m = *r.mapping;
    out << "\nplacement\n";
    for (const auto& [op, v] : m.assignment) {
      out << "  " << std::setw(24) << op << " start " << std::setw(4) << m.schedule.start(op) << label(v) << "\n";
    }
  }
  return out.str();
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string dot_report(const MapReport& r) {
  std::ostringstream out;
  out << "digraph mapping {\n  node [shape=box, fontsize=10];\n";
  if (!r.mapping) {
    out << "  failed [label=\"" << dot_escape(r.failure) << "\"];\n}\n";
    return out.str();
  }
  const auto& m = *r.mapping;
  int rows = 1, cols = 1;
  for (const auto& [op, v] : m.assignment) {
    if (const auto* q = std::get_if<QuadVertex>(&v)) {
      rows = std::max(rows, q->pe.row + 1);
      cols = std::max(cols, q->pe.col + 1);
    }
  }
  for (int s = 0; s < m.ii; ++s) {
    out << "  subgraph cluster_slot" << s << " {\n    label=\"slot " << s << "\";\n";
    for (int rr = 0; rr < rows; ++rr) {
      for (int cc = 0; cc < cols; ++cc) {
        std::string text = "(" + std::to_string(rr) + "," + std::to_string(cc) + ")";
        for (const auto& [op, v] : m.assignment) {
          const auto* q = std::get_if<QuadVertex>(&v);
          if (!q || q->time != s || q->pe.row != rr || q->pe.col != cc) continue;
          text += "\\n" + dot_escape(op);
          if (q->ibus) text += "\\n<" + to_string(*q->ibus);
          if (q->obus) text += "\\n>" + to_string(*q->obus);
        }
        out << "    s" << s << "_pe" << rr << "_" << cc << " [label=\"" << text << "\"];\n";
      }
    }
    for (const auto& [op, v] : m.assignment) {
      const auto* t = std::get_if<TupleVertex>(&v);
      if (!t || t->time != s) continue;
      out << "    s" << s << "_" << (t->port.kind == PortKind::iport ? "ip" : "op") << t->port.index
          << " [shape=ellipse, label=\"" << to_string(t->port) << "\\n" << dot_escape(op) << "\"];\n";
    }
    out << "  }\n";
  }
  // Data edges between placed PE ops.
  for (const auto& e : m.dfg().edges()) {
    auto from = m.assignment.find(e.src);
    auto to = m.assignment.find(e.dst);
    if (from == m.assignment.end() || to == m.assignment.end()) continue;
    auto name = [&](const Vertex& v) {
      if (const auto* q = std::get_if<QuadVertex>(&v)) {
        return "s" + std::to_string(q->time) + "_pe" + std::to_string(q->pe.row) + "_" + std::to_string(q->pe.col);
      }
      const auto& t = std::get<TupleVertex>(v);
      return "s" + std::to_string(t.time) + "_" + (t.port.kind == PortKind::iport ? "ip" : "op") +
             std::to_string(t.port.index);
    };
    out << "  " << name(from->second) << " -> " << name(to->second) << " [label=\"" << dot_escape(e.src) << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace

std::string emit_report(const MapReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::json: return json_report(report);
    case ReportFormat::text: return text_report(report);
    case ReportFormat::dot: return dot_report(report);
  }
  return {};
}

std::string emit_report(const MapReport& report, std::string_view format) {
  if (format == "json") return emit_report(report, ReportFormat::json);
  if (format == "text") return emit_report(report, ReportFormat::text);
  if (format == "dot") return emit_report(report, ReportFormat::dot);
  throw Error("unknown report format '" + std::string(format) + "'");
}

ReportSummary parse_report_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text);
  ReportSummary s;
  s.mode = j.at("mode").get<std::string>();
  s.mii = j.at("mii").get<int>();
  s.achieved_ii = j.at("achieved_ii").get<int>();
  s.ratio = j.at("ratio").get<double>();
  s.routing_pes = j.at("routing_pes").get<int>();
  for (const auto& a : j.at("attempts")) {
    s.attempts.push_back({a.at("ii").get<int>(), a.at("mis").get<int>(), a.at("ops").get<int>(),
                          a.at("outcome").get<std::string>()});
  }
  s.assignments = j.at("assignment").size();
  s.violations = j.at("violations").size();
  return s;
}

}  // namespace bandmap
