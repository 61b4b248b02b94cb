#include "bandmap/arch.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace bandmap {

namespace {

void require_at_least(int value, int floor, const char* name) {
  if (value < floor) {
    throw ArchError(std::string(name) + " must be ≥ " + std::to_string(floor));
  }
}

int parse_int(std::string_view key, std::string_view value, int line) {
  int out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ArchError("line " + std::to_string(line) + ": bad integer for '" +
                    std::string(key) + "': '" + std::string(value) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value, int line) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ArchError("line " + std::to_string(line) + ": bad boolean for '" +
                  std::string(key) + "': '" + std::string(value) + "'");
}

}  // namespace

void ArchConfig::validate() const {
  require_at_least(rows, 1, "rows");
  require_at_least(cols, 1, "cols");
  require_at_least(ibuses_per_row, 1, "ibuses_per_row");
  require_at_least(obuses_per_col, 1, "obuses_per_col");
  require_at_least(n_iports, 1, "iports");
  require_at_least(n_oports, 1, "oports");
  require_at_least(lrf_capacity, 1, "lrf");
  require_at_least(grf_capacity, 0, "grf");
}

std::string to_string(PeId pe) {
  return "pe(" + std::to_string(pe.row) + "," + std::to_string(pe.col) + ")";
}

std::string to_string(const BusId& bus) {
  return std::string(bus.kind == BusKind::ibus ? "ibus" : "obus") + "(" +
         std::to_string(bus.line) + "," + std::to_string(bus.slot) + ")";
}

std::string to_string(const PortId& port) {
  return std::string(port.kind == PortKind::iport ? "iport" : "oport") + "(" +
         std::to_string(port.index) + ")";
}

std::string_view to_string(Medium m) {
  switch (m) {
    case Medium::lrf_hold: return "lrf_hold";
    case Medium::mesh_link: return "mesh_link";
    case Medium::obus_drive: return "obus_drive";
    case Medium::obus_read: return "obus_read";
    case Medium::grf_write: return "grf_write";
    case Medium::grf_read: return "grf_read";
    case Medium::ibus_broadcast: return "ibus_broadcast";
    case Medium::oport_drain: return "oport_drain";
  }
  return "?";
}

ArchConfig parse_arch_config(std::string_view text) {
  ArchConfig arch;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::istringstream tokens(raw);
    std::string tok;
    while (tokens >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == tok.size()) {
        throw ArchError("line " + std::to_string(line_no) + ": expected key=value, got '" +
                        tok + "'");
      }
      std::string_view key(tok.data(), eq);
      std::string_view value(tok.data() + eq + 1, tok.size() - eq - 1);
      if (key == "rows") arch.rows = parse_int(key, value, line_no);
      else if (key == "cols") arch.cols = parse_int(key, value, line_no);
      else if (key == "ibuses_per_row") arch.ibuses_per_row = parse_int(key, value, line_no);
      else if (key == "obuses_per_col") arch.obuses_per_col = parse_int(key, value, line_no);
      else if (key == "iports") arch.n_iports = parse_int(key, value, line_no);
      else if (key == "oports") arch.n_oports = parse_int(key, value, line_no);
      else if (key == "lrf") arch.lrf_capacity = parse_int(key, value, line_no);
      else if (key == "grf") arch.grf_capacity = parse_int(key, value, line_no);
      else if (key == "multicast") arch.multicast = parse_bool(key, value, line_no);
      else {
        throw ArchError("line " + std::to_string(line_no) + ": unknown key '" +
                        std::string(key) + "'");
      }
    }
  }
  arch.validate();
  return arch;
}

ArchConfig load_arch_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArchError("cannot open architecture file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_arch_config(buf.str());
}

std::string emit_arch_config(const ArchConfig& arch) {
  std::ostringstream out;
  out << "rows=" << arch.rows << "\ncols=" << arch.cols
      << "\nibuses_per_row=" << arch.ibuses_per_row
      << "\nobuses_per_col=" << arch.obuses_per_col << "\niports=" << arch.n_iports
      << "\noports=" << arch.n_oports << "\nlrf=" << arch.lrf_capacity
      << "\ngrf=" << arch.grf_capacity
      << "\nmulticast=" << (arch.multicast ? "true" : "false") << "\n";
  return out.str();
}

bool in_grid(const ArchConfig& arch, PeId pe) {
  return pe.row >= 0 && pe.row < arch.rows && pe.col >= 0 && pe.col < arch.cols;
}

bool is_neighbor(PeId a, PeId b) {
  int dr = a.row - b.row;
  int dc = a.col - b.col;
  return (dr == 0 && (dc == 1 || dc == -1)) || (dc == 0 && (dr == 1 || dr == -1));
}

std::vector<PeId> bus_attached_pes(const ArchConfig& arch, const BusId& bus) {
  std::vector<PeId> out;
  if (bus.kind == BusKind::ibus) {
    if (bus.line < 0 || bus.line >= arch.rows || bus.slot < 0 || bus.slot >= arch.ibuses_per_row) {
      throw ArchError("bus out of range: " + to_string(bus));
    }
    for (int c = 0; c < arch.cols; ++c) out.push_back({bus.line, c});
  } else {
    if (bus.line < 0 || bus.line >= arch.cols || bus.slot < 0 || bus.slot >= arch.obuses_per_col) {
      throw ArchError("bus out of range: " + to_string(bus));
    }
    for (int r = 0; r < arch.rows; ++r) out.push_back({r, bus.line});
  }
  return out;
}

std::vector<PeId> neighbors(const ArchConfig& arch, PeId pe) {
  std::vector<PeId> out;
  const PeId candidates[] = {{pe.row - 1, pe.col}, {pe.row + 1, pe.col},
                             {pe.row, pe.col - 1}, {pe.row, pe.col + 1}};
  for (const auto& q : candidates) {
    if (in_grid(arch, q)) out.push_back(q);
  }
  return out;
}

Tec build_tec(const ArchConfig& arch, int ii) {
  arch.validate();
  if (ii < 1) throw ArchError("ii must be ≥ 1");

  Tec tec;
  tec.ii = ii;
  std::map<TecNode, std::size_t> index;
  auto add = [&](TecNode n) {
    index.emplace(n, tec.nodes.size());
    tec.nodes.push_back(n);
  };
  using K = TecNode::Kind;

  for (int t = 0; t < ii; ++t) {
    TecLayer layer;
    for (int r = 0; r < arch.rows; ++r) {
      for (int c = 0; c < arch.cols; ++c) {
        layer.pes.push_back({r, c});
        add({K::pe, t, r, c});
      }
    }
    for (int r = 0; r < arch.rows; ++r) {
      for (int s = 0; s < arch.ibuses_per_row; ++s) {
        layer.ibuses.push_back({BusKind::ibus, r, s});
        add({K::ibus, t, r, s});
      }
    }
    for (int c = 0; c < arch.cols; ++c) {
      for (int s = 0; s < arch.obuses_per_col; ++s) {
        layer.obuses.push_back({BusKind::obus, c, s});
        add({K::obus, t, c, s});
      }
    }
    for (int p = 0; p < arch.n_iports; ++p) {
      layer.ports.push_back({PortKind::iport, p});
      add({K::iport, t, p, 0});
    }
    for (int p = 0; p < arch.n_oports; ++p) {
      layer.ports.push_back({PortKind::oport, p});
      add({K::oport, t, p, 0});
    }
    if (arch.grf_capacity > 0) add({K::grf, t, 0, 0});
    tec.layers.push_back(std::move(layer));
  }

  auto edge = [&](TecNode from, TecNode to, Medium m) {
    tec.routing_edges.push_back({index.at(from), index.at(to), m});
  };

  for (int t = 0; t < ii; ++t) {
    const int next = (t + 1) % ii;
    for (int r = 0; r < arch.rows; ++r) {
      for (int c = 0; c < arch.cols; ++c) {
        const TecNode pe{K::pe, t, r, c};
        edge(pe, {K::pe, next, r, c}, Medium::lrf_hold);
        for (const auto& q : neighbors(arch, {r, c})) {
          edge(pe, {K::pe, next, q.row, q.col}, Medium::mesh_link);
        }
        for (int s = 0; s < arch.obuses_per_col; ++s) {
          edge(pe, {K::obus, t, c, s}, Medium::obus_drive);
        }
        if (arch.grf_capacity > 0) {
          edge(pe, {K::grf, next, 0, 0}, Medium::grf_write);
          edge({K::grf, t, 0, 0}, pe, Medium::grf_read);
        }
      }
    }
    for (int c = 0; c < arch.cols; ++c) {
      for (int s = 0; s < arch.obuses_per_col; ++s) {
        const TecNode bus{K::obus, t, c, s};
        for (int r = 0; r < arch.rows; ++r) edge(bus, {K::pe, next, r, c}, Medium::obus_read);
        for (int p = 0; p < arch.n_oports; ++p) edge(bus, {K::oport, t, p, 0}, Medium::oport_drain);
      }
    }
    for (int r = 0; r < arch.rows; ++r) {
      for (int s = 0; s < arch.ibuses_per_row; ++s) {
        const TecNode bus{K::ibus, t, r, s};
        for (int p = 0; p < arch.n_iports; ++p) edge({K::iport, t, p, 0}, bus, Medium::ibus_broadcast);
        for (int c = 0; c < arch.cols; ++c) edge(bus, {K::pe, t, r, c}, Medium::ibus_broadcast);
      }
    }
  }
  return tec;
}

}  // namespace bandmap
