// arch.hpp - parameterized CGRA architecture and its time-extended form.
//
// The PE array is rows x cols. Input buses run along rows (every ibus of row r
// reaches all PEs of row r), output buses run along columns. Ports connect to
// buses through a full crossbar.

#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bandmap/error.hpp"

namespace bandmap {

struct ArchConfig {
  int rows = 4;
  int cols = 4;
  int ibuses_per_row = 1;
  int obuses_per_col = 1;
  int n_iports = 4;
  int n_oports = 4;
  int lrf_capacity = 8;
  int grf_capacity = 0;  // 0 = no GRF
  bool multicast = true;

  int pe_count() const { return rows * cols; }
  int pes_per_ibus() const { return cols; }
  int pes_per_obus() const { return rows; }

  /// Throws ArchError when a field is out of range.
  void validate() const;

  bool operator==(const ArchConfig&) const = default;
};

struct PeId {
  int row = 0;
  int col = 0;
  auto operator<=>(const PeId&) const = default;
};

enum class BusKind : std::uint8_t { ibus, obus };

struct BusId {
  BusKind kind = BusKind::ibus;
  int line = 0;  // row for ibus, column for obus
  int slot = 0;  // bus index within the line
  auto operator<=>(const BusId&) const = default;
};

enum class PortKind : std::uint8_t { iport, oport };

struct PortId {
  PortKind kind = PortKind::iport;
  int index = 0;
  auto operator<=>(const PortId&) const = default;
};

std::string to_string(PeId pe);
std::string to_string(const BusId& bus);
std::string to_string(const PortId& port);

/// Transfer medium carried by a TEC routing edge.
enum class Medium : std::uint8_t {
  lrf_hold,       // PE t -> same PE t+1
  mesh_link,      // PE t -> 4-neighbour t+1
  obus_drive,     // PE t -> obus of its column, t (same cycle)
  obus_read,      // obus t -> PE of that column t+1
  grf_write,      // PE t -> GRF t+1
  grf_read,       // GRF t -> any PE t (same cycle)
  ibus_broadcast, // iport t -> ibus t -> attached PEs t
  oport_drain,    // obus t -> oport t
};

std::string_view to_string(Medium m);

/// A timed resource instance in the TEC.
struct TecNode {
  enum class Kind : std::uint8_t { pe, ibus, obus, iport, oport, grf };
  Kind kind = Kind::pe;
  int layer = 0;
  int a = 0;  // pe row / bus line / port index
  int b = 0;  // pe col / bus slot
  auto operator<=>(const TecNode&) const = default;
};

struct TecEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  Medium medium = Medium::lrf_hold;
};

struct TecLayer {
  std::vector<PeId> pes;
  std::vector<BusId> ibuses;
  std::vector<BusId> obuses;
  std::vector<PortId> ports;  // iports then oports
};

struct Tec {
  int ii = 1;
  std::vector<TecLayer> layers;
  std::vector<TecNode> nodes;
  std::vector<TecEdge> routing_edges;
};

ArchConfig parse_arch_config(std::string_view text);
ArchConfig load_arch_config(const std::string& path);
std::string emit_arch_config(const ArchConfig& arch);

Tec build_tec(const ArchConfig& arch, int ii);

std::vector<PeId> bus_attached_pes(const ArchConfig& arch, const BusId& bus);
std::vector<PeId> neighbors(const ArchConfig& arch, PeId pe);

bool is_neighbor(PeId a, PeId b);
bool in_grid(const ArchConfig& arch, PeId pe);

}  // namespace bandmap
