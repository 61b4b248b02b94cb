// validate.hpp - independent mapping checker, metrics and reports.
//
// check_mapping re-derives every resource occupation and data transfer from
// the assignment itself; it does not reuse the conflict-graph predicates.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bandmap/arch.hpp"
#include "bandmap/mapping.hpp"

namespace bandmap {

enum class ViolationKind {
  pe_double_book,
  bus_double_drive,
  port_double_use,
  dep_unrealized,
  lrf_overflow,
  grf_overflow,
  port_bus_mismatch,
  unassigned_op,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string detail;
};

std::vector<Violation> check_mapping(const Mapping& mapping, const ArchConfig& arch);
std::vector<Violation> check_schedule(const Schedule& sched, const ArchConfig& arch);

/// Registers one value holds at modulo slot `slot` when it is live over the
/// absolute cycles [first, last].
int modulo_occupancy(int first, int last, int ii, int slot);

struct Metrics {
  int mii = 0;
  int achieved_ii = 0;
  double ratio = 0.0;
  int routing_pes = 0;
  std::vector<int> iport_use;  // per modulo slot
  std::vector<int> oport_use;
  std::vector<int> ibus_use;
  std::vector<int> obus_use;
  std::vector<int> pe_use;
};

/// Throws Error when the report carries no mapping.
Metrics metrics(const MapReport& report);

enum class ReportFormat { json, text, dot };

std::string emit_report(const MapReport& report, ReportFormat format);
std::string emit_report(const MapReport& report, std::string_view format);

/// Numeric view of a JSON report, enough to compare runs.
struct ReportSummary {
  std::string mode;
  int mii = 0;
  int achieved_ii = 0;
  double ratio = 0.0;
  int routing_pes = 0;
  std::vector<Attempt> attempts;
  std::size_t assignments = 0;
  std::size_t violations = 0;
};

ReportSummary parse_report_json(std::string_view json);

}  // namespace bandmap
