#include "bandmap/suite.hpp"

#include <json.hpp>

#include "bandmap/bind.hpp"

namespace bandmap {

const std::vector<std::pair<int, int>>& default_suite() {
  static const std::vector<std::pair<int, int>> kernels = {
      {1, 2}, {2, 4}, {2, 6}, {3, 6}, {3, 8}, {4, 4}, {5, 5}};
  return kernels;
}

SuiteTable run_suite(const std::vector<std::pair<int, int>>& kernels, const ArchConfig& arch, std::uint64_t seed) {
  SuiteTable table;
  double total = 0.0;
  int counted = 0;
  for (const auto& [n, m] : kernels) {
    const auto dfg = gen_cnkm(n, m);
    SuiteRow row;
    row.kernel = cnkm_name(n, m);
    MapOptions opts;
    opts.seed = seed;
    opts.kernel = row.kernel;
    opts.mode = Mode::bandmap;
    const auto ours = map_application(dfg, arch, opts);
    opts.mode = Mode::baseline;
    const auto base = map_application(dfg, arch, opts);
    row.mii = ours.mii;
    row.ii_bandmap = ours.achieved_ii;
    row.ii_baseline = base.achieved_ii;
    row.routing_bandmap = ours.routing_pes;
    row.routing_baseline = base.routing_pes;
    if (ours.ok() && base.ok() && base.routing_pes > 0) {
      row.reduction = 100.0 * (base.routing_pes - ours.routing_pes) / base.routing_pes;
      total += row.reduction;
      ++counted;
    }
    row.mii_missed = !ours.ok() || ours.achieved_ii != ours.mii;
    table.rows.push_back(row);
  }
  table.mean_reduction = counted ? total / counted : 0.0;
  return table;
}

std::string emit_suite_json(const SuiteTable& table, const ArchConfig& arch, std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["arch"] = emit_arch_config(arch);
  j["seed"] = seed;
  j["kernels"] = nlohmann::ordered_json::array();
  for (const auto& r : table.rows) {
    j["kernels"].push_back({{"kernel", r.kernel},
                            {"mii", r.mii},
                            {"ii_bandmap", r.ii_bandmap},
                            {"ii_baseline", r.ii_baseline},
                            {"routing_pes_bandmap", r.routing_bandmap},
                            {"routing_pes_baseline", r.routing_baseline},
                            {"reduction_pct", r.reduction},
                            {"mii_deviation", r.mii_missed}});
  }
  j["mean_reduction_pct"] = table.mean_reduction;
  return j.dump(2) + "\n";
}

}  // namespace bandmap
