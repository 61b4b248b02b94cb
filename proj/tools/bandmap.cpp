#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bandmap/bind.hpp"
#include "bandmap/suite.hpp"
#include "bandmap/validate.hpp"

namespace {

constexpr int kMapFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw bandmap::Error("cannot write '" + path + "'");
  out << text;
}

std::pair<int, int> parse_cnkm(const std::string& s) {
  int n = 0, m = 0;
  char comma = 0;
  std::istringstream in(s);
  if (!(in >> n >> comma >> m) || comma != ',' || !in.eof() || n < 1 || m < 1) {
    throw UsageError("--cnkm expects n,m with n, m >= 1, got '" + s + "'");
  }
  return {n, m};
}

bandmap::ArchConfig arch_from(const std::string& path) {
  return path.empty() ? bandmap::ArchConfig{} : bandmap::load_arch_config(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bandwidth-aware CGRA mapper"};
  app.require_subcommand(1);

  std::string dfg_path, cnkm, arch_path, mode_name = "bandmap", out_path, dot_path;
  std::uint64_t seed = 1;
  int max_ii = 0;
  auto* map = app.add_subcommand("map", "map one kernel");
  auto* dfg_opt = map->add_option("--dfg", dfg_path, "DFG file");
  auto* cnkm_opt = map->add_option("--cnkm", cnkm, "generate a C_nK_m kernel, e.g. 2,4");
  dfg_opt->excludes(cnkm_opt);
  map->add_option("--arch", arch_path, "architecture file (default 4x4, LRF 8)");
  map->add_option("--mode", mode_name, "bandmap or baseline")->check(CLI::IsMember({"bandmap", "baseline"}));
  map->add_option("--seed", seed, "tabu seed");
  map->add_option("--max-ii", max_ii, "largest ii to try (default mii + 8)");
  map->add_option("--out", out_path, "write the JSON report here");
  map->add_option("--dot", dot_path, "write a per-slot Graphviz diagram here");

  std::string suite = "default", bench_arch, bench_out;
  std::uint64_t bench_seed = 1;
  auto* bench = app.add_subcommand("bench", "run the kernel suite in both modes");
  bench->add_option("--suite", suite, "suite name")->check(CLI::IsMember({"default"}));
  bench->add_option("--arch", bench_arch, "architecture file");
  bench->add_option("--seed", bench_seed, "tabu seed");
  bench->add_option("--out", bench_out, "write the table here (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (*map) {
      if (dfg_path.empty() && cnkm.empty()) throw UsageError("one of --dfg or --cnkm is required");
      const auto arch = arch_from(arch_path);
      bandmap::Dfg dfg;
      bandmap::MapOptions opts;
      if (!cnkm.empty()) {
        const auto [n, m] = parse_cnkm(cnkm);
        dfg = bandmap::gen_cnkm(n, m);
        opts.kernel = bandmap::cnkm_name(n, m);
      } else {
        dfg = bandmap::load_dfg(dfg_path);
        opts.kernel = dfg_path;
      }
      opts.mode = *bandmap::parse_mode(mode_name);
      opts.seed = seed;
      opts.max_ii = max_ii;
      auto report = bandmap::map_application(dfg, arch, opts);
      if (report.mapping) {
        for (const auto& v : bandmap::check_mapping(*report.mapping, arch)) {
          report.violations.push_back(std::string(bandmap::to_string(v.kind)) + ": " + v.detail);
        }
      }
      const auto json = bandmap::emit_report(report, bandmap::ReportFormat::json);
      if (out_path.empty()) std::cout << json;
      else write_file(out_path, json);
      if (!dot_path.empty()) write_file(dot_path, bandmap::emit_report(report, bandmap::ReportFormat::dot));
      std::cerr << bandmap::emit_report(report, bandmap::ReportFormat::text);
      return report.ok() && report.violations.empty() ? 0 : kMapFailed;
    }
    const auto arch = arch_from(bench_arch);
    const auto table = bandmap::run_suite(bandmap::default_suite(), arch, bench_seed);
    const auto json = bandmap::emit_suite_json(table, arch, bench_seed);
    if (bench_out.empty()) std::cout << json;
    else write_file(bench_out, json);
    for (const auto& r : table.rows) {
      if (r.ii_bandmap == 0 || r.ii_baseline == 0) return kMapFailed;
    }
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "bandmap: " << e.what() << "\n";
    return kUsage;
  } catch (const bandmap::ArchError& e) {
    std::cerr << "bandmap: " << e.what() << "\n";
    return kUsage;
  } catch (const bandmap::DfgError& e) {
    std::cerr << "bandmap: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "bandmap: " << e.what() << "\n";
    return kMapFailed;
  }
}
