#include <doctest.h>

#include <random>
#include <set>

#include "bandmap/route.hpp"
#include "bandmap/suite.hpp"
#include "bandmap/validate.hpp"
#include "support.hpp"

using namespace bandmap;

namespace {

Dfg fan_in(int rd) {
  Dfg d;
  d.add_node({"I", OpKind::vin, 0, std::nullopt});
  for (int i = 0; i < rd; ++i) {
    const auto c = "c" + std::to_string(i);
    d.add_node({c, OpKind::comp, 1, std::nullopt});
    d.add_edge({"I", c, 0});
  }
  return d;
}

AugmentedSchedule augment(const Dfg& d, const ArchConfig& a, int ii, PortPolicy p) {
  auto s = schedule(d, a, ii, p);
  REQUIRE(std::holds_alternative<Schedule>(s));
  auto r = insert_routing_ops(std::get<Schedule>(s), a, p);
  REQUIRE(std::holds_alternative<AugmentedSchedule>(r));
  return std::get<AugmentedSchedule>(std::move(r));
}

// Original vins that reach `id` through vin and route nodes only.
std::set<std::string> broadcast_roots(const Dfg& d, const std::string& id) {
  std::set<std::string> roots, seen;
  std::vector<std::string> stack{id};
  while (!stack.empty()) {
    const auto at = stack.back();
    stack.pop_back();
    for (const auto& p : d.producers(at)) {
      const auto& n = d.node(p);
      if (n.kind == OpKind::vin) roots.insert(n.origin.value_or(n.id));
      if (n.kind == OpKind::route && seen.insert(p).second) stack.push_back(p);
    }
  }
  return roots;
}

}  // namespace

TEST_SUITE("route") {

TEST_CASE("fanout cap on the default array") { CHECK(route_fanout_cap(ArchConfig{}) == 7); }

TEST_CASE("route plan for a nine-way input on one port") {
  const auto plan = plan_routes(9, 1, ArchConfig{});
  CHECK(plan.routes == 1);
  // The route takes a bus reader, so it serves the residual plus the consumer it displaced.
  CHECK(plan.direct == 3);
  CHECK(plan.served == 6);
  CHECK(plan_routes(4, 1, ArchConfig{}).routes == 0);
  CHECK(plan_routes(8, 2, ArchConfig{}).routes == 0);
}

TEST_CASE("nine consumers on one port need one route") {
  ArchConfig a;
  auto aug = augment(fan_in(9), a, 2, PortPolicy::single_port);
  CHECK(count_routing_ops(aug.dfg()) == 1);
  CHECK(aug.schedule.port_alloc.at("I") == 1);
  CHECK(check_schedule(aug.schedule, a).empty());
}

TEST_CASE("C2K4 needs no routes") {
  ArchConfig a;
  for (auto p : {PortPolicy::bandwidth_allocation, PortPolicy::single_port}) {
    auto aug = augment(gen_cnkm(2, 4), a, 1, p);
    CHECK(aug.route_count == 0);
    CHECK(count_routing_ops(aug.dfg()) == 0);
  }
}

TEST_CASE("single consumer input is left alone") {
  auto d = parse_dfg("node I vin\nnode a comp\nnode O vout\nedge I a 0\nedge a O 0\n");
  auto aug = augment(d, ArchConfig{}, 1, PortPolicy::bandwidth_allocation);
  CHECK(aug.route_count == 0);
  CHECK(same_graph(aug.dfg(), d));
}

TEST_CASE("counting route ops") {
  CHECK(count_routing_ops(gen_cnkm(3, 6)) == 0);
  auto d = gen_cnkm(1, 2);
  const auto id = insert_route_on_edge(d, "I0", "mul_0_0");
  CHECK(count_routing_ops(d) == 1);
  CHECK(d.node(id).kind == OpKind::route);
  CHECK(d.producers("mul_0_0") == std::vector<std::string>{id});
  CHECK(validate_dfg(d).empty());
}

TEST_CASE("normalization isolates bus transfers") {
  auto d = parse_dfg(
      "node I vin\nnode J vin\nnode a comp\nnode O vout\nnode P vout\n"
      "edge I a 0\nedge J a 0\nedge I O 0\nedge a P 0\n");
  CHECK(isolate_bus_transfers(d) == 2);
  CHECK(validate_dfg(d).empty());
  for (const auto& n : d.nodes()) {
    if (!n.occupies_pe()) continue;
    int vins = 0;
    for (const auto& p : d.producers(n.id)) vins += d.node(p).kind == OpKind::vin ? 1 : 0;
    CHECK(vins <= 1);
  }
  for (const auto& p : d.producers("O")) CHECK(d.node(p).kind == OpKind::route);
  CHECK(isolate_bus_transfers(d) == 0);
}

TEST_CASE("suite kernels: idempotence and broadcast trees") {
  ArchConfig a;
  for (const auto& [n, m] : default_suite()) {
    auto d = gen_cnkm(n, m);
    const int lo = mii(d, a);
    for (auto p : {PortPolicy::bandwidth_allocation, PortPolicy::single_port}) {
      for (int ii = lo; ii <= lo + 1; ++ii) {
        auto s = schedule(d, a, ii, p);
        if (!std::holds_alternative<Schedule>(s)) continue;
        auto r = insert_routing_ops(std::get<Schedule>(s), a, p);
        if (!std::holds_alternative<AugmentedSchedule>(r)) continue;
        const auto& aug = std::get<AugmentedSchedule>(r);
        CHECK(check_schedule(aug.schedule, a).empty());

        auto again = insert_routing_ops(aug.schedule, a, p);
        REQUIRE(std::holds_alternative<AugmentedSchedule>(again));
        CHECK(std::get<AugmentedSchedule>(again).route_count == 0);

        for (const auto& e : d.edges()) {
          if (d.node(e.src).kind != OpKind::vin) continue;
          CHECK(broadcast_roots(aug.dfg(), e.dst).count(e.src) == 1);
        }
      }
    }
  }
}

TEST_CASE("random graphs: broadcast trees and idempotence") {
  std::mt19937_64 rng(5);
  ArchConfig a;
  int checked = 0;
  for (int i = 0; i < 120; ++i) {
    auto d = testing::random_dfg(rng, 12, i % 3 == 0);
    auto s = schedule(d, a, mii(d, a) + 1);
    if (!std::holds_alternative<Schedule>(s)) continue;
    auto r = insert_routing_ops(std::get<Schedule>(s), a);
    if (!std::holds_alternative<AugmentedSchedule>(r)) continue;
    const auto& aug = std::get<AugmentedSchedule>(r);
    ++checked;
    CHECK(std::get<AugmentedSchedule>(insert_routing_ops(aug.schedule, a)).route_count == 0);
    for (const auto& e : d.edges()) {
      if (d.node(e.src).kind != OpKind::vin || !d.node(e.dst).occupies_pe()) continue;
      CHECK(broadcast_roots(aug.dfg(), e.dst).count(e.src) == 1);
    }
  }
  CHECK(checked > 80);
}

}
