#include <doctest.h>

#include <random>

#include "bandmap/schedule.hpp"
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

std::vector<std::size_t> group_sizes(const SplitResult& s) {
  std::vector<std::size_t> out;
  for (const auto& g : s.groups) out.push_back(g.consumers.size());
  return out;
}

}  // namespace

TEST_SUITE("schedule") {

TEST_CASE("port allocation examples") {
  CHECK(allocate_ports(6, 4, 3) == PortAllocation{2, false});
  CHECK(allocate_ports(9, 4, 1) == PortAllocation{1, true});
  CHECK(allocate_ports(4, 4, 4) == PortAllocation{1, false});
  CHECK(allocate_ports(3, 4, 0) == PortAllocation{0, true});
}

TEST_CASE("single-port policy never claims more than one port") {
  CHECK(allocate_ports(9, 4, 4, PortPolicy::single_port) == PortAllocation{1, true});
  CHECK(allocate_ports(4, 4, 4, PortPolicy::single_port) == PortAllocation{1, false});
}

TEST_CASE("port allocation is monotone") {
  for (int rd = 1; rd <= 20; ++rd) {
    for (int pes = 1; pes <= 8; ++pes) {
      for (int avail = 1; avail <= 8; ++avail) {
        const auto a = allocate_ports(rd, pes, avail);
        CHECK(allocate_ports(rd, pes, avail + 1).q >= a.q);
        CHECK(allocate_ports(rd, pes + 1, avail).q <= a.q);
        CHECK(a.q == std::min((rd + pes - 1) / pes, avail));
        CHECK(a.shortfall == (a.q * pes < rd));
      }
    }
  }
}

TEST_CASE("split_vio fills buses greedily") {
  auto six = split_vio(fan_in(6), "I", 2, 4);
  CHECK(group_sizes(six) == std::vector<std::size_t>{4, 2});
  CHECK(six.groups[0].vin == "I");
  CHECK(six.dfg.node(six.groups[1].vin).origin == "I");
  CHECK(reuse_degree(six.dfg, "I") == 4);
  CHECK(reuse_degree(six.dfg, six.groups[1].vin) == 2);
  CHECK(validate_dfg(six.dfg).empty());

  CHECK(group_sizes(split_vio(fan_in(8), "I", 2, 4)) == std::vector<std::size_t>{4, 4});

  auto one = split_vio(fan_in(3), "I", 1, 4);
  CHECK(same_graph(one.dfg, fan_in(3)));

  CHECK_THROWS_AS(split_vio(fan_in(2), "I", 3, 4), ScheduleError);
  CHECK_THROWS_AS(split_vio(fan_in(2), "c0", 1, 4), ScheduleError);
}

TEST_CASE("split_vio keeps every consumer on exactly one copy") {
  for (int rd = 2; rd <= 12; ++rd) {
    for (int q = 1; q <= 3; ++q) {
      if (rd > q * 4 || q > rd) continue;
      auto s = split_vio(fan_in(rd), "I", q, 4);
      std::size_t total = 0;
      for (const auto& g : s.groups) {
        CHECK(g.consumers.size() <= 4);
        total += g.consumers.size();
      }
      CHECK(total == static_cast<std::size_t>(rd));
    }
  }
}

TEST_CASE("C2K4 at ii 1 uses one port per input") {
  ArchConfig a;
  auto out = schedule(gen_cnkm(2, 4), a, 1);
  REQUIRE(std::holds_alternative<Schedule>(out));
  const auto& s = std::get<Schedule>(out);
  for (const auto& [vin, q] : s.port_alloc) CHECK(q == 1);
  CHECK(s.port_alloc.size() == 2);
  CHECK(check_schedule(s, a).empty());
}

TEST_CASE("C3K6 at ii 2 claims two ports per input") {
  ArchConfig a;
  auto out = schedule(gen_cnkm(3, 6), a, 2);
  REQUIRE(std::holds_alternative<Schedule>(out));
  const auto& s = std::get<Schedule>(out);
  int claims = 0;
  for (const auto& [vin, q] : s.port_alloc) {
    CHECK(q == 2);
    claims += q;
  }
  CHECK(claims == 6);
  CHECK(s.shortfall.empty());
  CHECK(check_schedule(s, a).empty());
}

TEST_CASE("single PE array") {
  ArchConfig a;
  a.rows = 1;
  a.cols = 1;
  a.n_iports = 1;
  a.n_oports = 1;
  auto out = schedule(gen_cnkm(1, 1), a, 1);
  REQUIRE(std::holds_alternative<Schedule>(out));
  CHECK(check_schedule(std::get<Schedule>(out), a).empty());
}

TEST_CASE("schedules below the MII fail") {
  ArchConfig a;
  for (const auto& [n, m] : default_suite()) {
    auto d = gen_cnkm(n, m);
    const int bound = mii(d, a);
    const auto name = cnkm_name(n, m);
    CAPTURE(name);
    for (int ii = 1; ii < bound; ++ii) {
      for (auto p : {PortPolicy::bandwidth_allocation, PortPolicy::single_port}) {
        CHECK(std::holds_alternative<ScheduleFailure>(schedule(d, a, ii, p)));
      }
    }
  }
}

TEST_CASE("scheduled random graphs satisfy the modulo constraints") {
  std::mt19937_64 rng(77);
  ArchConfig a;
  int scheduled = 0;
  for (int i = 0; i < 150; ++i) {
    auto d = testing::random_dfg(rng, 12, i % 2 == 0);
    const int lo = mii(d, a);
    for (auto p : {PortPolicy::bandwidth_allocation, PortPolicy::single_port}) {
      auto out = schedule(d, a, lo + 1, p);
      if (auto* s = std::get_if<Schedule>(&out)) {
        ++scheduled;
        CHECK(check_schedule(*s, a).empty());
        for (const auto& n : d.nodes()) CHECK(s->start_time.count(n.id) == 1);
      }
    }
  }
  CHECK(scheduled > 200);
}

TEST_CASE("PE cap bounds ops per slot") {
  ArchConfig a;
  auto out = schedule(gen_cnkm(3, 8), a, 3, PortPolicy::bandwidth_allocation, 15);
  REQUIRE(std::holds_alternative<Schedule>(out));
  const auto& s = std::get<Schedule>(out);
  std::vector<int> use(3, 0);
  for (const auto& n : s.dfg.nodes()) {
    if (n.occupies_pe()) ++use[static_cast<std::size_t>(s.slot(n.id))];
  }
  for (int u : use) CHECK(u <= 15);
  CHECK(s.pe_limit == 15);
}

TEST_CASE("invalid ii") {
  CHECK_THROWS_AS(schedule(gen_cnkm(1, 1), ArchConfig{}, 0), ScheduleError);
}

}
