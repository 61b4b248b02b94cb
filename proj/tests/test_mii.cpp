#include <doctest.h>

#include <random>

#include "bandmap/schedule.hpp"
#include "support.hpp"

using namespace bandmap;

TEST_SUITE("mii") {

TEST_CASE("resource bound") {
  ArchConfig a;
  CHECK(res_mii(gen_cnkm(2, 4), a) == 1);
  CHECK(res_mii(gen_cnkm(3, 6), a) == 2);
  // ceil(45/16) = 3 PEs; ceil(10/4) = 3 port claims.
  CHECK(res_mii(gen_cnkm(5, 5), a) == 3);
  auto only_out = parse_dfg("node O vout\nnode a comp\nedge a O 0\n");
  CHECK(res_mii(only_out, a) == 1);
  Dfg empty;
  CHECK(res_mii(empty, a) == 1);
}

TEST_CASE("recurrence bound examples") {
  CHECK(rec_mii(gen_cnkm(2, 4)) == 1);
  CHECK(rec_mii(parse_dfg("node a comp 1\nnode b comp 1\nedge a b 0\nedge b a 1\n")) == 2);
  CHECK(rec_mii(parse_dfg("node a comp 1\nedge a a 2\n")) == 1);
}

TEST_CASE("recurrence fixtures") {
  for (const auto& f : testing::recurrence_fixtures()) {
    CAPTURE(f.name);
    auto d = parse_dfg(f.text);
    CHECK(rec_mii(d) == f.rec);
    CHECK(testing::cycle_ratio_rec_mii(d) == f.rec);
    ArchConfig huge;
    huge.rows = 16;
    huge.cols = 16;
    CHECK(mii(d, huge) == f.rec);
  }
}

TEST_CASE("zero-distance cycle is rejected") {
  Dfg d;
  d.add_node({"a", OpKind::comp, 1, std::nullopt});
  d.add_node({"b", OpKind::comp, 1, std::nullopt});
  d.add_edge({"a", "b", 0});
  d.add_edge({"b", "a", 0});
  CHECK_THROWS_AS(rec_mii(d), DfgError);
}

TEST_CASE("overall bound") {
  ArchConfig a;
  CHECK(mii(gen_cnkm(2, 4), a) == 1);
  CHECK(mii(gen_cnkm(3, 6), a) == 2);
  ArchConfig huge;
  huge.rows = 32;
  huge.cols = 32;
  CHECK(mii(parse_dfg("node a comp 1\nnode b comp 1\nedge a b 0\nedge b a 1\n"), huge) == 2);
}

TEST_CASE("recurrence bound matches both oracles on small graphs") {
  std::mt19937_64 rng(2024);
  int cyclic = 0;
  for (int i = 0; i < 300; ++i) {
    auto d = testing::random_recurrent_dfg(rng, 2 + i % 11);
    REQUIRE(d.nodes().size() <= 12);
    const int got = rec_mii(d);
    CHECK(got == testing::cycle_ratio_rec_mii(d));
    CHECK(got == testing::feasibility_rec_mii(d));
    cyclic += got > 1 ? 1 : 0;
  }
  CHECK(cyclic > 50);
}

TEST_CASE("positive cycle test is monotone in ii") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    auto d = testing::random_recurrent_dfg(rng, 8);
    const int r = rec_mii(d);
    for (int ii = 1; ii <= r + 3; ++ii) CHECK(has_positive_cycle(d, ii) == (ii < r));
  }
}

}
