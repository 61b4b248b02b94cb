#include <doctest.h>

#include "support.hpp"

using namespace bandmap;

TEST_SUITE("pairing") {

TEST_CASE("independent sets and clean mappings coincide on the small corpus") {
  const auto r = testing::soundness_corpus();
  CHECK(r.dfgs >= 100);
  CHECK(r.total.assignments > 0);
  CHECK(r.total.independent > 0);
  INFO(r.total.first_mismatch);
  CHECK(r.total.independent_not_clean == 0);
  CHECK(r.total.clean_not_independent == 0);
  CHECK(r.total.independent == r.total.clean);
}

}
