// mis.hpp - maximum independent set solvers.
//
// exact_mis is a branch and bound for small graphs and serves as the oracle
// for the heuristics. greedy_mis seeds tabu_mis, a swap-based tabu local
// search used on production-size conflict graphs.

#pragma once

#include <cstdint>
#include <vector>

#include "bandmap/graph.hpp"

namespace bandmap {

struct MisResult {
  std::vector<std::size_t> chosen;  // ascending vertex indices
  std::size_t size = 0;
  std::uint64_t iterations = 0;
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kExactMisLimit = 60;

MisResult exact_mis(const Graph& g, std::size_t vertex_limit = kExactMisLimit);
MisResult greedy_mis(const Graph& g);

/// Iteration budget used when the caller passes 0: 50 per vertex.
std::uint64_t default_tabu_budget(const Graph& g);

/// Tabu tenure applied to vertices evicted from a solution of `size`.
int tabu_tenure(std::size_t size);

/// Stops early once `target` vertices are chosen (0 = run the full budget).
MisResult tabu_mis(const Graph& g, std::uint64_t seed, std::uint64_t budget = 0, std::size_t target = 0);

}  // namespace bandmap
