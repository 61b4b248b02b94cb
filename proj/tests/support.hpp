// Independent oracles and corpora shared by the unit tests and the
// acceptance runner.

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bandmap/bind.hpp"
#include "bandmap/graph.hpp"

namespace bandmap::testing {

Graph random_graph(std::size_t n, double p, std::uint64_t seed);

/// Subset enumeration; n <= 24.
std::size_t brute_force_mis(const Graph& g);

/// Fixed corpus of 100 graphs with 10..60 vertices.
std::vector<Graph> tabu_corpus();

/// Max over simple dependence cycles of ceil(latency / distance), 1 if none.
/// Enumerates cycles directly; only for small graphs.
int cycle_ratio_rec_mii(const Dfg& dfg);

/// Smallest ii in [1, sum of latencies] with no positive cycle, checked with
/// Floyd-Warshall longest paths.
int feasibility_rec_mii(const Dfg& dfg);

/// Valid random DFG with comps chained by distance-0 edges, optional vins and
/// vouts and loop-carried back edges.
Dfg random_dfg(std::mt19937_64& rng, int max_ops, bool recurrences);

struct RecurrenceFixture {
  const char* name;
  const char* text;
  int rec;  // hand-derived recurrence bound
};

const std::vector<RecurrenceFixture>& recurrence_fixtures();

/// n comps (latency 1..3) on a random spanning chain plus up to four back
/// edges with distance 1..3.
Dfg random_recurrent_dfg(std::mt19937_64& rng, int n);

struct PairingStats {
  std::uint64_t assignments = 0;
  std::uint64_t independent = 0;
  std::uint64_t clean = 0;
  std::uint64_t independent_not_clean = 0;  // soundness failures
  std::uint64_t clean_not_independent = 0;  // completeness failures
  std::string first_mismatch;
};

/// Walks every one-candidate-per-op assignment of the scheduled graph and
/// compares independence in the conflict graph with a clean check_mapping.
PairingStats pair_assignments(const Schedule& sched, const ArchConfig& arch);

struct CorpusResult {
  int dfgs = 0;
  PairingStats total;
};

/// All small scheduled DFGs (<= 8 ops after normalization) on 2x2 arrays.
CorpusResult soundness_corpus();

}  // namespace bandmap::testing
