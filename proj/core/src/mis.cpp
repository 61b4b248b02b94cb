#include "bandmap/mis.hpp"

#include <algorithm>
#include <bit>
#include <random>

#include "bandmap/error.hpp"

namespace bandmap {

namespace {

void verify_independent(const Graph& g, const std::vector<std::size_t>& chosen) {
  std::vector<char> in(g.size(), 0);
  for (auto v : chosen) in[v] = 1;
  for (auto v : chosen) {
    for (auto w : g.neighbors(v)) {
      if (in[w]) throw MisError("solver produced a dependent set");
    }
  }
}

using Mask = std::uint64_t;

class BranchAndBound {
 public:
  explicit BranchAndBound(const Graph& g) : n_(g.size()), nbr_(g.size(), 0) {
    for (std::size_t v = 0; v < n_; ++v) {
      for (auto w : g.neighbors(v)) nbr_[v] |= Mask{1} << w;
    }
  }

  Mask solve(Mask seed_set) {
    best_ = seed_set;
    best_size_ = std::popcount(seed_set);
    Mask all = n_ == 64 ? ~Mask{0} : ((Mask{1} << n_) - 1);
    search(all, 0);
    return best_;
  }

  std::uint64_t nodes() const { return nodes_; }

 private:
  std::size_t n_;
  std::vector<Mask> nbr_;
  Mask best_ = 0;
  int best_size_ = 0;
  std::uint64_t nodes_ = 0;

  int clique_cover(Mask cand) const {
    int count = 0;
    while (cand) {
      const int v = std::countr_zero(cand);
      Mask clique = Mask{1} << v;
      Mask grow = cand & nbr_[v];
      while (grow) {
        const int u = std::countr_zero(grow);
        clique |= Mask{1} << u;
        grow &= nbr_[u];
      }
      cand &= ~clique;
      ++count;
    }
    return count;
  }

  void search(Mask cand, Mask current) {
    ++nodes_;
    // Vertices of degree 0 or 1 inside cand belong to some maximum set.
    bool reduced = true;
    while (reduced && cand) {
      reduced = false;
      for (Mask scan = cand; scan;) {
        const int v = std::countr_zero(scan);
        scan &= scan - 1;
        if (std::popcount(cand & nbr_[v]) <= 1) {
          current |= Mask{1} << v;
          cand &= ~(nbr_[v] | (Mask{1} << v));
          scan &= cand;
          reduced = true;
        }
      }
    }
    const int size = std::popcount(current);
    if (!cand) {
      if (size > best_size_) {
        best_size_ = size;
        best_ = current;
      }
      return;
    }
    if (size + std::popcount(cand) <= best_size_) return;
    if (size + clique_cover(cand) <= best_size_) return;

    int pivot = -1;
    int pivot_deg = -1;
    for (Mask scan = cand; scan; scan &= scan - 1) {
      const int v = std::countr_zero(scan);
      const int d = std::popcount(cand & nbr_[v]);
      if (d > pivot_deg) {
        pivot_deg = d;
        pivot = v;
      }
    }
    const Mask bit = Mask{1} << pivot;
    search(cand & ~(nbr_[pivot] | bit), current | bit);
    search(cand & ~bit, current);
  }
};

// Vertices bucketed by how many chosen neighbours they have (0, 1, 2).
class Buckets {
 public:
  explicit Buckets(std::size_t n) : pos_(n, -1), level_(n, -1) {}

  void place(std::uint32_t v, int tight) {
    const int want = tight <= 2 ? tight : -1;
    if (want == level_[v]) return;
    remove(v);
    if (want < 0) return;
    auto& items = items_[static_cast<std::size_t>(want)];
    pos_[v] = static_cast<int>(items.size());
    items.push_back(v);
    level_[v] = want;
  }

  void remove(std::uint32_t v) {
    if (level_[v] < 0) return;
    auto& items = items_[static_cast<std::size_t>(level_[v])];
    const auto last = items.back();
    items[static_cast<std::size_t>(pos_[v])] = last;
    pos_[last] = pos_[v];
    items.pop_back();
    pos_[v] = -1;
    level_[v] = -1;
  }

  const std::vector<std::uint32_t>& at(int tight) const { return items_[static_cast<std::size_t>(tight)]; }

 private:
  std::vector<std::uint32_t> items_[3];
  std::vector<int> pos_;
  std::vector<int> level_;
};

}  // namespace

MisResult exact_mis(const Graph& g, std::size_t vertex_limit) {
  if (g.size() > vertex_limit || g.size() > 64) {
    throw MisError("exact_mis: " + std::to_string(g.size()) + " vertices exceed the limit of " +
                   std::to_string(std::min<std::size_t>(vertex_limit, 64)) + "; use tabu_mis");
  }
  MisResult out;
  if (g.size() == 0) return out;
  Mask seed = 0;
  for (auto v : greedy_mis(g).chosen) seed |= Mask{1} << v;
  BranchAndBound bb(g);
  Mask best = bb.solve(seed);
  for (std::size_t v = 0; v < g.size(); ++v) {
    if ((best >> v) & 1U) out.chosen.push_back(v);
  }
  out.size = out.chosen.size();
  out.iterations = bb.nodes();
  verify_independent(g, out.chosen);
  return out;
}

MisResult greedy_mis(const Graph& g) {
  const auto n = g.size();
  std::vector<char> alive(n, 1);
  std::vector<std::size_t> deg(n);
  for (std::size_t v = 0; v < n; ++v) deg[v] = g.degree(v);
  MisResult out;
  std::size_t remaining = n;
  while (remaining > 0) {
    std::size_t pick = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (alive[v] && (pick == n || deg[v] < deg[pick])) pick = v;
    }
    out.chosen.push_back(pick);
    std::vector<std::size_t> removed{pick};
    for (auto w : g.neighbors(pick)) {
      if (alive[w]) removed.push_back(w);
    }
    for (auto r : removed) {
      alive[r] = 0;
      --remaining;
    }
    for (auto r : removed) {
      for (auto w : g.neighbors(r)) {
        if (alive[w]) --deg[w];
      }
    }
  }
  std::sort(out.chosen.begin(), out.chosen.end());
  out.size = out.chosen.size();
  verify_independent(g, out.chosen);
  return out;
}

std::uint64_t default_tabu_budget(const Graph& g) { return 50 * std::max<std::uint64_t>(1, g.size()); }

int tabu_tenure(std::size_t size) { return 7 + static_cast<int>(size % 5); }

MisResult tabu_mis(const Graph& g, std::uint64_t seed, std::uint64_t budget, std::size_t target) {
  if (budget == 0) budget = default_tabu_budget(g);
  const auto n = g.size();
  MisResult best = greedy_mis(g);
  best.seed = seed;
  if (n == 0) return best;

  std::mt19937_64 rng(seed);
  std::vector<char> in(n, 0);
  std::vector<int> tight(n, 0);
  std::vector<std::uint64_t> tabu_until(n, 0);
  Buckets buckets(n);
  std::size_t size = 0;

  auto add = [&](std::uint32_t v) {
    in[v] = 1;
    ++size;
    buckets.remove(v);
    for (auto w : g.neighbors(v)) {
      ++tight[w];
      if (!in[w]) buckets.place(w, tight[w]);
    }
  };
  auto drop = [&](std::uint32_t v) {
    in[v] = 0;
    --size;
    for (auto w : g.neighbors(v)) {
      --tight[w];
      if (!in[w]) buckets.place(w, tight[w]);
    }
    buckets.place(v, tight[v]);
  };

  for (std::uint32_t v = 0; v < n; ++v) buckets.place(v, 0);
  for (auto v : best.chosen) add(static_cast<std::uint32_t>(v));

  auto pick = [&](int level, std::uint64_t it, bool aspiration) -> std::int64_t {
    const auto& items = buckets.at(level);
    if (items.empty()) return -1;
    for (int attempt = 0; attempt < 8; ++attempt) {
      auto v = items[rng() % items.size()];
      if (aspiration || tabu_until[v] <= it) return v;
    }
    std::vector<std::uint32_t> open;
    for (auto v : items) {
      if (tabu_until[v] <= it) open.push_back(v);
    }
    if (open.empty()) return -1;
    return open[rng() % open.size()];
  };

  std::uint64_t it = 1;
  for (; it <= budget; ++it) {
    const auto tenure = static_cast<std::uint64_t>(tabu_tenure(size));
    // Adding a free vertex always grows the set; a tabu one is accepted only
    // when the move beats the incumbent.
    std::int64_t v = pick(0, it, size + 1 > best.size);
    if (v >= 0) {
      add(static_cast<std::uint32_t>(v));
    } else {
      v = pick(1, it, false);
      if (v < 0) v = pick(2, it, false);
      if (v >= 0) {
        std::vector<std::uint32_t> evict;
        for (auto w : g.neighbors(static_cast<std::size_t>(v))) {
          if (in[w]) evict.push_back(w);
        }
        for (auto w : evict) {
          drop(w);
          tabu_until[w] = it + tenure;
        }
        add(static_cast<std::uint32_t>(v));
      } else if (size > 0) {
        // Stuck: perturb by dropping a random member.
        std::vector<std::uint32_t> members;
        for (std::uint32_t u = 0; u < n; ++u) {
          if (in[u]) members.push_back(u);
        }
        auto u = members[rng() % members.size()];
        drop(u);
        tabu_until[u] = it + tenure;
      }
    }
    if (size > best.size) {
      best.chosen.clear();
      for (std::size_t u = 0; u < n; ++u) {
        if (in[u]) best.chosen.push_back(u);
      }
      best.size = size;
    }
    if (target > 0 && best.size >= target) break;
  }
  best.iterations = it - 1;
  verify_independent(g, best.chosen);
  return best;
}

}  // namespace bandmap
