#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace bandmap {

/// Undirected simple graph with adjacency lists and a dense adjacency bitset.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t n);

  std::size_t size() const { return adj_.size(); }
  std::size_t edge_count() const { return edges_; }

  /// Ignores self loops and duplicates.
  void add_edge(std::size_t a, std::size_t b);
  bool adjacent(std::size_t a, std::size_t b) const {
    return (bits_[a * words_ + b / 64] >> (b % 64)) & 1U;
  }
  const std::vector<std::uint32_t>& neighbors(std::size_t v) const { return adj_[v]; }
  std::size_t degree(std::size_t v) const { return adj_[v].size(); }

  std::vector<std::pair<std::size_t, std::size_t>> edge_list() const;

  /// True when no two vertices of `set` are adjacent.
  bool is_independent(const std::vector<std::size_t>& set) const;

 private:
  std::vector<std::vector<std::uint32_t>> adj_;
  std::vector<std::uint64_t> bits_;
  std::size_t words_ = 0;
  std::size_t edges_ = 0;
};

}  // namespace bandmap
