#include "bandmap/graph.hpp"

#include <algorithm>

namespace bandmap {

Graph::Graph(std::size_t n) : adj_(n), words_((n + 63) / 64) { bits_.assign(n * words_, 0); }

void Graph::add_edge(std::size_t a, std::size_t b) {
  if (a == b || adjacent(a, b)) return;
  bits_[a * words_ + b / 64] |= std::uint64_t{1} << (b % 64);
  bits_[b * words_ + a / 64] |= std::uint64_t{1} << (a % 64);
  adj_[a].push_back(static_cast<std::uint32_t>(b));
  adj_[b].push_back(static_cast<std::uint32_t>(a));
  ++edges_;
}

std::vector<std::pair<std::size_t, std::size_t>> Graph::edge_list() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(edges_);
  for (std::size_t a = 0; a < adj_.size(); ++a) {
    for (auto b : adj_[a]) {
      if (a < b) out.emplace_back(a, b);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool Graph::is_independent(const std::vector<std::size_t>& set) const {
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t j = i + 1; j < set.size(); ++j) {
      if (set[i] == set[j] || adjacent(set[i], set[j])) return false;
    }
  }
  return true;
}

}  // namespace bandmap
