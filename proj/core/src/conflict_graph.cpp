#include "ccstm/conflict_graph.hpp"

#include <algorithm>

namespace ccstm {

bool ConflictGraph::add_node(TxnId n) { return nodes_.try_emplace(n).second; }

bool ConflictGraph::remove_node(TxnId n) {
  auto it = nodes_.find(n);
  if (it == nodes_.end()) return false;
  for (TxnId succ : it->second.out) {
    if (succ != n) nodes_.at(succ).in.erase(n);
  }
  for (TxnId pred : it->second.in) {
    if (pred != n) nodes_.at(pred).out.erase(n);
  }
  edges_ -= it->second.out.size() + it->second.in.size();
  if (it->second.out.count(n) != 0) ++edges_;  // self-loop was counted twice
  nodes_.erase(it);
  return true;
}

bool ConflictGraph::add_edge(TxnId from, TxnId to) {
  Adjacency& src = nodes_.at(from);
  Adjacency& dst = nodes_.at(to);
  if (!src.out.insert(to).second) return false;
  dst.in.insert(from);
  ++edges_;
  return true;
}

bool ConflictGraph::has_edge(TxnId from, TxnId to) const {
  auto it = nodes_.find(from);
  return it != nodes_.end() && it->second.out.count(to) != 0;
}

bool ConflictGraph::reaches(TxnId from, TxnId to) const {
  auto start = nodes_.find(from);
  if (start == nodes_.end() || !has_node(to)) return false;
  std::unordered_set<TxnId> seen;
  std::vector<TxnId> stack(start->second.out.begin(), start->second.out.end());
  while (!stack.empty()) {
    const TxnId n = stack.back();
    stack.pop_back();
    if (n == to) return true;
    if (!seen.insert(n).second) continue;
    for (TxnId succ : nodes_.at(n).out) {
      if (seen.count(succ) == 0) stack.push_back(succ);
    }
  }
  return false;
}

bool ConflictGraph::has_cycle() const {
  enum class Color : unsigned char { kWhite, kGrey, kBlack };
  std::unordered_map<TxnId, Color> color;
  color.reserve(nodes_.size());
  for (const auto& [n, adj] : nodes_) color.emplace(n, Color::kWhite);

  // Iterative three-colour DFS; a grey successor is a back edge.
  using Frame = std::pair<TxnId, std::vector<TxnId>>;
  for (const auto& [root, adj] : nodes_) {
    if (color[root] != Color::kWhite) continue;
    std::vector<Frame> stack;
    color[root] = Color::kGrey;
    stack.emplace_back(root, std::vector<TxnId>(adj.out.begin(), adj.out.end()));
    while (!stack.empty()) {
      auto& [node, pending] = stack.back();
      if (pending.empty()) {
        color[node] = Color::kBlack;
        stack.pop_back();
        continue;
      }
      const TxnId next = pending.back();
      pending.pop_back();
      const Color c = color[next];
      if (c == Color::kGrey) return true;
      if (c == Color::kWhite) {
        color[next] = Color::kGrey;
        const auto& out = nodes_.at(next).out;
        stack.emplace_back(next, std::vector<TxnId>(out.begin(), out.end()));
      }
    }
  }
  return false;
}

std::vector<TxnId> ConflictGraph::nodes() const {
  std::vector<TxnId> out;
  out.reserve(nodes_.size());
  for (const auto& [n, adj] : nodes_) out.push_back(n);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ConflictGraph::Edge> ConflictGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edges_);
  for (const auto& [n, adj] : nodes_) {
    for (TxnId succ : adj.out) out.emplace_back(n, succ);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace ccstm
