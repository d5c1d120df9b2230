#pragma once

#include <cstddef>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ccstm/types.hpp"

namespace ccstm {

// Directed graph over transaction ids. Not synchronized.
class ConflictGraph {
 public:
  using Edge = std::pair<TxnId, TxnId>;

  // False if the node already existed.
  bool add_node(TxnId n);
  // Removes the node and all incident edges. False if absent.
  bool remove_node(TxnId n);
  bool has_node(TxnId n) const { return nodes_.count(n) != 0; }

  // Both endpoints must exist (std::out_of_range otherwise). Returns true if
  // the edge is new.
  bool add_edge(TxnId from, TxnId to);
  bool has_edge(TxnId from, TxnId to) const;

  // True iff some directed path of length >= 1 leads from `from` to `to`.
  bool reaches(TxnId from, TxnId to) const;
  // True iff a directed cycle passes through `n`.
  bool on_cycle(TxnId n) const { return reaches(n, n); }
  // True iff the graph contains any directed cycle (self-loops included).
  bool has_cycle() const;

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_; }
  std::vector<TxnId> nodes() const;
  std::vector<Edge> edges() const;
  const std::unordered_set<TxnId>& successors(TxnId n) const { return nodes_.at(n).out; }

 private:
  struct Adjacency {
    std::unordered_set<TxnId> out;
    std::unordered_set<TxnId> in;
  };

  std::unordered_map<TxnId, Adjacency> nodes_;
  std::size_t edges_ = 0;
};

}  // namespace ccstm
