#pragma once

#include <atomic>
#include <map>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ccstm/backend.hpp"
#include "ccstm/conflict_graph.hpp"
#include "ccstm/object_table.hpp"

namespace ccstm {

struct SgtOptions {
  // Reclaim drained committed nodes at the end of every commit/abort.
  bool auto_gc = true;
  // Re-check whole-graph acyclicity after every admitted operation and
  // throw std::logic_error if violated. Expensive; for tests.
  bool verify_acyclic = false;
};

// Diagnostic dump of the conflict graph.
struct SgtSnapshot {
  std::vector<TxnId> active;
  std::vector<TxnId> committed;
  std::vector<ConflictGraph::Edge> edges;
  // Committed node -> transactions active at its commit that are still live.
  std::map<TxnId, std::vector<TxnId>> watch;
};

// Serialization graph testing.
//
// Every transaction is a node from begin until it aborts or, once committed,
// until all transactions that were active at its commit have finished. On
// begin, real-time edges run from each retained committed node to the new
// one. A read of X adds edges from every committed writer of X; a commit
// adds edges from every prior reader and writer of each written object.
// An operation whose new edges close a cycle aborts its transaction.
//
// One mutex guards the graph, the access lists and the committed values.
class SgtBackend final : public Backend {
 public:
  explicit SgtBackend(HistoryRecorder* recorder = nullptr, SgtOptions opts = {})
      : Backend(recorder), opts_(opts) {}

  Protocol protocol() const noexcept override { return Protocol::kSgt; }
  void on_begin(const Transaction& txn) override;
  ReadResult read(const Transaction& txn, ObjectId oid) override;
  CommitResult commit(const Transaction& txn) override;
  void on_abort(const Transaction& txn) override;
  void seed(ObjectId oid, const Value& v) override;
  bool contains(ObjectId oid) const override;
  std::size_t object_count() const override { return objects_.load(std::memory_order_relaxed); }
  // Removes every committed node whose watch set has drained. The watermark
  // is unused; SGT tracks liveness itself.
  std::size_t collect_garbage(Timestamp) override { return collect(); }
  std::size_t collect();

  std::size_t node_count() const;
  std::size_t edge_count() const;
  SgtSnapshot snapshot() const;
  bool acyclic() const;

 private:
  struct Access {
    TxnId txn;
    bool write;
  };

  struct NodeInfo {
    bool committed = false;
    std::vector<ObjectId> touched;  // objects with access-list entries for this node
    std::vector<TxnId> watchers;    // committed nodes waiting for this one to finish
    std::size_t pending = 0;        // live transactions this committed node waits for
  };

  struct Slot {
    bool present = false;  // guarded by mu_
    Value value;
    Timestamp writer = kSeedStamp;
  };

  bool add_edges_from(const std::vector<Access>& list, TxnId to, bool writers_only);
  void note_access(TxnId txn, NodeInfo& info, ObjectId oid, bool write);
  void terminate_locked(NodeInfo& info);
  void erase_node_locked(TxnId txn);
  std::size_t collect_locked();
  void check_acyclic_locked() const;

  const SgtOptions opts_;
  mutable std::mutex mu_;
  ConflictGraph graph_;
  std::unordered_map<TxnId, NodeInfo> info_;
  std::unordered_set<TxnId> active_;
  std::unordered_set<TxnId> retained_;
  std::unordered_map<ObjectId, std::vector<Access>> access_;
  std::vector<TxnId> drained_;
  ObjectTable<Slot> table_;
  std::atomic<std::size_t> objects_{0};
};

}  // namespace ccstm
