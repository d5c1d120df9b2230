#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>

#include "ccstm/active_set.hpp"
#include "ccstm/backend.hpp"
#include "ccstm/error.hpp"
#include "ccstm/history.hpp"
#include "ccstm/transaction.hpp"
#include "ccstm/types.hpp"

namespace ccstm {

struct EngineConfig {
  Protocol protocol = Protocol::kBto;
  // Commits between garbage-collection sweeps (MVTO versions). SGT reclaims
  // graph nodes on every termination. 0 disables automatic collection for
  // both.
  std::size_t gc_period = 256;
  // Optional event log; must outlive the engine.
  HistoryRecorder* recorder = nullptr;
  // SGT only: assert graph acyclicity after every admitted operation.
  bool verify_acyclic = false;
};

// The transactional memory: begin / read / write / commit / abort over a
// store of shared objects, validated by one pluggable protocol.
//
// All writes are deferred to commit. Reads are served from the descriptor's
// own write_set first, then from its first-read snapshot, and only then
// from the store via the protocol's read rule.
class Engine {
 public:
  explicit Engine(EngineConfig cfg = {});
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  Transaction begin();

  // Throws TxnAborted when the protocol refuses the read (the transaction is
  // aborted first), StmError(kNotFound) for an unknown object, and
  // StmError(kTxnNotLive) on a finished descriptor.
  Value read(Transaction& txn, ObjectId oid);
  void write(Transaction& txn, ObjectId oid, const Value& v);
  CommitResult commit(Transaction& txn);
  void abort(Transaction& txn);

  // Fresh id for an object that a transaction will create by writing it.
  ObjectId allocate_object();
  // Committed state at kSeedStamp; use before transactions touch `oid`.
  void seed(ObjectId oid, const Value& v);
  ObjectId seed_new(const Value& v);

  // Runs the backend collector at the current low watermark.
  std::size_t collect_garbage();
  Timestamp low_watermark() const;

  Protocol protocol() const noexcept { return cfg_.protocol; }
  const EngineConfig& config() const noexcept { return cfg_; }
  Backend& backend() noexcept { return *backend_; }
  const Backend& backend() const noexcept { return *backend_; }
  HistoryRecorder* recorder() const noexcept { return cfg_.recorder; }

  std::size_t live_count() const { return active_.size(); }
  std::size_t object_count() const { return backend_->object_count(); }
  std::uint64_t commit_count() const noexcept { return commits_.load(std::memory_order_relaxed); }
  std::uint64_t abort_count() const noexcept { return aborts_.load(std::memory_order_relaxed); }

 private:
  friend class Transaction;

  static void require_live(const Transaction& txn);
  // `recorded`: the backend already logged the Abort event at its decision point.
  void finish_abort(Transaction& txn, AbortReason reason, bool recorded = false);
  void retire(Transaction& txn);
  void maybe_collect(std::uint64_t commits);

  EngineConfig cfg_;
  std::unique_ptr<Backend> backend_;
  std::atomic<std::uint64_t> clock_{1};
  std::atomic<std::uint64_t> next_object_{1};
  std::atomic<std::uint64_t> commits_{0};
  std::atomic<std::uint64_t> aborts_{0};
  std::atomic<bool> collecting_{false};
  ActiveSet active_;
};

std::unique_ptr<Backend> make_backend(const EngineConfig& cfg);

}  // namespace ccstm
