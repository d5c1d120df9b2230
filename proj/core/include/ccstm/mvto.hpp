#pragma once

#include <atomic>
#include <mutex>
#include <optional>
#include <vector>

#include "ccstm/backend.hpp"
#include "ccstm/object_table.hpp"
#include "ccstm/version_chain.hpp"

namespace ccstm {

// Multiversion timestamp ordering.
//
// A read at stamp t returns the version with the largest writer stamp below
// t and raises that version's max_reader_ts to t. Reads never abort.
//
// Commit at stamp t: for each written object, let X_k be the version visible
// at t. If some transaction with a stamp above t already read X_k, the new
// version would be obsolete and the commit aborts. Otherwise a version
// stamped t is inserted into every written chain.
class MvtoBackend final : public Backend {
 public:
  explicit MvtoBackend(HistoryRecorder* recorder = nullptr) : Backend(recorder) {}

  Protocol protocol() const noexcept override { return Protocol::kMvto; }
  ReadResult read(const Transaction& txn, ObjectId oid) override;
  CommitResult commit(const Transaction& txn) override;
  void seed(ObjectId oid, const Value& v) override;
  bool contains(ObjectId oid) const override;
  std::size_t object_count() const override { return objects_.load(std::memory_order_relaxed); }

  // Prunes every chain touched by more than one committed version since the
  // last sweep. Returns the number of versions dropped.
  std::size_t collect_garbage(Timestamp low_watermark) override;

  // Test hooks.
  std::optional<VersionChain> chain(ObjectId oid) const;
  void install(ObjectId oid, VersionChain chain);
  std::size_t version_count() const;

 private:
  struct Slot {
    mutable std::mutex mu;
    bool present = false;  // all guarded by mu
    bool queued = false;   // listed in dirty_
    VersionChain chain;
  };

  void mark_dirty(ObjectId oid, Slot& s);

  ObjectTable<Slot> table_;
  std::atomic<std::size_t> objects_{0};
  std::mutex dirty_mu_;  // ordered after any Slot::mu
  std::vector<ObjectId> dirty_;
};

}  // namespace ccstm
