#pragma once

#include <atomic>
#include <mutex>
#include <optional>

#include "ccstm/backend.hpp"
#include "ccstm/object_table.hpp"

namespace ccstm {

// Per-object state under basic timestamp ordering. max_write is the stamp of
// the transaction whose value is committed; max_read is the largest stamp of
// any transaction that read the object.
struct BtoMeta {
  Timestamp max_read = kSeedStamp;
  Timestamp max_write = kSeedStamp;
  Value value;

  friend bool operator==(const BtoMeta&, const BtoMeta&) = default;
};

// Basic timestamp ordering.
//  - read:   refuse when ts < max_write, otherwise raise max_read to ts.
//  - commit: refuse when, for any written object, ts < max_write or
//            ts < max_read; otherwise publish all writes with max_write = ts.
// Validation and publication run under the write_set's object guards taken
// in ascending id order.
class BtoBackend final : public Backend {
 public:
  explicit BtoBackend(HistoryRecorder* recorder = nullptr) : Backend(recorder) {}

  Protocol protocol() const noexcept override { return Protocol::kBto; }
  ReadResult read(const Transaction& txn, ObjectId oid) override;
  CommitResult commit(const Transaction& txn) override;
  void seed(ObjectId oid, const Value& v) override;
  bool contains(ObjectId oid) const override;
  std::size_t object_count() const override { return objects_.load(std::memory_order_relaxed); }
  std::size_t collect_garbage(Timestamp) override { return 0; }

  std::optional<BtoMeta> meta(ObjectId oid) const;
  // Test hook: overwrite an object's metadata (creating it if needed).
  void install(ObjectId oid, const BtoMeta& meta);

 private:
  struct Slot {
    mutable std::mutex mu;
    bool present = false;  // guarded by mu
    BtoMeta meta;
  };

  ObjectTable<Slot> table_;
  std::atomic<std::size_t> objects_{0};
};

}  // namespace ccstm
