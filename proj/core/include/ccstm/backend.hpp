#pragma once

#include <cstddef>

#include "ccstm/history.hpp"
#include "ccstm/transaction.hpp"
#include "ccstm/types.hpp"

namespace ccstm {

struct ReadResult {
  enum class Status { kOk, kAbort, kNotFound, kNoVisibleVersion };

  Status status = Status::kOk;
  Value value;
  Timestamp writer = kSeedStamp;
  AbortReason reason = AbortReason::kStaleRead;

  static ReadResult ok(const Value& v, Timestamp writer) { return {Status::kOk, v, writer, {}}; }
  static ReadResult abort(AbortReason r) { return {Status::kAbort, {}, kSeedStamp, r}; }
  static ReadResult not_found() { return {Status::kNotFound, {}, kSeedStamp, {}}; }
  static ReadResult no_visible_version() { return {Status::kNoVisibleVersion, {}, kSeedStamp, {}}; }
};

// Concurrency-control protocol plugged behind Engine. The engine handles
// local-log shadowing and status bookkeeping; a backend owns the committed
// object state and decides reads and commits.
//
// Backends record Read and Commit events themselves, inside the critical
// section that admits them, so history seq order is the effective order.
// The same holds for the Abort event of a refused read or failed commit;
// the engine records explicit aborts.
class Backend {
 public:
  explicit Backend(HistoryRecorder* recorder) : recorder_(recorder) {}
  virtual ~Backend() = default;

  virtual Protocol protocol() const noexcept = 0;

  virtual void on_begin(const Transaction&) {}
  // Called for every store read that the local log could not satisfy.
  virtual ReadResult read(const Transaction& txn, ObjectId oid) = 0;
  // Validate the write_set and, on success, publish it atomically.
  virtual CommitResult commit(const Transaction& txn) = 0;
  // Called once per abort (validation, read refusal or explicit). Idempotent.
  virtual void on_abort(const Transaction&) {}

  // Install committed state at kSeedStamp. Not thread-safe against running
  // transactions on the same object.
  virtual void seed(ObjectId oid, const Value& v) = 0;
  virtual bool contains(ObjectId oid) const = 0;
  virtual std::size_t object_count() const = 0;
  // `low_watermark` is <= the stamp of every live and future transaction.
  virtual std::size_t collect_garbage(Timestamp low_watermark) = 0;

 protected:
  bool recording() const noexcept { return recorder_ != nullptr && recorder_->enabled(); }
  void record(const Transaction& txn, EventKind kind, ObjectId oid = kNullObject,
              Timestamp version = kSeedStamp) {
    if (recording()) recorder_->record(txn.id(), txn.ts(), kind, oid, version);
  }

 private:
  HistoryRecorder* recorder_;
};

}  // namespace ccstm
