#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <unordered_map>

#include "ccstm/types.hpp"

namespace ccstm {

class Engine;

enum class TxnStatus { kLive, kCommitted, kAborted };

struct ReadEntry {
  Value value;
  Timestamp writer = kSeedStamp;  // stamp of the transaction that produced `value`
};

// Deferred-write buffer. write_set is ordered by ObjectId, which is also the
// canonical lock-acquisition order at commit.
struct LocalLog {
  std::unordered_map<ObjectId, ReadEntry> read_set;
  std::map<ObjectId, Value> write_set;

  void clear() {
    read_set.clear();
    write_set.clear();
  }
  bool empty() const noexcept { return read_set.empty() && write_set.empty(); }
};

class CommitResult {
 public:
  static CommitResult committed(Timestamp at) { return CommitResult(at, std::nullopt); }
  static CommitResult aborted(AbortReason reason) { return CommitResult(kSeedStamp, reason); }

  bool is_committed() const noexcept { return !reason_.has_value(); }
  explicit operator bool() const noexcept { return is_committed(); }
  Timestamp at() const noexcept { return at_; }
  // Only meaningful when !is_committed().
  AbortReason reason() const noexcept { return reason_.value_or(AbortReason::kUserRequested); }

 private:
  CommitResult(Timestamp at, std::optional<AbortReason> reason) : at_(at), reason_(reason) {}

  Timestamp at_;
  std::optional<AbortReason> reason_;
};

// A transaction descriptor. Move-only and owned by one thread at a time; a
// descriptor destroyed while still live is aborted.
class Transaction {
 public:
  Transaction(const Transaction&) = delete;
  Transaction& operator=(const Transaction&) = delete;
  Transaction(Transaction&& other) noexcept;
  Transaction& operator=(Transaction&& other) noexcept;
  ~Transaction();

  Timestamp ts() const noexcept { return ts_; }
  TxnId id() const noexcept { return ts_; }
  TxnStatus status() const noexcept { return status_; }
  bool live() const noexcept { return status_ == TxnStatus::kLive; }
  const LocalLog& log() const noexcept { return log_; }
  std::optional<AbortReason> abort_reason() const noexcept { return abort_reason_; }

 private:
  friend class Engine;

  Transaction(Engine* engine, Timestamp ts, std::size_t active_shard) noexcept
      : engine_(engine), ts_(ts), active_shard_(active_shard) {}

  void release() noexcept;

  Engine* engine_ = nullptr;
  Timestamp ts_{};
  TxnStatus status_ = TxnStatus::kLive;
  std::optional<AbortReason> abort_reason_;
  LocalLog log_;
  std::size_t active_shard_ = 0;
};

}  // namespace ccstm
