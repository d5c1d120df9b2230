#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <mutex>
#include <vector>

#include "ccstm/types.hpp"

namespace ccstm {

enum class EventKind : std::uint8_t { kRead = 0, kWriteIntent = 1, kCommit = 2, kAbort = 3 };

// One admitted operation. `version` is the writer stamp observed by a read
// (kSeedStamp for seeded state); it is unused for the other kinds.
struct Event {
  std::uint64_t seq = 0;
  TxnId txn{};
  Timestamp ts{};
  EventKind kind = EventKind::kRead;
  ObjectId oid = kNullObject;
  Timestamp version = kSeedStamp;

  friend bool operator==(const Event&, const Event&) = default;
};

// Events in ascending seq order.
using History = std::vector<Event>;

// Concurrent append-only event log. Callers invoke record() inside the
// critical section that admits the operation, so seq order agrees with the
// order in which operations took effect on each object.
class HistoryRecorder {
 public:
  HistoryRecorder() = default;
  HistoryRecorder(const HistoryRecorder&) = delete;
  HistoryRecorder& operator=(const HistoryRecorder&) = delete;

  bool enabled() const noexcept { return enabled_.load(std::memory_order_relaxed); }
  void set_enabled(bool on) noexcept { enabled_.store(on, std::memory_order_relaxed); }

  // Assigns a fresh seq and returns it. No-op returning 0 when disabled.
  std::uint64_t record(TxnId txn, Timestamp ts, EventKind kind, ObjectId oid = kNullObject,
                       Timestamp version = kSeedStamp);

  std::size_t size() const;
  // Merged, seq-sorted copy. Call once recording threads are quiescent.
  History collect() const;
  void clear();

 private:
  static constexpr std::size_t kShards = 64;

  struct alignas(64) Shard {
    mutable std::mutex mu;
    std::vector<Event> events;
  };

  std::atomic<bool> enabled_{true};
  std::atomic<std::uint64_t> next_seq_{1};
  std::array<Shard, kShards> shards_;
};

// Line-delimited text trace: `seq txn ts kind oid [version_ts]`, decimal
// fields separated by single spaces. The version field is written for reads
// only. Lines starting with '#' are comments.
void write_trace(std::ostream& out, const History& h);
History read_trace(std::istream& in);

}  // namespace ccstm
