#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <thread>
#include <vector>

#include "ccstm/engine.hpp"

namespace ccstm {

struct RetryPolicy {
  // Aborted attempts tolerated before RetryLimitExceeded; unbounded if empty.
  std::optional<std::size_t> max_retries;
  // Capped exponential sleep between attempts; immediate retry when off.
  bool backoff = false;
  std::chrono::microseconds max_backoff{1000};
};

struct SetOpResult {
  bool applied = false;       // add: inserted, remove: unlinked, contains: found
  std::size_t retries = 0;    // aborted attempts before the committing one
  TxnId committed_txn{};      // id of the committing attempt
};

// Runs `body(txn)` in a fresh transaction and commits it, retrying with a new
// (larger) timestamp whenever the attempt aborts. `body` returns the
// operation's applied flag; it may abort the transaction itself to request a
// retry.
template <class Body>
SetOpResult execute_with_retry(Engine& engine, Body&& body, const RetryPolicy& policy = {}) {
  SetOpResult out;
  for (;;) {
    Transaction txn = engine.begin();
    try {
      const bool applied = body(txn);
      if (txn.live()) {
        if (CommitResult res = engine.commit(txn)) {
          out.applied = applied;
          out.committed_txn = txn.id();
          return out;
        }
      }
    } catch (const TxnAborted&) {
    }
    if (policy.max_retries && out.retries >= *policy.max_retries) {
      throw StmError(ErrorCode::kRetryLimitExceeded,
                     "gave up after " + std::to_string(out.retries + 1) + " attempts");
    }
    ++out.retries;
    if (policy.backoff) {
      const auto shift = std::min<std::size_t>(out.retries, 10);
      std::this_thread::sleep_for(std::min(policy.max_backoff, std::chrono::microseconds(1u << shift)));
    }
  }
}

struct SetOptions {
  // Write only the objects whose contents change (add: new node and
  // predecessor; remove: predecessor). Off by default: add also rewrites the
  // successor and remove rewrites the unlinked node.
  bool minimal_writes = false;
  RetryPolicy retry;
};

// Integer set kept as a sorted singly-linked list of shared objects between
// two sentinels, with every operation running as one transaction.
class TxnSet {
 public:
  static constexpr std::int64_t kMinKey = std::numeric_limits<std::int64_t>::min();
  static constexpr std::int64_t kMaxKey = std::numeric_limits<std::int64_t>::max();

  // Seeds the head and tail sentinels at kSeedStamp.
  explicit TxnSet(Engine& engine, SetOptions opts = {});

  // Keys must lie strictly between the sentinels (StmError kValueOutOfRange).
  SetOpResult add(std::int64_t key);
  SetOpResult remove(std::int64_t key);
  SetOpResult contains(std::int64_t key);

  // Interior keys in list order, read in one transaction.
  std::vector<std::int64_t> snapshot();
  // Every reachable key including both sentinels.
  std::vector<std::int64_t> chain();

  // Single-attempt bodies, for callers composing their own transactions.
  bool add_in(Transaction& txn, std::int64_t key);
  bool remove_in(Transaction& txn, std::int64_t key);
  bool contains_in(Transaction& txn, std::int64_t key);

  ObjectId head() const noexcept { return head_; }
  ObjectId tail() const noexcept { return tail_; }
  Engine& engine() noexcept { return engine_; }
  const SetOptions& options() const noexcept { return opts_; }

 private:
  struct Window {
    ObjectId pred_id;
    Value pred;
    ObjectId curr_id;
    Value curr;
  };

  static void check_key(std::int64_t key);
  // First node with key >= `key`, and its predecessor.
  Window locate(Transaction& txn, std::int64_t key);
  std::vector<std::int64_t> walk(Transaction& txn, bool with_sentinels);

  Engine& engine_;
  SetOptions opts_;
  ObjectId head_;
  ObjectId tail_;
};

}  // namespace ccstm
