#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ccstm/history.hpp"
#include "ccstm/types.hpp"

namespace ccstm {

// How the versions of an object are ordered when building the precedence
// graph. Single-version protocols install writes in commit order; MVTO
// orders versions by writer timestamp.
enum class VersionOrder { kCommitOrder, kTimestampOrder };

VersionOrder version_order_for(Protocol p) noexcept;

struct Verdict {
  bool serializable = false;
  std::vector<TxnId> witness;  // a serial order of the committed transactions
  std::vector<TxnId> cycle;    // offending transactions when not serializable
  std::string detail;
};

// Checks that the committed projection of `h` is conflict-serializable.
//
// kCommitOrder: effects on each object are ordered by seq, reads at their own
// seq and writes at their transaction's commit seq; every read must observe
// the latest write before it. kTimestampOrder: the multiversion graph with
// reads-from edges taken from the observed version stamps and versions
// ordered by writer stamp.
//
// Throws StmError(kIncompleteHistory) if some transaction never terminated.
Verdict check_conflict_serializability(const History& h, VersionOrder order);

enum class SetOpKind : std::uint8_t { kAdd = 0, kRemove = 1, kContains = 2 };

struct SetOpRecord {
  TxnId txn{};
  SetOpKind kind = SetOpKind::kContains;
  std::int64_t key = 0;
  bool applied = false;
};

// Replays the committed set operations in witness order against an empty
// reference set. True iff every recorded applied flag and the final
// membership agree with the replay. Throws StmError(kWitnessInvalid) when the
// witness repeats a transaction, names one that did not commit in `h`, or
// omits the transaction of some operation.
bool replay_check(const History& h, std::span<const TxnId> witness, std::span<const SetOpRecord> ops,
                  std::span<const std::int64_t> final_snapshot);

}  // namespace ccstm
