#pragma once

#include <cstdint>
#include <limits>
#include <ostream>
#include <string_view>
#include <type_traits>

namespace ccstm {

// Transaction timestamp. Allocated from one global counter starting at 1;
// objects seeded before any transaction runs carry stamp 0.
enum class Timestamp : std::uint64_t {};

// Key of a shared object. 0 is reserved as the null link.
enum class ObjectId : std::uint64_t {};

// Transactions are identified by their (unique) timestamp.
using TxnId = Timestamp;

inline constexpr Timestamp kSeedStamp{0};
inline constexpr ObjectId kNullObject{0};

template <class E>
constexpr std::underlying_type_t<E> raw(E e) noexcept {
  return static_cast<std::underlying_type_t<E>>(e);
}

inline std::ostream& operator<<(std::ostream& os, Timestamp ts) { return os << raw(ts); }
inline std::ostream& operator<<(std::ostream& os, ObjectId id) { return os << raw(id); }

// Payload of a shared object. The set application stores one list node per
// object: its key and the id of the successor node.
struct Value {
  std::int64_t key = 0;
  ObjectId next = kNullObject;

  friend bool operator==(const Value&, const Value&) = default;
};

enum class Protocol { kBto, kSgt, kMvto };

std::string_view to_string(Protocol p) noexcept;
// Accepts "bto", "sgt", "mvto" (case-sensitive). Throws StmError(kConfigInvalid).
Protocol parse_protocol(std::string_view name);

enum class AbortReason {
  kStaleRead,        // BTO: read of an object already written by a younger txn
  kStaleWrite,       // BTO: commit-time write validation failed
  kCycleDetected,    // SGT: operation would close a cycle in the conflict graph
  kObsoleteVersion,  // MVTO: a younger txn already read the version we would supersede
  kUserRequested,    // explicit tm_abort
};

std::string_view to_string(AbortReason r) noexcept;

}  // namespace ccstm
