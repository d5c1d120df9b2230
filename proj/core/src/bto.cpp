#include "ccstm/bto.hpp"

#include <algorithm>
#include <vector>

namespace ccstm {

ReadResult BtoBackend::read(const Transaction& txn, ObjectId oid) {
  Slot* slot = table_.find(oid);
  if (slot == nullptr) return ReadResult::not_found();
  std::lock_guard lock(slot->mu);
  if (!slot->present) return ReadResult::not_found();
  BtoMeta& m = slot->meta;
  if (txn.ts() < m.max_write) {
    record(txn, EventKind::kAbort);
    return ReadResult::abort(AbortReason::kStaleRead);
  }
  m.max_read = std::max(m.max_read, txn.ts());
  record(txn, EventKind::kRead, oid, m.max_write);
  return ReadResult::ok(m.value, m.max_write);
}

CommitResult BtoBackend::commit(const Transaction& txn) {
  const auto& writes = txn.log().write_set;
  const Timestamp ts = txn.ts();

  std::vector<Slot*> slots;
  std::vector<std::unique_lock<std::mutex>> guards;
  slots.reserve(writes.size());
  guards.reserve(writes.size());
  for (const auto& [oid, value] : writes) {
    Slot& s = table_.get_or_create(oid);
    guards.emplace_back(s.mu);
    slots.push_back(&s);
  }

  for (const Slot* s : slots) {
    if (s->present && (ts < s->meta.max_write || ts < s->meta.max_read)) {
      record(txn, EventKind::kAbort);
      return CommitResult::aborted(AbortReason::kStaleWrite);
    }
  }

  record(txn, EventKind::kCommit);
  std::size_t i = 0;
  for (const auto& [oid, value] : writes) {
    Slot& s = *slots[i++];
    if (!s.present) {
      s.present = true;
      s.meta.max_read = kSeedStamp;
      objects_.fetch_add(1, std::memory_order_relaxed);
    }
    s.meta.value = value;
    s.meta.max_write = ts;
  }
  return CommitResult::committed(ts);
}

void BtoBackend::seed(ObjectId oid, const Value& v) { install(oid, BtoMeta{kSeedStamp, kSeedStamp, v}); }

void BtoBackend::install(ObjectId oid, const BtoMeta& meta) {
  Slot& s = table_.get_or_create(oid);
  std::lock_guard lock(s.mu);
  if (!s.present) objects_.fetch_add(1, std::memory_order_relaxed);
  s.present = true;
  s.meta = meta;
}

bool BtoBackend::contains(ObjectId oid) const {
  const Slot* s = table_.find(oid);
  if (s == nullptr) return false;
  std::lock_guard lock(s->mu);
  return s->present;
}

std::optional<BtoMeta> BtoBackend::meta(ObjectId oid) const {
  const Slot* s = table_.find(oid);
  if (s == nullptr) return std::nullopt;
  std::lock_guard lock(s->mu);
  if (!s->present) return std::nullopt;
  return s->meta;
}

}  // namespace ccstm
