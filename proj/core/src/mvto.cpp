#include "ccstm/mvto.hpp"

#include <algorithm>

namespace ccstm {

ReadResult MvtoBackend::read(const Transaction& txn, ObjectId oid) {
  Slot* slot = table_.find(oid);
  if (slot == nullptr) return ReadResult::not_found();
  std::lock_guard lock(slot->mu);
  if (!slot->present) return ReadResult::not_found();
  Version* v = slot->chain.visible_at(txn.ts());
  if (v == nullptr) return ReadResult::no_visible_version();
  v->max_reader_ts = std::max(v->max_reader_ts, txn.ts());
  record(txn, EventKind::kRead, oid, v->writer_ts);
  return ReadResult::ok(v->value, v->writer_ts);
}

CommitResult MvtoBackend::commit(const Transaction& txn) {
  const auto& writes = txn.log().write_set;
  const Timestamp ts = txn.ts();

  std::vector<std::pair<ObjectId, Slot*>> slots;
  std::vector<std::unique_lock<std::mutex>> guards;
  slots.reserve(writes.size());
  guards.reserve(writes.size());
  for (const auto& [oid, value] : writes) {
    Slot& s = table_.get_or_create(oid);
    guards.emplace_back(s.mu);
    slots.emplace_back(oid, &s);
  }

  for (const auto& [oid, s] : slots) {
    if (!s->present) continue;
    const Version* prior = s->chain.visible_at(ts);
    if (prior != nullptr && prior->max_reader_ts > ts) {
      record(txn, EventKind::kAbort);
      return CommitResult::aborted(AbortReason::kObsoleteVersion);
    }
  }

  record(txn, EventKind::kCommit);
  std::size_t i = 0;
  for (const auto& [oid, value] : writes) {
    Slot& s = *slots[i++].second;
    if (!s.present) {
      s.present = true;
      objects_.fetch_add(1, std::memory_order_relaxed);
    }
    s.chain.insert(Version{ts, value, kSeedStamp});
    if (s.chain.size() > 1) mark_dirty(oid, s);
  }
  return CommitResult::committed(ts);
}

void MvtoBackend::mark_dirty(ObjectId oid, Slot& s) {
  if (s.queued) return;
  s.queued = true;
  std::lock_guard lock(dirty_mu_);
  dirty_.push_back(oid);
}

std::size_t MvtoBackend::collect_garbage(Timestamp low_watermark) {
  std::vector<ObjectId> work;
  {
    std::lock_guard lock(dirty_mu_);
    work.swap(dirty_);
  }
  std::size_t dropped = 0;
  std::vector<ObjectId> still_dirty;
  for (ObjectId oid : work) {
    Slot* s = table_.find(oid);
    if (s == nullptr) continue;
    std::lock_guard lock(s->mu);
    dropped += s->chain.prune(low_watermark);
    if (s->chain.size() > 1) {
      still_dirty.push_back(oid);
    } else {
      s->queued = false;
    }
  }
  if (!still_dirty.empty()) {
    std::lock_guard lock(dirty_mu_);
    dirty_.insert(dirty_.end(), still_dirty.begin(), still_dirty.end());
  }
  return dropped;
}

void MvtoBackend::seed(ObjectId oid, const Value& v) {
  install(oid, VersionChain({Version{kSeedStamp, v, kSeedStamp}}));
}

void MvtoBackend::install(ObjectId oid, VersionChain chain) {
  Slot& s = table_.get_or_create(oid);
  std::lock_guard lock(s.mu);
  if (!s.present) objects_.fetch_add(1, std::memory_order_relaxed);
  s.present = true;
  s.chain = std::move(chain);
  if (s.chain.size() > 1) mark_dirty(oid, s);
}

bool MvtoBackend::contains(ObjectId oid) const {
  const Slot* s = table_.find(oid);
  if (s == nullptr) return false;
  std::lock_guard lock(s->mu);
  return s->present;
}

std::optional<VersionChain> MvtoBackend::chain(ObjectId oid) const {
  const Slot* s = table_.find(oid);
  if (s == nullptr) return std::nullopt;
  std::lock_guard lock(s->mu);
  if (!s->present) return std::nullopt;
  return s->chain;
}

std::size_t MvtoBackend::version_count() const {
  std::size_t n = 0;
  table_.for_each([&](ObjectId, const Slot& s) {
    std::lock_guard lock(s.mu);
    if (s.present) n += s.chain.size();
  });
  return n;
}

}  // namespace ccstm
