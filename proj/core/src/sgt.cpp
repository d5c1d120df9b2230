#include "ccstm/sgt.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ccstm {

namespace {

std::logic_error unregistered(TxnId txn) {
  return std::logic_error("transaction " + std::to_string(raw(txn)) + " has no graph node");
}

}  // namespace

void SgtBackend::on_begin(const Transaction& txn) {
  std::lock_guard lock(mu_);
  const TxnId t = txn.id();
  graph_.add_node(t);
  info_.try_emplace(t);
  active_.insert(t);
  for (TxnId c : retained_) graph_.add_edge(c, t);
  if (opts_.verify_acyclic) check_acyclic_locked();
}

ReadResult SgtBackend::read(const Transaction& txn, ObjectId oid) {
  std::lock_guard lock(mu_);
  const Slot* slot = table_.find(oid);
  if (slot == nullptr || !slot->present) return ReadResult::not_found();
  const TxnId t = txn.id();
  auto node = info_.find(t);
  if (node == info_.end()) throw unregistered(t);

  bool added = false;
  if (auto acc = access_.find(oid); acc != access_.end()) {
    added = add_edges_from(acc->second, t, /*writers_only=*/true);
  }
  if (added && graph_.on_cycle(t)) {
    erase_node_locked(t);
    if (opts_.auto_gc) collect_locked();
    record(txn, EventKind::kAbort);
    return ReadResult::abort(AbortReason::kCycleDetected);
  }
  note_access(t, node->second, oid, false);
  record(txn, EventKind::kRead, oid, slot->writer);
  if (opts_.verify_acyclic) check_acyclic_locked();
  return ReadResult::ok(slot->value, slot->writer);
}

CommitResult SgtBackend::commit(const Transaction& txn) {
  std::lock_guard lock(mu_);
  const TxnId t = txn.id();
  auto node = info_.find(t);
  if (node == info_.end()) throw unregistered(t);
  const auto& writes = txn.log().write_set;

  bool added = false;
  for (const auto& [oid, value] : writes) {
    if (auto acc = access_.find(oid); acc != access_.end()) {
      added |= add_edges_from(acc->second, t, /*writers_only=*/false);
    }
  }
  if (added && graph_.on_cycle(t)) {
    erase_node_locked(t);
    if (opts_.auto_gc) collect_locked();
    record(txn, EventKind::kAbort);
    return CommitResult::aborted(AbortReason::kCycleDetected);
  }

  record(txn, EventKind::kCommit);
  NodeInfo& info = node->second;
  for (const auto& [oid, value] : writes) {
    note_access(t, info, oid, true);
    Slot& s = table_.get_or_create(oid);
    if (!s.present) {
      s.present = true;
      objects_.fetch_add(1, std::memory_order_relaxed);
    }
    s.value = value;
    s.writer = txn.ts();
  }

  info.committed = true;
  active_.erase(t);
  retained_.insert(t);
  for (TxnId a : active_) info_.at(a).watchers.push_back(t);
  info.pending = active_.size();
  terminate_locked(info);
  if (info.pending == 0) drained_.push_back(t);
  if (opts_.auto_gc) collect_locked();
  if (opts_.verify_acyclic) check_acyclic_locked();
  return CommitResult::committed(txn.ts());
}

void SgtBackend::on_abort(const Transaction& txn) {
  std::lock_guard lock(mu_);
  if (info_.count(txn.id()) == 0) return;
  erase_node_locked(txn.id());
  if (opts_.auto_gc) collect_locked();
}

bool SgtBackend::add_edges_from(const std::vector<Access>& list, TxnId to, bool writers_only) {
  bool added = false;
  for (const Access& a : list) {
    if (a.txn == to || (writers_only && !a.write)) continue;
    added |= graph_.add_edge(a.txn, to);
  }
  return added;
}

void SgtBackend::note_access(TxnId txn, NodeInfo& info, ObjectId oid, bool write) {
  access_[oid].push_back(Access{txn, write});
  info.touched.push_back(oid);
}

void SgtBackend::terminate_locked(NodeInfo& info) {
  for (TxnId w : info.watchers) {
    auto it = info_.find(w);
    if (it == info_.end() || !it->second.committed || it->second.pending == 0) continue;
    if (--it->second.pending == 0) drained_.push_back(w);
  }
  info.watchers.clear();
}

void SgtBackend::erase_node_locked(TxnId txn) {
  auto it = info_.find(txn);
  if (it == info_.end()) return;
  NodeInfo& info = it->second;
  if (!info.committed) terminate_locked(info);

  auto& touched = info.touched;
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  for (ObjectId oid : touched) {
    auto acc = access_.find(oid);
    if (acc == access_.end()) continue;
    auto& list = acc->second;
    list.erase(std::remove_if(list.begin(), list.end(), [&](const Access& a) { return a.txn == txn; }),
               list.end());
    if (list.empty()) access_.erase(acc);
  }
  graph_.remove_node(txn);
  active_.erase(txn);
  retained_.erase(txn);
  info_.erase(it);
}

std::size_t SgtBackend::collect() {
  std::lock_guard lock(mu_);
  return collect_locked();
}

std::size_t SgtBackend::collect_locked() {
  std::size_t removed = 0;
  for (TxnId t : drained_) {
    auto it = info_.find(t);
    if (it == info_.end() || !it->second.committed || it->second.pending != 0) continue;
    erase_node_locked(t);
    ++removed;
  }
  drained_.clear();
  return removed;
}

void SgtBackend::check_acyclic_locked() const {
  if (graph_.has_cycle()) throw std::logic_error("conflict graph became cyclic");
}

void SgtBackend::seed(ObjectId oid, const Value& v) {
  std::lock_guard lock(mu_);
  Slot& s = table_.get_or_create(oid);
  if (!s.present) objects_.fetch_add(1, std::memory_order_relaxed);
  s.present = true;
  s.value = v;
  s.writer = kSeedStamp;
}

bool SgtBackend::contains(ObjectId oid) const {
  std::lock_guard lock(mu_);
  const Slot* s = table_.find(oid);
  return s != nullptr && s->present;
}

std::size_t SgtBackend::node_count() const {
  std::lock_guard lock(mu_);
  return graph_.node_count();
}

std::size_t SgtBackend::edge_count() const {
  std::lock_guard lock(mu_);
  return graph_.edge_count();
}

bool SgtBackend::acyclic() const {
  std::lock_guard lock(mu_);
  return !graph_.has_cycle();
}

SgtSnapshot SgtBackend::snapshot() const {
  std::lock_guard lock(mu_);
  SgtSnapshot snap;
  snap.active.assign(active_.begin(), active_.end());
  snap.committed.assign(retained_.begin(), retained_.end());
  std::sort(snap.active.begin(), snap.active.end());
  std::sort(snap.committed.begin(), snap.committed.end());
  snap.edges = graph_.edges();
  for (TxnId a : snap.active) {
    for (TxnId w : info_.at(a).watchers) {
      auto it = info_.find(w);
      if (it != info_.end() && it->second.committed) snap.watch[w].push_back(a);
    }
  }
  for (TxnId c : snap.committed) snap.watch.try_emplace(c);
  return snap;
}

}  // namespace ccstm
