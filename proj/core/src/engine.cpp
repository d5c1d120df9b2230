#include "ccstm/engine.hpp"

#include <string>

#include "ccstm/bto.hpp"
#include "ccstm/mvto.hpp"
#include "ccstm/sgt.hpp"

namespace ccstm {

Transaction::Transaction(Transaction&& other) noexcept
    : engine_(other.engine_),
      ts_(other.ts_),
      status_(other.status_),
      abort_reason_(other.abort_reason_),
      log_(std::move(other.log_)),
      active_shard_(other.active_shard_) {
  other.engine_ = nullptr;
}

Transaction& Transaction::operator=(Transaction&& other) noexcept {
  if (this != &other) {
    release();
    engine_ = other.engine_;
    ts_ = other.ts_;
    status_ = other.status_;
    abort_reason_ = other.abort_reason_;
    log_ = std::move(other.log_);
    active_shard_ = other.active_shard_;
    other.engine_ = nullptr;
  }
  return *this;
}

Transaction::~Transaction() { release(); }

void Transaction::release() noexcept {
  if (engine_ != nullptr && live()) {
    try {
      engine_->abort(*this);
    } catch (...) {
    }
  }
  engine_ = nullptr;
}

std::unique_ptr<Backend> make_backend(const EngineConfig& cfg) {
  switch (cfg.protocol) {
    case Protocol::kBto:
      return std::make_unique<BtoBackend>(cfg.recorder);
    case Protocol::kSgt:
      return std::make_unique<SgtBackend>(cfg.recorder, SgtOptions{cfg.gc_period != 0, cfg.verify_acyclic});
    case Protocol::kMvto:
      return std::make_unique<MvtoBackend>(cfg.recorder);
  }
  throw StmError(ErrorCode::kConfigInvalid, "unknown protocol");
}

Engine::Engine(EngineConfig cfg) : cfg_(cfg), backend_(make_backend(cfg_)) {}

Engine::~Engine() = default;

void Engine::require_live(const Transaction& txn) {
  if (!txn.live()) {
    throw StmError(ErrorCode::kTxnNotLive, "transaction " + std::to_string(raw(txn.ts())));
  }
}

Transaction Engine::begin() {
  auto [ts, shard] = active_.enter(clock_);
  Transaction txn(this, ts, shard);
  backend_->on_begin(txn);
  return txn;
}

Value Engine::read(Transaction& txn, ObjectId oid) {
  require_live(txn);
  auto& log = txn.log_;
  if (auto w = log.write_set.find(oid); w != log.write_set.end()) return w->second;
  if (auto r = log.read_set.find(oid); r != log.read_set.end()) return r->second.value;

  const ReadResult res = backend_->read(txn, oid);
  switch (res.status) {
    case ReadResult::Status::kOk:
      log.read_set.emplace(oid, ReadEntry{res.value, res.writer});
      return res.value;
    case ReadResult::Status::kAbort:
      finish_abort(txn, res.reason, /*recorded=*/true);
      throw TxnAborted(txn.id(), res.reason);
    case ReadResult::Status::kNotFound:
      throw StmError(ErrorCode::kNotFound, "object " + std::to_string(raw(oid)));
    case ReadResult::Status::kNoVisibleVersion:
      break;
  }
  throw StmError(ErrorCode::kNoVisibleVersion,
                 "object " + std::to_string(raw(oid)) + " at ts " + std::to_string(raw(txn.ts())));
}

void Engine::write(Transaction& txn, ObjectId oid, const Value& v) {
  require_live(txn);
  txn.log_.write_set.insert_or_assign(oid, v);
  if (cfg_.recorder != nullptr && cfg_.recorder->enabled()) {
    cfg_.recorder->record(txn.id(), txn.ts(), EventKind::kWriteIntent, oid);
  }
}

CommitResult Engine::commit(Transaction& txn) {
  require_live(txn);
  CommitResult res = backend_->commit(txn);
  if (!res) {
    finish_abort(txn, res.reason(), /*recorded=*/true);
    return res;
  }
  txn.status_ = TxnStatus::kCommitted;
  txn.log_.clear();
  retire(txn);
  maybe_collect(commits_.fetch_add(1, std::memory_order_relaxed) + 1);
  return res;
}

void Engine::abort(Transaction& txn) {
  require_live(txn);
  finish_abort(txn, AbortReason::kUserRequested);
}

void Engine::finish_abort(Transaction& txn, AbortReason reason, bool recorded) {
  txn.status_ = TxnStatus::kAborted;
  txn.abort_reason_ = reason;
  txn.log_.clear();
  backend_->on_abort(txn);
  if (!recorded && cfg_.recorder != nullptr && cfg_.recorder->enabled()) {
    cfg_.recorder->record(txn.id(), txn.ts(), EventKind::kAbort);
  }
  retire(txn);
  aborts_.fetch_add(1, std::memory_order_relaxed);
}

void Engine::retire(Transaction& txn) { active_.leave(txn.ts(), txn.active_shard_); }

void Engine::maybe_collect(std::uint64_t commits) {
  if (cfg_.protocol != Protocol::kMvto || cfg_.gc_period == 0) return;
  if (commits % cfg_.gc_period != 0) return;
  if (collecting_.exchange(true, std::memory_order_acquire)) return;
  backend_->collect_garbage(low_watermark());
  collecting_.store(false, std::memory_order_release);
}

ObjectId Engine::allocate_object() {
  return ObjectId{next_object_.fetch_add(1, std::memory_order_relaxed)};
}

void Engine::seed(ObjectId oid, const Value& v) {
  if (oid == kNullObject) throw StmError(ErrorCode::kNotFound, "cannot seed the null object");
  backend_->seed(oid, v);
}

ObjectId Engine::seed_new(const Value& v) {
  const ObjectId oid = allocate_object();
  seed(oid, v);
  return oid;
}

std::size_t Engine::collect_garbage() { return backend_->collect_garbage(low_watermark()); }

Timestamp Engine::low_watermark() const { return active_.low_watermark(clock_); }

}  // namespace ccstm
