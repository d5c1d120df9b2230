#include "ccstm/txn_set.hpp"

#include <stdexcept>
#include <string>

namespace ccstm {

TxnSet::TxnSet(Engine& engine, SetOptions opts)
    : engine_(engine), opts_(opts), head_(engine.allocate_object()), tail_(engine.allocate_object()) {
  engine_.seed(tail_, Value{kMaxKey, kNullObject});
  engine_.seed(head_, Value{kMinKey, tail_});
}

void TxnSet::check_key(std::int64_t key) {
  if (key == kMinKey || key == kMaxKey) {
    throw StmError(ErrorCode::kValueOutOfRange, "key " + std::to_string(key) + " collides with a sentinel");
  }
}

TxnSet::Window TxnSet::locate(Transaction& txn, std::int64_t key) {
  Window w{head_, engine_.read(txn, head_), kNullObject, {}};
  w.curr_id = w.pred.next;
  w.curr = engine_.read(txn, w.curr_id);
  while (w.curr.key < key) {
    w.pred_id = w.curr_id;
    w.pred = w.curr;
    w.curr_id = w.curr.next;
    w.curr = engine_.read(txn, w.curr_id);
  }
  return w;
}

bool TxnSet::add_in(Transaction& txn, std::int64_t key) {
  check_key(key);
  const Window w = locate(txn, key);
  if (w.curr.key == key) return false;
  const ObjectId fresh = engine_.allocate_object();
  engine_.write(txn, fresh, Value{key, w.curr_id});
  engine_.write(txn, w.pred_id, Value{w.pred.key, fresh});
  if (!opts_.minimal_writes) engine_.write(txn, w.curr_id, w.curr);
  return true;
}

bool TxnSet::remove_in(Transaction& txn, std::int64_t key) {
  check_key(key);
  const Window w = locate(txn, key);
  if (w.curr.key != key) return false;
  engine_.write(txn, w.pred_id, Value{w.pred.key, w.curr.next});
  if (!opts_.minimal_writes) engine_.write(txn, w.curr_id, w.curr);
  return true;
}

bool TxnSet::contains_in(Transaction& txn, std::int64_t key) {
  check_key(key);
  return locate(txn, key).curr.key == key;
}

SetOpResult TxnSet::add(std::int64_t key) {
  check_key(key);
  return execute_with_retry(engine_, [&](Transaction& t) { return add_in(t, key); }, opts_.retry);
}

SetOpResult TxnSet::remove(std::int64_t key) {
  check_key(key);
  return execute_with_retry(engine_, [&](Transaction& t) { return remove_in(t, key); }, opts_.retry);
}

SetOpResult TxnSet::contains(std::int64_t key) {
  check_key(key);
  return execute_with_retry(engine_, [&](Transaction& t) { return contains_in(t, key); }, opts_.retry);
}

std::vector<std::int64_t> TxnSet::walk(Transaction& txn, bool with_sentinels) {
  std::vector<std::int64_t> keys;
  // A well-formed list visits each object at most once.
  const std::size_t bound = engine_.object_count() + 2;
  Value node = engine_.read(txn, head_);
  if (with_sentinels) keys.push_back(node.key);
  while (node.next != kNullObject) {
    node = engine_.read(txn, node.next);
    if (node.next != kNullObject || with_sentinels) keys.push_back(node.key);
    if (keys.size() > bound) throw std::logic_error("set chain does not terminate");
  }
  return keys;
}

std::vector<std::int64_t> TxnSet::snapshot() {
  std::vector<std::int64_t> keys;
  execute_with_retry(
      engine_,
      [&](Transaction& t) {
        keys = walk(t, false);
        return true;
      },
      opts_.retry);
  return keys;
}

std::vector<std::int64_t> TxnSet::chain() {
  std::vector<std::int64_t> keys;
  execute_with_retry(
      engine_,
      [&](Transaction& t) {
        keys = walk(t, true);
        return true;
      },
      opts_.retry);
  return keys;
}

}  // namespace ccstm
