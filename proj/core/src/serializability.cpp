#include "ccstm/serializability.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "ccstm/error.hpp"

namespace ccstm {

namespace {

struct TxnTrace {
  bool committed = false;
  bool aborted = false;
  std::uint64_t commit_seq = 0;
  std::set<ObjectId> writes;
};

struct ReadEffect {
  std::uint64_t seq;
  TxnId txn;
  Timestamp version;
};

using Adjacency = std::unordered_map<TxnId, std::unordered_set<TxnId>>;

void add_edge(Adjacency& g, TxnId from, TxnId to) {
  if (from != to) g[from].insert(to);
}

std::vector<TxnId> find_cycle(const Adjacency& g, const std::set<TxnId>& nodes) {
  std::map<TxnId, int> state;  // 0 white, 1 on stack, 2 done
  std::vector<TxnId> path;
  std::vector<TxnId> found;
  std::function<bool(TxnId)> dfs = [&](TxnId n) {
    state[n] = 1;
    path.push_back(n);
    if (auto it = g.find(n); it != g.end()) {
      std::vector<TxnId> succ(it->second.begin(), it->second.end());
      std::sort(succ.begin(), succ.end());
      for (TxnId s : succ) {
        if (nodes.count(s) == 0) continue;
        if (state[s] == 1) {
          found.assign(std::find(path.begin(), path.end(), s), path.end());
          return true;
        }
        if (state[s] == 0 && dfs(s)) return true;
      }
    }
    state[n] = 2;
    path.pop_back();
    return false;
  };
  for (TxnId n : nodes) {
    if (state[n] == 0 && dfs(n)) return found;
  }
  return found;
}

Verdict violation(std::vector<TxnId> cycle, std::string detail) {
  Verdict v;
  v.serializable = false;
  v.cycle = std::move(cycle);
  v.detail = std::move(detail);
  return v;
}

}  // namespace

VersionOrder version_order_for(Protocol p) noexcept {
  return p == Protocol::kMvto ? VersionOrder::kTimestampOrder : VersionOrder::kCommitOrder;
}

Verdict check_conflict_serializability(const History& h, VersionOrder order) {
  std::map<TxnId, TxnTrace> txns;
  std::map<ObjectId, std::vector<ReadEffect>> reads;
  for (const Event& e : h) {
    TxnTrace& t = txns[e.txn];
    switch (e.kind) {
      case EventKind::kRead:
        reads[e.oid].push_back(ReadEffect{e.seq, e.txn, e.version});
        break;
      case EventKind::kWriteIntent:
        t.writes.insert(e.oid);
        break;
      case EventKind::kCommit:
        t.committed = true;
        t.commit_seq = e.seq;
        break;
      case EventKind::kAbort:
        t.aborted = true;
        break;
    }
  }
  std::set<TxnId> committed;
  for (const auto& [id, t] : txns) {
    if (t.committed && t.aborted) {
      throw StmError(ErrorCode::kParse, "transaction " + std::to_string(raw(id)) + " both committed and aborted");
    }
    if (!t.committed && !t.aborted) {
      throw StmError(ErrorCode::kIncompleteHistory, "transaction " + std::to_string(raw(id)) + " never terminated");
    }
    if (t.committed) committed.insert(id);
  }

  // Committed writers per object.
  std::map<ObjectId, std::vector<TxnId>> writers;
  for (TxnId id : committed) {
    for (ObjectId oid : txns[id].writes) writers[oid].push_back(id);
  }

  Adjacency g;
  if (order == VersionOrder::kCommitOrder) {
    std::set<ObjectId> objects;
    for (const auto& [oid, rs] : reads) objects.insert(oid);
    for (const auto& [oid, ws] : writers) objects.insert(oid);
    for (ObjectId oid : objects) {
      struct Effect {
        std::uint64_t seq;
        TxnId txn;
        bool write;
        Timestamp version;
      };
      std::vector<Effect> effects;
      if (auto it = reads.find(oid); it != reads.end()) {
        for (const ReadEffect& r : it->second) {
          if (committed.count(r.txn) != 0) effects.push_back({r.seq, r.txn, false, r.version});
        }
      }
      if (auto it = writers.find(oid); it != writers.end()) {
        for (TxnId w : it->second) effects.push_back({txns[w].commit_seq, w, true, {}});
      }
      std::sort(effects.begin(), effects.end(), [](const Effect& a, const Effect& b) { return a.seq < b.seq; });

      std::optional<TxnId> last_writer;
      std::vector<TxnId> readers_since;
      for (const Effect& e : effects) {
        if (!e.write) {
          const Timestamp expected = last_writer ? *last_writer : kSeedStamp;
          if (e.version != expected) {
            return violation({e.txn}, "txn " + std::to_string(raw(e.txn)) + " read version " +
                                          std::to_string(raw(e.version)) + " of object " +
                                          std::to_string(raw(oid)) + " but latest was " +
                                          std::to_string(raw(expected)));
          }
          if (last_writer) add_edge(g, *last_writer, e.txn);
          readers_since.push_back(e.txn);
        } else {
          for (TxnId r : readers_since) add_edge(g, r, e.txn);
          if (last_writer) add_edge(g, *last_writer, e.txn);
          last_writer = e.txn;
          readers_since.clear();
        }
      }
    }
  } else {
    for (auto& [oid, ws] : writers) {
      std::sort(ws.begin(), ws.end());
      for (std::size_t i = 1; i < ws.size(); ++i) add_edge(g, ws[i - 1], ws[i]);
    }
    for (const auto& [oid, rs] : reads) {
      static const std::vector<TxnId> kNone;
      auto wit = writers.find(oid);
      const std::vector<TxnId>& ws = wit == writers.end() ? kNone : wit->second;
      for (const ReadEffect& r : rs) {
        if (committed.count(r.txn) == 0) continue;
        // Index of the first writer after the observed version.
        std::size_t next = 0;
        if (r.version != kSeedStamp) {
          auto pos = std::lower_bound(ws.begin(), ws.end(), r.version);
          if (pos == ws.end() || *pos != r.version) {
            return violation({r.txn}, "txn " + std::to_string(raw(r.txn)) + " read version " +
                                          std::to_string(raw(r.version)) + " of object " +
                                          std::to_string(raw(oid)) + " with no committed writer");
          }
          add_edge(g, r.version, r.txn);
          next = static_cast<std::size_t>(pos - ws.begin()) + 1;
        }
        if (next < ws.size() && ws[next] == r.txn) ++next;
        if (next < ws.size()) add_edge(g, r.txn, ws[next]);
      }
    }
  }

  // Kahn's algorithm, smallest id first, for a deterministic witness.
  std::unordered_map<TxnId, std::size_t> indegree;
  for (TxnId n : committed) indegree[n] = 0;
  for (const auto& [from, succ] : g) {
    for (TxnId to : succ) ++indegree[to];
  }
  std::priority_queue<TxnId, std::vector<TxnId>, std::greater<>> ready;
  for (const auto& [n, d] : indegree) {
    if (d == 0) ready.push(n);
  }
  Verdict v;
  while (!ready.empty()) {
    const TxnId n = ready.top();
    ready.pop();
    v.witness.push_back(n);
    if (auto it = g.find(n); it != g.end()) {
      for (TxnId to : it->second) {
        if (--indegree[to] == 0) ready.push(to);
      }
    }
  }
  if (v.witness.size() == committed.size()) {
    v.serializable = true;
    return v;
  }
  std::set<TxnId> remaining;
  for (const auto& [n, d] : indegree) {
    if (d != 0) remaining.insert(n);
  }
  return violation(find_cycle(g, remaining), "precedence graph has a cycle");
}

bool replay_check(const History& h, std::span<const TxnId> witness, std::span<const SetOpRecord> ops,
                  std::span<const std::int64_t> final_snapshot) {
  std::unordered_set<TxnId> committed;
  for (const Event& e : h) {
    if (e.kind == EventKind::kCommit) committed.insert(e.txn);
  }
  std::unordered_map<TxnId, std::size_t> position;
  for (std::size_t i = 0; i < witness.size(); ++i) {
    if (committed.count(witness[i]) == 0) {
      throw StmError(ErrorCode::kWitnessInvalid, "txn " + std::to_string(raw(witness[i])) + " did not commit");
    }
    if (!position.emplace(witness[i], i).second) {
      throw StmError(ErrorCode::kWitnessInvalid, "txn " + std::to_string(raw(witness[i])) + " repeated");
    }
  }
  std::vector<const SetOpRecord*> ordered;
  ordered.reserve(ops.size());
  for (const SetOpRecord& op : ops) {
    if (position.count(op.txn) == 0) {
      throw StmError(ErrorCode::kWitnessInvalid, "txn " + std::to_string(raw(op.txn)) + " missing from witness");
    }
    ordered.push_back(&op);
  }
  std::sort(ordered.begin(), ordered.end(),
            [&](const SetOpRecord* a, const SetOpRecord* b) { return position[a->txn] < position[b->txn]; });

  std::set<std::int64_t> reference;
  for (const SetOpRecord* op : ordered) {
    bool applied = false;
    switch (op->kind) {
      case SetOpKind::kAdd:
        applied = reference.insert(op->key).second;
        break;
      case SetOpKind::kRemove:
        applied = reference.erase(op->key) != 0;
        break;
      case SetOpKind::kContains:
        applied = reference.count(op->key) != 0;
        break;
    }
    if (applied != op->applied) return false;
  }
  return std::equal(reference.begin(), reference.end(), final_snapshot.begin(), final_snapshot.end());
}

}  // namespace ccstm
