#include "ccstm/history.hpp"

#include <algorithm>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>

#include "ccstm/error.hpp"

namespace ccstm {

std::uint64_t HistoryRecorder::record(TxnId txn, Timestamp ts, EventKind kind, ObjectId oid,
                                      Timestamp version) {
  if (!enabled()) return 0;
  const std::uint64_t seq = next_seq_.fetch_add(1, std::memory_order_relaxed);
  static thread_local const std::size_t shard_hint =
      std::hash<std::thread::id>{}(std::this_thread::get_id());
  Shard& shard = shards_[shard_hint % kShards];
  std::lock_guard lock(shard.mu);
  shard.events.push_back(Event{seq, txn, ts, kind, oid, version});
  return seq;
}

std::size_t HistoryRecorder::size() const {
  std::size_t n = 0;
  for (const auto& s : shards_) {
    std::lock_guard lock(s.mu);
    n += s.events.size();
  }
  return n;
}

History HistoryRecorder::collect() const {
  History out;
  for (const auto& s : shards_) {
    std::lock_guard lock(s.mu);
    out.insert(out.end(), s.events.begin(), s.events.end());
  }
  std::sort(out.begin(), out.end(), [](const Event& a, const Event& b) { return a.seq < b.seq; });
  return out;
}

void HistoryRecorder::clear() {
  for (auto& s : shards_) {
    std::lock_guard lock(s.mu);
    s.events.clear();
  }
}

void write_trace(std::ostream& out, const History& h) {
  for (const Event& e : h) {
    out << e.seq << ' ' << raw(e.txn) << ' ' << raw(e.ts) << ' ' << int(raw(e.kind)) << ' '
        << raw(e.oid);
    if (e.kind == EventKind::kRead) out << ' ' << raw(e.version);
    out << '\n';
  }
  if (!out) throw StmError(ErrorCode::kIo, "failed writing trace");
}

History read_trace(std::istream& in) {
  History h;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.front() == '#') continue;
    std::istringstream fields(line);
    std::uint64_t seq, txn, ts, kind, oid, version = 0;
    if (!(fields >> seq >> txn >> ts >> kind >> oid) || kind > 3) {
      throw StmError(ErrorCode::kParse, "bad trace line " + std::to_string(lineno));
    }
    const auto k = static_cast<EventKind>(kind);
    if (k == EventKind::kRead && !(fields >> version)) {
      throw StmError(ErrorCode::kParse, "read without version at line " + std::to_string(lineno));
    }
    std::string rest;
    if (fields >> rest) {
      throw StmError(ErrorCode::kParse, "trailing fields at line " + std::to_string(lineno));
    }
    h.push_back(Event{seq, TxnId{txn}, Timestamp{ts}, k, ObjectId{oid}, Timestamp{version}});
  }
  std::stable_sort(h.begin(), h.end(), [](const Event& a, const Event& b) { return a.seq < b.seq; });
  return h;
}

}  // namespace ccstm
