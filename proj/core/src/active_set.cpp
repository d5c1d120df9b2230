#include "ccstm/active_set.hpp"

#include <algorithm>
#include <functional>
#include <thread>

namespace ccstm {

std::pair<Timestamp, std::size_t> ActiveSet::enter(std::atomic<std::uint64_t>& clock) {
  static thread_local const std::size_t hint =
      std::hash<std::thread::id>{}(std::this_thread::get_id()) % kShards;
  Shard& s = shards_[hint];
  std::lock_guard lock(s.mu);
  const Timestamp ts{clock.fetch_add(1)};
  s.live.push_back(ts);
  return {ts, hint};
}

void ActiveSet::leave(Timestamp ts, std::size_t shard) {
  Shard& s = shards_[shard];
  std::lock_guard lock(s.mu);
  auto it = std::find(s.live.begin(), s.live.end(), ts);
  if (it != s.live.end()) {
    *it = s.live.back();
    s.live.pop_back();
  }
}

Timestamp ActiveSet::low_watermark(const std::atomic<std::uint64_t>& clock) const {
  Timestamp low{clock.load()};
  for (const Shard& s : shards_) {
    std::lock_guard lock(s.mu);
    for (Timestamp ts : s.live) low = std::min(low, ts);
  }
  return low;
}

std::size_t ActiveSet::size() const {
  std::size_t n = 0;
  for (const Shard& s : shards_) {
    std::lock_guard lock(s.mu);
    n += s.live.size();
  }
  return n;
}

}  // namespace ccstm
