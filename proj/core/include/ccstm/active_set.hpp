#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <mutex>
#include <utility>
#include <vector>

#include "ccstm/types.hpp"

namespace ccstm {

// Registry of live transaction stamps, sharded to keep begin/end cheap.
//
// A stamp is drawn from the clock while the registering shard is locked, so
// a concurrent low_watermark() either sees the registration or gets a clock
// reading no larger than the new stamp.
class ActiveSet {
 public:
  static constexpr std::size_t kShards = 32;

  // Returns the fresh stamp and the shard it was registered in.
  std::pair<Timestamp, std::size_t> enter(std::atomic<std::uint64_t>& clock);
  void leave(Timestamp ts, std::size_t shard);

  // Smallest live stamp, or the next stamp to be issued when none is live.
  Timestamp low_watermark(const std::atomic<std::uint64_t>& clock) const;
  std::size_t size() const;

 private:
  struct alignas(64) Shard {
    mutable std::mutex mu;
    std::vector<Timestamp> live;
  };

  std::array<Shard, kShards> shards_;
};

}  // namespace ccstm
