#pragma once

#include <array>
#include <atomic>
#include <cstddef>
#include <memory>

#include "ccstm/error.hpp"
#include "ccstm/types.hpp"

namespace ccstm {

// Two-level table of per-object slots indexed by dense ObjectIds. Chunks are
// allocated on first touch and never move, so a Slot& stays valid for the
// lifetime of the table and lookups never block.
template <class Slot, std::size_t kChunkBits = 12, std::size_t kDirectorySize = 1u << 14>
class ObjectTable {
  static constexpr std::size_t kChunkSize = std::size_t{1} << kChunkBits;

 public:
  static constexpr std::uint64_t kCapacity = std::uint64_t{kChunkSize} * kDirectorySize;

  ObjectTable() = default;
  ObjectTable(const ObjectTable&) = delete;
  ObjectTable& operator=(const ObjectTable&) = delete;

  ~ObjectTable() {
    for (auto& c : directory_) delete[] c.load(std::memory_order_relaxed);
  }

  // nullptr when the chunk holding `id` was never touched.
  Slot* find(ObjectId id) const noexcept {
    const auto i = raw(id);
    if (i >= kCapacity) return nullptr;
    Slot* chunk = directory_[i >> kChunkBits].load(std::memory_order_acquire);
    return chunk == nullptr ? nullptr : &chunk[i & (kChunkSize - 1)];
  }

  Slot& get_or_create(ObjectId id) {
    const auto i = raw(id);
    if (i >= kCapacity) throw StmError(ErrorCode::kCapacityExceeded, "object id out of table range");
    auto& entry = directory_[i >> kChunkBits];
    Slot* chunk = entry.load(std::memory_order_acquire);
    if (chunk == nullptr) {
      auto fresh = std::make_unique<Slot[]>(kChunkSize);
      if (entry.compare_exchange_strong(chunk, fresh.get(), std::memory_order_acq_rel)) {
        chunk = fresh.release();
      }
    }
    return chunk[i & (kChunkSize - 1)];
  }

  // Visits every slot in every allocated chunk, in id order.
  template <class Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t d = 0; d < kDirectorySize; ++d) {
      Slot* chunk = directory_[d].load(std::memory_order_acquire);
      if (chunk == nullptr) continue;
      for (std::size_t k = 0; k < kChunkSize; ++k) {
        fn(ObjectId{(std::uint64_t{d} << kChunkBits) | k}, chunk[k]);
      }
    }
  }

 private:
  std::array<std::atomic<Slot*>, kDirectorySize> directory_{};
};

}  // namespace ccstm
