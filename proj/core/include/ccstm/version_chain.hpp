#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ccstm/types.hpp"

namespace ccstm {

struct Version {
  Timestamp writer_ts = kSeedStamp;
  Value value;
  // Largest stamp of any transaction that read this version; kSeedStamp if unread.
  Timestamp max_reader_ts = kSeedStamp;

  friend bool operator==(const Version&, const Version&) = default;
};

// Versions of one object, strictly ascending by writer_ts. Not synchronized;
// the owner guards it.
class VersionChain {
 public:
  VersionChain() = default;
  explicit VersionChain(std::vector<Version> versions);

  // Version with the largest writer_ts strictly below `ts`, or nullptr.
  const Version* visible_at(Timestamp ts) const noexcept;
  Version* visible_at(Timestamp ts) noexcept;

  // Inserts in writer_ts order. Throws std::logic_error on a duplicate stamp.
  void insert(const Version& v);

  // Drops every version older than the newest one with writer_ts < low_watermark.
  // Never empties the chain. Returns the number of versions dropped.
  std::size_t prune(Timestamp low_watermark);

  std::span<const Version> versions() const noexcept { return versions_; }
  std::size_t size() const noexcept { return versions_.size(); }
  bool empty() const noexcept { return versions_.empty(); }
  const Version& latest() const { return versions_.back(); }

 private:
  std::vector<Version> versions_;
};

}  // namespace ccstm
