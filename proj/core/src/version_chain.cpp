#include "ccstm/version_chain.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ccstm {

namespace {

bool writer_before(const Version& v, Timestamp ts) { return v.writer_ts < ts; }

}  // namespace

VersionChain::VersionChain(std::vector<Version> versions) : versions_(std::move(versions)) {
  std::sort(versions_.begin(), versions_.end(),
            [](const Version& a, const Version& b) { return a.writer_ts < b.writer_ts; });
  auto dup = std::adjacent_find(versions_.begin(), versions_.end(), [](const Version& a, const Version& b) {
    return a.writer_ts == b.writer_ts;
  });
  if (dup != versions_.end()) throw std::logic_error("duplicate version stamp");
}

const Version* VersionChain::visible_at(Timestamp ts) const noexcept {
  auto it = std::lower_bound(versions_.begin(), versions_.end(), ts, writer_before);
  return it == versions_.begin() ? nullptr : &*std::prev(it);
}

Version* VersionChain::visible_at(Timestamp ts) noexcept {
  auto it = std::lower_bound(versions_.begin(), versions_.end(), ts, writer_before);
  return it == versions_.begin() ? nullptr : &*std::prev(it);
}

void VersionChain::insert(const Version& v) {
  auto it = std::lower_bound(versions_.begin(), versions_.end(), v.writer_ts, writer_before);
  if (it != versions_.end() && it->writer_ts == v.writer_ts) {
    throw std::logic_error("version " + std::to_string(raw(v.writer_ts)) + " already present");
  }
  versions_.insert(it, v);
}

std::size_t VersionChain::prune(Timestamp low_watermark) {
  auto it = std::lower_bound(versions_.begin(), versions_.end(), low_watermark, writer_before);
  if (it == versions_.begin()) return 0;
  // it-1 is the newest version visible at low_watermark; keep it.
  const auto drop = static_cast<std::size_t>(std::distance(versions_.begin(), it) - 1);
  versions_.erase(versions_.begin(), std::prev(it));
  return drop;
}

}  // namespace ccstm
