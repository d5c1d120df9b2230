#include "ccstm/history.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

#include "ccstm/error.hpp"

namespace ccstm {
namespace {

TEST(HistoryRecorder, ReadThenCommit) {
  HistoryRecorder rec;
  const auto a = rec.record(TxnId{1}, Timestamp{1}, EventKind::kRead, ObjectId{3}, Timestamp{0});
  const auto b = rec.record(TxnId{1}, Timestamp{1}, EventKind::kCommit);
  EXPECT_LT(a, b);
  const History h = rec.collect();
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(h[0].kind, EventKind::kRead);
  EXPECT_EQ(h[0].oid, ObjectId{3});
  EXPECT_EQ(h[1].kind, EventKind::kCommit);
  EXPECT_LT(h[0].seq, h[1].seq);
}

TEST(HistoryRecorder, ConcurrentRecordersLoseNothing) {
  HistoryRecorder rec;
  constexpr int kThreads = 8;
  constexpr int kPerThread = 5000;
  std::vector<std::thread> threads;
  for (int t = 0; t < kThreads; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < kPerThread; ++i) {
        rec.record(TxnId{static_cast<std::uint64_t>(t + 1)}, Timestamp{static_cast<std::uint64_t>(t + 1)},
                   EventKind::kRead, ObjectId{static_cast<std::uint64_t>(i)});
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(rec.size(), static_cast<std::size_t>(kThreads * kPerThread));
  const History h = rec.collect();
  ASSERT_EQ(h.size(), static_cast<std::size_t>(kThreads * kPerThread));
  std::set<std::uint64_t> seqs;
  for (const Event& e : h) seqs.insert(e.seq);
  EXPECT_EQ(seqs.size(), h.size());
  EXPECT_TRUE(std::is_sorted(h.begin(), h.end(), [](const Event& a, const Event& b) { return a.seq < b.seq; }));
  // Per-thread program order survives the merge.
  std::vector<std::uint64_t> last(kThreads + 1, 0);
  for (const Event& e : h) {
    const auto t = raw(e.txn);
    if (last[t] != 0) EXPECT_EQ(raw(e.oid), last[t]);
    last[t] = raw(e.oid) + 1;
  }
}

TEST(HistoryRecorder, DisabledRecorderIsANoOp) {
  HistoryRecorder rec;
  rec.set_enabled(false);
  EXPECT_EQ(rec.record(TxnId{1}, Timestamp{1}, EventKind::kCommit), 0u);
  EXPECT_EQ(rec.size(), 0u);
  EXPECT_TRUE(rec.collect().empty());
  rec.set_enabled(true);
  rec.record(TxnId{1}, Timestamp{1}, EventKind::kCommit);
  EXPECT_EQ(rec.size(), 1u);
  rec.clear();
  EXPECT_EQ(rec.size(), 0u);
}

TEST(Trace, FormatIsOneEventPerLine) {
  const History h{
      Event{1, TxnId{4}, Timestamp{4}, EventKind::kRead, ObjectId{2}, Timestamp{0}},
      Event{2, TxnId{4}, Timestamp{4}, EventKind::kWriteIntent, ObjectId{2}, kSeedStamp},
      Event{3, TxnId{4}, Timestamp{4}, EventKind::kCommit, kNullObject, kSeedStamp},
  };
  std::ostringstream out;
  write_trace(out, h);
  EXPECT_EQ(out.str(), "1 4 4 0 2 0\n2 4 4 1 2\n3 4 4 2 0\n");
}

TEST(Trace, RandomHistoriesRoundTrip) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    History h;
    const std::size_t n = rng() % 50;
    for (std::size_t i = 0; i < n; ++i) {
      Event e;
      e.seq = i + 1;
      e.txn = TxnId{1 + rng() % 1000};
      e.ts = e.txn;
      e.kind = static_cast<EventKind>(rng() % 4);
      e.oid = e.kind == EventKind::kRead || e.kind == EventKind::kWriteIntent ? ObjectId{1 + rng() % 100}
                                                                               : kNullObject;
      e.version = e.kind == EventKind::kRead ? Timestamp{rng() % 1000} : kSeedStamp;
      h.push_back(e);
    }
    std::stringstream buf;
    buf << "# generated\n";
    write_trace(buf, h);
    ASSERT_EQ(read_trace(buf), h) << "trial " << trial;
  }
}

TEST(Trace, MalformedInputIsAParseError) {
  for (const char* text : {"1 2 3\n", "1 1 1 0 5\n", "1 1 1 9 0\n", "1 1 1 2 0 0 0\n", "x y z w v\n"}) {
    std::istringstream in(text);
    try {
      read_trace(in);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const StmError& err) {
      EXPECT_EQ(err.code(), ErrorCode::kParse) << text;
    }
  }
}

TEST(Trace, CommentsAndBlankLinesAreSkipped) {
  std::istringstream in("# protocol mvto\n\n1 1 1 2 0\n# end\n");
  const History h = read_trace(in);
  ASSERT_EQ(h.size(), 1u);
  EXPECT_EQ(h[0].kind, EventKind::kCommit);
}

}  // namespace
}  // namespace ccstm
