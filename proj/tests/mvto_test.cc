#include "ccstm/mvto.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <thread>
#include <vector>

#include "ccstm/engine.hpp"
#include "ccstm/serializability.hpp"
#include "ccstm/version_chain.hpp"
#include "test_support.hpp"

namespace ccstm {
namespace {

using testing::val;

std::vector<std::uint64_t> stamps_of(const VersionChain& c) {
  std::vector<std::uint64_t> out;
  for (const Version& v : c.versions()) out.push_back(raw(v.writer_ts));
  return out;
}

VersionChain chain_of(std::initializer_list<std::uint64_t> stamps) {
  std::vector<Version> vs;
  for (std::uint64_t s : stamps) vs.push_back(Version{Timestamp{s}, val(static_cast<std::int64_t>(s) * 10), kSeedStamp});
  return VersionChain(std::move(vs));
}

// Largest writer stamp strictly below ts, by linear scan.
std::optional<std::uint64_t> scan_visible(const std::vector<std::uint64_t>& stamps, std::uint64_t ts) {
  std::optional<std::uint64_t> best;
  for (std::uint64_t s : stamps) {
    if (s < ts && (!best || s > *best)) best = s;
  }
  return best;
}

TEST(VersionChain, SelectsLargestStampBelowReader) {
  const VersionChain c = chain_of({0, 3, 7});
  ASSERT_NE(c.visible_at(Timestamp{5}), nullptr);
  EXPECT_EQ(c.visible_at(Timestamp{5})->writer_ts, Timestamp{3});
  EXPECT_EQ(c.visible_at(Timestamp{8})->writer_ts, Timestamp{7});
  EXPECT_EQ(c.visible_at(Timestamp{3})->writer_ts, Timestamp{0});
  EXPECT_EQ(c.visible_at(Timestamp{0}), nullptr);
}

TEST(VersionChain, RandomSelectionMatchesLinearScan) {
  std::mt19937_64 rng(20240601);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    std::set<std::uint64_t> pool;
    while (pool.size() < n) pool.insert(rng() % 64);
    std::vector<std::uint64_t> stamps(pool.begin(), pool.end());
    std::shuffle(stamps.begin(), stamps.end(), rng);
    std::vector<Version> vs;
    for (std::uint64_t s : stamps) vs.push_back(Version{Timestamp{s}, val(static_cast<std::int64_t>(s)), kSeedStamp});
    const VersionChain c(vs);
    const std::uint64_t ts = rng() % 70;
    const Version* got = c.visible_at(Timestamp{ts});
    const auto want = scan_visible(stamps, ts);
    ASSERT_EQ(got != nullptr, want.has_value()) << "trial " << trial;
    if (got != nullptr) ASSERT_EQ(raw(got->writer_ts), *want) << "trial " << trial;
  }
}

TEST(VersionChain, InsertKeepsOrderAndRejectsDuplicates) {
  std::mt19937_64 rng(7);
  VersionChain c;
  std::set<std::uint64_t> ref;
  for (int i = 0; i < 500; ++i) {
    const std::uint64_t s = rng() % 200;
    if (ref.count(s) != 0) {
      EXPECT_THROW(c.insert(Version{Timestamp{s}, {}, kSeedStamp}), std::logic_error);
      continue;
    }
    c.insert(Version{Timestamp{s}, {}, kSeedStamp});
    ref.insert(s);
  }
  EXPECT_EQ(stamps_of(c), std::vector<std::uint64_t>(ref.begin(), ref.end()));
  EXPECT_THROW(chain_of({1, 1}), std::logic_error);
}

TEST(VersionChain, PruneKeepsNewestVisibleAndLater) {
  VersionChain c = chain_of({0, 3, 7});
  EXPECT_EQ(c.prune(Timestamp{5}), 1u);
  EXPECT_EQ(stamps_of(c), (std::vector<std::uint64_t>{3, 7}));

  VersionChain single = chain_of({0});
  for (std::uint64_t w : {0, 1, 100}) {
    EXPECT_EQ(single.prune(Timestamp{w}), 0u);
    EXPECT_EQ(stamps_of(single), (std::vector<std::uint64_t>{0}));
  }
}

TEST(VersionChain, RandomPruneMatchesDefinition) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 2000; ++trial) {
    std::set<std::uint64_t> pool;
    const std::size_t n = 1 + rng() % 8;
    while (pool.size() < n) pool.insert(rng() % 32);
    std::vector<Version> vs;
    for (std::uint64_t s : pool) vs.push_back(Version{Timestamp{s}, {}, kSeedStamp});
    VersionChain c(vs);
    const std::uint64_t w = rng() % 40;
    const std::vector<std::uint64_t> stamps(pool.begin(), pool.end());
    const auto keep_from = scan_visible(stamps, w);
    std::vector<std::uint64_t> want;
    for (std::uint64_t s : stamps) {
      if (!keep_from || s >= *keep_from) want.push_back(s);
    }
    const std::size_t dropped = c.prune(Timestamp{w});
    ASSERT_EQ(stamps_of(c), want);
    ASSERT_EQ(dropped, stamps.size() - want.size());
    ASSERT_FALSE(c.empty());
  }
}

struct Rig {
  explicit Rig(std::uint64_t next_ts, std::size_t gc_period = 0)
      : engine(EngineConfig{Protocol::kMvto, gc_period, nullptr}) {
    for (std::uint64_t i = 1; i < next_ts; ++i) {
      Transaction t = engine.begin();
      engine.abort(t);
    }
  }
  MvtoBackend& mvto() { return dynamic_cast<MvtoBackend&>(engine.backend()); }

  Engine engine;
};

const ObjectId kX{1};

TEST(MvtoRead, ReadsVersionVisibleAtStampAndMarksIt) {
  Rig rig(5);
  rig.mvto().install(kX, chain_of({0, 3, 7}));
  Transaction t = rig.engine.begin();
  EXPECT_EQ(rig.engine.read(t, kX).key, 30);
  const VersionChain c = *rig.mvto().chain(kX);
  EXPECT_GE(c.versions()[1].max_reader_ts, Timestamp{5});
  EXPECT_EQ(c.versions()[0].max_reader_ts, kSeedStamp);
  EXPECT_EQ(c.versions()[2].max_reader_ts, kSeedStamp);
}

TEST(MvtoRead, LateReaderSeesNewestVersion) {
  Rig rig(8);
  rig.mvto().install(kX, chain_of({0, 3, 7}));
  Transaction t = rig.engine.begin();
  EXPECT_EQ(rig.engine.read(t, kX).key, 70);
}

TEST(MvtoRead, NoVisibleVersionLeavesTransactionLive) {
  Rig rig(2);
  rig.mvto().install(kX, chain_of({3}));
  Transaction t = rig.engine.begin();
  try {
    rig.engine.read(t, kX);
    FAIL() << "expected NoVisibleVersion";
  } catch (const StmError& err) {
    EXPECT_EQ(err.code(), ErrorCode::kNoVisibleVersion);
  }
  EXPECT_TRUE(t.live());
}

TEST(MvtoCommit, YoungerReaderOfVisibleVersionForcesAbort) {
  Rig rig(5);
  rig.mvto().install(kX, VersionChain({Version{Timestamp{0}, val(0), kSeedStamp},
                                       Version{Timestamp{2}, val(20), Timestamp{9}}}));
  Transaction t = rig.engine.begin();
  ASSERT_EQ(t.ts(), Timestamp{5});
  rig.engine.write(t, kX, val(55));
  const CommitResult res = rig.engine.commit(t);
  ASSERT_FALSE(res);
  EXPECT_EQ(res.reason(), AbortReason::kObsoleteVersion);
  EXPECT_EQ(stamps_of(*rig.mvto().chain(kX)), (std::vector<std::uint64_t>{0, 2}));
}

TEST(MvtoCommit, OlderReadersAllowNewVersionInOrder) {
  Rig rig(5);
  rig.mvto().install(kX, VersionChain({Version{Timestamp{0}, val(0), kSeedStamp},
                                       Version{Timestamp{2}, val(20), Timestamp{4}},
                                       Version{Timestamp{8}, val(80), kSeedStamp}}));
  Transaction t = rig.engine.begin();
  rig.engine.write(t, kX, val(55));
  ASSERT_TRUE(rig.engine.commit(t));
  EXPECT_EQ(stamps_of(*rig.mvto().chain(kX)), (std::vector<std::uint64_t>{0, 2, 5, 8}));
}

// Rule 3a over every small chain configuration: stamps drawn from {0..4}
// without the committer's own stamp, each version read by nobody or by some
// stamp in 1..5 above its writer.
TEST(MvtoCommit, ObsoleteRuleMatchesOracleExhaustively) {
  int cases = 0;
  for (std::uint64_t ts = 1; ts <= 4; ++ts) {
    for (unsigned mask = 0; mask < 16; ++mask) {
      std::vector<std::uint64_t> stamps{0};
      for (std::uint64_t s = 1; s <= 4; ++s) {
        if ((mask & (1u << (s - 1))) != 0 && s != ts) stamps.push_back(s);
      }
      const auto visible = *scan_visible(stamps, ts);
      for (std::uint64_t reader = 0; reader <= 5; ++reader) {
        if (reader != 0 && reader <= visible) continue;
        std::vector<Version> vs;
        for (std::uint64_t s : stamps) {
          vs.push_back(Version{Timestamp{s}, val(0), s == visible ? Timestamp{reader} : kSeedStamp});
        }
        Rig rig(ts);
        rig.mvto().install(kX, VersionChain(vs));
        Transaction t = rig.engine.begin();
        rig.engine.write(t, kX, val(1));
        const bool expect_abort = reader > ts;
        const CommitResult res = rig.engine.commit(t);
        ASSERT_EQ(!res, expect_abort) << "ts=" << ts << " mask=" << mask << " reader=" << reader;
        std::vector<std::uint64_t> want = stamps;
        if (!expect_abort) {
          want.push_back(ts);
          std::sort(want.begin(), want.end());
        }
        ASSERT_EQ(stamps_of(*rig.mvto().chain(kX)), want);
        ++cases;
      }
    }
  }
  EXPECT_GT(cases, 100);
}

// Re-derives every read selection and commit decision from the event log
// alone, starting from the seeded chains.
struct ReplayOracle {
  struct Ver {
    std::uint64_t max_reader = 0;
  };
  std::map<ObjectId, std::map<std::uint64_t, Ver>> chains;
  std::map<TxnId, std::vector<ObjectId>> writes;

  std::map<std::uint64_t, Ver>::iterator visible(ObjectId oid, std::uint64_t ts) {
    auto& c = chains.at(oid);
    auto it = c.lower_bound(ts);
    return it == c.begin() ? c.end() : std::prev(it);
  }

  bool rule_rejects(TxnId txn) {
    const std::uint64_t ts = raw(txn);
    for (ObjectId oid : writes[txn]) {
      auto v = visible(oid, ts);
      if (v != chains.at(oid).end() && v->second.max_reader > ts) return true;
    }
    return false;
  }
};

enum class Outcome { kCommitted, kObsolete };

void run_random_schedule(std::uint64_t seed, std::size_t gc_period) {
  HistoryRecorder rec;
  Engine e(EngineConfig{Protocol::kMvto, gc_period, &rec});
  constexpr int kObjects = 5;
  std::vector<ObjectId> objs;
  for (int i = 0; i < kObjects; ++i) objs.push_back(e.seed_new(val(0)));

  std::mutex mu;
  std::map<TxnId, Outcome> outcomes;
  std::vector<std::thread> threads;
  for (int w = 0; w < 4; ++w) {
    threads.emplace_back([&, w] {
      std::mt19937_64 rng(seed * 31 + static_cast<std::uint64_t>(w));
      for (int i = 0; i < 250; ++i) {
        Transaction t = e.begin();
        const int ops = 1 + static_cast<int>(rng() % 4);
        for (int k = 0; k < ops; ++k) {
          const ObjectId o = objs[rng() % kObjects];
          if (rng() % 3 == 0) {
            e.write(t, o, val(static_cast<std::int64_t>(raw(t.ts()))));
          } else {
            e.read(t, o);
          }
          if (rng() % 4 == 0) std::this_thread::yield();
        }
        const CommitResult res = e.commit(t);
        std::lock_guard lock(mu);
        outcomes[t.id()] = res ? Outcome::kCommitted : Outcome::kObsolete;
        if (!res) EXPECT_EQ(res.reason(), AbortReason::kObsoleteVersion);
      }
    });
  }
  for (auto& t : threads) t.join();

  const History h = rec.collect();
  ReplayOracle oracle;
  for (ObjectId o : objs) oracle.chains[o][0] = {};
  for (const Event& ev : h) {
    if (ev.kind == EventKind::kWriteIntent) oracle.writes[ev.txn].push_back(ev.oid);
  }
  std::size_t commits = 0;
  std::size_t aborts = 0;
  for (const Event& ev : h) {
    switch (ev.kind) {
      case EventKind::kRead: {
        auto v = oracle.visible(ev.oid, raw(ev.ts));
        ASSERT_NE(v, oracle.chains.at(ev.oid).end());
        ASSERT_EQ(v->first, raw(ev.version)) << "seq " << ev.seq;
        v->second.max_reader = std::max(v->second.max_reader, raw(ev.ts));
        break;
      }
      case EventKind::kCommit:
        ASSERT_EQ(outcomes.at(ev.txn), Outcome::kCommitted);
        ASSERT_FALSE(oracle.rule_rejects(ev.txn)) << "txn " << ev.txn;
        for (ObjectId o : oracle.writes[ev.txn]) oracle.chains.at(o)[raw(ev.ts)] = {};
        ++commits;
        break;
      case EventKind::kAbort:
        ASSERT_EQ(outcomes.at(ev.txn), Outcome::kObsolete);
        ASSERT_TRUE(oracle.rule_rejects(ev.txn)) << "txn " << ev.txn;
        ++aborts;
        break;
      case EventKind::kWriteIntent:
        break;
    }
  }
  EXPECT_EQ(commits + aborts, outcomes.size());

  // Chains stay strictly sorted, and the newest version matches the replay.
  for (ObjectId o : objs) {
    const VersionChain c = *dynamic_cast<MvtoBackend&>(e.backend()).chain(o);
    const auto s = stamps_of(c);
    EXPECT_TRUE(std::adjacent_find(s.begin(), s.end(), std::greater_equal<>()) == s.end());
    EXPECT_EQ(s.back(), oracle.chains.at(o).rbegin()->first);
  }
  const Verdict v = check_conflict_serializability(h, VersionOrder::kTimestampOrder);
  EXPECT_TRUE(v.serializable) << v.detail;
}

TEST(MvtoProperties, CommitDecisionsMatchEventLogReplay) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    SCOPED_TRACE(seed);
    run_random_schedule(seed, 0);
    run_random_schedule(seed, 8);
  }
}

TEST(MvtoProperties, ReadOnlyTransactionsNeverAbort) {
  Engine e(EngineConfig{Protocol::kMvto, 16, nullptr});
  std::vector<ObjectId> objs;
  for (int i = 0; i < 3; ++i) objs.push_back(e.seed_new(val(0)));
  std::atomic<bool> stop{false};
  std::thread writer([&] {
    std::mt19937_64 rng(5);
    while (!stop.load()) {
      Transaction t = e.begin();
      e.read(t, objs[rng() % 3]);
      e.write(t, objs[rng() % 3], val(static_cast<std::int64_t>(rng() % 1000)));
      e.commit(t);
    }
  });
  int aborted = 0;
  for (int i = 0; i < 3000; ++i) {
    Transaction t = e.begin();
    for (ObjectId o : objs) e.read(t, o);
    if (!e.commit(t)) ++aborted;
  }
  stop = true;
  writer.join();
  EXPECT_EQ(aborted, 0);
}

// Drives the same single-threaded interleaving through two engines, one
// collecting garbage after every step, and compares every observable.
std::vector<std::int64_t> scripted_trace(std::uint64_t seed, bool gc) {
  Engine e(EngineConfig{Protocol::kMvto, gc ? 1u : 0u, nullptr});
  std::vector<ObjectId> objs;
  for (int i = 0; i < 3; ++i) objs.push_back(e.seed_new(val(i)));
  std::mt19937_64 rng(seed);
  std::vector<Transaction> open;
  std::vector<std::int64_t> trace;
  for (int step = 0; step < 400; ++step) {
    const unsigned action = rng() % 10;
    if (open.empty() || (action < 2 && open.size() < 5)) {
      open.push_back(e.begin());
    } else {
      const std::size_t i = rng() % open.size();
      Transaction& t = open[i];
      const ObjectId o = objs[rng() % objs.size()];
      if (action < 5) {
        trace.push_back(e.read(t, o).key);
      } else if (action < 8) {
        e.write(t, o, val(step));
      } else {
        trace.push_back(e.commit(t) ? 1 : -1);
        open.erase(open.begin() + static_cast<std::ptrdiff_t>(i));
      }
    }
    if (gc) e.collect_garbage();
  }
  return trace;
}

TEST(MvtoProperties, GarbageCollectionDoesNotChangeOutcomes) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    ASSERT_EQ(scripted_trace(seed, false), scripted_trace(seed, true)) << "seed " << seed;
  }
}

TEST(MvtoGc, PeriodicSweepBoundsChains) {
  Engine e(EngineConfig{Protocol::kMvto, 4, nullptr});
  const ObjectId x = e.seed_new(val(0));
  for (int i = 1; i <= 8; ++i) {
    Transaction t = e.begin();
    e.write(t, x, val(i));
    ASSERT_TRUE(e.commit(t));
  }
  auto& m = dynamic_cast<MvtoBackend&>(e.backend());
  EXPECT_EQ(m.chain(x)->size(), 1u);
  EXPECT_EQ(m.chain(x)->latest().value.key, 8);
}

TEST(MvtoGc, LiveReaderPinsItsVersion) {
  Engine e(EngineConfig{Protocol::kMvto, 0, nullptr});
  auto& m = dynamic_cast<MvtoBackend&>(e.backend());
  const ObjectId x = e.seed_new(val(0));
  Transaction reader = e.begin();  // ts 1
  for (int i = 1; i <= 3; ++i) {
    Transaction t = e.begin();
    e.write(t, x, val(i));
    ASSERT_TRUE(e.commit(t));
  }
  EXPECT_EQ(m.version_count(), 4u);
  EXPECT_EQ(e.low_watermark(), Timestamp{1});
  EXPECT_EQ(e.collect_garbage(), 0u);
  EXPECT_EQ(e.read(reader, x).key, 0);
  e.commit(reader);
  EXPECT_EQ(e.collect_garbage(), 3u);
  EXPECT_EQ(m.version_count(), 1u);
}

}  // namespace
}  // namespace ccstm
