#include "ccstm/bench.hpp"

#include <pthread.h>
#include <sched.h>
#include <time.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <latch>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "ccstm/engine.hpp"
#include "ccstm/error.hpp"

namespace ccstm::bench {

namespace {

double clock_ms(clockid_t id) {
  timespec ts{};
  clock_gettime(id, &ts);
  return static_cast<double>(ts.tv_sec) * 1e3 + static_cast<double>(ts.tv_nsec) / 1e6;
}

void pin_to_cpu(std::size_t index) {
  const unsigned ncpu = std::max(1u, std::thread::hardware_concurrency());
  cpu_set_t set;
  CPU_ZERO(&set);
  CPU_SET(index % ncpu, &set);
  pthread_setaffinity_np(pthread_self(), sizeof(set), &set);
}

struct WorkerStats {
  double cpu_ms = 0;
  std::uint64_t committed = 0;
  std::uint64_t aborted = 0;
  std::array<std::uint64_t, 3> per_kind{};
  std::array<std::uint64_t, 3> applied{};
  std::vector<SetOpRecord> ops;
};

SetOpResult apply(TxnSet& set, const Op& op) {
  switch (op.kind) {
    case SetOpKind::kAdd:
      return set.add(op.key);
    case SetOpKind::kRemove:
      return set.remove(op.key);
    case SetOpKind::kContains:
      break;
  }
  return set.contains(op.key);
}

}  // namespace

void BenchConfig::validate() const {
  auto fail = [](const std::string& what) { throw StmError(ErrorCode::kConfigInvalid, what); };
  if (threads == 0) fail("threads must be >= 1");
  if (!(update_rate >= 0.0 && update_rate <= 1.0)) fail("update_rate must lie in [0, 1]");
  if (!(initial_fill >= 0.0 && initial_fill <= 1.0)) fail("initial_fill must lie in [0, 1]");
  if (key_lo > key_hi) fail("key range is empty");
  if (key_lo == TxnSet::kMinKey || key_hi == TxnSet::kMaxKey) fail("key range overlaps a sentinel");
  if (duration_s && !(*duration_s > 0.0)) fail("duration must be positive");
}

std::mt19937_64 worker_rng(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{seed, static_cast<std::uint64_t>(index), std::uint64_t{0x5eed}};
  return std::mt19937_64(seq);
}

Op generate_op(std::mt19937_64& rng, const BenchConfig& cfg) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const std::int64_t key = std::uniform_int_distribution<std::int64_t>(cfg.key_lo, cfg.key_hi)(rng);
  if (u < cfg.update_rate / 2) return Op{SetOpKind::kAdd, key};
  if (u < cfg.update_rate) return Op{SetOpKind::kRemove, key};
  return Op{SetOpKind::kContains, key};
}

BenchReport run_benchmark(const BenchConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  HistoryRecorder recorder;
  EngineConfig ecfg;
  ecfg.protocol = cfg.protocol;
  ecfg.gc_period = cfg.gc_period;
  ecfg.recorder = cfg.record_history ? &recorder : nullptr;
  Engine engine(ecfg);
  TxnSet set(engine, cfg.set_options);

  std::vector<SetOpRecord> fill_ops;
  {
    std::vector<std::int64_t> keys(cfg.key_count());
    std::iota(keys.begin(), keys.end(), cfg.key_lo);
    std::mt19937_64 rng(cfg.seed);
    std::shuffle(keys.begin(), keys.end(), rng);
    const auto n = static_cast<std::size_t>(std::llround(cfg.initial_fill * static_cast<double>(keys.size())));
    for (std::size_t i = 0; i < n; ++i) {
      const SetOpResult r = set.add(keys[i]);
      if (cfg.record_history) fill_ops.push_back({r.committed_txn, SetOpKind::kAdd, keys[i], r.applied});
    }
  }

  std::vector<WorkerStats> stats(cfg.threads);
  std::vector<std::exception_ptr> errors(cfg.threads);
  std::atomic<bool> stop{false};
  std::latch start(1);
  std::vector<std::thread> workers;
  workers.reserve(cfg.threads);
  for (std::size_t w = 0; w < cfg.threads; ++w) {
    workers.emplace_back([&, w] {
      if (cfg.pin_threads) pin_to_cpu(w);
      WorkerStats& st = stats[w];
      auto rng = worker_rng(cfg.seed, w);
      start.wait();
      const double cpu0 = clock_ms(CLOCK_THREAD_CPUTIME_ID);
      try {
        for (std::size_t i = 0;; ++i) {
          if (cfg.duration_s ? stop.load(std::memory_order_relaxed) : i >= cfg.ops_per_thread) break;
          const Op op = generate_op(rng, cfg);
          const SetOpResult r = apply(set, op);
          const auto k = static_cast<std::size_t>(op.kind);
          ++st.committed;
          st.aborted += r.retries;
          ++st.per_kind[k];
          st.applied[k] += r.applied ? 1 : 0;
          if (cfg.record_history) st.ops.push_back({r.committed_txn, op.kind, op.key, r.applied});
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
      st.cpu_ms = clock_ms(CLOCK_THREAD_CPUTIME_ID) - cpu0;
    });
  }

  const double wall0 = clock_ms(CLOCK_MONOTONIC_RAW);
  const double proc0 = clock_ms(CLOCK_PROCESS_CPUTIME_ID);
  start.count_down();
  if (cfg.duration_s) {
    std::this_thread::sleep_for(std::chrono::duration<double>(*cfg.duration_s));
    stop.store(true);
  }
  for (auto& t : workers) t.join();
  const double wall1 = clock_ms(CLOCK_MONOTONIC_RAW);
  const double proc1 = clock_ms(CLOCK_PROCESS_CPUTIME_ID);
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  BenchReport rep;
  rep.config = cfg;
  rep.wall_ms = wall1 - wall0;
  rep.proc_cpu_ms = proc1 - proc0;
  rep.thread_cpu_min_ms = stats.front().cpu_ms;
  rep.thread_cpu_max_ms = stats.front().cpu_ms;
  double cpu_sum = 0;
  for (const WorkerStats& st : stats) {
    cpu_sum += st.cpu_ms;
    rep.thread_cpu_min_ms = std::min(rep.thread_cpu_min_ms, st.cpu_ms);
    rep.thread_cpu_max_ms = std::max(rep.thread_cpu_max_ms, st.cpu_ms);
    rep.committed += st.committed;
    rep.aborted += st.aborted;
    for (std::size_t k = 0; k < 3; ++k) {
      rep.per_kind[k] += st.per_kind[k];
      rep.applied_per_kind[k] += st.applied[k];
    }
  }
  rep.thread_cpu_mean_ms = cpu_sum / static_cast<double>(stats.size());
  rep.abort_rate = rep.attempts() == 0 ? 0.0
                                       : static_cast<double>(rep.aborted) / static_cast<double>(rep.attempts());
  rep.throughput_ops_s = rep.wall_ms > 0 ? static_cast<double>(rep.committed) / (rep.wall_ms / 1e3) : 0.0;
  rep.final_snapshot = set.snapshot();

  if (cfg.record_history) {
    std::vector<SetOpRecord> ops = std::move(fill_ops);
    for (WorkerStats& st : stats) ops.insert(ops.end(), st.ops.begin(), st.ops.end());
    History h = recorder.collect();
    rep.verdict = check_conflict_serializability(h, version_order_for(cfg.protocol));
    if (rep.verdict->serializable) {
      rep.replay_ok = replay_check(h, rep.verdict->witness, ops, rep.final_snapshot);
    } else {
      rep.replay_ok = false;
    }
    if (opts.keep_history) {
      rep.history = std::move(h);
      rep.ops = std::move(ops);
    }
  }
  return rep;
}

void write_csv(std::ostream& out, std::span<const BenchReport> reports) {
  out << kCsvHeader << '\n';
  for (const BenchReport& r : reports) {
    const BenchConfig& c = r.config;
    out.unsetf(std::ios_base::floatfield);
    out << to_string(c.protocol) << ',' << c.threads << ',' << std::setprecision(6) << c.update_rate << ','
        << c.key_lo << ':' << c.key_hi << ',' << c.seed << ',' << std::fixed << std::setprecision(3) << r.wall_ms
        << ',' << r.proc_cpu_ms << ',' << r.thread_cpu_mean_ms << ',' << r.thread_cpu_min_ms << ','
        << r.thread_cpu_max_ms << ',' << r.committed << ',' << r.aborted << ',' << std::setprecision(6)
        << r.abort_rate << ',' << std::setprecision(1) << r.throughput_ops_s << '\n';
    out.unsetf(std::ios_base::floatfield);
  }
}

std::string plot_script(const std::string& csv_path, const std::string& image_path) {
  std::ostringstream py;
  py << R"PY(#!/usr/bin/env python3
# Time vs. thread count for each protocol under the three clock measures.
import csv
import sys
from collections import defaultdict

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

CSV_PATH = )PY"
     << std::quoted(csv_path) << R"PY(
IMAGE_PATH = )PY"
     << std::quoted(image_path) << R"PY(
MEASURES = [("wall_ms", "real time"), ("proc_cpu_ms", "process CPU time"),
            ("thread_cpu_mean_ms", "per-thread CPU time")]

path = sys.argv[1] if len(sys.argv) > 1 else CSV_PATH
rows = defaultdict(lambda: defaultdict(list))
with open(path, newline="") as f:
    for row in csv.DictReader(f):
        threads = int(row["threads"])
        for column, _ in MEASURES:
            rows[row["protocol"]][(column, threads)].append(float(row[column]))

fig, axes = plt.subplots(1, len(MEASURES), figsize=(15, 4))
for ax, (column, title) in zip(axes, MEASURES):
    for protocol, series in sorted(rows.items()):
        xs = sorted({t for (c, t) in series if c == column})
        ys = [sorted(series[(column, t)])[len(series[(column, t)]) // 2] for t in xs]
        ax.plot(xs, ys, marker="o", label=protocol.upper())
    ax.set_title(title)
    ax.set_xlabel("threads")
    ax.set_ylabel("time (ms)")
    ax.grid(True, alpha=0.3)
    ax.legend()
fig.tight_layout()
fig.savefig(sys.argv[2] if len(sys.argv) > 2 else IMAGE_PATH)
)PY";
  return py.str();
}

void emit_report(std::span<const BenchReport> reports, const std::string& csv_path,
                 const std::optional<std::string>& plot_path) {
  if (reports.empty()) throw StmError(ErrorCode::kConfigInvalid, "no reports to emit");
  {
    std::ofstream csv(csv_path);
    if (!csv) throw StmError(ErrorCode::kIo, "cannot open " + csv_path);
    write_csv(csv, reports);
    if (!csv) throw StmError(ErrorCode::kIo, "failed writing " + csv_path);
  }
  if (plot_path) {
    std::ofstream py(*plot_path);
    if (!py) throw StmError(ErrorCode::kIo, "cannot open " + *plot_path);
    std::string image = *plot_path;
    if (auto dot = image.rfind('.'); dot != std::string::npos) image.erase(dot);
    py << plot_script(csv_path, image + ".png");
    if (!py) throw StmError(ErrorCode::kIo, "failed writing " + *plot_path);
  }
}

}  // namespace ccstm::bench
