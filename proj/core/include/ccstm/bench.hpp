#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ccstm/serializability.hpp"
#include "ccstm/txn_set.hpp"
#include "ccstm/types.hpp"

namespace ccstm::bench {

struct BenchConfig {
  Protocol protocol = Protocol::kBto;
  std::size_t threads = 1;
  // Fixed op count per worker, unless duration_s is set.
  std::size_t ops_per_thread = 1000;
  std::optional<double> duration_s;
  double update_rate = 0.7;
  std::int64_t key_lo = 1;  // inclusive
  std::int64_t key_hi = 1024;  // inclusive
  double initial_fill = 0.5;
  std::uint64_t seed = 1;
  bool record_history = false;
  std::size_t gc_period = 256;
  bool pin_threads = false;
  SetOptions set_options;

  // Throws StmError(kConfigInvalid).
  void validate() const;
  std::size_t key_count() const noexcept { return static_cast<std::size_t>(key_hi - key_lo + 1); }
};

struct Op {
  SetOpKind kind;
  std::int64_t key;
};

// With probability update_rate an update, split evenly between add and
// remove; otherwise a lookup. Keys are uniform over [key_lo, key_hi].
Op generate_op(std::mt19937_64& rng, const BenchConfig& cfg);

// Op stream of worker `index` for a given seed.
std::mt19937_64 worker_rng(std::uint64_t seed, std::size_t index);

struct BenchReport {
  BenchConfig config;
  double wall_ms = 0;
  double proc_cpu_ms = 0;
  double thread_cpu_mean_ms = 0;
  double thread_cpu_min_ms = 0;
  double thread_cpu_max_ms = 0;
  std::uint64_t committed = 0;  // completed set operations
  std::uint64_t aborted = 0;    // aborted attempts
  double abort_rate = 0;        // aborted / (committed + aborted)
  double throughput_ops_s = 0;
  std::array<std::uint64_t, 3> per_kind{};  // indexed by SetOpKind
  std::array<std::uint64_t, 3> applied_per_kind{};
  std::vector<std::int64_t> final_snapshot;

  // Filled when record_history is set.
  std::optional<Verdict> verdict;
  std::optional<bool> replay_ok;
  std::optional<History> history;
  std::vector<SetOpRecord> ops;

  std::uint64_t attempts() const noexcept { return committed + aborted; }
  // True unless the run was recorded and failed verification.
  bool verified() const noexcept {
    return !verdict || (verdict->serializable && replay_ok.value_or(false));
  }
};

struct RunOptions {
  // Keep the recorded history and per-op log in the report.
  bool keep_history = false;
};

BenchReport run_benchmark(const BenchConfig& cfg, const RunOptions& opts = {});

inline constexpr std::string_view kCsvHeader =
    "protocol,threads,update_rate,key_range,seed,wall_ms,proc_cpu_ms,thread_cpu_mean_ms,"
    "thread_cpu_min_ms,thread_cpu_max_ms,committed,aborted,abort_rate,throughput_ops_s";

void write_csv(std::ostream& out, std::span<const BenchReport> reports);
// Python/matplotlib script plotting the three clock measures against thread
// count, one curve per protocol, from the CSV at `csv_path`.
std::string plot_script(const std::string& csv_path, const std::string& image_path);

// Writes the CSV (and the plot script when plot_path is set). Throws
// StmError(kConfigInvalid) on an empty report list and StmError(kIo) on
// write failure.
void emit_report(std::span<const BenchReport> reports, const std::string& csv_path,
                 const std::optional<std::string>& plot_path = std::nullopt);

}  // namespace ccstm::bench
