// ccstm: benchmark driver and history checker for the transactional set.
//
//   ccstm bench --protocol mvto --threads 8 --ops 10000 --update-rate 0.7 --csv out.csv
//   ccstm sweep --threads 10:100:10 --csv sweep.csv --plot sweep.py
//   ccstm check --trace run.trace

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ccstm/bench.hpp"
#include "ccstm/error.hpp"
#include "ccstm/history.hpp"
#include "ccstm/serializability.hpp"

namespace {

using ccstm::bench::BenchConfig;
using ccstm::bench::BenchReport;

struct CommonArgs {
  std::string protocol = "bto";
  std::size_t ops = 1000;
  double duration = 0;
  double update_rate = 0.7;
  std::string key_range = "1:1024";
  double fill = 0.5;
  std::uint64_t seed = 1;
  bool record_history = false;
  std::string csv;
  std::string plot;
  std::size_t gc_period = 256;
  bool pin = false;
  bool minimal_writes = false;
};

void add_common(CLI::App* app, CommonArgs& a) {
  auto* ops = app->add_option("--ops", a.ops, "Operations per thread");
  app->add_option("--duration", a.duration, "Run for S seconds instead of a fixed op count")->excludes(ops);
  app->add_option("--update-rate", a.update_rate, "Fraction of add/remove operations")
      ->check(CLI::Range(0.0, 1.0));
  app->add_option("--key-range", a.key_range, "Inclusive key interval LO:HI");
  app->add_option("--fill", a.fill, "Fraction of the key range inserted before the run")
      ->check(CLI::Range(0.0, 1.0));
  app->add_option("--seed", a.seed, "RNG seed");
  app->add_flag("--record-history", a.record_history, "Record events and verify serializability");
  app->add_option("--csv", a.csv, "Write CSV report to PATH");
  app->add_option("--plot", a.plot, "Write a matplotlib script to PATH");
  app->add_option("--gc-period", a.gc_period, "Commits between garbage-collection sweeps (0 = off)");
  app->add_flag("--pin", a.pin, "Pin worker threads to CPUs round-robin");
  app->add_flag("--minimal-writes", a.minimal_writes, "Only write objects whose contents change");
}

BenchConfig to_config(const CommonArgs& a, ccstm::Protocol p, std::size_t threads) {
  BenchConfig cfg;
  cfg.protocol = p;
  cfg.threads = threads;
  cfg.ops_per_thread = a.ops;
  if (a.duration > 0) cfg.duration_s = a.duration;
  cfg.update_rate = a.update_rate;
  const auto colon = a.key_range.find(':');
  if (colon == std::string::npos) {
    throw ccstm::StmError(ccstm::ErrorCode::kConfigInvalid, "key range must be LO:HI");
  }
  cfg.key_lo = std::stoll(a.key_range.substr(0, colon));
  cfg.key_hi = std::stoll(a.key_range.substr(colon + 1));
  cfg.initial_fill = a.fill;
  cfg.seed = a.seed;
  cfg.record_history = a.record_history;
  cfg.gc_period = a.gc_period;
  cfg.pin_threads = a.pin;
  cfg.set_options.minimal_writes = a.minimal_writes;
  cfg.validate();
  return cfg;
}

std::vector<std::size_t> parse_thread_list(const std::string& spec) {
  // "N", "A,B,C" or "FROM:TO:STEP".
  std::vector<std::size_t> out;
  if (std::count(spec.begin(), spec.end(), ':') == 2) {
    std::size_t from, to, step;
    char c1, c2;
    std::istringstream in(spec);
    if (!(in >> from >> c1 >> to >> c2 >> step) || step == 0 || from == 0 || from > to) {
      throw ccstm::StmError(ccstm::ErrorCode::kConfigInvalid, "bad thread range '" + spec + "'");
    }
    for (std::size_t t = from; t <= to; t += step) out.push_back(t);
    return out;
  }
  std::istringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(std::stoul(item));
  if (out.empty()) throw ccstm::StmError(ccstm::ErrorCode::kConfigInvalid, "empty thread list");
  return out;
}

void print_summary(const BenchReport& r) {
  std::cout << std::fixed << std::setprecision(2) << to_string(r.config.protocol)
            << " threads=" << r.config.threads << " wall_ms=" << r.wall_ms
            << " proc_cpu_ms=" << r.proc_cpu_ms << " thread_cpu_mean_ms=" << r.thread_cpu_mean_ms
            << " committed=" << r.committed << " aborted=" << r.aborted << std::setprecision(4)
            << " abort_rate=" << r.abort_rate;
  if (r.verdict) {
    std::cout << " serializable=" << (r.verdict->serializable ? "yes" : "no")
              << " replay=" << (r.replay_ok.value_or(false) ? "ok" : "mismatch");
  }
  std::cout << '\n';
}

void emit(const std::vector<BenchReport>& reports, const CommonArgs& a) {
  if (a.csv.empty()) {
    if (!a.plot.empty()) {
      throw ccstm::StmError(ccstm::ErrorCode::kConfigInvalid, "--plot requires --csv");
    }
    ccstm::bench::write_csv(std::cout, reports);
    return;
  }
  ccstm::bench::emit_report(reports, a.csv, a.plot.empty() ? std::nullopt : std::optional(a.plot));
}

int run_check(const std::string& path, bool multiversion) {
  std::ifstream in(path);
  if (!in) throw ccstm::StmError(ccstm::ErrorCode::kIo, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (text.find("# protocol mvto") != std::string::npos) multiversion = true;
  std::istringstream trace(text);
  const ccstm::History h = ccstm::read_trace(trace);
  const auto order = multiversion ? ccstm::VersionOrder::kTimestampOrder : ccstm::VersionOrder::kCommitOrder;
  const ccstm::Verdict v = ccstm::check_conflict_serializability(h, order);
  std::cout << "events=" << h.size() << " order=" << (multiversion ? "timestamp" : "commit") << '\n';
  if (v.serializable) {
    std::cout << "serializable: yes (witness of " << v.witness.size() << " committed transactions)\n";
    return 0;
  }
  std::cout << "serializable: no (" << v.detail << ")\ncycle:";
  for (auto t : v.cycle) std::cout << ' ' << t;
  std::cout << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Software transactional memory benchmark and history checker"};
  app.require_subcommand(1);

  CommonArgs bench_args;
  std::size_t threads = 1;
  std::string trace_out;
  auto* bench = app.add_subcommand("bench", "Run one benchmark configuration");
  bench->add_option("--protocol", bench_args.protocol, "bto | sgt | mvto")
      ->check(CLI::IsMember({"bto", "sgt", "mvto"}));
  bench->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  bench->add_option("--trace", trace_out, "With --record-history, write the event trace to PATH");
  add_common(bench, bench_args);

  CommonArgs sweep_args;
  std::string protocols = "bto,sgt,mvto";
  std::string thread_spec = "10:100:10";
  std::size_t repeat = 1;
  auto* sweep = app.add_subcommand("sweep", "Run a thread-count sweep over several protocols");
  sweep->add_option("--protocols", protocols, "Comma-separated protocol list");
  sweep->add_option("--threads", thread_spec, "Thread counts: N, A,B,C or FROM:TO:STEP");
  sweep->add_option("--repeat", repeat, "Runs per point")->check(CLI::PositiveNumber);
  add_common(sweep, sweep_args);

  std::string trace_in;
  bool multiversion = false;
  auto* check = app.add_subcommand("check", "Check a recorded trace for conflict-serializability");
  check->add_option("--trace", trace_in, "Trace file")->required();
  check->add_flag("--multiversion", multiversion, "Order versions by writer timestamp (MVTO traces)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*check) return run_check(trace_in, multiversion);

    if (*bench) {
      BenchConfig cfg = to_config(bench_args, ccstm::parse_protocol(bench_args.protocol), threads);
      ccstm::bench::RunOptions opts;
      opts.keep_history = !trace_out.empty();
      if (opts.keep_history && !cfg.record_history) {
        throw ccstm::StmError(ccstm::ErrorCode::kConfigInvalid, "--trace requires --record-history");
      }
      std::vector<BenchReport> reports{ccstm::bench::run_benchmark(cfg, opts)};
      print_summary(reports.front());
      if (opts.keep_history) {
        std::ofstream out(trace_out);
        out << "# protocol " << to_string(cfg.protocol) << '\n';
        ccstm::write_trace(out, *reports.front().history);
      }
      emit(reports, bench_args);
      return reports.front().verified() ? 0 : 1;
    }

    std::vector<BenchReport> reports;
    bool ok = true;
    std::istringstream plist(protocols);
    std::vector<ccstm::Protocol> list;
    for (std::string p; std::getline(plist, p, ',');) list.push_back(ccstm::parse_protocol(p));
    for (std::size_t t : parse_thread_list(thread_spec)) {
      for (ccstm::Protocol p : list) {
        for (std::size_t r = 0; r < repeat; ++r) {
          BenchConfig cfg = to_config(sweep_args, p, t);
          cfg.seed = sweep_args.seed + r;
          reports.push_back(ccstm::bench::run_benchmark(cfg));
          print_summary(reports.back());
          ok = ok && reports.back().verified();
        }
      }
    }
    emit(reports, sweep_args);
    return ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
