#include "gme/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <thread>

#include "gme/baseline.hpp"
#include "gme/native.hpp"
#include "gme/verify/checkers.hpp"

namespace gme::bench {

namespace {

constexpr std::uint32_t kDefaultThreads[] = {1, 2, 4, 8, 16, 32, 48};
constexpr std::uint32_t kSessionChoices[] = {2, 8, 16, 32, 48, 64};

enum class Phase : int { kWarmup = 0, kMeasure = 1, kStop = 2 };

struct SessionPicker {
  Distribution dist;
  std::uint32_t sessions;
  double hot_split;
  std::mt19937_64 rng;

  Word pick() {
    if (dist == Distribution::kUniform || sessions <= 2) {
      if (dist == Distribution::kSkewed && sessions == 2) {
        // Degenerate skew: the two hot sessions cover everything.
        const double x = std::uniform_real_distribution<>(0.0, 0.9)(rng);
        return x < hot_split ? 1 : 2;
      }
      return std::uniform_int_distribution<Word>(1, sessions)(rng);
    }
    const double x = std::uniform_real_distribution<>(0.0, 1.0)(rng);
    if (x < hot_split) return 1;
    if (x < 0.9) return 2;
    return std::uniform_int_distribution<Word>(3, sessions)(rng);
  }
};

void pin_to_cpu(std::uint32_t index) {
  cpu_set_t set;
  CPU_ZERO(&set);
  CPU_SET(index % std::max(1u, std::thread::hardware_concurrency()), &set);
  pthread_setaffinity_np(pthread_self(), sizeof(set), &set);
}

// The measured critical section: one FAA on a shared counter plus writes to
// k local slots, k uniform in [1,100]. The non-critical section is empty.
struct CsBody {
  std::atomic<std::uint64_t>* shared;
  std::uint64_t local[100];

  void run(std::mt19937_64& rng) {
    shared->fetch_add(1);
    const int k = std::uniform_int_distribution<int>(1, 100)(rng);
    for (int i = 0; i < k; ++i) local[i] = local[i] + 1;
    asm volatile("" ::"r"(local) : "memory");
  }
};

struct CellResult {
  double throughput = 0.0;
  bool gme_ok = true;
};

CellResult run_cell_once(const std::string& algorithm, std::uint32_t threads,
                         std::uint32_t sessions, Distribution dist, double hot_split,
                         double duration_s, double warmup_s, std::uint64_t seed,
                         bool verify, bool pin) {
  const bool dsm = algorithm == "fs-gme-dsm";
  const bool baseline = algorithm == "me-baseline";

  SystemConfig cfg;
  cfg.processes = threads;
  cfg.instances = 1;
  cfg.features.helping = true;
  cfg.features.reclaim = true;
  cfg.features.dsm = dsm;

  std::unique_ptr<GmeSystem> gme_sys;
  std::unique_ptr<TicketBaseline> ticket;
  if (baseline) {
    ticket = std::make_unique<TicketBaseline>(1);
  } else {
    gme_sys = std::make_unique<GmeSystem>(cfg);
  }

  TraceRecorder trace(threads);
  std::atomic<std::uint64_t> shared_counter{0};
  std::atomic<int> phase{static_cast<int>(Phase::kWarmup)};
  std::vector<std::uint64_t> counted(threads, 0);
  std::vector<std::thread> workers;
  workers.reserve(threads);

  for (std::uint32_t t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      if (pin) pin_to_cpu(t);
      const std::uint32_t pid = t + 1;
      SessionPicker picker{dist, sessions, hot_split,
                           std::mt19937_64(seed + 0x9e3779b9u * (t + 1))};
      CsBody body{&shared_counter, {}};
      std::mt19937_64 cs_rng(seed ^ (t + 1));
      WorkerInstr instr;
      instr.pid = pid;
      instr.trace = verify ? &trace : nullptr;

      std::uint64_t local_count = 0;
      while (phase.load(std::memory_order_relaxed) != static_cast<int>(Phase::kStop)) {
        const Word session = picker.pick();
        if (baseline) {
          ticket->enter(pid, 1, session, verify ? &trace : nullptr);
          body.run(cs_rng);
          ticket->exit(pid, 1, verify ? &trace : nullptr);
        } else if (verify) {
          ProcessContext& ctx = gme_sys->context(pid);
          gme_sys->enter(ctx, 1, session, instr);
          body.run(cs_rng);
          gme_sys->exit(ctx, 1, instr);
        } else {
          ProcessContext& ctx = gme_sys->context(pid);
          gme_sys->enter(ctx, 1, session);
          body.run(cs_rng);
          gme_sys->exit(ctx, 1);
        }
        if (phase.load(std::memory_order_relaxed) == static_cast<int>(Phase::kMeasure)) {
          ++local_count;
        }
      }
      counted[t] = local_count;
    });
  }

  const auto warmup = std::chrono::duration<double>(warmup_s);
  const auto measure = std::chrono::duration<double>(duration_s - warmup_s);
  std::this_thread::sleep_for(warmup);
  const auto t_measure = std::chrono::steady_clock::now();
  phase.store(static_cast<int>(Phase::kMeasure));
  std::this_thread::sleep_for(measure);
  phase.store(static_cast<int>(Phase::kStop));
  // Coordinator wakeups jitter on loaded hosts; divide by the actual window.
  const double window =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_measure)
          .count();
  for (auto& w : workers) w.join();

  CellResult res;
  std::uint64_t total = 0;
  for (std::uint64_t c : counted) total += c;
  res.throughput = static_cast<double>(total) / window;
  if (verify) {
    const auto verdict = verify::check_gme(trace.collect());
    res.gme_ok = verdict.pass;
    if (!verdict.pass) {
      std::fprintf(stderr, "bench --verify: %s\n", verdict.detail.c_str());
    }
  }
  return res;
}

}  // namespace

std::string BenchConfig::normalize() {
  if (threads.empty()) {
    const std::uint32_t hw = std::max(1u, std::thread::hardware_concurrency());
    for (std::uint32_t t : kDefaultThreads) {
      if (t <= hw) threads.push_back(t);
    }
    if (threads.empty()) threads.push_back(1);
  }
  for (std::uint32_t t : threads) {
    if (t < 1) return "thread counts must be >= 1";
  }
  if (sessions.empty()) sessions = {2};
  for (std::uint32_t s : sessions) {
    if (std::find(std::begin(kSessionChoices), std::end(kSessionChoices), s) ==
        std::end(kSessionChoices)) {
      return "session count must be one of {2,8,16,32,48,64}";
    }
  }
  if (!(warmup_s < duration_s)) return "warmup must be shorter than duration";
  if (warmup_s < 0) return "warmup must be >= 0";
  if (runs < 1) return "runs must be >= 1";
  if (hot_split < 0.0 || hot_split > 0.9) return "hot split must be in [0, 0.9]";
  if (algorithms.empty()) algorithms = {"fs-gme"};
  for (const auto& a : algorithms) {
    if (a != "fs-gme" && a != "fs-gme-dsm" && a != "me-baseline") {
      return "unknown algorithm: " + a;
    }
  }
  return "";
}

double run_single_cell(const std::string& algorithm, std::uint32_t threads,
                       std::uint32_t sessions, Distribution dist, double hot_split,
                       double duration_s, double warmup_s, std::uint64_t seed,
                       bool verify, bool pin, std::uint64_t* verify_failures) {
  const CellResult r = run_cell_once(algorithm, threads, sessions, dist, hot_split,
                                     duration_s, warmup_s, seed, verify, pin);
  if (verify_failures && !r.gme_ok) ++*verify_failures;
  return r.throughput;
}

ThroughputReport run_benchmark(const BenchConfig& cfg) {
  ThroughputReport report;
  for (std::uint32_t t : cfg.threads) {
    for (std::uint32_t s : cfg.sessions) {
      for (const std::string& algo : cfg.algorithms) {
        std::vector<double> samples;
        samples.reserve(cfg.runs);
        for (std::uint32_t r = 0; r < cfg.runs; ++r) {
          const std::uint64_t run_seed =
              cfg.seed + 1315423911ull * r + 2654435761ull * t + 97531ull * s;
          const CellResult cell = run_cell_once(
              algo, t, s, cfg.distribution, cfg.hot_split, cfg.duration_s,
              cfg.warmup_s, run_seed, cfg.verify, cfg.pin);
          samples.push_back(cell.throughput);
          if (!cell.gme_ok) ++report.verify_failures;
        }
        double mean = 0;
        for (double x : samples) mean += x;
        mean /= samples.size();
        double var = 0;
        for (double x : samples) var += (x - mean) * (x - mean);
        var = samples.size() > 1 ? var / (samples.size() - 1) : 0.0;
        report.rows.push_back(ReportRow{t, s, to_string(cfg.distribution), algo, mean,
                                        std::sqrt(var)});
      }
    }
  }
  return report;
}

void write_csv(const ThroughputReport& report, std::ostream& out) {
  out << "ThreadCount,Sessions,Distribution,Algorithm,Throughput,StdDev\n";
  char buf[64];
  for (const ReportRow& r : report.rows) {
    out << r.threads << ',' << r.sessions << ',' << r.distribution << ','
        << r.algorithm << ',';
    std::snprintf(buf, sizeof buf, "%.2f", r.throughput);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.2f", r.stddev);
    out << buf << '\n';
  }
}

}  // namespace gme::bench
