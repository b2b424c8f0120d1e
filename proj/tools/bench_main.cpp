#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "gme/bench.hpp"

namespace {

std::string joined(const std::vector<std::uint32_t>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GME lock throughput benchmark"};
  app.name("bench");

  gme::bench::BenchConfig cfg;
  std::string distribution = "uniform";

  app.add_option("--algorithm", cfg.algorithms,
                 "Algorithms: fs-gme, fs-gme-dsm, me-baseline")
      ->delimiter(',');
  app.add_option("--threads", cfg.threads,
                 "Thread counts (default 1,2,4,8,16,32,48 capped at hardware)")
      ->delimiter(',');
  app.add_option("--sessions", cfg.sessions,
                 "Session counts from {2,8,16,32,48,64} (default 2)")
      ->delimiter(',');
  app.add_option("--distribution", distribution, "uniform or skewed (90/10)")
      ->check(CLI::IsMember({"uniform", "skewed"}));
  app.add_option("--hot-split", cfg.hot_split,
                 "Skewed mode: share of the first hot session (default 0.45; the "
                 "second gets 0.9 minus this; with 2 sessions the whole mass "
                 "splits pro rata)");
  app.add_option("--duration", cfg.duration_s, "Run length in seconds, warmup included");
  app.add_option("--warmup", cfg.warmup_s, "Warm-up seconds excluded from throughput");
  app.add_option("--runs", cfg.runs, "Repetitions per sweep cell");
  app.add_option("--seed", cfg.seed, "PRNG seed (mt19937_64)");
  app.add_option("--csv", cfg.csv_path, "CSV output path (stdout if omitted)");
  app.add_flag("--verify", cfg.verify, "Record traces and check group mutual exclusion");
  app.add_flag("--pin", cfg.pin, "Pin worker threads to cores");

  CLI11_PARSE(app, argc, argv);

  cfg.distribution = distribution == "skewed" ? gme::bench::Distribution::kSkewed
                                              : gme::bench::Distribution::kUniform;
  const std::string err = cfg.normalize();
  if (!err.empty()) {
    std::cerr << "bench: " << err << "\n";
    return 2;
  }

  std::ostringstream algos;
  for (std::size_t i = 0; i < cfg.algorithms.size(); ++i) {
    algos << (i ? "," : "") << cfg.algorithms[i];
  }
  std::cout << "bench seed=" << cfg.seed << " rng=mt19937_64 threads="
            << joined(cfg.threads) << " sessions=" << joined(cfg.sessions)
            << " distribution=" << to_string(cfg.distribution)
            << " duration=" << cfg.duration_s << "s warmup=" << cfg.warmup_s
            << "s runs=" << cfg.runs << " algorithms=" << algos.str()
            << (cfg.verify ? " verify=on" : "") << (cfg.pin ? " pin=on" : "") << "\n";

  const gme::bench::ThroughputReport report = gme::bench::run_benchmark(cfg);

  if (cfg.csv_path.empty()) {
    gme::bench::write_csv(report, std::cout);
  } else {
    std::ofstream out(cfg.csv_path, std::ios::binary | std::ios::trunc);
    if (!out) {
      std::cerr << "bench: cannot write " << cfg.csv_path << "\n";
      return 2;
    }
    gme::bench::write_csv(report, out);
  }

  if (report.verify_failures != 0) {
    std::cerr << "bench: " << report.verify_failures << " verification failure(s)\n";
    return 1;
  }
  return 0;
}
