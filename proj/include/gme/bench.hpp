#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "gme/types.hpp"

namespace gme::bench {

enum class Distribution { kUniform, kSkewed };

inline const char* to_string(Distribution d) {
  return d == Distribution::kUniform ? "uniform" : "skewed";
}

struct BenchConfig {
  std::vector<std::uint32_t> threads;   // default 1,2,4,8,16,32,48 capped
  std::vector<std::uint32_t> sessions;  // values from {2,8,16,32,48,64}
  Distribution distribution = Distribution::kUniform;
  double hot_split = 0.45;  // share of the first hot session (skewed)
  double duration_s = 2.0;  // total run time, warmup included
  double warmup_s = 0.5;
  std::uint32_t runs = 3;
  std::uint64_t seed = 42;
  std::vector<std::string> algorithms = {"fs-gme"};
  std::string csv_path;
  bool verify = false;
  bool pin = false;

  // Validates ranges and fills defaults; returns an error message or empty.
  std::string normalize();
};

struct ReportRow {
  std::uint32_t threads = 0;
  std::uint32_t sessions = 0;
  std::string distribution;
  std::string algorithm;
  double throughput = 0.0;  // passages per second, mean over runs
  double stddev = 0.0;
};

struct ThroughputReport {
  std::vector<ReportRow> rows;
  std::uint64_t verify_failures = 0;
};

ThroughputReport run_benchmark(const BenchConfig& cfg);

// Header `ThreadCount,Sessions,Distribution,Algorithm,Throughput,StdDev`,
// one row per sweep cell per algorithm, deterministic order and formatting.
void write_csv(const ThroughputReport& report, std::ostream& out);

// Runs one cell (one algorithm, fixed thread/session count) once and returns
// passages per second. Exposed for the acceptance suite.
double run_single_cell(const std::string& algorithm, std::uint32_t threads,
                       std::uint32_t sessions, Distribution dist, double hot_split,
                       double duration_s, double warmup_s, std::uint64_t seed,
                       bool verify, bool pin, std::uint64_t* verify_failures);

}  // namespace gme::bench
