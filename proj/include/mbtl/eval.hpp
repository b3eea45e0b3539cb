#pragma once

#include "mbtl/core.hpp"
#include "mbtl/detection.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mbtl {

struct BootstrapSpec {
  int count = 100;
  std::uint64_t seed = 0;
};

/// Builds spec.count trials; row i of bootstrap trial b is row i of a
/// uniformly chosen source trial. Each (b, i) pick uses its own substream, so
/// the result does not depend on evaluation order.
TransferMatrix bootstrap(const TransferMatrix& matrix, const BootstrapSpec& spec);

struct PerformanceStats {
  double mean = 0.0;
  double median = 0.0;  // lower median for even counts
  double iqm = 0.0;     // mean of the values with ranks in [floor(n/4)+1, ceil(3n/4)]
  double ci_half_width = 0.0;  // 95% percentile bootstrap of the mean
};

PerformanceStats performance_stats(const std::vector<double>& values, int resamples = 10000,
                                   std::uint64_t seed = 0);

double mean_of(const std::vector<double>& values);
double median_of(std::vector<double> values);
double iqm_of(std::vector<double> values);

/// 95% percentile-bootstrap half-width of a statistic over the values.
double bootstrap_ci_half_width(const std::vector<double>& values,
                               double (*statistic)(std::vector<double>), int resamples,
                               std::uint64_t seed);

/// Mean over benchmarks of (method - random) / (oracle - random).
double aggregated_performance(const std::vector<double>& method_scores,
                              const std::vector<double>& random_scores,
                              const std::vector<double>& oracle_scores);

/// Arithmetic mean of the per-round performances.
double auc(const std::vector<double>& trace);

/// Smallest 1-based round with trace[k] >= oracle_final - epsilon.
std::optional<int> epsilon_suboptimal_round(const std::vector<double>& trace,
                                            double oracle_final, double epsilon);

// ---------------------------------------------------------------------------
// Experiment harness
// ---------------------------------------------------------------------------

struct ExperimentConfig {
  std::vector<std::string> methods;  // mgp, m, gp, random, myopic-oracle, sequential-oracle
  int rounds = 0;                    // 0 = N
  int bootstrap_count = 0;           // 0 = use the input trials as-is
  int random_repeats = 50;
  std::uint64_t seed = 0;
  std::vector<double> epsilons;
  double beta = 4.0;
  double gap_slope = 0.01;
  double distance_slope = 0.01;
  int m_samples = 0;
  bool fast_update = true;
  DetectionConfig detection;
  int ci_resamples = 10000;
  int threads = 0;  // 0 = hardware concurrency
};

struct MethodTraces {
  std::string method;
  // One trace per matrix; the random baseline trace is the mean of the
  // repeat traces for that matrix.
  std::vector<std::vector<double>> traces;
  std::vector<std::vector<int>> selections;
  std::vector<std::vector<Structure>> routing;  // only for mgp
};

struct Experiment {
  TransferMatrix data;  // normalized (and bootstrapped) matrices that were run
  int rounds = 0;
  std::vector<MethodTraces> methods;
};

/// Normalize -> bootstrap -> run every requested method on every matrix.
/// Selector seeds follow (matrix + 1) * (repeat + 1).
Experiment run_experiment(const TransferMatrix& input, const ExperimentConfig& config);

const MethodTraces* find_method(const Experiment& e, const std::string& name);

std::vector<double> final_performances(const MethodTraces& m);

// CSV outputs. Values are written with "%.17g" so reruns are byte-identical.
void write_results_csv(const Experiment& e, const std::string& path);
void write_summary_csv(const Experiment& e, const ExperimentConfig& config,
                       const std::string& path);
void write_routing_csv(const Experiment& e, const std::string& path);
void write_epsilon_csv(const Experiment& e, const ExperimentConfig& config,
                       const std::string& path);

struct BenchmarkScores {
  std::string benchmark;
  // Per-matrix final performances keyed by method name.
  std::vector<std::pair<std::string, std::vector<double>>> methods;
};

/// Reads a results CSV (benchmark, method, matrix, round, performance),
/// keeping the last round of each (method, matrix).
BenchmarkScores read_results_csv(const std::string& path);

/// Aggregated performance across benchmarks with a bootstrap CI over
/// matrices; writes method, aggregated_performance, ci_half_width.
void write_aggregate_csv(const std::vector<BenchmarkScores>& benchmarks, int resamples,
                         std::uint64_t seed, const std::string& path);

}  // namespace mbtl
