#include "mbtl/eval.hpp"

#include "mbtl/orchestrate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace mbtl {

TransferMatrix bootstrap(const TransferMatrix& matrix, const BootstrapSpec& spec) {
  matrix.validate();
  if (spec.count < 1) throw std::invalid_argument("bootstrap: count must be positive");
  const int n = matrix.grid.num_tasks();
  const auto t = static_cast<std::uint64_t>(matrix.num_trials());
  TransferMatrix out;
  out.grid = matrix.grid;
  out.name = matrix.name;
  out.normalized = matrix.normalized;
  out.trials.reserve(static_cast<std::size_t>(spec.count));
  SeededRng root(spec.seed);
  for (int b = 0; b < spec.count; ++b) {
    Matrix trial(n, n);
    for (int i = 0; i < n; ++i) {
      const auto stream = static_cast<std::uint64_t>(b) * static_cast<std::uint64_t>(n) +
                          static_cast<std::uint64_t>(i);
      const auto pick = root.substream(stream).next_below(t);
      trial.row(i) = matrix.trials[static_cast<std::size_t>(pick)].row(i);
    }
    out.trials.push_back(std::move(trial));
  }
  return out;
}

double mean_of(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("mean_of: empty input");
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double median_of(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median_of: empty input");
  const std::size_t mid = (values.size() - 1) / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                   values.end());
  return values[mid];
}

double iqm_of(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("iqm_of: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  const std::size_t lo = n / 4 + 1;                      // 1-based, nearest-rank inclusive
  const std::size_t hi = (3 * n + 3) / 4;                // ceil(3n/4)
  double s = 0.0;
  for (std::size_t r = lo; r <= hi; ++r) s += values[r - 1];
  return s / static_cast<double>(hi - lo + 1);
}

double bootstrap_ci_half_width(const std::vector<double>& values,
                               double (*statistic)(std::vector<double>), int resamples,
                               std::uint64_t seed) {
  if (values.size() < 2) throw std::invalid_argument("bootstrap_ci_half_width: need >= 2 values");
  const std::size_t n = values.size();
  std::vector<double> stats(static_cast<std::size_t>(resamples));
  SeededRng rng(seed);
  std::vector<double> sample(n);
  for (int b = 0; b < resamples; ++b) {
    for (std::size_t i = 0; i < n; ++i)
      sample[i] = values[static_cast<std::size_t>(rng.next_below(n))];
    stats[static_cast<std::size_t>(b)] = statistic(sample);
  }
  std::sort(stats.begin(), stats.end());
  const auto last = static_cast<double>(resamples - 1);
  const double lo = stats[static_cast<std::size_t>(std::floor(0.025 * last))];
  const double hi = stats[static_cast<std::size_t>(std::ceil(0.975 * last))];
  return (hi - lo) / 2.0;
}

namespace {
double mean_stat(std::vector<double> v) { return mean_of(v); }
}  // namespace

PerformanceStats performance_stats(const std::vector<double>& values, int resamples,
                                   std::uint64_t seed) {
  PerformanceStats s;
  s.mean = mean_of(values);
  s.median = median_of(values);
  s.iqm = iqm_of(values);
  s.ci_half_width =
      values.size() >= 2 ? bootstrap_ci_half_width(values, &mean_stat, resamples, seed) : 0.0;
  return s;
}

double aggregated_performance(const std::vector<double>& method_scores,
                              const std::vector<double>& random_scores,
                              const std::vector<double>& oracle_scores) {
  const std::size_t n = method_scores.size();
  if (n == 0 || random_scores.size() != n || oracle_scores.size() != n)
    throw std::invalid_argument("aggregated_performance: length mismatch");
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double denom = oracle_scores[j] - random_scores[j];
    if (denom == 0.0)
      throw std::runtime_error("aggregated_performance: oracle equals random on a benchmark");
    total += (method_scores[j] - random_scores[j]) / denom;
  }
  return total / static_cast<double>(n);
}

double auc(const std::vector<double>& trace) { return mean_of(trace); }

std::optional<int> epsilon_suboptimal_round(const std::vector<double>& trace,
                                            double oracle_final, double epsilon) {
  for (std::size_t k = 0; k < trace.size(); ++k)
    if (trace[k] >= oracle_final - epsilon) return static_cast<int>(k) + 1;
  return std::nullopt;
}

// ---------------------------------------------------------------------------

namespace {

const std::set<std::string> kKnownMethods = {"mgp",    "m",            "gp",
                                             "random", "myopic-oracle", "sequential-oracle"};

void parallel_for(int jobs, int threads, const std::function<void(int)>& body) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, jobs));
  if (threads == 1) {
    for (int j = 0; j < jobs; ++j) body(j);
    return;
  }
  std::atomic<int> cursor{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const int j = cursor.fetch_add(1);
        if (j >= jobs) return;
        try {
          body(j);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Experiment run_experiment(const TransferMatrix& input, const ExperimentConfig& config) {
  if (config.methods.empty()) throw std::invalid_argument("run_experiment: no methods");
  for (const std::string& m : config.methods)
    if (!kKnownMethods.count(m)) throw std::invalid_argument("run_experiment: unknown method " + m);

  Experiment e;
  e.data = input.normalized ? input : min_max_normalize(input);
  if (config.bootstrap_count > 0)
    e.data = bootstrap(e.data, BootstrapSpec{config.bootstrap_count, config.seed});
  const int n = e.data.grid.num_tasks();
  e.rounds = config.rounds == 0 ? n : config.rounds;
  if (e.rounds < 1 || e.rounds > n) throw std::invalid_argument("run_experiment: rounds > N");

  const int num_matrices = e.data.num_trials();
  const TaskGrid& grid = e.data.grid;
  const DistanceWeights weights = DistanceWeights::uniform(grid.num_dims(), config.distance_slope);

  // The myopic oracle picks one sequence from all trials.
  std::vector<int> oracle_sequence;
  if (std::find(config.methods.begin(), config.methods.end(), "myopic-oracle") !=
      config.methods.end())
    oracle_sequence = MyopicOracleSelector::sequence(e.data.trials, e.rounds);

  // The clustering selector never reads revealed rows, so with a full or
  // empty candidate sample its sequence is matrix-independent.
  std::vector<int> m_sequence;
  const bool m_shared = config.m_samples == 0 || config.m_samples == n;
  if (m_shared && std::find(config.methods.begin(), config.methods.end(), "m") !=
                      config.methods.end()) {
    MmbtlConfig mc{weights, config.m_samples, 100, 1, config.fast_update};
    MmbtlSelector sel(grid, mc);
    m_sequence = run_selector(e.data.trials[0], grid, sel, e.rounds).selected;
  }

  e.methods.resize(config.methods.size());
  for (std::size_t i = 0; i < config.methods.size(); ++i) {
    e.methods[i].method = config.methods[i];
    e.methods[i].traces.resize(static_cast<std::size_t>(num_matrices));
    e.methods[i].selections.resize(static_cast<std::size_t>(num_matrices));
    if (config.methods[i] == "mgp")
      e.methods[i].routing.resize(static_cast<std::size_t>(num_matrices));
  }

  const int jobs = static_cast<int>(config.methods.size()) * num_matrices;
  parallel_for(jobs, config.threads, [&](int job) {
    const auto mi = static_cast<std::size_t>(job) / static_cast<std::size_t>(num_matrices);
    const int w = job % num_matrices;
    const std::string& method = config.methods[mi];
    const Matrix& trial = e.data.trials[static_cast<std::size_t>(w)];
    const auto seed0 = static_cast<std::uint64_t>(w + 1);
    MethodTraces& out = e.methods[mi];

    if (method == "random") {
      std::vector<double> mean_trace(static_cast<std::size_t>(e.rounds), 0.0);
      for (int j = 0; j < config.random_repeats; ++j) {
        RandomSelector sel(seed0 * static_cast<std::uint64_t>(j + 1));
        const SelectorRun run = run_selector(trial, grid, sel, e.rounds);
        for (int k = 0; k < e.rounds; ++k)
          mean_trace[static_cast<std::size_t>(k)] += run.trace[static_cast<std::size_t>(k)];
        if (j == 0) out.selections[static_cast<std::size_t>(w)] = run.selected;
      }
      for (double& v : mean_trace) v /= config.random_repeats;
      out.traces[static_cast<std::size_t>(w)] = std::move(mean_trace);
    } else if (method == "myopic-oracle") {
      out.selections[static_cast<std::size_t>(w)] = oracle_sequence;
      out.traces[static_cast<std::size_t>(w)] = trace_for_sequence(trial, oracle_sequence);
    } else if (method == "sequential-oracle") {
      SequentialOracleSelector sel(trial);
      const SelectorRun run = run_selector(trial, grid, sel, e.rounds);
      out.selections[static_cast<std::size_t>(w)] = run.selected;
      out.traces[static_cast<std::size_t>(w)] = run.trace;
    } else if (method == "m") {
      if (m_shared) {
        out.selections[static_cast<std::size_t>(w)] = m_sequence;
        out.traces[static_cast<std::size_t>(w)] = trace_for_sequence(trial, m_sequence);
      } else {
        MmbtlConfig mc{weights, config.m_samples, 100, seed0, config.fast_update};
        MmbtlSelector sel(grid, mc);
        const SelectorRun run = run_selector(trial, grid, sel, e.rounds);
        out.selections[static_cast<std::size_t>(w)] = run.selected;
        out.traces[static_cast<std::size_t>(w)] = run.trace;
      }
    } else if (method == "gp") {
      GpMbtlConfig gc;
      gc.beta = config.beta;
      gc.initial_gap_slope = config.gap_slope;
      gc.seed = seed0;
      GpMbtlSelector sel(grid, gc);
      const SelectorRun run = run_selector(trial, grid, sel, e.rounds);
      out.selections[static_cast<std::size_t>(w)] = run.selected;
      out.traces[static_cast<std::size_t>(w)] = run.trace;
    } else {  // mgp
      MmbtlConfig mc{weights, config.m_samples, 100, seed0, config.fast_update};
      GpMbtlConfig gc;
      gc.beta = config.beta;
      gc.initial_gap_slope = config.gap_slope;
      gc.seed = seed0;
      MgpSelector sel(grid, mc, gc, config.detection);
      const SelectorRun run = run_selector(trial, grid, sel, e.rounds);
      out.selections[static_cast<std::size_t>(w)] = run.selected;
      out.traces[static_cast<std::size_t>(w)] = run.trace;
      out.routing[static_cast<std::size_t>(w)] = sel.routing();
    }
  });
  return e;
}

const MethodTraces* find_method(const Experiment& e, const std::string& name) {
  for (const MethodTraces& m : e.methods)
    if (m.method == name) return &m;
  return nullptr;
}

std::vector<double> final_performances(const MethodTraces& m) {
  std::vector<double> values;
  values.reserve(m.traces.size());
  for (const auto& trace : m.traces) values.push_back(trace.back());
  return values;
}

void write_results_csv(const Experiment& e, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "benchmark,method,matrix,round,performance\n";
  for (const MethodTraces& m : e.methods)
    for (std::size_t w = 0; w < m.traces.size(); ++w)
      for (std::size_t k = 0; k < m.traces[w].size(); ++k)
        out << e.data.name << "," << m.method << "," << w << "," << k + 1 << ","
            << fmt(m.traces[w][k]) << "\n";
}

void write_summary_csv(const Experiment& e, const ExperimentConfig& config,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "benchmark,method,stat,value,ci_half_width\n";
  for (const MethodTraces& m : e.methods) {
    const std::vector<double> finals = final_performances(m);
    std::vector<double> aucs;
    aucs.reserve(m.traces.size());
    for (const auto& trace : m.traces) aucs.push_back(auc(trace));
    const bool ci_ok = finals.size() >= 2;
    const auto ci = [&](const std::vector<double>& v, double (*stat)(std::vector<double>)) {
      return ci_ok ? bootstrap_ci_half_width(v, stat, config.ci_resamples, config.seed) : 0.0;
    };
    out << e.data.name << "," << m.method << ",mean," << fmt(mean_of(finals)) << ","
        << fmt(ci(finals, [](std::vector<double> v) { return mean_of(v); })) << "\n";
    out << e.data.name << "," << m.method << ",median," << fmt(median_of(finals)) << ","
        << fmt(ci(finals, [](std::vector<double> v) { return median_of(std::move(v)); })) << "\n";
    out << e.data.name << "," << m.method << ",iqm," << fmt(iqm_of(finals)) << ","
        << fmt(ci(finals, [](std::vector<double> v) { return iqm_of(std::move(v)); })) << "\n";
    out << e.data.name << "," << m.method << ",auc," << fmt(mean_of(aucs)) << ","
        << fmt(ci(aucs, [](std::vector<double> v) { return mean_of(v); })) << "\n";
  }
}

void write_routing_csv(const Experiment& e, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "benchmark,method,matrix,round,structure\n";
  for (const MethodTraces& m : e.methods) {
    if (m.routing.empty()) continue;
    for (std::size_t w = 0; w < m.routing.size(); ++w)
      for (std::size_t k = 0; k < m.routing[w].size(); ++k)
        out << e.data.name << "," << m.method << "," << w << "," << k + 1 << ","
            << (m.routing[w][k] == Structure::kMountain ? "mountain" : "none") << "\n";
  }
}

void write_epsilon_csv(const Experiment& e, const ExperimentConfig& config,
                       const std::string& path) {
  const MethodTraces* oracle = find_method(e, "myopic-oracle");
  if (oracle == nullptr || config.epsilons.empty()) return;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "benchmark,method,epsilon,matrix,round\n";
  for (const MethodTraces& m : e.methods) {
    for (double eps : config.epsilons) {
      for (std::size_t w = 0; w < m.traces.size(); ++w) {
        const double ref = oracle->traces[w].back();
        const auto round = epsilon_suboptimal_round(m.traces[w], ref, eps);
        out << e.data.name << "," << m.method << "," << fmt(eps) << "," << w << ","
            << (round ? *round : -1) << "\n";
      }
    }
  }
}

BenchmarkScores read_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("benchmark,method,matrix,round,performance", 0) != 0)
    throw std::runtime_error(path + ": not a results CSV");
  BenchmarkScores scores;
  std::map<std::string, std::map<int, std::pair<int, double>>> last;  // method -> matrix -> (round, perf)
  std::vector<std::string> method_order;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string benchmark, method, matrix, round, performance;
    if (!std::getline(ss, benchmark, ',') || !std::getline(ss, method, ',') ||
        !std::getline(ss, matrix, ',') || !std::getline(ss, round, ',') ||
        !std::getline(ss, performance, ','))
      throw std::runtime_error(path + ": malformed row: " + line);
    if (scores.benchmark.empty()) scores.benchmark = benchmark;
    auto& per_matrix = last[method];
    if (per_matrix.empty() &&
        std::find(method_order.begin(), method_order.end(), method) == method_order.end())
      method_order.push_back(method);
    auto& slot = per_matrix[std::stoi(matrix)];
    const int r = std::stoi(round);
    if (r >= slot.first) slot = {r, std::stod(performance)};
  }
  for (const std::string& method : method_order) {
    std::vector<double> finals;
    for (const auto& [w, rp] : last[method]) finals.push_back(rp.second);
    scores.methods.emplace_back(method, std::move(finals));
  }
  return scores;
}

void write_aggregate_csv(const std::vector<BenchmarkScores>& benchmarks, int resamples,
                         std::uint64_t seed, const std::string& path) {
  if (benchmarks.empty()) throw std::invalid_argument("write_aggregate_csv: no benchmarks");
  std::vector<std::string> methods;
  for (const auto& [name, finals] : benchmarks.front().methods) methods.push_back(name);

  const auto scores_of = [&](const BenchmarkScores& b, const std::string& m) {
    for (const auto& [name, finals] : b.methods)
      if (name == m) return finals;
    throw std::runtime_error("aggregate: method " + m + " missing from " + b.benchmark);
  };
  for (const auto& b : benchmarks) {
    scores_of(b, "random");
    scores_of(b, "myopic-oracle");
  }

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "method,aggregated_performance,ci_half_width\n";
  for (const std::string& method : methods) {
    std::vector<double> ms, rs, os;
    for (const auto& b : benchmarks) {
      ms.push_back(mean_of(scores_of(b, method)));
      rs.push_back(mean_of(scores_of(b, "random")));
      os.push_back(mean_of(scores_of(b, "myopic-oracle")));
    }
    const double agg = aggregated_performance(ms, rs, os);

    // Percentile bootstrap over matrices, resampled independently per benchmark.
    SeededRng rng(seed);
    std::vector<double> stats(static_cast<std::size_t>(resamples));
    for (int rep = 0; rep < resamples; ++rep) {
      double total = 0.0;
      for (const auto& b : benchmarks) {
        const auto& mv = scores_of(b, method);
        const auto& rv = scores_of(b, "random");
        const auto& ov = scores_of(b, "myopic-oracle");
        const std::size_t n = mv.size();
        double sm = 0.0, sr = 0.0, so = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const std::size_t j = static_cast<std::size_t>(rng.next_below(n));
          sm += mv[j % mv.size()];
          sr += rv[j % rv.size()];
          so += ov[j % ov.size()];
        }
        const double denom = so - sr;
        total += denom == 0.0 ? 0.0 : (sm - sr) / denom;
      }
      stats[static_cast<std::size_t>(rep)] = total / static_cast<double>(benchmarks.size());
    }
    std::sort(stats.begin(), stats.end());
    const auto lastIdx = static_cast<double>(resamples - 1);
    const double lo = stats[static_cast<std::size_t>(std::floor(0.025 * lastIdx))];
    const double hi = stats[static_cast<std::size_t>(std::ceil(0.975 * lastIdx))];
    out << method << "," << fmt(agg) << "," << fmt((hi - lo) / 2.0) << "\n";
  }
}

}  // namespace mbtl
