#include "mbtl/orchestrate.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace mbtl {

SelectorRun run_selector(const Matrix& trial, const TaskGrid& grid, TaskSelector& selector,
                         int rounds) {
  const int n = grid.num_tasks();
  if (trial.rows() != n || trial.cols() != n)
    throw std::invalid_argument("run_selector: trial/grid mismatch");
  if (rounds < 1 || rounds > n) throw std::invalid_argument("run_selector: rounds out of range");

  SelectorRun run;
  ObservedHistory history;
  history.grid = &grid;
  Vector best = Vector::Constant(n, -std::numeric_limits<double>::infinity());
  for (int k = 0; k < rounds; ++k) {
    const int x = selector.next(history);
    if (x < 0 || x >= n) throw std::logic_error("run_selector: proposal out of range");
    if (std::find(history.selected.begin(), history.selected.end(), x) !=
        history.selected.end())
      throw std::logic_error("run_selector: duplicate proposal");
    history.selected.push_back(x);
    history.rows.push_back(trial.row(x).transpose());
    best = best.cwiseMax(history.rows.back());
    run.selected.push_back(x);
    run.trace.push_back(best.mean());
  }
  return run;
}

std::vector<double> trace_for_sequence(const Matrix& trial, const std::vector<int>& sequence) {
  Vector best = Vector::Constant(trial.cols(), -std::numeric_limits<double>::infinity());
  std::vector<double> trace;
  trace.reserve(sequence.size());
  for (int x : sequence) {
    best = best.cwiseMax(trial.row(x).transpose());
    trace.push_back(best.mean());
  }
  return trace;
}

int RandomSelector::next(const ObservedHistory& history) {
  const int n = history.grid->num_tasks();
  std::vector<char> taken(static_cast<std::size_t>(n), 0);
  for (int s : history.selected) taken[static_cast<std::size_t>(s)] = 1;
  const int remaining = n - history.count();
  if (remaining <= 0) throw std::logic_error("RandomSelector: no tasks left");
  auto r = rng_.next_below(static_cast<std::uint64_t>(remaining));
  for (int x = 0; x < n; ++x) {
    if (taken[static_cast<std::size_t>(x)]) continue;
    if (r == 0) return x;
    --r;
  }
  throw std::logic_error("RandomSelector: unreachable");
}

MyopicOracleSelector::MyopicOracleSelector(const std::vector<Matrix>& trials)
    : trials_(&trials) {
  if (trials.empty()) throw std::invalid_argument("MyopicOracleSelector: no trials");
  best_.assign(trials.size(), Vector::Constant(trials.front().cols(),
                                               -std::numeric_limits<double>::infinity()));
}

int MyopicOracleSelector::next(const ObservedHistory& history) {
  // Privileged: reads its own trials, not the revealed rows. Keep the running
  // best vectors in sync with the runner's selection prefix.
  if (history.selected.size() < seen_.size() ||
      !std::equal(seen_.begin(), seen_.end(), history.selected.begin()))
    throw std::logic_error("MyopicOracleSelector: history is not an extension");
  for (std::size_t i = seen_.size(); i < history.selected.size(); ++i) {
    const int x = history.selected[i];
    for (std::size_t w = 0; w < trials_->size(); ++w)
      best_[w] = best_[w].cwiseMax((*trials_)[w].row(x).transpose());
    seen_.push_back(x);
  }

  const int n = static_cast<int>((*trials_)[0].cols());
  int arg = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int x = 0; x < n; ++x) {
    if (std::find(seen_.begin(), seen_.end(), x) != seen_.end()) continue;
    double score = 0.0;
    for (std::size_t w = 0; w < trials_->size(); ++w)
      score += best_[w].cwiseMax((*trials_)[w].row(x).transpose()).mean();
    score /= static_cast<double>(trials_->size());
    if (score > best_score) {
      best_score = score;
      arg = x;
    }
  }
  if (arg < 0) throw std::logic_error("MyopicOracleSelector: no tasks left");
  return arg;
}

std::vector<int> MyopicOracleSelector::sequence(const std::vector<Matrix>& trials, int rounds) {
  MyopicOracleSelector oracle(trials);
  ObservedHistory history;  // the oracle only reads the selection prefix
  std::vector<int> seq;
  for (int k = 0; k < rounds; ++k) {
    const int x = oracle.next(history);
    history.selected.push_back(x);
    seq.push_back(x);
  }
  return seq;
}

SequentialOracleSelector::SequentialOracleSelector(const Matrix& trial)
    : trial_(&trial),
      best_(Vector::Constant(trial.cols(), -std::numeric_limits<double>::infinity())) {}

int SequentialOracleSelector::next(const ObservedHistory& history) {
  if (history.selected.size() < seen_.size() ||
      !std::equal(seen_.begin(), seen_.end(), history.selected.begin()))
    throw std::logic_error("SequentialOracleSelector: history is not an extension");
  for (std::size_t i = seen_.size(); i < history.selected.size(); ++i) {
    best_ = best_.cwiseMax(trial_->row(history.selected[i]).transpose());
    seen_.push_back(history.selected[i]);
  }
  const int n = static_cast<int>(trial_->cols());
  int arg = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int x = 0; x < n; ++x) {
    if (std::find(seen_.begin(), seen_.end(), x) != seen_.end()) continue;
    const double score = best_.cwiseMax(trial_->row(x).transpose()).mean();
    if (score > best_score) {
      best_score = score;
      arg = x;
    }
  }
  if (arg < 0) throw std::logic_error("SequentialOracleSelector: no tasks left");
  return arg;
}

SdMbtlSelector::SdMbtlSelector(DetectorFn detector, std::map<Structure, TaskSelector*> algorithms)
    : detector_(std::move(detector)), algorithms_(std::move(algorithms)) {
  if (!detector_ || algorithms_.empty())
    throw std::invalid_argument("SdMbtlSelector: detector and algorithms required");
}

int SdMbtlSelector::next(const ObservedHistory& history) {
  const Structure s = detector_(history);
  const auto it = algorithms_.find(s);
  if (it == algorithms_.end())
    throw std::runtime_error("SdMbtlSelector: no algorithm registered for detected structure");
  routing_.push_back(s);
  return it->second->next(history);
}

MgpSelector::MgpSelector(const TaskGrid& grid, MmbtlConfig m_config, GpMbtlConfig gp_config,
                         DetectionConfig detection) {
  m_ = std::make_unique<MmbtlSelector>(grid, std::move(m_config));
  gp_ = std::make_unique<GpMbtlSelector>(grid, gp_config);
  sd_ = std::make_unique<SdMbtlSelector>(
      [detection](const ObservedHistory& h) { return detect(h, detection); },
      std::map<Structure, TaskSelector*>{{Structure::kMountain, m_.get()},
                                         {Structure::kNone, gp_.get()}});
}

int MgpSelector::next(const ObservedHistory& history) { return sd_->next(history); }

}  // namespace mbtl
