#pragma once

#include "mbtl/cluster.hpp"
#include "mbtl/core.hpp"
#include "mbtl/detection.hpp"
#include "mbtl/gp_select.hpp"
#include "mbtl/history.hpp"

#include <functional>
#include <map>
#include <memory>
#include <vector>

namespace mbtl {

struct SelectorRun {
  std::vector<int> selected;
  std::vector<double> trace;  // per-round mean over targets of the best revealed value
};

/// Runs a selector for the given number of rounds against one trial matrix,
/// revealing exactly the rows it trains on. A duplicate or out-of-range
/// proposal is a contract violation.
SelectorRun run_selector(const Matrix& trial, const TaskGrid& grid, TaskSelector& selector,
                         int rounds);

/// Evaluates a precomputed selection sequence on a trial.
std::vector<double> trace_for_sequence(const Matrix& trial, const std::vector<int>& sequence);

class RandomSelector final : public TaskSelector {
 public:
  explicit RandomSelector(std::uint64_t seed) : rng_(seed) {}
  int next(const ObservedHistory& history) override;

 private:
  SeededRng rng_;
};

/// Privileged greedy selector that sees every trial and picks one common
/// sequence maximizing the trial-averaged objective.
class MyopicOracleSelector final : public TaskSelector {
 public:
  explicit MyopicOracleSelector(const std::vector<Matrix>& trials);
  int next(const ObservedHistory& history) override;

  /// The full sequence for the given number of rounds (stateless helper).
  static std::vector<int> sequence(const std::vector<Matrix>& trials, int rounds);

 private:
  const std::vector<Matrix>* trials_;
  std::vector<int> seen_;
  std::vector<Vector> best_;
};

/// Per-trial greedy oracle; identical to the myopic oracle when W = 1.
class SequentialOracleSelector final : public TaskSelector {
 public:
  explicit SequentialOracleSelector(const Matrix& trial);
  int next(const ObservedHistory& history) override;

 private:
  const Matrix* trial_;
  std::vector<int> seen_;
  Vector best_;
};

using DetectorFn = std::function<Structure(const ObservedHistory&)>;

/// Generic structure-detection loop: detect, then delegate to the algorithm
/// registered for the detected structure.
class SdMbtlSelector : public TaskSelector {
 public:
  SdMbtlSelector(DetectorFn detector, std::map<Structure, TaskSelector*> algorithms);
  int next(const ObservedHistory& history) override;
  const std::vector<Structure>& routing() const { return routing_; }

 private:
  DetectorFn detector_;
  std::map<Structure, TaskSelector*> algorithms_;
  std::vector<Structure> routing_;
};

/// M/GP-MBTL: Mountain routes to the clustering selector, None to the GP
/// selector.
class MgpSelector final : public TaskSelector {
 public:
  MgpSelector(const TaskGrid& grid, MmbtlConfig m_config, GpMbtlConfig gp_config,
              DetectionConfig detection = {});
  int next(const ObservedHistory& history) override;
  const std::vector<Structure>& routing() const { return sd_->routing(); }

 private:
  std::unique_ptr<MmbtlSelector> m_;
  std::unique_ptr<GpMbtlSelector> gp_;
  std::unique_ptr<SdMbtlSelector> sd_;
};

}  // namespace mbtl
