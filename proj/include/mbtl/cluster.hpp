#pragma once

#include "mbtl/core.hpp"
#include "mbtl/history.hpp"

#include <cstdint>
#include <vector>

namespace mbtl {

struct MmbtlConfig {
  DistanceWeights weights;
  int num_samples = 0;  // 0 = one candidate per task (paper default M = N)
  int max_iterations = 100;
  std::uint64_t seed = 0;
  bool fast_update = true;
};

/// Mean over tasks of the distance to the nearest centroid (grid-index
/// coordinates, weighted L1).
double clustering_loss(const std::vector<Vector>& centroids, const TaskGrid& grid,
                       const DistanceWeights& weights);

struct CentroidFit {
  Vector coords;
  double loss = 0.0;
};

/// Alternates nearest-centroid assignment against fixed centroids and
/// per-dimension weighted-median re-centering until the new centroid stops
/// moving. Assignment ties go to the fixed centroid; even-count medians take
/// the lower median. Returns the refined centroid and the total loss of
/// fixed + refined.
CentroidFit update_centroid(const Vector& initial, const std::vector<Vector>& fixed,
                            const TaskGrid& grid, const DistanceWeights& weights,
                            int max_iterations = 100);

/// Sequential weighted-K-medians source selection. Each round refines every
/// candidate against the already-selected centroids and proposes the
/// candidate with the lowest clustering loss. With fast_update, a candidate
/// whose cluster does not intersect the previous winner's reuses its cached
/// position, with the loss adjusted by the previous round's reduction.
class MmbtlSelector final : public TaskSelector {
 public:
  MmbtlSelector(const TaskGrid& grid, MmbtlConfig config);

  int next(const ObservedHistory& history) override;

  double current_loss() const { return last_total_; }

 private:
  struct Candidate {
    int init_index = 0;
    Vector coords;
    double loss = 0.0;
  };

  void sync(const std::vector<int>& selected);
  void absorb(int task);
  void rebuild(const std::vector<int>& selected);
  Vector distance_to_all(const Vector& point) const;
  CentroidFit refine(const Vector& initial) const;
  bool intersects_previous_winner(const Vector& cand_coords) const;
  int snap_index(const Vector& coords) const;

  TaskGrid grid_;
  MmbtlConfig cfg_;
  Matrix coords_;
  int num_tasks_ = 0;

  std::vector<int> selected_;
  Vector amin_;       // coverage by selected_
  Vector amin_prev_;  // coverage by selected_ without its last element
  Vector dwin_;       // distances of the last selected centroid
  double last_total_ = 0.0;
  double last_delta_ = 0.0;

  std::vector<Candidate> candidates_;
  int cand_fixed_count_ = -1;  // fixed-centroid count the cache was built for
};

}  // namespace mbtl
