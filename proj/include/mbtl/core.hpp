#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace mbtl {

// Row-major so trial rows (one per source task) are contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Discretized context space. Task index <-> multi-index mapping is row-major
/// with the last dimension fastest.
struct TaskGrid {
  std::vector<int> dims;
  std::vector<std::vector<double>> contexts;  // strictly increasing, one list per dim

  /// Grid with integer contexts 1..m in every dimension.
  static TaskGrid integers(std::vector<int> dims);

  int num_dims() const { return static_cast<int>(dims.size()); }
  int num_tasks() const;
  void validate() const;
};

int task_index(const TaskGrid& grid, const std::vector<int>& multi_index);
std::vector<int> task_multi_index(const TaskGrid& grid, int n);

/// 0-based per-dimension grid positions of task n, as reals. This is the
/// coordinate system used for distances and regression features.
Vector grid_coords(const TaskGrid& grid, int n);

/// N x D matrix of grid-index coordinates for all tasks.
Matrix all_grid_coords(const TaskGrid& grid);

/// Raw context values of task n.
Vector context_vector(const TaskGrid& grid, int n);
Matrix all_context_vectors(const TaskGrid& grid);

/// Per-dimension slopes of the weighted L1 metric.
struct DistanceWeights {
  Vector w;

  static DistanceWeights uniform(int num_dims, double slope = 0.01);
  void validate() const;
};

double l1_distance(const Vector& a, const Vector& b, const DistanceWeights& weights);

/// N x N generalization performances, one matrix per trial. Entry (i, j) is
/// the performance of the policy trained on task i evaluated on task j.
struct TransferMatrix {
  TaskGrid grid;
  std::vector<Matrix> trials;
  bool normalized = false;
  std::string name;

  int num_trials() const { return static_cast<int>(trials.size()); }
  void validate() const;
};

/// Rescales every entry by one global affine map so the minimum over all
/// trials becomes 0 and the maximum 1. Throws on a constant matrix.
TransferMatrix min_max_normalize(const TransferMatrix& matrix);

/// Deterministic 64-bit generator (SplitMix64). Substreams are derived by
/// mixing the original seed with the stream index, so draws from distinct
/// substreams are order-independent.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform draw in (0, 1] from the top 53 bits.
  double next_unit();

  /// Standard normal via Box-Muller (two uniforms per draw, cosine branch).
  double next_gaussian();

  /// Unbiased uniform draw in [0, n). n must be positive.
  std::uint64_t next_below(std::uint64_t n);

  SeededRng substream(std::uint64_t index) const;

  static std::uint64_t mix(std::uint64_t x);

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

}  // namespace mbtl
