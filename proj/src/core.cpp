#include "mbtl/core.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mbtl {

TaskGrid TaskGrid::integers(std::vector<int> dims) {
  TaskGrid grid;
  grid.dims = std::move(dims);
  grid.contexts.reserve(grid.dims.size());
  for (int m : grid.dims) {
    std::vector<double> ctx(static_cast<std::size_t>(m > 0 ? m : 0));
    for (int i = 0; i < m; ++i) ctx[static_cast<std::size_t>(i)] = i + 1.0;
    grid.contexts.push_back(std::move(ctx));
  }
  grid.validate();
  return grid;
}

int TaskGrid::num_tasks() const {
  long long n = 1;
  for (int m : dims) n *= m;
  return static_cast<int>(n);
}

void TaskGrid::validate() const {
  if (dims.empty()) throw std::invalid_argument("TaskGrid: need at least one dimension");
  if (contexts.size() != dims.size())
    throw std::invalid_argument("TaskGrid: contexts/dims length mismatch");
  long long n = 1;
  for (std::size_t d = 0; d < dims.size(); ++d) {
    if (dims[d] < 1) throw std::invalid_argument("TaskGrid: dimension sizes must be positive");
    n *= dims[d];
    if (n > std::numeric_limits<int>::max())
      throw std::invalid_argument("TaskGrid: task count overflows int");
    if (contexts[d].size() != static_cast<std::size_t>(dims[d]))
      throw std::invalid_argument("TaskGrid: context list length mismatch");
    for (std::size_t i = 1; i < contexts[d].size(); ++i)
      if (!(contexts[d][i] > contexts[d][i - 1]))
        throw std::invalid_argument("TaskGrid: contexts must be strictly increasing");
  }
}

int task_index(const TaskGrid& grid, const std::vector<int>& multi_index) {
  if (multi_index.size() != grid.dims.size())
    throw std::out_of_range("task_index: multi-index length mismatch");
  int flat = 0;
  for (std::size_t d = 0; d < grid.dims.size(); ++d) {
    if (multi_index[d] < 0 || multi_index[d] >= grid.dims[d])
      throw std::out_of_range("task_index: multi-index out of range");
    flat = flat * grid.dims[d] + multi_index[d];
  }
  return flat;
}

std::vector<int> task_multi_index(const TaskGrid& grid, int n) {
  if (n < 0 || n >= grid.num_tasks()) throw std::out_of_range("task_multi_index: index out of range");
  std::vector<int> mi(grid.dims.size());
  for (int d = static_cast<int>(grid.dims.size()) - 1; d >= 0; --d) {
    mi[static_cast<std::size_t>(d)] = n % grid.dims[static_cast<std::size_t>(d)];
    n /= grid.dims[static_cast<std::size_t>(d)];
  }
  return mi;
}

Vector grid_coords(const TaskGrid& grid, int n) {
  const std::vector<int> mi = task_multi_index(grid, n);
  Vector c(grid.num_dims());
  for (int d = 0; d < grid.num_dims(); ++d) c[d] = mi[static_cast<std::size_t>(d)];
  return c;
}

Matrix all_grid_coords(const TaskGrid& grid) {
  const int n = grid.num_tasks();
  const int dims = grid.num_dims();
  Matrix coords(n, dims);
  std::vector<int> mi(static_cast<std::size_t>(dims), 0);
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < dims; ++d) coords(i, d) = mi[static_cast<std::size_t>(d)];
    for (int d = dims - 1; d >= 0; --d) {
      if (++mi[static_cast<std::size_t>(d)] < grid.dims[static_cast<std::size_t>(d)]) break;
      mi[static_cast<std::size_t>(d)] = 0;
    }
  }
  return coords;
}

Vector context_vector(const TaskGrid& grid, int n) {
  const std::vector<int> mi = task_multi_index(grid, n);
  Vector c(grid.num_dims());
  for (int d = 0; d < grid.num_dims(); ++d)
    c[d] = grid.contexts[static_cast<std::size_t>(d)][static_cast<std::size_t>(mi[static_cast<std::size_t>(d)])];
  return c;
}

Matrix all_context_vectors(const TaskGrid& grid) {
  const int n = grid.num_tasks();
  Matrix ctx(n, grid.num_dims());
  for (int i = 0; i < n; ++i) ctx.row(i) = context_vector(grid, i).transpose();
  return ctx;
}

DistanceWeights DistanceWeights::uniform(int num_dims, double slope) {
  DistanceWeights w;
  w.w = Vector::Constant(num_dims, slope);
  w.validate();
  return w;
}

void DistanceWeights::validate() const {
  if (w.size() == 0) throw std::invalid_argument("DistanceWeights: empty");
  if ((w.array() < 0).any()) throw std::invalid_argument("DistanceWeights: negative weight");
  if ((w.array() > 0).count() == 0) throw std::invalid_argument("DistanceWeights: all weights zero");
}

double l1_distance(const Vector& a, const Vector& b, const DistanceWeights& weights) {
  if (a.size() != b.size() || a.size() != weights.w.size())
    throw std::invalid_argument("l1_distance: length mismatch");
  return ((a - b).cwiseAbs().cwiseProduct(weights.w)).sum();
}

void TransferMatrix::validate() const {
  grid.validate();
  const int n = grid.num_tasks();
  if (trials.empty()) throw std::invalid_argument("TransferMatrix: need at least one trial");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const Matrix& t : trials) {
    if (t.rows() != n || t.cols() != n)
      throw std::invalid_argument("TransferMatrix: trial shape mismatch");
    if (!t.allFinite()) throw std::invalid_argument("TransferMatrix: non-finite entry");
    lo = std::min(lo, t.minCoeff());
    hi = std::max(hi, t.maxCoeff());
  }
  if (normalized) {
    if (lo < -1e-12 || hi > 1.0 + 1e-12 || std::abs(lo) > 1e-12 || std::abs(hi - 1.0) > 1e-12)
      throw std::invalid_argument("TransferMatrix: normalized flag set but range is not [0, 1]");
  }
}

TransferMatrix min_max_normalize(const TransferMatrix& matrix) {
  matrix.validate();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const Matrix& t : matrix.trials) {
    lo = std::min(lo, t.minCoeff());
    hi = std::max(hi, t.maxCoeff());
  }
  if (!(hi > lo)) throw std::runtime_error("min_max_normalize: constant matrix");
  TransferMatrix out;
  out.grid = matrix.grid;
  out.name = matrix.name;
  out.normalized = true;
  out.trials.reserve(matrix.trials.size());
  const double scale = 1.0 / (hi - lo);
  for (const Matrix& t : matrix.trials) out.trials.push_back(((t.array() - lo) * scale).matrix());
  return out;
}

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

SeededRng::SeededRng(std::uint64_t seed) : seed_(seed), state_(seed) {}

std::uint64_t SeededRng::mix(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t SeededRng::next_u64() {
  state_ += kGolden;
  return mix(state_);
}

double SeededRng::next_unit() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double SeededRng::next_gaussian() {
  const double u1 = next_unit();
  const double u2 = next_unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t SeededRng::next_below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("next_below: n must be positive");
  const std::uint64_t threshold = (0ULL - n) % n;  // 2^64 mod n
  for (;;) {
    const std::uint64_t x = next_u64();
    if (x >= threshold) return x % n;
  }
}

SeededRng SeededRng::substream(std::uint64_t index) const {
  return SeededRng(mix(seed_ ^ (kGolden * (index + 1))));
}

}  // namespace mbtl
