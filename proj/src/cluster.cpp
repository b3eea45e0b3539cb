#include "mbtl/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mbtl {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double clustering_loss(const std::vector<Vector>& centroids, const TaskGrid& grid,
                       const DistanceWeights& weights) {
  if (centroids.empty()) throw std::invalid_argument("clustering_loss: no centroids");
  const Matrix coords = all_grid_coords(grid);
  const int n = grid.num_tasks();
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double best = kInf;
    for (const Vector& c : centroids)
      best = std::min(best, ((coords.row(i).transpose() - c).cwiseAbs().cwiseProduct(weights.w)).sum());
    total += best;
  }
  return total / n;
}

namespace {

Vector coverage(const Matrix& coords, const std::vector<Vector>& fixed, const Vector& w) {
  Vector amin = Vector::Constant(coords.rows(), kInf);
  for (const Vector& c : fixed)
    amin = amin.cwiseMin(((coords.rowwise() - c.transpose()).cwiseAbs() * w).eval());
  return amin;
}

CentroidFit refine_against(const Matrix& coords, const Vector& amin, const Vector& w,
                           Vector c, int max_iterations) {
  const int n = static_cast<int>(coords.rows());
  const int d = static_cast<int>(coords.cols());
  std::vector<double> scratch;
  scratch.reserve(static_cast<std::size_t>(n));
  for (int it = 0; it < max_iterations; ++it) {
    const Vector dist = (coords.rowwise() - c.transpose()).cwiseAbs() * w;
    Vector next(d);
    bool any = false;
    for (int dd = 0; dd < d; ++dd) {
      scratch.clear();
      for (int i = 0; i < n; ++i)
        if (dist[i] < amin[i]) scratch.push_back(coords(i, dd));
      if (scratch.empty()) break;
      any = true;
      const std::size_t mid = (scratch.size() - 1) / 2;  // lower median
      std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(mid),
                       scratch.end());
      next[dd] = scratch[mid];
    }
    if (!any) break;
    if ((next.array() == c.array()).all()) break;
    c = std::move(next);
  }
  const Vector dist = (coords.rowwise() - c.transpose()).cwiseAbs() * w;
  return {c, dist.cwiseMin(amin).mean()};
}

}  // namespace

CentroidFit update_centroid(const Vector& initial, const std::vector<Vector>& fixed,
                            const TaskGrid& grid, const DistanceWeights& weights,
                            int max_iterations) {
  const Matrix coords = all_grid_coords(grid);
  if (initial.size() != coords.cols()) throw std::invalid_argument("update_centroid: bad initial");
  return refine_against(coords, coverage(coords, fixed, weights.w), weights.w, initial,
                        max_iterations);
}

MmbtlSelector::MmbtlSelector(const TaskGrid& grid, MmbtlConfig config)
    : grid_(grid), cfg_(std::move(config)) {
  grid_.validate();
  cfg_.weights.validate();
  if (cfg_.weights.w.size() != grid_.num_dims())
    throw std::invalid_argument("MmbtlSelector: weight length mismatch");
  coords_ = all_grid_coords(grid_);
  num_tasks_ = grid_.num_tasks();
  if (cfg_.num_samples < 0 || cfg_.num_samples > num_tasks_)
    throw std::invalid_argument("MmbtlSelector: num_samples out of range");
  amin_ = Vector::Constant(num_tasks_, kInf);
  amin_prev_ = amin_;
  last_total_ = kInf;

  const int m = cfg_.num_samples == 0 ? num_tasks_ : cfg_.num_samples;
  std::vector<int> inits;
  if (m == num_tasks_) {
    inits.resize(static_cast<std::size_t>(num_tasks_));
    for (int i = 0; i < num_tasks_; ++i) inits[static_cast<std::size_t>(i)] = i;
  } else {
    // Uniform sample without replacement (partial Fisher-Yates).
    std::vector<int> pool(static_cast<std::size_t>(num_tasks_));
    for (int i = 0; i < num_tasks_; ++i) pool[static_cast<std::size_t>(i)] = i;
    SeededRng rng(cfg_.seed);
    for (int i = 0; i < m; ++i) {
      const auto j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(num_tasks_ - i)));
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(m));
    std::sort(pool.begin(), pool.end());
    inits = std::move(pool);
  }
  candidates_.resize(inits.size());
  for (std::size_t i = 0; i < inits.size(); ++i) candidates_[i].init_index = inits[i];
}

Vector MmbtlSelector::distance_to_all(const Vector& point) const {
  return (coords_.rowwise() - point.transpose()).cwiseAbs() * cfg_.weights.w;
}

CentroidFit MmbtlSelector::refine(const Vector& initial) const {
  return refine_against(coords_, amin_, cfg_.weights.w, initial, cfg_.max_iterations);
}

void MmbtlSelector::absorb(int task) {
  amin_prev_ = amin_;
  dwin_ = distance_to_all(coords_.row(task).transpose());
  const double prev_total = selected_.empty() ? kInf : amin_.mean();
  amin_ = amin_.cwiseMin(dwin_);
  last_total_ = amin_.mean();
  last_delta_ = prev_total - last_total_;
  selected_.push_back(task);
}

void MmbtlSelector::rebuild(const std::vector<int>& selected) {
  selected_.clear();
  amin_ = Vector::Constant(num_tasks_, kInf);
  amin_prev_ = amin_;
  last_total_ = kInf;
  last_delta_ = kInf;
  cand_fixed_count_ = -1;
  for (int task : selected) absorb(task);
}

void MmbtlSelector::sync(const std::vector<int>& selected) {
  if (selected.size() == selected_.size() &&
      std::equal(selected.begin(), selected.end(), selected_.begin()))
    return;
  if (selected.size() == selected_.size() + 1 &&
      std::equal(selected_.begin(), selected_.end(), selected.begin())) {
    absorb(selected.back());
    return;
  }
  rebuild(selected);
}

bool MmbtlSelector::intersects_previous_winner(const Vector& cand_coords) const {
  const int d = static_cast<int>(coords_.cols());
  for (int i = 0; i < num_tasks_; ++i) {
    if (!(dwin_[i] < amin_prev_[i])) continue;
    double dist = 0.0;
    for (int dd = 0; dd < d; ++dd)
      dist += cfg_.weights.w[dd] * std::abs(coords_(i, dd) - cand_coords[dd]);
    if (dist < amin_prev_[i]) return true;
  }
  return false;
}

int MmbtlSelector::snap_index(const Vector& coords) const {
  std::vector<int> mi(static_cast<std::size_t>(grid_.num_dims()));
  for (int d = 0; d < grid_.num_dims(); ++d) {
    const auto v = static_cast<int>(std::lround(coords[d]));
    mi[static_cast<std::size_t>(d)] = std::clamp(v, 0, grid_.dims[static_cast<std::size_t>(d)] - 1);
  }
  return task_index(grid_, mi);
}

int MmbtlSelector::next(const ObservedHistory& history) {
  if (history.grid != nullptr && history.grid->num_tasks() != num_tasks_)
    throw std::invalid_argument("MmbtlSelector: grid mismatch");
  sync(history.selected);
  const int fixed_count = static_cast<int>(selected_.size());
  if (fixed_count >= num_tasks_) throw std::logic_error("MmbtlSelector: no tasks left");

  const bool cache_usable =
      cfg_.fast_update && cand_fixed_count_ == fixed_count - 1 && fixed_count >= 2;
  for (Candidate& cand : candidates_) {
    if (cache_usable && !intersects_previous_winner(cand.coords)) {
      cand.loss -= last_delta_;
      continue;
    }
    const CentroidFit fit = refine(coords_.row(cand.init_index).transpose());
    cand.coords = fit.coords;
    cand.loss = fit.loss;
  }
  cand_fixed_count_ = fixed_count;

  // Cached losses differ from freshly computed ones by rounding, so ties are
  // resolved with a small tolerance; distinct losses on a finite grid differ
  // by far more than this.
  int best = -1;
  double best_loss = kInf;
  for (std::size_t m = 0; m < candidates_.size(); ++m) {
    const int idx = snap_index(candidates_[m].coords);
    if (std::find(selected_.begin(), selected_.end(), idx) != selected_.end()) continue;
    if (best < 0 ||
        candidates_[m].loss < best_loss - 1e-9 * (1.0 + std::abs(best_loss))) {
      best_loss = candidates_[m].loss;
      best = idx;
    }
  }
  if (best >= 0) return best;

  // Every candidate collided with a chosen centroid: fall back to the
  // unselected task with the lowest marginal loss.
  double fallback_loss = kInf;
  for (int x = 0; x < num_tasks_; ++x) {
    if (std::find(selected_.begin(), selected_.end(), x) != selected_.end()) continue;
    const double loss = distance_to_all(coords_.row(x).transpose()).cwiseMin(amin_).mean();
    if (loss < fallback_loss) {
      fallback_loss = loss;
      best = x;
    }
  }
  if (best < 0) throw std::logic_error("MmbtlSelector: no unselected task");
  return best;
}

}  // namespace mbtl
