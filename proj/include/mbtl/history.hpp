#pragma once

#include "mbtl/core.hpp"

#include <vector>

namespace mbtl {

/// Everything a selector may look at: the grid, the tasks trained so far and
/// the generalization rows revealed for them.
struct ObservedHistory {
  const TaskGrid* grid = nullptr;
  std::vector<int> selected;   // distinct task indices, in training order
  std::vector<Vector> rows;    // rows[k][n] = J(pi_{selected[k]}, y_n)

  int count() const { return static_cast<int>(selected.size()); }
  void validate() const;
};

/// Proposes the next training task given the revealed history only.
class TaskSelector {
 public:
  virtual ~TaskSelector() = default;
  virtual int next(const ObservedHistory& history) = 0;
};

}  // namespace mbtl
