#pragma once

#include "mbtl/core.hpp"

#include <string>
#include <vector>

namespace mbtl {

/// Additive split J(i, j) = f[i] + g[j] + h(i, j) + C with h zero on the
/// diagonal and g zero-mean. f is generally not zero-mean.
struct Decomposition {
  double C = 0.0;
  Vector f;  // policy quality per source
  Vector g;  // task difficulty per target
  Matrix h;  // task dissimilarity
};

Decomposition decompose(const Matrix& trial);

struct ComponentSummary {
  double std_f = 0.0;
  double std_g = 0.0;
  Vector row_std_h;
  // 1-D marginal means, one entry per grid position along each dimension.
  std::vector<Vector> f_marginal;
  std::vector<Vector> g_marginal;
  // Per-dimension mean of h over (source position, target position) pairs.
  std::vector<Matrix> h_marginal;
};

ComponentSummary component_summary(const TaskGrid& grid, const Decomposition& d);

/// Columns: component,{f|g|h},source index, target index (empty for f/g), value.
void write_decomposition_csv(const Decomposition& d, const std::string& path);

}  // namespace mbtl
