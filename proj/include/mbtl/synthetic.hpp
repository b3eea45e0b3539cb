#pragma once

#include "mbtl/core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mbtl {

/// Configuration of the additive generator
///   J(i, j) = f.x_i + g.y_j - (h_right.[x_i - y_j]_+ + h_left.[x_i - y_j]_-)
///             + offset + noise,
/// where x, y are raw context vectors, [.]_+ / [.]_- are elementwise
/// positive/negative parts and noise is N(0, sigma^2) i.i.d.
struct SyntheticConfig {
  TaskGrid grid;
  Vector f_weights;  // zero vector = constant policy quality
  Vector g_weights;  // zero vector = constant task difficulty
  Vector h_left;
  Vector h_right;
  double offset = 500.0;
  double noise_sigma = 0.0;
  int trials = 1;
  std::uint64_t seed = 0;
  std::string name;

  void validate() const;
};

/// One noise substream per trial; within a trial, draws are consumed in
/// row-major (i, j) order, so trials can be generated independently.
TransferMatrix generate(const SyntheticConfig& config);

/// Named weight configurations:
///   3d/{const|lin}-f/{none|lin}-g/{l1|nondist}/sigma{0|5|30}
///   5d/{const|lin}-f/{const|lin}-g/{l1|nondist1|nondist2}[/sigma{S}]
///   7d/{const|lin}-g/{l1|nondist}[/sigma{S}]
/// "const" and "none" are synonyms for zero weights; 5d/7d default to
/// sigma5. Short forms like "5d/nondist1" resolve with constant f and g.
SyntheticConfig preset(const std::string& name);

std::vector<std::string> preset_names();

}  // namespace mbtl
