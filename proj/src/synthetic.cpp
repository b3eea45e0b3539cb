#include "mbtl/synthetic.hpp"

#include <sstream>
#include <stdexcept>

namespace mbtl {

void SyntheticConfig::validate() const {
  grid.validate();
  const int d = grid.num_dims();
  if (f_weights.size() != d || g_weights.size() != d || h_left.size() != d || h_right.size() != d)
    throw std::invalid_argument("SyntheticConfig: weight length mismatch");
  if (noise_sigma < 0) throw std::invalid_argument("SyntheticConfig: negative noise sigma");
  if (trials < 1) throw std::invalid_argument("SyntheticConfig: trials must be positive");
}

TransferMatrix generate(const SyntheticConfig& config) {
  config.validate();
  const int n = config.grid.num_tasks();
  const int d = config.grid.num_dims();
  const Matrix ctx = all_context_vectors(config.grid);
  const Vector fx = ctx * config.f_weights;
  const Vector gy = ctx * config.g_weights;

  TransferMatrix out;
  out.grid = config.grid;
  out.name = config.name;
  out.normalized = false;
  out.trials.reserve(static_cast<std::size_t>(config.trials));

  Matrix base(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double h = 0.0;
      for (int k = 0; k < d; ++k) {
        const double v = ctx(i, k) - ctx(j, k);
        h -= v > 0 ? config.h_right[k] * v : config.h_left[k] * v;
      }
      base(i, j) = fx[i] + gy[j] + h + config.offset;
    }
  }

  SeededRng root(config.seed);
  for (int t = 0; t < config.trials; ++t) {
    Matrix trial = base;
    if (config.noise_sigma > 0) {
      SeededRng rng = root.substream(static_cast<std::uint64_t>(t));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) trial(i, j) += config.noise_sigma * rng.next_gaussian();
    }
    out.trials.push_back(std::move(trial));
  }
  return out;
}

namespace {

Vector constant_vec(int d, double v) { return Vector::Constant(d, v); }

[[noreturn]] void bad_preset(const std::string& name) {
  throw std::invalid_argument(
      "unknown preset '" + name +
      "'; expected e.g. 3d/const-f/none-g/l1/sigma5, 5d/lin-f/const-g/nondist1, 7d/lin-g/l1");
}

}  // namespace

SyntheticConfig preset(const std::string& name) {
  std::vector<std::string> tokens;
  std::stringstream ss(name);
  for (std::string tok; std::getline(ss, tok, '/');) tokens.push_back(tok);
  if (tokens.empty()) bad_preset(name);

  int d = 0;
  if (tokens[0] == "3d") d = 3;
  else if (tokens[0] == "5d") d = 5;
  else if (tokens[0] == "7d") d = 7;
  else bad_preset(name);

  SyntheticConfig cfg;
  cfg.grid = TaskGrid::integers(std::vector<int>(static_cast<std::size_t>(d), 8));
  cfg.f_weights = constant_vec(d, 0.0);
  cfg.g_weights = constant_vec(d, 0.0);
  cfg.offset = 500.0;
  cfg.noise_sigma = 5.0;
  cfg.name = name;

  const double lin_f = d == 3 ? 4.0 : 2.0;
  const double lin_g = d == 3 ? 3.0 : 2.0;

  bool have_h = false;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const std::string& t = tokens[i];
    if (t == "const-f" || t == "none-f") {
      cfg.f_weights = constant_vec(d, 0.0);
    } else if (t == "lin-f" || t == "linear-f") {
      cfg.f_weights = constant_vec(d, lin_f);
    } else if (t == "const-g" || t == "none-g") {
      cfg.g_weights = constant_vec(d, 0.0);
    } else if (t == "lin-g" || t == "linear-g") {
      cfg.g_weights = constant_vec(d, lin_g);
    } else if (t == "l1") {
      cfg.h_left = constant_vec(d, -3.0);
      cfg.h_right = constant_vec(d, 3.0);
      have_h = true;
    } else if (t == "nondist" || t == "non-distance") {
      if (d == 5) bad_preset(name);  // 5d distinguishes nondist1/nondist2
      cfg.h_left = constant_vec(d, 1.0);
      cfg.h_right = constant_vec(d, 3.0);
      if (d == 3) cfg.h_left[2] = -3.0;
      if (d == 7) cfg.h_left[5] = cfg.h_left[6] = -3.0;
      have_h = true;
    } else if (t == "nondist1" && d == 5) {
      cfg.h_left = constant_vec(d, 1.0);
      cfg.h_left[3] = cfg.h_left[4] = -3.0;
      cfg.h_right = constant_vec(d, 3.0);
      have_h = true;
    } else if (t == "nondist2" && d == 5) {
      cfg.h_left = constant_vec(d, 1.0);
      cfg.h_left[4] = -3.0;
      cfg.h_right = constant_vec(d, 3.0);
      have_h = true;
    } else if (t.rfind("sigma", 0) == 0) {
      try {
        cfg.noise_sigma = std::stod(t.substr(5));
      } catch (const std::exception&) {
        bad_preset(name);
      }
      if (cfg.noise_sigma < 0) bad_preset(name);
    } else {
      bad_preset(name);
    }
  }
  if (!have_h) bad_preset(name);
  return cfg;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const char* f : {"const-f", "lin-f"})
    for (const char* g : {"none-g", "lin-g"})
      for (const char* h : {"l1", "nondist"})
        for (const char* s : {"sigma0", "sigma5", "sigma30"})
          names.push_back(std::string("3d/") + f + "/" + g + "/" + h + "/" + s);
  for (const char* f : {"const-f", "lin-f"})
    for (const char* g : {"const-g", "lin-g"})
      for (const char* h : {"l1", "nondist1", "nondist2"})
        names.push_back(std::string("5d/") + f + "/" + g + "/" + h);
  for (const char* g : {"const-g", "lin-g"})
    for (const char* h : {"l1", "nondist"}) names.push_back(std::string("7d/") + g + "/" + h);
  return names;
}

}  // namespace mbtl
