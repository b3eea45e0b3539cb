#include "mbtl/decomposition.hpp"

#include "mbtl/synthetic.hpp"

#include <doctest.h>

using namespace mbtl;

namespace {

Matrix mountain3() {
  Matrix j(3, 3);
  j << 10, 9, 8, 9, 10, 9, 8, 9, 10;
  return j;
}

void check_identities(const Matrix& j, const Decomposition& d) {
  const auto n = j.rows();
  for (Eigen::Index a = 0; a < n; ++a) {
    CHECK(std::abs(d.h(a, a)) < 1e-12);
    for (Eigen::Index b = 0; b < n; ++b)
      CHECK(std::abs(d.f[a] + d.g[b] + d.h(a, b) + d.C - j(a, b)) < 1e-12);
  }
  CHECK(std::abs(d.g.mean()) < 1e-12);
}

}  // namespace

TEST_CASE("hand-worked 3x3 mountain decomposition") {
  const Matrix j = mountain3();
  const Decomposition d = decompose(j);
  CHECK(d.C == doctest::Approx(82.0 / 9).epsilon(1e-14));
  CHECK(d.g[0] == doctest::Approx(-1.0 / 9).epsilon(1e-12));
  CHECK(d.g[1] == doctest::Approx(2.0 / 9).epsilon(1e-12));
  CHECK(d.g[2] == doctest::Approx(-1.0 / 9).epsilon(1e-12));
  CHECK(d.f[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.f[1] == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(d.f[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.h(0, 1) == doctest::Approx(-4.0 / 3).epsilon(1e-12));
  check_identities(j, d);

  // The mean of f is not zero here; asserting otherwise would be wrong.
  CHECK(std::abs(d.f.mean()) > 1e-3);
}

TEST_CASE("constant matrix decomposes to the constant") {
  const Matrix j = Matrix::Constant(4, 4, 7.5);
  const Decomposition d = decompose(j);
  CHECK(d.C == doctest::Approx(7.5));
  CHECK(d.f.isZero(1e-12));
  CHECK(d.g.isZero(1e-12));
  CHECK(d.h.isZero(1e-12));
}

TEST_CASE("identities hold on random matrices") {
  SeededRng rng(11);
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + static_cast<int>(rng.next_below(6));
    Matrix j(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) j(a, b) = 10 * rng.next_gaussian();
    check_identities(j, decompose(j));
  }
}

TEST_CASE("decompose is a pure function") {
  const Matrix j = mountain3();
  const Decomposition a = decompose(j);
  const Decomposition b = decompose(j);
  CHECK(a.C == b.C);
  CHECK(a.f == b.f);
  CHECK(a.g == b.g);
  CHECK(a.h == b.h);
}

TEST_CASE("decompose rejects non-square input") {
  CHECK_THROWS_AS(decompose(Matrix::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("noiseless mountain synthetic: recovered h matches the generator after re-centering") {
  SyntheticConfig cfg = preset("3d/const-f/none-g/l1/sigma0");
  cfg.grid = TaskGrid::integers({4, 4, 4});
  cfg.f_weights = Vector::Zero(3);
  cfg.g_weights = Vector::Zero(3);
  cfg.trials = 1;
  const TransferMatrix m = generate(cfg);
  const Decomposition d = decompose(m.trials[0]);
  check_identities(m.trials[0], d);

  // The generator's h is -3*L1; Definition-style h differs from it by the
  // column-mean correction absorbed into g, so compare via reconstruction.
  const int n = cfg.grid.num_tasks();
  const DistanceWeights w3 = DistanceWeights::uniform(3, 3.0);
  for (int i = 0; i < n; i += 5) {
    for (int j = 0; j < n; j += 3) {
      const double gen_h =
          -l1_distance(context_vector(cfg.grid, i), context_vector(cfg.grid, j), w3);
      CHECK(d.f[i] + d.g[j] + d.h(i, j) + d.C ==
            doctest::Approx(cfg.offset + gen_h).epsilon(1e-12));
    }
  }
}

TEST_CASE("component_summary stds") {
  const TaskGrid grid = TaskGrid::integers({3});
  SUBCASE("constant matrix has zero spreads") {
    const ComponentSummary s = component_summary(grid, decompose(Matrix::Constant(3, 3, 2.0)));
    CHECK(s.std_f == doctest::Approx(0.0));
    CHECK(s.std_g == doctest::Approx(0.0));
    CHECK(s.row_std_h.isZero(1e-12));
  }
  SUBCASE("3x3 mountain example") {
    const ComponentSummary s = component_summary(grid, decompose(mountain3()));
    // std of [1, 2/3, 1], population convention.
    const double mean = (1.0 + 2.0 / 3 + 1.0) / 3;
    const double var =
        ((1 - mean) * (1 - mean) * 2 + (2.0 / 3 - mean) * (2.0 / 3 - mean)) / 3;
    CHECK(s.std_f == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
  }
}

TEST_CASE("std_f grows with the policy-quality weights") {
  auto std_f_of = [](double fw) {
    SyntheticConfig cfg;
    cfg.grid = TaskGrid::integers({4, 4});
    cfg.f_weights = Vector::Constant(2, fw);
    cfg.g_weights = Vector::Zero(2);
    cfg.h_left = Vector::Constant(2, -3.0);
    cfg.h_right = Vector::Constant(2, 3.0);
    cfg.trials = 1;
    const TransferMatrix m = generate(cfg);
    return component_summary(cfg.grid, decompose(m.trials[0])).std_f;
  };
  const double s0 = std_f_of(0.0);
  const double s2 = std_f_of(2.0);
  const double s4 = std_f_of(4.0);
  CHECK(s2 > s0);
  CHECK(s4 > s2);
}
