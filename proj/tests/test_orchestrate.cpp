#include "mbtl/orchestrate.hpp"

#include "mbtl/synthetic.hpp"

#include <doctest.h>

#include <algorithm>

using namespace mbtl;

namespace {

Matrix mountain3() {
  Matrix j(3, 3);
  j << 10, 9, 8, 9, 10, 9, 8, 9, 10;
  return j;
}

class ScriptedSelector final : public TaskSelector {
 public:
  explicit ScriptedSelector(std::vector<int> picks) : picks_(std::move(picks)) {}
  int next(const ObservedHistory& history) override {
    return picks_.at(static_cast<std::size_t>(history.count()));
  }

 private:
  std::vector<int> picks_;
};

}  // namespace

TEST_CASE("run_selector reveals rows and traces the running best") {
  const TaskGrid grid = TaskGrid::integers({3});
  ScriptedSelector sel({2, 0, 1});
  const SelectorRun run = run_selector(mountain3(), grid, sel, 3);
  CHECK(run.selected == std::vector<int>{2, 0, 1});
  CHECK(run.trace[0] == doctest::Approx(27.0 / 3).epsilon(1e-12));
  CHECK(run.trace[1] == doctest::Approx((10 + 9 + 10) / 3.0).epsilon(1e-12));
  CHECK(run.trace[2] == doctest::Approx(10.0).epsilon(1e-12));
  // Non-decreasing by construction.
  CHECK(std::is_sorted(run.trace.begin(), run.trace.end()));
}

TEST_CASE("full coverage reaches the column-max mean for any selector") {
  const TaskGrid grid = TaskGrid::integers({3});
  const Matrix j = mountain3();
  ScriptedSelector sel({1, 2, 0});
  const SelectorRun run = run_selector(j, grid, sel, 3);
  CHECK(run.trace.back() == doctest::Approx(j.colwise().maxCoeff().mean()).epsilon(1e-12));
}

TEST_CASE("duplicate proposals are contract violations") {
  const TaskGrid grid = TaskGrid::integers({3});
  ScriptedSelector sel({1, 1, 0});
  CHECK_THROWS_AS(run_selector(mountain3(), grid, sel, 3), std::logic_error);
}

TEST_CASE("random selector is reproducible and uniform over the remainder") {
  const TaskGrid grid = TaskGrid::integers({2, 3});
  const Matrix trial = Matrix::Zero(6, 6);
  RandomSelector a(99);
  RandomSelector b(99);
  const SelectorRun ra = run_selector(trial, grid, a, 6);
  const SelectorRun rb = run_selector(trial, grid, b, 6);
  CHECK(ra.selected == rb.selected);
  std::vector<int> sorted = ra.selected;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5});

  const TaskGrid g1 = TaskGrid::integers({1});
  RandomSelector c(5);
  CHECK(run_selector(Matrix::Zero(1, 1), g1, c, 1).selected == std::vector<int>{0});
}

TEST_CASE("myopic oracle brute-force examples") {
  SUBCASE("3x3 single trial picks the middle task first") {
    const std::vector<Matrix> trials = {mountain3()};
    CHECK(MyopicOracleSelector::sequence(trials, 1) == std::vector<int>{1});
    // W = 1: identical to the sequential oracle.
    const TaskGrid grid = TaskGrid::integers({3});
    SequentialOracleSelector seq(trials[0]);
    const SelectorRun run = run_selector(trials[0], grid, seq, 1);
    CHECK(run.selected == std::vector<int>{1});
    CHECK(run.trace[0] == doctest::Approx(28.0 / 3).epsilon(1e-12));
  }
  SUBCASE("two asymmetric trials: the averaged objective picks the common middle") {
    Matrix a = Matrix::Zero(3, 3), b = Matrix::Zero(3, 3);
    a.row(0).setConstant(10.0);  // trial A favors task 0
    b.row(2).setConstant(10.0);  // trial B favors task 2
    a.row(1).setConstant(9.0);
    b.row(1).setConstant(9.0);
    const std::vector<Matrix> trials = {a, b};
    CHECK(MyopicOracleSelector::sequence(trials, 1) == std::vector<int>{1});
    // Per-trial sequential picks differ.
    SequentialOracleSelector sa(a), sb(b);
    const TaskGrid grid = TaskGrid::integers({3});
    CHECK(run_selector(a, grid, sa, 1).selected == std::vector<int>{0});
    CHECK(run_selector(b, grid, sb, 1).selected == std::vector<int>{2});
  }
}

TEST_CASE("myopic oracle round-1 value dominates every other selector") {
  SyntheticConfig cfg = preset("3d/const-f/none-g/l1/sigma5");
  cfg.grid = TaskGrid::integers({3, 3, 3});
  cfg.trials = 2;
  cfg.seed = 3;
  const TransferMatrix m = generate(cfg);
  const std::vector<int> seq = MyopicOracleSelector::sequence(m.trials, 1);
  double oracle_value = 0.0;
  for (const Matrix& t : m.trials) oracle_value += t.row(seq[0]).mean();
  for (int x = 0; x < m.grid.num_tasks(); ++x) {
    double value = 0.0;
    for (const Matrix& t : m.trials) value += t.row(x).mean();
    CHECK(value <= oracle_value + 1e-12);
  }
}

TEST_CASE("sd-mbtl composition") {
  const TaskGrid grid = TaskGrid::integers({3});
  const Matrix j = mountain3();

  SUBCASE("single-structure library behaves as that algorithm") {
    ScriptedSelector alg({2, 0, 1});
    SdMbtlSelector sd([](const ObservedHistory&) { return Structure::kNone; },
                      {{Structure::kNone, &alg}});
    const SelectorRun run = run_selector(j, grid, sd, 3);
    CHECK(run.selected == std::vector<int>{2, 0, 1});
    CHECK(sd.routing() == std::vector<Structure>(3, Structure::kNone));
  }
  SUBCASE("constant Mountain detector yields a pure clustering trace") {
    MmbtlConfig mc{DistanceWeights::uniform(1, 0.01), 0, 100, 0, true};
    MmbtlSelector m_only(grid, mc);
    MmbtlSelector m_inner(grid, mc);
    SdMbtlSelector sd([](const ObservedHistory&) { return Structure::kMountain; },
                      {{Structure::kMountain, &m_inner}});
    const SelectorRun a = run_selector(j, grid, m_only, 3);
    const SelectorRun b = run_selector(j, grid, sd, 3);
    CHECK(a.selected == b.selected);
  }
  SUBCASE("missing algorithm for a detected structure is a configuration error") {
    ScriptedSelector alg({0});
    SdMbtlSelector sd([](const ObservedHistory&) { return Structure::kMountain; },
                      {{Structure::kNone, &alg}});
    CHECK_THROWS_AS(run_selector(j, grid, sd, 1), std::runtime_error);
  }
}

TEST_CASE("m/gp instantiation equals the generic composition round for round") {
  SyntheticConfig cfg = preset("3d/const-f/none-g/l1/sigma5");
  cfg.grid = TaskGrid::integers({4, 4, 4});
  cfg.trials = 1;
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    cfg.seed = seed;
    const TransferMatrix m = min_max_normalize(generate(cfg));
    MmbtlConfig mc{DistanceWeights::uniform(3, 0.01), 0, 100, 0, true};
    GpMbtlConfig gc;

    MgpSelector mgp(m.grid, mc, gc, {});
    MmbtlSelector m_alg(m.grid, mc);
    GpMbtlSelector gp_alg(m.grid, gc);
    SdMbtlSelector sd([](const ObservedHistory& h) { return detect(h, {}); },
                      {{Structure::kMountain, &m_alg}, {Structure::kNone, &gp_alg}});

    const SelectorRun a = run_selector(m.trials[0], m.grid, mgp, 8);
    const SelectorRun b = run_selector(m.trials[0], m.grid, sd, 8);
    CHECK(a.selected == b.selected);
    CHECK(mgp.routing() == sd.routing());
  }
}

TEST_CASE("m/gp routes Mountain on mountain data and GP on non-distance data") {
  SUBCASE("noiseless mountain: clustering branch from the third round on") {
    SyntheticConfig cfg = preset("3d/const-f/none-g/l1/sigma0");
    cfg.trials = 1;
    const TransferMatrix m = min_max_normalize(generate(cfg));
    MgpSelector sel(m.grid, MmbtlConfig{DistanceWeights::uniform(3, 0.01), 0, 100, 0, true},
                    GpMbtlConfig{}, {});
    run_selector(m.trials[0], m.grid, sel, 12);
    const auto& routing = sel.routing();
    for (std::size_t k = 2; k < routing.size(); ++k)
      CHECK(routing[k] == Structure::kMountain);
    CHECK(routing[0] == Structure::kNone);  // empty history
  }
  SUBCASE("noiseless non-distance: GP branch in at least 90% of informed rounds") {
    SyntheticConfig cfg = preset("3d/const-f/none-g/nondist/sigma0");
    cfg.trials = 1;
    const TransferMatrix m = min_max_normalize(generate(cfg));
    MgpSelector sel(m.grid, MmbtlConfig{DistanceWeights::uniform(3, 0.01), 0, 100, 0, true},
                    GpMbtlConfig{}, {});
    run_selector(m.trials[0], m.grid, sel, 50);
    int mountain = 0, informed = 0;
    for (std::size_t k = 2; k < sel.routing().size(); ++k) {
      ++informed;
      mountain += sel.routing()[k] == Structure::kMountain ? 1 : 0;
    }
    CHECK(informed == 48);
    CHECK(mountain * 10 <= informed);
  }
}
