#include <doctest.h>

#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "commalab/level_dynamics.hpp"

using namespace commalab;

namespace {

Population population_with_fitness(int n, const std::vector<int>& levels) {
  Population pop;
  pop.reserve(levels.size());
  for (int f : levels) pop.push_back(make_level_individual(n, f));
  return pop;
}

}  // namespace

TEST_CASE("level tracker anchors and reads counts") {
  CurrentLevelTracker tracker(12, 4);
  const Population pop = population_with_fitness(12, {3, 3, 2, 0});
  tracker.anchor(pop, 0, 2);
  CHECK(tracker.state().f == 2);
  CHECK(tracker.state().t0 == 0);
  CHECK(tracker.state().x == 1);  // members exactly at the level
  CHECK(tracker.state().y == 2);  // members strictly above
  CHECK(tracker.state().status == LevelStatus::active);
}

TEST_CASE("level tracker gains one level when half the population is above") {
  CurrentLevelTracker tracker(12, 4);
  tracker.anchor(population_with_fitness(12, {2, 2, 2, 2}), 0, 2);

  // Two of four strictly above the level: gained, re-anchored one level up.
  const LevelEvent e =
      tracker.update(population_with_fitness(12, {3, 3, 2, 0}), 1);
  CHECK(e.kind == LevelEvent::gained);
  CHECK(tracker.gains() == 1);
  CHECK(tracker.state().f == 3);
  CHECK(tracker.state().t0 == 1);
}

TEST_CASE("level tracker climbs at most one level per update") {
  CurrentLevelTracker tracker(12, 4);
  tracker.anchor(population_with_fitness(12, {2, 2, 2, 2}), 0, 2);
  const LevelEvent e =
      tracker.update(population_with_fitness(12, {9, 9, 9, 9}), 1);
  CHECK(e.kind == LevelEvent::gained);
  CHECK(tracker.state().f == 3);
}

TEST_CASE("level tracker loses when support falls below a quarter") {
  CurrentLevelTracker tracker(12, 8);
  tracker.anchor(population_with_fitness(12, {3, 3, 3, 3, 2, 2, 2, 2}), 0, 3);

  // One member at or above level 3 is below a quarter of eight: lost.
  const LevelEvent e = tracker.update(
      population_with_fitness(12, {3, 2, 2, 2, 2, 2, 2, 2}), 1);
  CHECK(e.kind == LevelEvent::lost);
  CHECK(tracker.restarts() == 1);
  CHECK(tracker.state().f == 0);
}

TEST_CASE("level tracker stays active between the thresholds") {
  CurrentLevelTracker tracker(12, 8);
  tracker.anchor(population_with_fitness(12, {3, 3, 3, 3, 2, 2, 2, 2}), 0, 3);
  const LevelEvent e = tracker.update(
      population_with_fitness(12, {4, 4, 3, 2, 2, 2, 2, 2}), 1);
  CHECK(e.kind == LevelEvent::none);
  CHECK(tracker.state().f == 3);
  CHECK(tracker.gains() == 0);
  CHECK(tracker.restarts() == 0);
}

TEST_CASE("lambda rounding keeps the requested side of e mu") {
  CHECK(lambda_from_ratio(25, 0.8) == 54);
  CHECK(lambda_from_ratio(25, 1.2) == 82);
  CHECK(lambda_from_ratio(10, 0.8) == 21);
  CHECK(lambda_from_ratio(10, 1.2) == 33);
  CHECK(lambda_from_ratio(10, 1.0) == 28);  // at the threshold, round up
  CHECK_THROWS_AS((void)lambda_from_ratio(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)lambda_from_ratio(10, 0.0), std::invalid_argument);
}

TEST_CASE("first climb phase walks one level per generation") {
  const PhaseReport r =
      run_phase1_experiment({150, 8, 22}, 5, RngStream(2024));
  CHECK(r.replicates == 5);
  CHECK(r.completed == 5);
  // The climb target is the first level above n/3; uniform starts sit far
  // below it and the level rises by at most one per generation.
  CHECK(r.mean_generations >= 51.0);
  CHECK(r.mean_generations <= 80.0);
  CHECK(r.pass);
  CHECK_THROWS_AS((void)run_phase1_experiment({150, 8, 21}, 2, RngStream(1)),
                  std::invalid_argument);
}

TEST_CASE("sweep cell runs and reports the hypothesis flag") {
  const SweepCell cell = run_sweep_cell(30, 5, 30, 2000, 5, RngStream(7));
  CHECK(cell.n == 30);
  CHECK(cell.replicates == 5);
  CHECK(cell.successes == 5);
  CHECK(cell.mean_generations > 0.0);
  CHECK_FALSE(cell.in_hypothesis);
  CHECK(cell.ratio ==
        doctest::Approx(30.0 / (std::numbers::e * 5.0)).epsilon(1e-12));
}

TEST_CASE("threshold sweep covers the grid in order") {
  const std::vector<int> mu_grid{3, 5};
  const std::vector<double> ratio_grid{0.8, 1.2};
  const std::vector<SweepCell> cells =
      run_threshold_sweep(30, mu_grid, ratio_grid, 500, 3, RngStream(5));
  REQUIRE(cells.size() == 4);
  CHECK(cells[0].mu == 3);
  CHECK(cells[1].mu == 3);
  CHECK(cells[2].mu == 5);
  CHECK(cells[3].mu == 5);
  CHECK(cells[0].lambda == lambda_from_ratio(3, 0.8));
  CHECK(cells[1].lambda == lambda_from_ratio(3, 1.2));
}

TEST_CASE("sweep csv header is stable") {
  const SweepCell cell = run_sweep_cell(20, 3, 12, 300, 2, RngStream(3));
  std::ostringstream os;
  const std::vector<SweepCell> cells{cell};
  write_sweep_csv(cells, os);
  CHECK(os.str().rfind("n, mu, lambda, ratio, replicates, successes, "
                       "mean_generations, ci_low, ci_high, in_hypothesis\n",
                       0) == 0);
}
