#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "commalab/core_ea.hpp"
#include "commalab/reports.hpp"
#include "commalab/rng.hpp"

namespace commalab {

enum class LevelStatus { active, gained, lost };

struct CurrentLevelState {
  int f = 0;
  long long t0 = 0;
  int x = 0;
  int y = 0;
  LevelStatus status = LevelStatus::active;
};

struct LevelEvent {
  enum Kind { none, gained, lost };
  Kind kind = none;
};

// Tracks the current level of a live run: the fitness whose at-or-above count
// once reached half the population and has since stayed at least a quarter,
// while the strictly-above count stays below half.  Gaining re-anchors one
// level up per update, so the level climbs at most one step per generation;
// losing re-anchors to level zero and counts a restart.
class CurrentLevelTracker {
 public:
  CurrentLevelTracker(int n, int mu);

  void anchor(const Population& pop, long long generation, int level);
  LevelEvent update(const Population& pop, long long generation);

  const CurrentLevelState& state() const { return state_; }
  long long restarts() const { return restarts_; }
  long long gains() const { return gains_; }

 private:
  void recount(const Population& pop);

  int n_;
  int mu_;
  CurrentLevelState state_;
  long long restarts_ = 0;
  long long gains_ = 0;
  std::vector<int> histogram_;
};

struct PhaseReport {
  std::string name;
  int n = 0;
  int mu = 0;
  int lambda = 0;
  int replicates = 0;
  int completed = 0;
  double mean_generations = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double mean_over_n = 0.0;
  double bound = 0.0;
  bool pass = false;
  long long loss_count = 0;
  double loss_rate = 0.0;
  double loss_bound = 0.0;
  bool loss_pass = true;
  bool hypothesis_ok = false;
};

void to_json(Json& j, const PhaseReport& report);

// Generations until the current level first exceeds n/3, from uniform random
// starts.  Refuses lambda below e*mu, where the climb has no guarantee.
PhaseReport run_phase1_experiment(const EaParams& params, int replicates,
                                  RngStream rng);

// From a synthetic start with half the population at f_start, runs until the
// level is gained or lost; mean generations-to-gain is compared against
// 8n/(n - f_start) and the loss frequency against 10/n.
PhaseReport run_phase2_experiment(const EaParams& params, int f_start,
                                  int replicates, RngStream rng);

// Probability that the at-or-above count of a level above n/3 stays at least
// a quarter of the population through t generations, against (1 - 2/n^3)^t.
BoundReport check_stay_bound(const EaParams& params, long long t,
                             long long replicates, RngStream rng);

// ratio * e * mu rounded away from the threshold: up for ratio >= 1, down
// below, so a requested side of e*mu stays on that side.
int lambda_from_ratio(int mu, double ratio);

struct SweepCell {
  int n = 0;
  int mu = 0;
  int lambda = 0;
  double ratio = 0.0;
  int replicates = 0;
  int successes = 0;
  double mean_generations = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool in_hypothesis = false;
};

SweepCell run_sweep_cell(int n, int mu, int lambda, long long budget_generations,
                         int replicates, RngStream rng);

std::vector<SweepCell> run_threshold_sweep(int n, std::span<const int> mu_grid,
                                           std::span<const double> ratio_grid,
                                           long long budget_generations,
                                           int replicates, RngStream rng);

void write_sweep_csv(std::span<const SweepCell> cells, std::ostream& os);

}  // namespace commalab
