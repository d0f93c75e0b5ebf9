#include "commalab/level_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "commalab/stats.hpp"

namespace commalab {

namespace {

constexpr double kEulerE = 2.718281828459045235;
constexpr double kZ95TwoSided = 1.959963984540054;

double large_mu_floor(int n) {
  const double ln_n = std::log(static_cast<double>(n));
  return std::pow(static_cast<double>(n), 2.0 / 3.0) * std::pow(ln_n, 4.0);
}

}  // namespace

CurrentLevelTracker::CurrentLevelTracker(int n, int mu) : n_(n), mu_(mu) {
  if (n < 1) throw std::invalid_argument("level tracker needs n >= 1");
  if (mu < 1) throw std::invalid_argument("level tracker needs mu >= 1");
  histogram_.resize(n + 1, 0);
}

void CurrentLevelTracker::recount(const Population& pop) {
  if (static_cast<int>(pop.size()) != mu_) {
    throw std::logic_error("population size diverged from the tracker");
  }
  std::fill(histogram_.begin(), histogram_.end(), 0);
  for (const Individual& ind : pop) {
    if (ind.fitness < 0 || ind.fitness > n_) {
      throw std::logic_error("fitness outside [0, n]");
    }
    ++histogram_[ind.fitness];
  }
}

void CurrentLevelTracker::anchor(const Population& pop, long long generation,
                                 int level) {
  if (level < 0 || level > n_) {
    throw std::invalid_argument("level must lie in [0, n]");
  }
  recount(pop);
  state_.f = level;
  state_.t0 = generation;
  state_.x = histogram_[level];
  state_.y = 0;
  for (int f = level + 1; f <= n_; ++f) state_.y += histogram_[f];
  if (2LL * (state_.x + state_.y) < mu_) {
    throw std::invalid_argument(
        "anchored level never reached half the population");
  }
  state_.status = LevelStatus::active;
}

LevelEvent CurrentLevelTracker::update(const Population& pop,
                                       long long generation) {
  recount(pop);
  state_.x = histogram_[state_.f];
  state_.y = 0;
  for (int f = state_.f + 1; f <= n_; ++f) state_.y += histogram_[f];
  const long long direct =
      std::count_if(pop.begin(), pop.end(), [&](const Individual& ind) {
        return ind.fitness >= state_.f;
      });
  if (direct != state_.x + state_.y) {
    throw std::logic_error("level counts diverged from a direct recount");
  }

  LevelEvent event;
  if (4LL * (state_.x + state_.y) < mu_) {
    ++restarts_;
    state_.f = 0;
    state_.t0 = generation;
    state_.x = histogram_[0];
    state_.y = mu_ - histogram_[0];
    state_.status = LevelStatus::lost;
    event.kind = LevelEvent::lost;
    return event;
  }
  if (2LL * state_.y >= mu_ && state_.f < n_) {
    ++gains_;
    state_.f += 1;
    state_.t0 = generation;
    state_.x = histogram_[state_.f];
    state_.y -= histogram_[state_.f];
    state_.status = LevelStatus::gained;
    event.kind = LevelEvent::gained;
    return event;
  }
  state_.status = LevelStatus::active;
  return event;
}

void to_json(Json& j, const PhaseReport& report) {
  j = Json{{"name", report.name},
           {"n", report.n},
           {"mu", report.mu},
           {"lambda", report.lambda},
           {"replicates", report.replicates},
           {"completed", report.completed},
           {"mean_generations", report.mean_generations},
           {"ci_low", report.ci_low},
           {"ci_high", report.ci_high},
           {"mean_over_n", report.mean_over_n},
           {"bound", report.bound},
           {"pass", report.pass},
           {"loss_count", report.loss_count},
           {"loss_rate", report.loss_rate},
           {"loss_bound", report.loss_bound},
           {"loss_pass", report.loss_pass},
           {"hypothesis_ok", report.hypothesis_ok}};
}

PhaseReport run_phase1_experiment(const EaParams& params, int replicates,
                                  RngStream rng) {
  params.validate();
  if (params.lambda < kEulerE * params.mu) {
    throw std::invalid_argument("first-phase experiment needs lambda >= e mu");
  }
  if (replicates < 1) throw std::invalid_argument("need at least one replicate");

  const long long cap = 20LL * params.n + 2000;
  RunningStat stat;
  int completed = 0;
  for (int r = 0; r < replicates; ++r) {
    EaEngine engine(params, rng.child(r));
    engine.init_random();
    CurrentLevelTracker tracker(params.n, params.mu);
    tracker.anchor(engine.population(), 0, 0);
    long long gens = 0;
    while (3LL * tracker.state().f <= params.n && gens < cap) {
      engine.run_generation();
      ++gens;
      tracker.update(engine.population(), gens);
    }
    if (3LL * tracker.state().f > params.n) {
      stat.add(static_cast<double>(gens));
      ++completed;
    }
  }

  PhaseReport report;
  report.name = "first phase: current level climbs past n/3";
  report.n = params.n;
  report.mu = params.mu;
  report.lambda = params.lambda;
  report.replicates = replicates;
  report.completed = completed;
  report.mean_generations = stat.count > 0 ? stat.mean : 0.0;
  const Interval ci = mean_interval(stat, kZ95TwoSided);
  report.ci_low = ci.low;
  report.ci_high = ci.high;
  report.mean_over_n = report.mean_generations / params.n;
  report.bound = 0.0;
  report.pass = completed == replicates;
  report.loss_pass = true;
  report.hypothesis_ok = true;
  return report;
}

PhaseReport run_phase2_experiment(const EaParams& params, int f_start,
                                  int replicates, RngStream rng) {
  params.validate();
  if (params.lambda < kEulerE * params.mu) {
    throw std::invalid_argument("second-phase experiment needs lambda >= e mu");
  }
  if (3LL * f_start <= params.n) {
    throw std::invalid_argument("second phase needs a level above n/3");
  }
  if (f_start > params.n - 1) {
    throw std::invalid_argument("a level above n - 1 cannot be gained");
  }
  if (replicates < 1) throw std::invalid_argument("need at least one replicate");

  const double bound = 8.0 * params.n / (params.n - f_start);
  const long long cap = static_cast<long long>(50.0 * bound) + 1000;
  const int at_start = (params.mu + 1) / 2;

  Population start;
  start.reserve(params.mu);
  for (int i = 0; i < params.mu; ++i) {
    start.push_back(make_level_individual(
        params.n, i < at_start ? f_start : f_start - 1));
  }

  RunningStat gain_stat;
  long long losses = 0;
  int completed = 0;
  for (int r = 0; r < replicates; ++r) {
    EaEngine engine(params, rng.child(r));
    engine.init_population(start);
    CurrentLevelTracker tracker(params.n, params.mu);
    tracker.anchor(engine.population(), 0, f_start);
    long long gens = 0;
    LevelEvent event;
    while (event.kind == LevelEvent::none && gens < cap) {
      engine.run_generation();
      ++gens;
      event = tracker.update(engine.population(), gens);
    }
    if (event.kind == LevelEvent::gained) {
      gain_stat.add(static_cast<double>(gens));
      ++completed;
    } else if (event.kind == LevelEvent::lost) {
      ++losses;
      ++completed;
    }
  }

  PhaseReport report;
  report.name = "second phase: gain-or-lose from level " +
                std::to_string(f_start);
  report.n = params.n;
  report.mu = params.mu;
  report.lambda = params.lambda;
  report.replicates = replicates;
  report.completed = completed;
  report.mean_generations = gain_stat.count > 0 ? gain_stat.mean : 0.0;
  const Interval ci = mean_interval(gain_stat, kZ95TwoSided);
  report.ci_low = ci.low;
  report.ci_high = ci.high;
  report.mean_over_n = report.mean_generations / params.n;
  report.bound = bound;
  report.pass = completed == replicates &&
                report.mean_generations <= bound + 3.0 * gain_stat.std_error();
  report.loss_count = losses;
  report.loss_rate = static_cast<double>(losses) / replicates;
  report.loss_bound = 10.0 / params.n;
  report.loss_pass =
      report.loss_rate <=
      report.loss_bound + 3.0 * proportion_std_error(report.loss_rate,
                                                     replicates);
  report.hypothesis_ok = params.mu >= large_mu_floor(params.n);
  return report;
}

BoundReport check_stay_bound(const EaParams& params, long long t,
                             long long replicates, RngStream rng) {
  params.validate();
  if (t < 0) throw std::invalid_argument("horizon must be non-negative");
  if (replicates < 1) throw std::invalid_argument("need at least one replicate");
  const int f_anchor = params.n / 2;
  if (3LL * f_anchor <= params.n) {
    throw std::invalid_argument("n too small for a level above n/3");
  }

  const int at_start = (params.mu + 1) / 2;
  Population start;
  start.reserve(params.mu);
  for (int i = 0; i < params.mu; ++i) {
    start.push_back(make_level_individual(
        params.n, i < at_start ? f_anchor : f_anchor - 1));
  }

  long long survived = 0;
  long long gained_first = 0;
  for (long long r = 0; r < replicates; ++r) {
    EaEngine engine(params, rng.child(r));
    engine.init_population(start);
    CurrentLevelTracker tracker(params.n, params.mu);
    tracker.anchor(engine.population(), 0, f_anchor);
    bool lost = false;
    for (long long g = 0; g < t; ++g) {
      engine.run_generation();
      const LevelEvent event = tracker.update(engine.population(), g + 1);
      if (event.kind == LevelEvent::lost) {
        lost = true;
        break;
      }
      if (event.kind == LevelEvent::gained) {
        ++gained_first;
        break;
      }
    }
    if (!lost) ++survived;
  }

  const double nd = static_cast<double>(params.n);
  BoundReport report;
  report.lemma = "lemma28";
  report.parameters = {{"n", params.n},
                       {"mu", params.mu},
                       {"lambda", params.lambda},
                       {"f_anchor", f_anchor},
                       {"t", t},
                       {"gained_before_horizon", gained_first},
                       {"mu_floor", large_mu_floor(params.n)}};
  report.samples = replicates;
  report.empirical = static_cast<double>(survived) / replicates;
  report.standard_error = proportion_std_error(report.empirical, replicates);
  report.bound = std::pow(1.0 - 2.0 / (nd * nd * nd), static_cast<double>(t));
  report.pass =
      report.empirical >= report.bound - 3.0 * report.standard_error;
  report.hypothesis_ok = params.lambda >= kEulerE * params.mu &&
                         params.mu >= large_mu_floor(params.n);
  return report;
}

int lambda_from_ratio(int mu, double ratio) {
  if (mu < 1) throw std::invalid_argument("need mu >= 1");
  if (!(ratio > 0.0)) throw std::invalid_argument("ratio must be positive");
  const double target = ratio * kEulerE * mu;
  const int lambda =
      ratio >= 1.0 ? static_cast<int>(std::ceil(target - 1e-9))
                   : static_cast<int>(std::floor(target + 1e-9));
  if (lambda < mu) {
    throw std::invalid_argument("ratio too small: lambda would drop below mu");
  }
  return lambda;
}

SweepCell run_sweep_cell(int n, int mu, int lambda, long long budget_generations,
                         int replicates, RngStream rng) {
  EaParams params{n, mu, lambda};
  params.validate();
  if (budget_generations < 1) {
    throw std::invalid_argument("need a positive generation budget");
  }
  if (replicates < 1) throw std::invalid_argument("need at least one replicate");

  RunControl control;
  control.max_generations = budget_generations;
  control.counting = OptimumCounting::at_creation;

  RunningStat stat;
  int successes = 0;
  for (int r = 0; r < replicates; ++r) {
    EaEngine engine(params, rng.child(r));
    engine.init_random();
    const RunResult result = run_until(engine, control, {});
    if (result.success) {
      ++successes;
      stat.add(static_cast<double>(result.generations));
    }
  }

  SweepCell cell;
  cell.n = n;
  cell.mu = mu;
  cell.lambda = lambda;
  cell.ratio = lambda / (kEulerE * mu);
  cell.replicates = replicates;
  cell.successes = successes;
  cell.mean_generations = stat.count > 0 ? stat.mean : 0.0;
  const Interval ci = mean_interval(stat, kZ95TwoSided);
  cell.ci_low = ci.low;
  cell.ci_high = ci.high;
  cell.in_hypothesis =
      lambda >= kEulerE * mu && mu >= large_mu_floor(n);
  return cell;
}

std::vector<SweepCell> run_threshold_sweep(int n, std::span<const int> mu_grid,
                                           std::span<const double> ratio_grid,
                                           long long budget_generations,
                                           int replicates, RngStream rng) {
  if (mu_grid.empty() || ratio_grid.empty()) {
    throw std::invalid_argument("sweep grids must be non-empty");
  }
  std::vector<SweepCell> cells;
  cells.reserve(mu_grid.size() * ratio_grid.size());
  long long index = 0;
  for (int mu : mu_grid) {
    for (double ratio : ratio_grid) {
      const int lambda = lambda_from_ratio(mu, ratio);
      cells.push_back(run_sweep_cell(n, mu, lambda, budget_generations,
                                     replicates, rng.child(index)));
      ++index;
    }
  }
  return cells;
}

void write_sweep_csv(std::span<const SweepCell> cells, std::ostream& os) {
  os << "n, mu, lambda, ratio, replicates, successes, mean_generations, "
        "ci_low, ci_high, in_hypothesis\n";
  for (const SweepCell& cell : cells) {
    os << cell.n << ", " << cell.mu << ", " << cell.lambda << ", "
       << csv_double(cell.ratio) << ", " << cell.replicates << ", "
       << cell.successes << ", " << csv_double(cell.mean_generations) << ", "
       << csv_double(cell.ci_low) << ", " << csv_double(cell.ci_high) << ", "
       << (cell.in_hypothesis ? 1 : 0) << "\n";
  }
}

}  // namespace commalab
