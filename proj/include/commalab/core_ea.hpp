#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "commalab/bits.hpp"
#include "commalab/rng.hpp"
#include "commalab/sampling.hpp"

namespace commalab {

struct Individual {
  BitVector bits;
  int fitness = 0;
};

using Population = std::vector<Individual>;

inline int onemax(const BitVector& x) { return x.count_ones(); }

struct EaParams {
  int n = 0;
  int mu = 0;
  int lambda = 0;

  // Throws std::invalid_argument on n < 1, mu < 1, or lambda < mu; comma
  // selection cannot fill a parent population from fewer offspring.
  void validate() const;
};

// Per-offspring log entry in creation order.  is_copy means no bit was
// flipped, so the offspring is an exact copy of its parent.
struct OffspringRecord {
  std::int32_t parent_fitness = 0;
  std::int32_t offspring_fitness = 0;
  bool is_copy = false;
};

// Standard bit mutation with flip probability 1/n.  The flip count is drawn
// from a cached Binomial(n, 1/n) inversion table, then that many distinct
// positions are flipped.
class Mutator {
 public:
  explicit Mutator(int n);
  OffspringRecord apply(const Individual& parent, Individual& child,
                        RngStream& rng);

 private:
  int n_;
  SmallMeanBinomial flip_count_;
};

// Comma (truncation) selection over the offspring only.  Full fitness buckets
// are taken from the top; the boundary bucket is broken by drawing a uniform
// subset, so ties carry no positional bias.
class Selector {
 public:
  // Writes the chosen offspring indices into `out` (resized to mu).
  void select(const Population& offspring, int mu, int n, RngStream& rng,
              std::vector<int>& out);

 private:
  std::vector<int> count_;
  std::vector<int> boundary_;
};

struct GenerationView {
  long long generation = 0;  // index of the population just completed
  const Population& parents;
  const Population& next;
  std::span<const OffspringRecord> offspring;
};

using GenerationObserver = std::function<void(const GenerationView&)>;

class EaEngine {
 public:
  EaEngine(const EaParams& params, RngStream rng);

  // Draws every initial member uniformly from {0,1}^n.
  void init_random();

  // Installs a caller-built population; sizes are checked and cached fitness
  // values are recomputed rather than trusted.
  void init_population(Population pop);

  // Creates lambda offspring, applies comma selection, and advances the
  // generation counter.  Returns the 1-based creation index of the first
  // all-ones offspring of this generation, or 0 if none was created.
  int run_generation();

  const EaParams& params() const { return params_; }
  const Population& population() const { return pops_[cur_]; }
  const Population& previous_population() const { return pops_[1 - cur_]; }
  long long generation() const { return gen_; }
  std::span<const OffspringRecord> last_offspring() const { return records_; }

  // True when the current population contains an all-ones member.
  bool population_has_optimum() const;

 private:
  EaParams params_;
  RngStream rng_;
  Mutator mutator_;
  Selector selector_;
  Population pops_[2];
  Population offspring_;
  std::vector<OffspringRecord> records_;
  std::vector<int> selected_;
  int cur_ = 0;
  long long gen_ = 0;
};

enum class OptimumCounting {
  at_creation,       // stop when an all-ones offspring is evaluated
  after_selection,   // stop when all-ones survives into the population
};

struct RunControl {
  long long max_generations = 0;
  OptimumCounting counting = OptimumCounting::at_creation;
};

struct RunResult {
  bool success = false;
  long long generations = 0;
  long long evaluations = 0;  // mu initial draws plus lambda per generation
};

// Runs the engine until the optimum is reached per the counting mode or the
// generation budget is spent.  A spent budget is an unsuccessful result, not
// an error.  Observers fire after every completed generation.
RunResult run_until(EaEngine& engine, const RunControl& control,
                    std::span<const GenerationObserver> observers = {});

// Single-shot conveniences used by tests and checkers.
Individual mutate(const Individual& parent, int n, RngStream& rng);

// Individual with the first `fitness` bits set; transition behavior depends
// only on the level, so any representative pattern serves.
Individual make_level_individual(int n, int fitness);
std::vector<int> select_next(const Population& offspring, int mu, int n,
                             RngStream& rng);

// One offspring generation from a frozen parent population, without touching
// any engine state.  Used by drift checkers that resample a snapshot.
Population next_generation_from(const Population& parents,
                                const EaParams& params, RngStream& rng);

}  // namespace commalab
