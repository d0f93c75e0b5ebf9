#include "commalab/core_ea.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace commalab {

void EaParams::validate() const {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  if (mu < 1) throw std::invalid_argument("mu must be at least 1");
  if (lambda < mu) {
    throw std::invalid_argument("lambda must be at least mu, got lambda=" +
                                std::to_string(lambda) +
                                " mu=" + std::to_string(mu));
  }
}

Mutator::Mutator(int n) : n_(n), flip_count_(n, 1.0 / n) {}

OffspringRecord Mutator::apply(const Individual& parent, Individual& child,
                               RngStream& rng) {
  child.bits = parent.bits;
  const int k = flip_count_.draw(rng);
  // The flip-count table for Binomial(n, 1/n) never extends past ~25 entries
  // before the 1e-18 tail cutoff, so a small fixed buffer suffices.
  std::uint32_t pos[64];
  int delta = 0;
  for (int j = 0; j < k; ++j) {
    std::uint32_t p;
    bool fresh;
    do {
      p = static_cast<std::uint32_t>(rng.below(n_));
      fresh = true;
      for (int q = 0; q < j; ++q) {
        if (pos[q] == p) {
          fresh = false;
          break;
        }
      }
    } while (!fresh);
    pos[j] = p;
    delta += child.bits.test(p) ? -1 : 1;
    child.bits.flip(p);
  }
  child.fitness = parent.fitness + delta;
  return {parent.fitness, child.fitness, k == 0};
}

void Selector::select(const Population& offspring, int mu, int n,
                      RngStream& rng, std::vector<int>& out) {
  count_.assign(n + 1, 0);
  for (const Individual& o : offspring) ++count_[o.fitness];

  // Find the boundary fitness: everything above it survives outright.
  int survivors_above = 0;
  int boundary_fitness = n;
  for (int f = n; f >= 0; --f) {
    if (survivors_above + count_[f] >= mu) {
      boundary_fitness = f;
      break;
    }
    survivors_above += count_[f];
  }
  const int need_from_boundary = mu - survivors_above;

  out.clear();
  boundary_.clear();
  for (int i = 0; i < static_cast<int>(offspring.size()); ++i) {
    const int f = offspring[i].fitness;
    if (f > boundary_fitness) {
      out.push_back(i);
    } else if (f == boundary_fitness) {
      boundary_.push_back(i);
    }
  }

  // Uniform subset of the boundary bucket via a partial Fisher-Yates pass.
  const int b = static_cast<int>(boundary_.size());
  for (int j = 0; j < need_from_boundary; ++j) {
    const int pick = j + static_cast<int>(rng.below(b - j));
    std::swap(boundary_[j], boundary_[pick]);
    out.push_back(boundary_[j]);
  }
}

EaEngine::EaEngine(const EaParams& params, RngStream rng)
    : params_(params), rng_(rng), mutator_(params.n) {
  params_.validate();
  for (auto& pop : pops_) {
    pop.assign(params_.mu, Individual{BitVector(params_.n), 0});
  }
  offspring_.assign(params_.lambda, Individual{BitVector(params_.n), 0});
  records_.resize(params_.lambda);
  selected_.reserve(params_.mu);
}

void EaEngine::init_random() {
  for (Individual& ind : pops_[cur_]) {
    for (int w = 0; w < ind.bits.word_count(); ++w) ind.bits.words()[w] = rng_();
    ind.bits.mask_tail();
    ind.fitness = ind.bits.count_ones();
  }
  gen_ = 0;
}

void EaEngine::init_population(Population pop) {
  if (static_cast<int>(pop.size()) != params_.mu) {
    throw std::invalid_argument("initial population must have exactly mu members");
  }
  for (Individual& ind : pop) {
    if (ind.bits.size() != params_.n) {
      throw std::invalid_argument("initial member has wrong bit length");
    }
    ind.fitness = ind.bits.count_ones();
  }
  pops_[cur_] = std::move(pop);
  gen_ = 0;
}

int EaEngine::run_generation() {
  const Population& parents = pops_[cur_];
  int first_hit = 0;
  for (int i = 0; i < params_.lambda; ++i) {
    const Individual& parent = parents[rng_.below(params_.mu)];
    records_[i] = mutator_.apply(parent, offspring_[i], rng_);
    if (records_[i].offspring_fitness == params_.n && first_hit == 0) {
      first_hit = i + 1;
    }
  }

  selector_.select(offspring_, params_.mu, params_.n, rng_, selected_);
  if (static_cast<int>(selected_.size()) != params_.mu) {
    throw std::logic_error("selection produced wrong population size");
  }

  Population& next = pops_[1 - cur_];
  for (int j = 0; j < params_.mu; ++j) next[j] = offspring_[selected_[j]];
  cur_ = 1 - cur_;
  ++gen_;
  return first_hit;
}

bool EaEngine::population_has_optimum() const {
  return std::any_of(
      pops_[cur_].begin(), pops_[cur_].end(),
      [this](const Individual& ind) { return ind.fitness == params_.n; });
}

RunResult run_until(EaEngine& engine, const RunControl& control,
                    std::span<const GenerationObserver> observers) {
  const EaParams& p = engine.params();
  RunResult result;

  if (engine.population_has_optimum()) {
    result.success = true;
    result.generations = 0;
    if (control.counting == OptimumCounting::at_creation) {
      const Population& pop = engine.population();
      for (int i = 0; i < p.mu; ++i) {
        if (pop[i].fitness == p.n) {
          result.evaluations = i + 1;
          break;
        }
      }
    } else {
      result.evaluations = p.mu;
    }
    return result;
  }

  for (long long t = 0; t < control.max_generations; ++t) {
    const int hit = engine.run_generation();
    for (const GenerationObserver& obs : observers) {
      obs(GenerationView{engine.generation(), engine.previous_population(),
                         engine.population(), engine.last_offspring()});
    }
    if (control.counting == OptimumCounting::at_creation && hit != 0) {
      result.success = true;
      result.generations = t + 1;
      result.evaluations = p.mu + t * static_cast<long long>(p.lambda) + hit;
      return result;
    }
    if (control.counting == OptimumCounting::after_selection &&
        engine.population_has_optimum()) {
      result.success = true;
      result.generations = t + 1;
      result.evaluations = p.mu + (t + 1) * static_cast<long long>(p.lambda);
      return result;
    }
  }

  result.success = false;
  result.generations = control.max_generations;
  result.evaluations =
      p.mu + control.max_generations * static_cast<long long>(p.lambda);
  return result;
}

Individual mutate(const Individual& parent, int n, RngStream& rng) {
  Mutator mut(n);
  Individual child{BitVector(n), 0};
  mut.apply(parent, child, rng);
  return child;
}

Individual make_level_individual(int n, int fitness) {
  if (fitness < 0 || fitness > n) {
    throw std::invalid_argument("fitness must lie in [0, n]");
  }
  Individual ind{BitVector(n), fitness};
  for (int i = 0; i < fitness; ++i) ind.bits.set(i);
  return ind;
}

std::vector<int> select_next(const Population& offspring, int mu, int n,
                             RngStream& rng) {
  if (static_cast<int>(offspring.size()) < mu) {
    throw std::invalid_argument("cannot select mu members from fewer offspring");
  }
  Selector sel;
  std::vector<int> out;
  sel.select(offspring, mu, n, rng, out);
  return out;
}

Population next_generation_from(const Population& parents,
                                const EaParams& params, RngStream& rng) {
  Mutator mut(params.n);
  Population offspring(params.lambda, Individual{BitVector(params.n), 0});
  for (int i = 0; i < params.lambda; ++i) {
    const Individual& parent = parents[rng.below(params.mu)];
    mut.apply(parent, offspring[i], rng);
  }
  Selector sel;
  std::vector<int> chosen;
  sel.select(offspring, params.mu, params.n, rng, chosen);
  Population next;
  next.reserve(params.mu);
  for (int idx : chosen) next.push_back(offspring[idx]);
  return next;
}

}  // namespace commalab
