#include "commalab/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

#include "commalab/potential.hpp"
#include "commalab/sampling.hpp"
#include "commalab/stats.hpp"
#include "commalab/transition_math.hpp"

namespace commalab {

namespace {

constexpr double kEulerE = 2.718281828459045235;

int top_fitness(const Population& pop) {
  int top = 0;
  for (const Individual& x : pop) top = std::max(top, x.fitness);
  return top;
}

}  // namespace

void SurrogateConfig::validate() const {
  if (mu < 1) throw std::invalid_argument("surrogate chain needs mu >= 1");
  if (lambda < 1) {
    throw std::invalid_argument("surrogate chain needs lambda >= 1");
  }
  for (double v : influx) {
    if (!(v > 0.0)) {
      throw std::invalid_argument("influx values must be positive");
    }
  }
}

double SurrogateConfig::influx_at(long long t) const {
  if (influx.empty()) return 0.0;
  if (t < 0) throw std::invalid_argument("influx index must be non-negative");
  const auto idx = static_cast<std::size_t>(t);
  return idx < influx.size() ? influx[idx] : influx.back();
}

double SurrogateConfig::influx_min() const {
  if (influx.empty()) return 0.0;
  return *std::min_element(influx.begin(), influx.end());
}

int surrogate_step(int state, const SurrogateConfig& cfg, long long t,
                   RngStream& rng, bool* clamped) {
  cfg.validate();
  if (state < 0 || state > cfg.mu) {
    throw std::invalid_argument("chain state must lie in [0, mu]");
  }
  double p = (state + cfg.influx_at(t)) / (kEulerE * cfg.mu);
  bool hit_clamp = false;
  if (p > 1.0) {
    p = 1.0;
    hit_clamp = true;
  } else if (p < 0.0) {
    p = 0.0;
    hit_clamp = true;
  }
  if (clamped != nullptr) *clamped = hit_clamp;
  return std::min<long long>(cfg.mu, sample_binomial(rng, cfg.lambda, p));
}

BoundReport check_variation_bound(const SurrogateConfig& cfg, int x0,
                                  double delta, int t, long long trials,
                                  RngStream rng) {
  cfg.validate();
  if (x0 < 0 || x0 > cfg.mu) {
    throw std::invalid_argument("start state must lie in [0, mu]");
  }
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (t < 1) throw std::invalid_argument("need at least one step");
  if (trials < 1) throw std::invalid_argument("need at least one trial");

  long long hits = 0;
  const double floor_state = x0 - delta;
  for (long long trial = 0; trial < trials; ++trial) {
    RngStream one = rng.child(trial);
    int state = x0;
    for (int tau = 0; tau < t; ++tau) {
      state = surrogate_step(state, cfg, tau, one);
      if (state < floor_state) {
        ++hits;
        break;
      }
    }
  }

  BoundReport report;
  report.lemma = "lemma7";
  report.parameters = {{"mu", cfg.mu},
                       {"lambda", cfg.lambda},
                       {"x0", x0},
                       {"delta", delta},
                       {"t", t}};
  report.samples = trials;
  report.empirical = static_cast<double>(hits) / trials;
  report.standard_error = proportion_std_error(report.empirical, trials);
  report.bound = t * static_cast<double>(x0) / (delta * delta);
  report.pass = report.empirical <= report.bound + 3.0 * report.standard_error;
  report.hypothesis_ok =
      cfg.lambda >= kEulerE * cfg.mu && cfg.influx.empty();
  return report;
}

BoundReport check_hitting_time(const SurrogateConfig& cfg, int x0, int xprime,
                               long long trials, RngStream rng) {
  cfg.validate();
  if (cfg.influx.empty()) {
    throw std::invalid_argument("hitting-time check needs an influx chain");
  }
  if (x0 < 0 || x0 > cfg.mu) {
    throw std::invalid_argument("start state must lie in [0, mu]");
  }
  if (xprime < 1 || xprime > cfg.mu) {
    throw std::invalid_argument("target state must lie in [1, mu]");
  }
  if (trials < 1) throw std::invalid_argument("need at least one trial");

  const double delta_min = cfg.influx_min();
  const double threshold =
      std::max(18.0 * std::log(2.0 * cfg.lambda / delta_min), 48.0);
  const double bound = std::max(24.0, (4.0 * xprime - 2.0 * x0) / delta_min);
  const long long cap = std::llround(100.0 * bound) + 1000;

  RunningStat stat;
  long long censored = 0;
  for (long long trial = 0; trial < trials; ++trial) {
    RngStream one = rng.child(trial);
    int state = x0;
    long long steps = 0;
    while (state < xprime && steps < cap) {
      state = surrogate_step(state, cfg, steps, one);
      ++steps;
    }
    if (state < xprime) ++censored;
    stat.add(static_cast<double>(steps));
  }

  BoundReport report;
  report.lemma = "lemma8";
  report.parameters = {{"mu", cfg.mu},
                       {"lambda", cfg.lambda},
                       {"delta_min", delta_min},
                       {"x0", x0},
                       {"xprime", xprime},
                       {"target_threshold", threshold},
                       {"trajectory_cap", cap},
                       {"censored", censored}};
  report.samples = trials;
  report.empirical = stat.mean;
  report.standard_error = stat.std_error();
  report.bound = bound;
  report.pass = censored == 0 &&
                report.empirical <= report.bound + 3.0 * report.standard_error;
  report.hypothesis_ok = xprime >= threshold && 2 * xprime <= cfg.mu &&
                         delta_min < cfg.lambda &&
                         cfg.lambda >= kEulerE * cfg.mu;
  return report;
}

void ConditionedChainParams::validate() const {
  if (n < 2) throw std::invalid_argument("conditioned chain needs n >= 2");
  if (mu < 1) throw std::invalid_argument("conditioned chain needs mu >= 1");
  if (lambda < 1) {
    throw std::invalid_argument("conditioned chain needs lambda >= 1");
  }
}

double ConditionedChainParams::copy_probability() const {
  return std::pow(1.0 - 1.0 / n, n);
}

double ConditionedChainParams::analytic_pn(int s) const {
  if (s < 0 || s > mu) {
    throw std::invalid_argument("top count must lie in [0, mu]");
  }
  const double factor = 1.0 - kEulerE / std::sqrt(static_cast<double>(n));
  if (factor <= 0.0) return 0.0;
  return copy_probability() * (static_cast<double>(s) / mu) * factor;
}

bool ConditionedChainParams::in_regime() const {
  return lambda <= kEulerE * mu &&
         mu <= std::pow(static_cast<double>(n), 0.4);
}

int conditioned_chain_step(int s, const ConditionedChainParams& params,
                           RngStream& rng) {
  params.validate();
  if (s == 0) return 0;
  if (s < 0 || s > params.mu) {
    throw std::invalid_argument("top count must lie in [0, mu]");
  }
  const double p = params.analytic_pn(s);
  if (params.lambda * p > s + 1e-9) {
    throw std::logic_error("conditioned chain mean exceeded its top count");
  }
  return std::min<long long>(params.mu,
                             sample_binomial(rng, params.lambda, p));
}

PaEstimate estimate_top_parent_given_quiet(const ConditionedChainParams& params,
                                           int f_top, int s,
                                           long long generations,
                                           RngStream rng) {
  params.validate();
  if (f_top < 1 || f_top > params.n) {
    throw std::invalid_argument("top level must lie in [1, n]");
  }
  if (s < 1 || s > params.mu) {
    throw std::invalid_argument("top count must lie in [1, mu]");
  }
  if (generations < 1) {
    throw std::invalid_argument("need at least one generation");
  }

  Population pop;
  pop.reserve(params.mu);
  for (int i = 0; i < params.mu; ++i) {
    pop.push_back(make_level_individual(params.n, i < s ? f_top : f_top - 1));
  }
  Mutator mut(params.n);
  Individual child{BitVector(params.n), 0};
  std::vector<OffspringRecord> records(params.lambda);

  long long kept = 0;
  long long first_top = 0;
  for (long long g = 0; g < generations; ++g) {
    bool first_is_top = false;
    for (int i = 0; i < params.lambda; ++i) {
      const int parent_idx = static_cast<int>(rng.below(params.mu));
      if (i == 0) first_is_top = parent_idx < s;
      records[i] = mut.apply(pop[parent_idx], child, rng);
    }
    if (quiet_generation(records, f_top)) {
      ++kept;
      if (first_is_top) ++first_top;
    }
  }

  PaEstimate est;
  est.kept = kept;
  est.estimate = kept > 0 ? static_cast<double>(first_top) / kept : 0.0;
  est.rejection_rate = 1.0 - static_cast<double>(kept) / generations;
  return est;
}

BoundReport check_conditioned_chain(const ConditionedChainParams& params, int s,
                                    long long samples, PnMode mode,
                                    RngStream rng) {
  params.validate();
  if (s < 1 || s > params.mu) {
    throw std::invalid_argument("top count must lie in [1, mu]");
  }
  if (samples < 2) throw std::invalid_argument("need at least two samples");

  double p = 0.0;
  bool clamped = false;
  PaEstimate est;
  if (mode == PnMode::analytic) {
    p = params.analytic_pn(s);
  } else {
    const double d_width = std::pow(static_cast<double>(params.n), 0.1);
    const int f_top = std::clamp(
        static_cast<int>(std::ceil(params.n - d_width + 1 - 1e-9)), 1,
        params.n);
    est = estimate_top_parent_given_quiet(params, f_top, s, samples,
                                          rng.child(1));
    p = params.copy_probability() * est.estimate;
    if (params.lambda * p > s) {
      p = static_cast<double>(s) / params.lambda;
      clamped = true;
    }
  }

  RngStream chain_rng = rng.child(0);
  RunningStat stat;
  for (long long i = 0; i < samples; ++i) {
    stat.add(static_cast<double>(std::min<long long>(
        params.mu, sample_binomial(chain_rng, params.lambda, p))));
  }

  const double slack =
      s * std::log(static_cast<double>(params.n)) /
      std::sqrt(static_cast<double>(params.n));
  BoundReport report;
  report.lemma = "lemma20";
  report.parameters = {{"n", params.n},
                       {"mu", params.mu},
                       {"lambda", params.lambda},
                       {"s", s},
                       {"mode", mode == PnMode::analytic ? "analytic" : "empirical"},
                       {"p_n", p},
                       {"lambda_p_n", params.lambda * p},
                       {"upper_bound", s}};
  if (mode == PnMode::empirical) {
    report.parameters["pa_given_quiet"] = est.estimate;
    report.parameters["estimator_kept"] = est.kept;
    report.parameters["p_clamped"] = clamped;
    report.rejection_rate = est.rejection_rate;
  }
  report.samples = samples;
  report.empirical = stat.mean;
  report.standard_error = stat.std_error();
  report.bound = s - slack;
  const double se3 = 3.0 * report.standard_error;
  report.pass = report.empirical >= report.bound - se3 &&
                report.empirical <= s + se3;
  report.hypothesis_ok =
      params.in_regime() && params.lambda * p <= s + 1e-9 && !clamped;
  return report;
}

double surrogate_drift_threshold() {
  static const double value = [] {
    const double floor_term = std::ceil(36.0 * kEulerE / (kEulerE - 2.0)) + 1.0;
    return std::max(static_cast<double>(empirical_log1p_smin()) + 1.0,
                    floor_term);
  }();
  return value;
}

double h_drift_exact(const ConditionedChainParams& params, int s) {
  params.validate();
  if (s < 1 || s > params.mu) {
    throw std::invalid_argument("top count must lie in [1, mu]");
  }
  const double p = params.analytic_pn(s);
  const std::vector<double> pmf = binom_pmf_table({params.lambda, p});
  double expect = 0.0;
  for (int k = 0; k <= params.lambda; ++k) {
    expect += pmf[k] * h_potential(std::min(k, params.mu), params.mu);
  }
  return h_potential(s, params.mu) - expect;
}

DriftReport check_h_drift(const ConditionedChainParams& params) {
  params.validate();
  const double s_threshold = surrogate_drift_threshold();
  const int s_lo = static_cast<int>(std::ceil(s_threshold));
  if (s_lo > params.mu) {
    throw std::invalid_argument(
        "population too small: no top count reaches the drift threshold");
  }

  double min_drift = std::numeric_limits<double>::infinity();
  for (int s = s_lo; s <= params.mu; ++s) {
    min_drift = std::min(min_drift, h_drift_exact(params, s));
  }

  const double beta = 24.0 * kEulerE / (kEulerE - 2.0);
  DriftReport report;
  report.quantity =
      "top-level h drift of the conditioned chain, minimum over counts in "
      "[" + std::to_string(s_lo) + ", " + std::to_string(params.mu) + "]";
  report.samples = params.mu - s_lo + 1;
  report.estimate = min_drift;
  report.ci_low = min_drift;
  report.ci_high = min_drift;
  report.bound = 1.0 / beta;
  report.pass = report.estimate >= report.bound;
  report.hypothesis_ok = params.in_regime();
  return report;
}

PhaseProcessConfig PhaseProcessConfig::make(int n, int mu, double c) {
  return make_with_s(n, mu, c, surrogate_drift_threshold());
}

PhaseProcessConfig PhaseProcessConfig::make_with_s(int n, int mu, double c,
                                                   double s_value) {
  if (n < 2) throw std::invalid_argument("phase process needs n >= 2");
  if (mu < 1) throw std::invalid_argument("phase process needs mu >= 1");
  if (!(c > 0.0 && c < 0.5)) {
    throw std::invalid_argument("phase process needs c in (0, 1/2)");
  }
  PhaseProcessConfig cfg;
  cfg.n = n;
  cfg.mu = mu;
  cfg.c = c;
  cfg.beta = 24.0 * kEulerE / (kEulerE - 2.0);
  cfg.s_threshold = s_value;
  cfg.window = static_cast<long long>(std::ceil(4.0 * cfg.beta * mu)) + 1;
  cfg.drift_exponent = c * std::log(static_cast<double>(n)) - s_value -
                       std::log(40.0 * cfg.beta) - 1.0;
  cfg.barrier_low = 0.0;
  cfg.barrier_high = std::pow(static_cast<double>(n), c);
  return cfg;
}

PhaseProcessResult phase_process_run(std::span<const int> f_top_trace,
                                     const PhaseProcessConfig& cfg) {
  if (f_top_trace.empty()) {
    throw std::invalid_argument("phase process needs a non-empty trace");
  }
  auto y_at = [&](long long i) {
    return std::min(static_cast<double>(cfg.n - f_top_trace[i]),
                    cfg.barrier_high);
  };

  PhaseProcessResult result;
  const long long size = static_cast<long long>(f_top_trace.size());
  long long phi = 0;
  result.points.push_back({phi, y_at(phi)});
  while (phi + cfg.window < size) {
    const double y_start = y_at(phi);
    long long next;
    if (y_at(phi + cfg.window) >= y_start) {
      next = phi + cfg.window;
    } else {
      next = phi + 1;
      while (y_at(next) >= y_start) ++next;
    }
    int below = 0;
    for (long long y = phi + 1; y <= next; ++y) {
      if (y_at(y) < y_start) ++below;
    }
    if (below > 1) ++result.structure_violations;
    result.points.push_back({next, y_at(next)});
    phi = next;
  }
  result.generations_consumed = phi;
  return result;
}

double negative_drift_bound(double drift_exponent, double p, double d_factor,
                            double window, double a, double b) {
  if (!(drift_exponent > 0.0)) {
    throw std::invalid_argument("drift exponent must be positive");
  }
  if (p < 1.0) throw std::invalid_argument("denominator factor must be >= 1");
  if (d_factor < 0.0 || window < 0.0) {
    throw std::invalid_argument("window and scale factors must be non-negative");
  }
  if (b < a) throw std::invalid_argument("barriers must satisfy b >= a");
  return std::min(1.0, window * d_factor * p *
                           std::exp(-drift_exponent * (b - a)));
}

double additive_drift_bound(double x0, double delta, DriftDirection) {
  if (!(delta > 0.0)) throw std::invalid_argument("drift must be positive");
  if (x0 < 0.0) throw std::invalid_argument("start value must be non-negative");
  return x0 / delta;
}

PhaseHarvest harvest_phase_steps(const EaParams& params, int f_start,
                                 const PhaseProcessConfig& cfg,
                                 long long target_steps,
                                 long long max_generations, RngStream rng) {
  params.validate();
  if (cfg.n != params.n || cfg.mu != params.mu) {
    throw std::invalid_argument("phase config does not match the run shape");
  }
  if (f_start < 0 || f_start > params.n) {
    throw std::invalid_argument("start level must lie in [0, n]");
  }
  if (target_steps < 1) throw std::invalid_argument("need at least one step");
  if (max_generations < 1) {
    throw std::invalid_argument("need a positive generation budget");
  }

  PhaseHarvest harvest;
  const Population start(params.mu, make_level_individual(params.n, f_start));
  std::vector<int> trace;
  long long replicate = 0;
  while (static_cast<long long>(harvest.steps.size()) < target_steps &&
         harvest.generations < max_generations) {
    const long long budget = std::min(max_generations - harvest.generations,
                                      std::max<long long>(cfg.window * 8, 4096));
    EaEngine engine(params, rng.child(replicate));
    engine.init_population(start);
    trace.clear();
    trace.push_back(top_fitness(engine.population()));
    for (long long g = 0; g < budget; ++g) {
      engine.run_generation();
      const int f_top = top_fitness(engine.population());
      trace.push_back(f_top);
      if (f_top == params.n) break;
    }
    harvest.generations += static_cast<long long>(trace.size()) - 1;
    ++replicate;
    ++harvest.replicates;

    const PhaseProcessResult phases =
        phase_process_run(trace, cfg);
    for (std::size_t i = 0; i + 1 < phases.points.size(); ++i) {
      harvest.steps.push_back(
          {phases.points[i].z, phases.points[i + 1].z});
      if (static_cast<long long>(harvest.steps.size()) >= target_steps) break;
    }
  }
  return harvest;
}

BoundReport check_exponential_moment(const EaParams& params,
                                     const PhaseProcessConfig& cfg,
                                     long long target_steps, RngStream rng) {
  const int f_start = std::clamp(
      static_cast<int>(std::ceil(params.n - cfg.barrier_high)), 0, params.n);
  const long long max_generations = target_steps * cfg.window * 4 + 100000;
  const PhaseHarvest harvest = harvest_phase_steps(
      params, f_start, cfg, target_steps, max_generations, rng);

  RunningStat stat;
  double sum_minus = 0.0, sum_zero = 0.0, sum_plus = 0.0;
  for (const PhaseStepSample& step : harvest.steps) {
    if (!(step.z_before > cfg.barrier_low &&
          step.z_before < cfg.barrier_high)) {
      continue;
    }
    const double diff = step.z_before - step.z_after;
    const double arg = cfg.drift_exponent * diff;
    const double contribution =
        arg > 700.0 ? std::numeric_limits<double>::infinity() : std::exp(arg);
    stat.add(contribution);
    if (diff > 0.0) {
      sum_plus += contribution;
    } else if (diff < 0.0) {
      sum_minus += contribution;
    } else {
      sum_zero += contribution;
    }
  }

  const long long kept = stat.count;
  const long long total = static_cast<long long>(harvest.steps.size());
  BoundReport report;
  report.lemma = "lemma25";
  report.parameters = {{"n", params.n},
                       {"mu", params.mu},
                       {"lambda", params.lambda},
                       {"c", cfg.c},
                       {"s_threshold", cfg.s_threshold},
                       {"drift_exponent", cfg.drift_exponent},
                       {"window", cfg.window},
                       {"conditioned_samples", kept},
                       {"total_steps", total},
                       {"generations", harvest.generations},
                       {"replicates", harvest.replicates},
                       {"sum_minus", kept > 0 ? sum_minus / kept : 0.0},
                       {"sum_zero", kept > 0 ? sum_zero / kept : 0.0},
                       {"sum_plus", kept > 0 ? sum_plus / kept : 0.0}};
  report.samples = kept;
  report.empirical = kept > 0 ? stat.mean : 1.0;
  report.standard_error = kept > 0 ? stat.std_error() : 0.0;
  report.bound = 1.0 - std::exp(-cfg.s_threshold) / 12.0;
  report.pass = kept == 0 ||
                report.empirical <= report.bound + 3.0 * report.standard_error;
  report.hypothesis_ok = cfg.drift_exponent > 0.0 && kept >= 30 &&
                         params.lambda <= kEulerE * params.mu;
  report.rejection_rate =
      total > 0 ? 1.0 - static_cast<double>(kept) / total : 1.0;
  return report;
}

BoundReport check_phase_jump_profile(const EaParams& params,
                                     const PhaseProcessConfig& cfg,
                                     long long target_steps, RngStream rng) {
  const int f_start = std::clamp(
      static_cast<int>(std::ceil(params.n - cfg.barrier_high)), 0, params.n);
  const long long max_generations = target_steps * cfg.window * 4 + 100000;
  const PhaseHarvest harvest = harvest_phase_steps(
      params, f_start, cfg, target_steps, max_generations, rng);

  long long kept = 0;
  std::map<int, long long> jump_counts;
  for (const PhaseStepSample& step : harvest.steps) {
    if (!(step.z_before < cfg.barrier_high)) continue;
    ++kept;
    const int k = static_cast<int>(std::llround(step.z_before - step.z_after));
    if (k >= 1) ++jump_counts[k];
  }

  int k_max = 3;
  if (!jump_counts.empty()) k_max = std::max(k_max, jump_counts.rbegin()->first);

  Json rows = Json::array();
  bool all_pass = true;
  double binding_margin = -std::numeric_limits<double>::infinity();
  double binding_empirical = 0.0, binding_bound = 1.0, binding_se = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    const long long count = jump_counts.count(k) ? jump_counts.at(k) : 0;
    const double empirical =
        kept > 0 ? static_cast<double>(count) / kept : 0.0;
    const double se = kept > 0 ? proportion_std_error(empirical, kept) : 0.0;
    const double raw_bound =
        cfg.window * params.lambda *
        std::pow(static_cast<double>(params.n), -k * (1.0 - cfg.c)) /
        std::tgamma(static_cast<double>(k) + 1.0);
    const double bound = std::min(1.0, raw_bound);
    const bool row_pass = empirical <= bound + 3.0 * se;
    all_pass = all_pass && row_pass;
    rows.push_back({{"k", k},
                    {"count", count},
                    {"empirical", empirical},
                    {"bound", bound},
                    {"bound_raw", raw_bound},
                    {"pass", row_pass}});
    const double margin = empirical - bound;
    if (margin > binding_margin) {
      binding_margin = margin;
      binding_empirical = empirical;
      binding_bound = bound;
      binding_se = se;
    }
  }

  const long long total = static_cast<long long>(harvest.steps.size());
  BoundReport report;
  report.lemma = "lemma24";
  report.parameters = {{"n", params.n},
                       {"mu", params.mu},
                       {"lambda", params.lambda},
                       {"c", cfg.c},
                       {"window", cfg.window},
                       {"kept_steps", kept},
                       {"total_steps", total},
                       {"generations", harvest.generations},
                       {"jumps", rows}};
  report.samples = kept;
  report.empirical = binding_empirical;
  report.standard_error = binding_se;
  report.bound = binding_bound;
  report.pass = kept == 0 || all_pass;
  report.hypothesis_ok = kept >= 30 &&
                         params.lambda <= kEulerE * params.mu &&
                         params.mu <= std::pow(static_cast<double>(params.n),
                                               0.5 - cfg.c);
  report.rejection_rate =
      total > 0 ? 1.0 - static_cast<double>(kept) / total : 1.0;
  return report;
}

BoundReport check_top_loss_probability(const EaParams& params, double c,
                                       long long trials, RngStream rng) {
  params.validate();
  if (!(c > 0.0 && c < 0.5)) {
    throw std::invalid_argument("needs c in (0, 1/2)");
  }
  if (trials < 1) throw std::invalid_argument("need at least one trial");

  const double d_width = std::pow(static_cast<double>(params.n), c);
  const int f_top0 = std::clamp(
      static_cast<int>(std::ceil(params.n - d_width + 1 - 1e-9)), 1, params.n);
  const double beta = 24.0 * kEulerE / (kEulerE - 2.0);
  const long long window =
      static_cast<long long>(std::ceil(4.0 * beta * params.mu)) + 1;
  const double s_threshold = surrogate_drift_threshold();

  const Population start(params.mu, make_level_individual(params.n, f_top0));
  long long losses = 0;
  for (long long trial = 0; trial < trials; ++trial) {
    EaEngine engine(params, rng.child(trial));
    engine.init_population(start);
    for (long long g = 0; g < window; ++g) {
      engine.run_generation();
      if (top_fitness(engine.population()) < f_top0) {
        ++losses;
        break;
      }
    }
  }

  BoundReport report;
  report.lemma = "cor23";
  report.bound = std::exp(-s_threshold) / 4.0;
  report.parameters = {{"n", params.n},
                       {"mu", params.mu},
                       {"lambda", params.lambda},
                       {"c", c},
                       {"f_top0", f_top0},
                       {"window", window},
                       {"s_threshold", s_threshold},
                       {"bound_below_resolution",
                        report.bound < 1.0 / static_cast<double>(trials)}};
  report.samples = trials;
  report.empirical = static_cast<double>(losses) / trials;
  report.standard_error = proportion_std_error(report.empirical, trials);
  report.pass =
      report.empirical >= report.bound - 3.0 * report.standard_error;
  report.hypothesis_ok =
      params.lambda <= kEulerE * params.mu &&
      params.mu <= std::pow(static_cast<double>(params.n), 0.5 - c);
  return report;
}

}  // namespace commalab
