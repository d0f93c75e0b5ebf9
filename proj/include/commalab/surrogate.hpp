#pragma once

#include <span>
#include <vector>

#include "commalab/core_ea.hpp"
#include "commalab/reports.hpp"
#include "commalab/rng.hpp"

namespace commalab {

// Reduced top-level chain X_{t+1} ~ min{mu, Bin(lambda, (X_t + influx_t)/(e mu))}.
// An empty influx sequence gives the plain chain; otherwise the sequence is
// extended past its end by its last value.
struct SurrogateConfig {
  int mu = 0;
  int lambda = 0;
  std::vector<double> influx;

  void validate() const;
  double influx_at(long long t) const;
  double influx_min() const;
};

// One transition of the chain.  The binomial parameter is clamped into [0, 1]
// when the state-plus-influx mass exceeds e*mu; *clamped reports that.
int surrogate_step(int state, const SurrogateConfig& cfg, long long t,
                   RngStream& rng, bool* clamped = nullptr);

// Probability that the chain ever falls below x0 - delta within t steps,
// against the bound t*x0/delta^2.
BoundReport check_variation_bound(const SurrogateConfig& cfg, int x0,
                                  double delta, int t, long long trials,
                                  RngStream rng);

// Expected first time the influx chain reaches xprime, against the bound
// max{24, (4 xprime - 2 x0)/delta_min}.  Requires a positive influx; the
// lower-threshold and half-capacity hypotheses are flagged, not enforced.
BoundReport check_hitting_time(const SurrogateConfig& cfg, int x0, int xprime,
                               long long trials, RngStream rng);

// Top-level chain conditioned on a quiet generation: next state is
// min{Bin(lambda, p_n), mu} with p_n = (1-1/n)^n * Pr(parent at top | quiet).
struct ConditionedChainParams {
  int n = 0;
  int mu = 0;
  int lambda = 0;

  void validate() const;
  double copy_probability() const;
  // The closed-form lower bound (1-1/n)^n * (s/mu) * (1 - e/sqrt(n)), which
  // is what the drift argument consumes.
  double analytic_pn(int s) const;
  bool in_regime() const;
};

int conditioned_chain_step(int s, const ConditionedChainParams& params,
                           RngStream& rng);

struct PaEstimate {
  double estimate = 0.0;
  double rejection_rate = 0.0;
  long long kept = 0;
};

// Rejection-sampling estimate of Pr(first offspring drew a top parent | the
// generation was quiet), over a fixed population with s members at f_top and
// the rest one level below.
PaEstimate estimate_top_parent_given_quiet(const ConditionedChainParams& params,
                                           int f_top, int s,
                                           long long generations,
                                           RngStream rng);

enum class PnMode { analytic, empirical };

// Mean of the conditioned chain's next state from s, checked against the
// bracket [s - s ln(n)/sqrt(n), s].
BoundReport check_conditioned_chain(const ConditionedChainParams& params, int s,
                                    long long samples, PnMode mode,
                                    RngStream rng);

// Empirical stand-in for the top-level drift constant S: the measured mean
// threshold of the log1p lower bound plus one, floored at ceil(36e/(e-2))+1.
double surrogate_drift_threshold();

// Exact one-step drift h(s) - E[h(next)] of the conditioned chain.
double h_drift_exact(const ConditionedChainParams& params, int s);

// Minimum exact drift over s in [S..mu], against 1/beta with
// beta = 24e/(e-2).
DriftReport check_h_drift(const ConditionedChainParams& params);

// Phase process over the capped distance-to-optimum Y_t = min{n - f_top, n^c}:
// phases last window generations unless Y drops below its phase-start value
// earlier, and Z_t is Y sampled at phase starts.
struct PhaseProcessConfig {
  int n = 0;
  int mu = 0;
  double c = 0.0;
  double beta = 0.0;
  double s_threshold = 0.0;
  long long window = 0;
  double drift_exponent = 0.0;
  double barrier_low = 0.0;
  double barrier_high = 0.0;

  static PhaseProcessConfig make(int n, int mu, double c);
  static PhaseProcessConfig make_with_s(int n, int mu, double c,
                                        double s_value);
};

struct PhasePoint {
  long long phi = 0;
  double z = 0.0;
};

struct PhaseProcessResult {
  std::vector<PhasePoint> points;
  long long generations_consumed = 0;
  // Phases in which the top level exceeded its phase-start value in more
  // than one generation.
  int structure_violations = 0;
};

PhaseProcessResult phase_process_run(std::span<const int> f_top_trace,
                                     const PhaseProcessConfig& cfg);

// min{1, window * D * p * exp(-drift_exponent * (b - a))}.
double negative_drift_bound(double drift_exponent, double p, double d_factor,
                            double window, double a, double b);

enum class DriftDirection { upper_bound, lower_bound };

// x0 / delta, read as an upper or lower hitting-time bound depending on
// which side of the drift inequality the caller established.
double additive_drift_bound(double x0, double delta, DriftDirection direction);

struct PhaseStepSample {
  double z_before = 0.0;
  double z_after = 0.0;
};

struct PhaseHarvest {
  std::vector<PhaseStepSample> steps;
  long long generations = 0;
  long long replicates = 0;
};

// Live EA runs started with every member at f_start, folded through the
// phase process; replicates are restarted until enough steps are collected
// or the generation budget runs out.
PhaseHarvest harvest_phase_steps(const EaParams& params, int f_start,
                                 const PhaseProcessConfig& cfg,
                                 long long target_steps,
                                 long long max_generations, RngStream rng);

// Conditional exponential moment E[exp(drift_exponent * (Z_t - Z_{t+1}))]
// over harvested steps with Z_t strictly between the barriers, against
// 1 - exp(-S)/12.
BoundReport check_exponential_moment(const EaParams& params,
                                     const PhaseProcessConfig& cfg,
                                     long long target_steps, RngStream rng);

// Per-size jump probabilities Pr(Z_t - Z_{t+1} = k) of harvested steps below
// the upper barrier, each against window * lambda * n^{-k(1-c)} / k!.
BoundReport check_phase_jump_profile(const EaParams& params,
                                     const PhaseProcessConfig& cfg,
                                     long long target_steps, RngStream rng);

// Probability that a population started entirely at the top of the barrier
// region loses its top level within one phase window, against exp(-S)/4.
BoundReport check_top_loss_probability(const EaParams& params, double c,
                                       long long trials, RngStream rng);

}  // namespace commalab
