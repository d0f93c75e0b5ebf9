#pragma once

#include <limits>
#include <ostream>
#include <span>
#include <vector>

#include "commalab/core_ea.hpp"
#include "commalab/reports.hpp"

namespace commalab {

// Values of the exponential potential are handled in the log domain
// throughout: tau^{n-f0} overflows any fixed-width float long before n gets
// interesting, and every comparison we need is scale-free.  The designated
// log-domain zero is -infinity.
inline constexpr double log_zero = -std::numeric_limits<double>::infinity();

struct PotentialParams {
  double epsilon = 0.0;
  double tau = 0.0;    // 4e / epsilon
  double alpha = 0.0;  // 1 - (1/tau) ln(1 + 1/tau), always in (3/4, 1)
  int f0 = 0;          // ceil(alpha * n)
  int n = 0;

  // Throws std::invalid_argument when epsilon is outside (0, 1) or the
  // computed alpha leaves (3/4, 1).
  static PotentialParams make(double epsilon, int n);
};

// ln g(x) for an individual: (f - f0) * ln(tau) when f >= f0, log-domain
// zero below the threshold.
double g_log_individual(int fitness, const PotentialParams& params);

inline double g_log_individual(const Individual& x,
                               const PotentialParams& params) {
  return g_log_individual(x.fitness, params);
}

// ln of the summed population potential via log-sum-exp.
double g_log_population(const Population& pop, const PotentialParams& params);

// Same sum taken from a fitness histogram (index = fitness, size n+1).
double g_log_from_histogram(std::span<const long long> histogram,
                            const PotentialParams& params);

// ln of max{0, tau^{n-f0} - g}; log-domain zero exactly when the population
// potential has reached tau^{n-f0}.
double z_log(double log_g, const PotentialParams& params);

inline double z_log(const Population& pop, const PotentialParams& params) {
  return z_log(g_log_population(pop, params), params);
}

// x_top * (ln mu - ln x_top + 2), extended by h(0) = 0 (the x ln x limit).
// x_top outside [0, mu] is rejected.
double h_potential(int x_top, int mu);

// True iff one generation's offspring batch is "quiet" at reference level
// f_top: no offspring of a weaker parent reaches f_top, and offspring of
// f_top parents stay at or below f_top, hitting it only as exact copies.
// A parent above f_top contradicts f_top being the top and counts as a
// violation.
bool quiet_generation(std::span<const OffspringRecord> offspring, int f_top);

struct GenerationEvents {
  std::vector<OffspringRecord> offspring;
};

// The L-generation version over a recorded trace; the first L entries are
// examined against the same fixed f_top.  A trace shorter than L is rejected.
bool detect_nl(std::span<const GenerationEvents> trace, int L, int f_top);

struct LevelSnapshot {
  long long generation = 0;
  int f_top = 0;
  int x_top = 0;
  double log_g = log_zero;
  double h_value = 0.0;
  double log_z = log_zero;
  bool z_is_zero = false;
  bool n1_holds = true;
};

// Per-generation telemetry recorder.  Attach record_initial to the starting
// population, then feed it generation views; emits the fixed-schema CSV.
class PotentialTelemetry {
 public:
  PotentialTelemetry(const PotentialParams& params, int mu);

  void record_initial(const Population& pop);
  void on_generation(const GenerationView& view);
  GenerationObserver observer();

  const std::vector<LevelSnapshot>& rows() const { return rows_; }
  void write_csv(std::ostream& os) const;

 private:
  LevelSnapshot snapshot(long long generation, const Population& pop,
                         bool n1) const;

  PotentialParams params_;
  int mu_;
  std::vector<LevelSnapshot> rows_;
};

// Mean offspring potential from a fixed parent, against the per-individual
// bound: (1/e)(1+eps) g(x) for parents at or above f0, the constant 2 below
// it.  The below-threshold bound presumes large n; we flag n < 100 as
// outside hypothesis rather than guessing the unstated threshold.
DriftReport check_offspring_g_bound(int n, double epsilon, int parent_fitness,
                                    long long samples, RngStream rng);

// Live-run estimate of E[g(P_{t+1}) - g(P_t) | P_t] against 2*lambda, with
// optional extra resamples restarted from each visited population.  The pass
// verdict uses a one-sided 95% confidence comparison.
DriftReport check_population_g_drift(const EaParams& params, double epsilon,
                                     long long generations,
                                     int resamples_per_snapshot, RngStream rng);

// Mean initial shortfall E[Z_0] against tau^{n-f0}/2 over freshly drawn
// populations; accumulation and comparison run in the log domain.
BoundReport check_initial_z(int n, int mu, double epsilon, long long seeds,
                            RngStream rng);

// Empirical probability of a quiet generation from a population pinned at
// the top region (f_top >= n - n^c + 1), against 1 - e/sqrt(n).
BoundReport check_quiet_probability(int n, double c, int mu, int lambda,
                                    long long generations, RngStream rng);

}  // namespace commalab
