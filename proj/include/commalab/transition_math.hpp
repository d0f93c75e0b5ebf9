#pragma once

#include <vector>

namespace commalab {

// State of one individual under OneMax, reduced by symmetry: transition
// distributions depend only on the bit length n and the number of zero bits
// d = n - f(x), never on the particular bit pattern.
struct FitnessState {
  int n = 0;
  int d = 0;

  void validate() const;
};

struct BinomialSpec {
  int m = 0;
  double p = 0.0;

  void validate() const;
};

double ln_choose(int n, int k);

// Upper bound C(d, k) * (1/n)^k on the probability that one mutation raises
// fitness by exactly k.  Gains above d are impossible, so k > d yields 0.
double delta_up_bound(const FitnessState& state, int k);

// Exact probability that one mutation leaves fitness unchanged:
// sum over k of C(d,k) * C(n-d,k) * (1/n)^{2k} * (1-1/n)^{n-2k}.
double delta_zero_exact(const FitnessState& state);

// Exact distribution of the fitness change delta of one mutation, from the
// convolution "flip a of the d zero bits, flip b of the n-d one bits".
// Support runs from -(n-d) to +d; index i corresponds to delta = i - (n-d).
struct DeltaPmf {
  int n = 0;
  int d = 0;
  std::vector<double> prob;

  int min_delta() const { return -(n - d); }
  int max_delta() const { return d; }
  double at(int delta) const;
};

// Guarded at n <= 64; conditioning of the double-precision log-space path is
// benign in that range.
DeltaPmf delta_pmf_exact(const FitnessState& state);

struct PmfCdf {
  double pmf = 0.0;
  double cdf = 0.0;
};

// Stable pmf and lower CDF of Bin(m, p) at k, accumulated from log-space
// terms with compensated summation.  Out-of-range k gives pmf 0 and a
// clamped cdf.
PmfCdf binom_pmf_cdf(const BinomialSpec& spec, int k);

// Full pmf table, index k in [0, m].  Shared backend for the checkers.
std::vector<double> binom_pmf_table(const BinomialSpec& spec);

struct MeanExceedance {
  double probability = 0.0;
  bool exceeds_quarter = false;
};

// Exact Pr(X >= m*p) for X ~ Bin(m, p) and whether it exceeds 1/4.
// Requires p > 1/m; smaller p is outside the fact being checked.
MeanExceedance check_mean_exceedance(const BinomialSpec& spec);

struct Log1pBound {
  double expectation = 0.0;
  double bound = 0.0;
  bool holds = false;
};

// Exact E[ln(1+X)] against the lower bound
// ln(1+mp) - (11/12)*(1-p)/(mp); holds is the comparison outcome.
Log1pBound check_log1p_bound(const BinomialSpec& spec);

struct ChernoffBounds {
  double lower_tail = 0.0;  // bound on Pr(X <= (1-delta) mp)
  double upper_tail = 0.0;  // bound on Pr(X >= (1+delta) mp)
};

ChernoffBounds chernoff_bounds(const BinomialSpec& spec, double delta);

// Verifies that the offspring-fitness distribution from a level-fx parent is
// stochastically dominated by the one from a level-fy parent, comparing upper
// tails over all absolute fitness values.  Requires fx <= fy.
bool domination_check(int n, int fx, int fy);

struct SminScanPoint {
  int m = 0;
  double p = 0.0;
  double mp = 0.0;
  bool holds = false;
};

struct SminScanResult {
  std::vector<SminScanPoint> failures;
  long long points_checked = 0;
  // Smallest integer mean such that every grid point with actual mean at or
  // above it satisfies the bound.
  int empirical_smin = 0;
};

// Grid scan over target means 1..mp_max and p in {0.1, ..., 0.9} locating the
// empirical threshold for check_log1p_bound.
SminScanResult scan_log1p_smin(int mp_max = 200);

// Cached result of the default scan.  This is an empirical grid value, not a
// constant taken from anywhere else; downstream checkers that need a safe
// mean threshold start from it.
int empirical_log1p_smin();

}  // namespace commalab
