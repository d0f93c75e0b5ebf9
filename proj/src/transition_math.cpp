#include "commalab/transition_math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace commalab {

namespace {

// Kahan-compensated accumulator for sums of many small positive terms.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

void FitnessState::validate() const {
  if (n < 1) throw std::invalid_argument("fitness state needs n >= 1");
  if (d < 0 || d > n) {
    throw std::invalid_argument("fitness state needs 0 <= d <= n");
  }
}

void BinomialSpec::validate() const {
  if (m < 1) throw std::invalid_argument("binomial spec needs m >= 1");
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("binomial spec needs p in [0, 1]");
  }
}

double ln_choose(int n, int k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double delta_up_bound(const FitnessState& state, int k) {
  state.validate();
  if (k < 1) throw std::invalid_argument("delta_up_bound needs k >= 1");
  if (k > state.d) return 0.0;
  return std::exp(ln_choose(state.d, k) - k * std::log(state.n));
}

double delta_zero_exact(const FitnessState& state) {
  state.validate();
  const int n = state.n;
  const int d = state.d;
  if (n == 1) return 0.0;  // the single bit always flips, fitness always moves
  const double lp = -std::log(static_cast<double>(n));
  const double lq = std::log1p(-1.0 / n);
  CompensatedSum acc;
  for (int k = 0; k <= std::min(d, n - d); ++k) {
    acc.add(std::exp(ln_choose(d, k) + ln_choose(n - d, k) + 2.0 * k * lp +
                     (n - 2.0 * k) * lq));
  }
  return acc.sum;
}

double DeltaPmf::at(int delta) const {
  if (delta < min_delta() || delta > max_delta()) return 0.0;
  return prob[delta + (n - d)];
}

DeltaPmf delta_pmf_exact(const FitnessState& state) {
  state.validate();
  const int n = state.n;
  const int d = state.d;
  if (n > 64) {
    throw std::invalid_argument("exact delta pmf is guarded at n <= 64");
  }

  DeltaPmf out;
  out.n = n;
  out.d = d;
  std::vector<CompensatedSum> acc(n + 1);

  if (n == 1) {
    // Flip probability is 1, so the bit always toggles.
    acc[d == 1 ? 1 + 0 : 0].add(1.0);  // d=1: delta +1 at index 1; d=0: -1 at 0
  } else {
    const double lp = -std::log(static_cast<double>(n));
    const double lq = std::log1p(-1.0 / n);
    for (int a = 0; a <= d; ++a) {
      for (int b = 0; b <= n - d; ++b) {
        const double term = std::exp(ln_choose(d, a) + ln_choose(n - d, b) +
                                     (a + b) * lp + (n - a - b) * lq);
        acc[(a - b) + (n - d)].add(term);
      }
    }
  }

  out.prob.resize(n + 1);
  for (int i = 0; i <= n; ++i) out.prob[i] = acc[i].sum;
  return out;
}

std::vector<double> binom_pmf_table(const BinomialSpec& spec) {
  spec.validate();
  const int m = spec.m;
  const double p = spec.p;
  std::vector<double> pmf(m + 1, 0.0);
  if (p <= 0.0) {
    pmf[0] = 1.0;
  } else if (p >= 1.0) {
    pmf[m] = 1.0;
  } else {
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    for (int k = 0; k <= m; ++k) {
      pmf[k] = std::exp(ln_choose(m, k) + k * lp + (m - k) * lq);
    }
  }
  return pmf;
}

PmfCdf binom_pmf_cdf(const BinomialSpec& spec, int k) {
  spec.validate();
  if (k < 0) return {0.0, 0.0};
  if (k > spec.m) return {0.0, 1.0};
  const std::vector<double> pmf = binom_pmf_table(spec);
  CompensatedSum acc;
  for (int j = 0; j <= k; ++j) acc.add(pmf[j]);
  return {pmf[k], std::min(acc.sum, 1.0)};
}

MeanExceedance check_mean_exceedance(const BinomialSpec& spec) {
  spec.validate();
  if (spec.p * spec.m <= 1.0) {
    throw std::invalid_argument(
        "mean exceedance fact needs p > 1/m, got m=" + std::to_string(spec.m) +
        " p=" + std::to_string(spec.p));
  }
  const double mean = spec.m * spec.p;
  // Nudge before the ceiling so means that are integers up to rounding error
  // keep their own probability mass in the tail.
  const int k0 = static_cast<int>(std::ceil(mean - 1e-9));
  const std::vector<double> pmf = binom_pmf_table(spec);
  CompensatedSum acc;
  for (int k = spec.m; k >= k0; --k) acc.add(pmf[k]);
  return {acc.sum, acc.sum > 0.25};
}

Log1pBound check_log1p_bound(const BinomialSpec& spec) {
  spec.validate();
  const double mean = spec.m * spec.p;
  Log1pBound out;
  if (mean <= 0.0) {
    out.expectation = 0.0;
    out.bound = -std::numeric_limits<double>::infinity();
    out.holds = true;
    return out;
  }
  const std::vector<double> pmf = binom_pmf_table(spec);
  CompensatedSum acc;
  for (int k = 0; k <= spec.m; ++k) acc.add(pmf[k] * std::log1p(k));
  out.expectation = acc.sum;
  out.bound = std::log1p(mean) - (11.0 / 12.0) * (1.0 - spec.p) / mean;
  out.holds = out.expectation >= out.bound;
  return out;
}

ChernoffBounds chernoff_bounds(const BinomialSpec& spec, double delta) {
  spec.validate();
  if (delta < 0.0 || delta > 1.0) {
    throw std::invalid_argument("chernoff bounds need delta in [0, 1]");
  }
  const double mean = spec.m * spec.p;
  return {std::exp(-delta * delta * mean / 2.0),
          std::exp(-delta * delta * mean / 3.0)};
}

bool domination_check(int n, int fx, int fy) {
  if (fx > fy) {
    throw std::invalid_argument("domination check needs fx <= fy");
  }
  const DeltaPmf px = delta_pmf_exact({n, n - fx});
  const DeltaPmf py = delta_pmf_exact({n, n - fy});

  // Upper tails over absolute offspring fitness; domination means the weaker
  // parent's tail never exceeds the stronger parent's.
  std::vector<double> tail_x(n + 2, 0.0), tail_y(n + 2, 0.0);
  for (int v = n; v >= 0; --v) {
    tail_x[v] = tail_x[v + 1] + px.at(v - fx);
    tail_y[v] = tail_y[v + 1] + py.at(v - fy);
  }
  for (int v = 0; v <= n; ++v) {
    if (tail_x[v] > tail_y[v] + 1e-12) return false;
  }
  return true;
}

SminScanResult scan_log1p_smin(int mp_max) {
  SminScanResult out;
  double worst_failing_mp = 0.0;
  for (int tenths = 1; tenths <= 9; ++tenths) {
    const double p = tenths / 10.0;
    for (int target = 1; target <= mp_max; ++target) {
      const int m = std::max(1, static_cast<int>(std::lround(target / p)));
      const BinomialSpec spec{m, p};
      const Log1pBound r = check_log1p_bound(spec);
      ++out.points_checked;
      if (!r.holds) {
        out.failures.push_back({m, p, m * p, false});
        worst_failing_mp = std::max(worst_failing_mp, m * p);
      }
    }
  }
  out.empirical_smin =
      out.failures.empty() ? 1 : static_cast<int>(std::floor(worst_failing_mp)) + 1;
  return out;
}

int empirical_log1p_smin() {
  static const int value = scan_log1p_smin().empirical_smin;
  return value;
}

}  // namespace commalab
