#pragma once

#include <cmath>
#include <cstdint>

namespace commalab {

// Welford accumulator; numerically stable for long sample streams.
struct RunningStat {
  long long count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }

  double variance() const {
    return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
  }

  double stddev() const { return std::sqrt(variance()); }

  double std_error() const {
    return count > 0 ? stddev() / std::sqrt(static_cast<double>(count)) : 0.0;
  }
};

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

inline double proportion_std_error(double p_hat, long long trials) {
  if (trials <= 0) return 0.0;
  return std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(trials));
}

// Wilson score interval for a binomial proportion.
inline Interval wilson_interval(long long successes, long long trials,
                                double z) {
  if (trials <= 0) return {0.0, 1.0};
  const double nd = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / nd;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nd;
  const double center = (p + z2 / (2.0 * nd)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / nd + z2 / (4.0 * nd * nd)) / denom;
  return {center - half, center + half};
}

// Mean +/- z standard errors, for quantities reported with a normal CI.
inline Interval mean_interval(const RunningStat& s, double z) {
  const double half = z * s.std_error();
  return {s.mean - half, s.mean + half};
}

}  // namespace commalab
