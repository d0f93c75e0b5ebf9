#pragma once

#include <cmath>
#include <vector>

#include <boost/random/binomial_distribution.hpp>

#include "commalab/rng.hpp"

namespace commalab {

// One shared entry point for Binomial(m, p) draws.  Boost picks inversion for
// small means and the BTRD rejection sampler otherwise; both sample the exact
// distribution.
inline int sample_binomial(RngStream& rng, int m, double p) {
  if (m <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return m;
  boost::random::binomial_distribution<int, double> dist(m, p);
  return dist(rng);
}

// Cached inversion sampler for a fixed Binomial(m, p) with small mean, built
// for the mutation hot path (m = n, p = 1/n, mean 1).  The CDF table stops
// once the remaining tail mass drops below 1e-18, so a 53-bit uniform can
// never land past the stored prefix in practice; if it does we return the top
// stored count.
class SmallMeanBinomial {
 public:
  SmallMeanBinomial() = default;

  SmallMeanBinomial(int m, double p) {
    if (m <= 0 || p <= 0.0) {
      cdf_ = {1.0};
      return;
    }
    if (p >= 1.0) {
      cdf_.assign(m + 1, 0.0);
      cdf_[m] = 1.0;
      return;
    }
    double pmf = std::exp(m * std::log1p(-p));
    double cdf = pmf;
    cdf_.push_back(cdf);
    const double odds = p / (1.0 - p);
    for (int k = 0; k < m && 1.0 - cdf > 1e-18; ++k) {
      pmf *= odds * static_cast<double>(m - k) / (k + 1);
      cdf += pmf;
      cdf_.push_back(cdf);
    }
  }

  int draw(RngStream& rng) const {
    const double u = rng.uniform01();
    const int top = static_cast<int>(cdf_.size()) - 1;
    for (int k = 0; k < top; ++k) {
      if (u < cdf_[k]) return k;
    }
    return top;
  }

 private:
  std::vector<double> cdf_;
};

}  // namespace commalab
