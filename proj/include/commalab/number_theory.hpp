#pragma once

#include <ostream>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace commalab {

using BigInt = boost::multiprecision::cpp_int;
using BigFloat = boost::multiprecision::cpp_bin_float_100;

// e at the shared working precision (about 100 decimal digits).
const BigFloat& euler_constant();

// First k terms of the regular continued fraction of e,
// [2; 1, 2, 1, 1, 4, 1, 1, 6, ...], from the closed-form pattern.
std::vector<BigInt> e_continued_fraction(int k);

// The same expansion recovered by numeric floor/reciprocal steps; guarded to
// the depth the working precision supports.  Cross-validates the pattern.
std::vector<BigInt> e_continued_fraction_numeric(int k);

struct Convergent {
  BigInt p;
  BigInt q;
  int index = 0;
};

std::vector<Convergent> e_convergents(int k);

// (mu e - lambda)/(mu e); rejects lambda above mu e, where the gap flips sign.
double epsilon_gap(long long mu, long long lambda);

// The lambda in {floor(mu e), ceil(mu e)} minimizing |e - lambda/mu|.
long long closest_lambda(long long mu);

struct ScanRow {
  long long mu = 0;
  long long lambda = 0;
  double gap = 0.0;
  double mu_pow_d_times_gap = 0.0;
  bool is_exception = false;
};

struct ScanReport {
  double d = 0.0;
  std::vector<ScanRow> rows;
  double minimum = 0.0;
  long long minimum_mu = 0;
  std::vector<long long> exceptions;

  void write_csv(std::ostream& os) const;
};

// For every mu up to mu_max, takes the largest admissible lambda = floor(mu e)
// and reports mu^d * |e - lambda/mu|, flagging values below 1 as exceptions
// rather than asserting there are none.
ScanReport gap_bound_scan(long long mu_max, double d);

}  // namespace commalab
