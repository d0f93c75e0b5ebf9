#include "commalab/number_theory.hpp"

#include <limits>
#include <stdexcept>

#include "commalab/reports.hpp"

namespace commalab {

namespace {

// The numeric floor/reciprocal expansion loses roughly two to three digits
// per term; forty terms leave ample margin at 100-digit precision.
constexpr int kNumericDepthLimit = 40;

BigInt floor_to_int(const BigFloat& x) {
  return BigInt(boost::multiprecision::floor(x).convert_to<BigInt>());
}

}  // namespace

const BigFloat& euler_constant() {
  static const BigFloat e = boost::multiprecision::exp(BigFloat(1));
  return e;
}

std::vector<BigInt> e_continued_fraction(int k) {
  if (k < 1) throw std::invalid_argument("need at least one term");
  std::vector<BigInt> terms;
  terms.reserve(k);
  terms.push_back(2);
  for (int i = 1; i < k; ++i) {
    terms.push_back(i % 3 == 2 ? BigInt(2 * (i + 1) / 3) : BigInt(1));
  }
  return terms;
}

std::vector<BigInt> e_continued_fraction_numeric(int k) {
  if (k < 1) throw std::invalid_argument("need at least one term");
  if (k > kNumericDepthLimit) {
    throw std::invalid_argument(
        "numeric expansion beyond the supported precision depth");
  }
  std::vector<BigInt> terms;
  terms.reserve(k);
  BigFloat x = euler_constant();
  for (int i = 0; i < k; ++i) {
    const BigInt a = floor_to_int(x);
    terms.push_back(a);
    if (i + 1 < k) x = 1 / (x - BigFloat(a));
  }
  return terms;
}

std::vector<Convergent> e_convergents(int k) {
  const std::vector<BigInt> terms = e_continued_fraction(k);
  std::vector<Convergent> result;
  result.reserve(k);
  BigInt p_prev2 = 0, p_prev1 = 1;
  BigInt q_prev2 = 1, q_prev1 = 0;
  for (int i = 0; i < k; ++i) {
    Convergent c;
    c.p = terms[i] * p_prev1 + p_prev2;
    c.q = terms[i] * q_prev1 + q_prev2;
    c.index = i;
    p_prev2 = p_prev1;
    p_prev1 = c.p;
    q_prev2 = q_prev1;
    q_prev1 = c.q;
    result.push_back(std::move(c));
  }
  return result;
}

double epsilon_gap(long long mu, long long lambda) {
  if (mu < 1) throw std::invalid_argument("need mu >= 1");
  if (lambda < 1) throw std::invalid_argument("need lambda >= 1");
  const BigFloat mu_e = BigFloat(mu) * euler_constant();
  if (BigFloat(lambda) > mu_e) {
    throw std::invalid_argument("lambda exceeds mu e; the gap flips sign");
  }
  return ((mu_e - BigFloat(lambda)) / mu_e).convert_to<double>();
}

long long closest_lambda(long long mu) {
  if (mu < 1) throw std::invalid_argument("need mu >= 1");
  const BigFloat mu_e = BigFloat(mu) * euler_constant();
  const BigInt below = floor_to_int(mu_e);
  const BigFloat gap_below = mu_e - BigFloat(below);
  const BigFloat gap_above = BigFloat(below + 1) - mu_e;
  const BigInt pick = gap_below <= gap_above ? below : below + 1;
  return pick.convert_to<long long>();
}

void ScanReport::write_csv(std::ostream& os) const {
  os << "μ, lambda, gap, mu_pow_d_times_gap, is_exception\n";
  for (const ScanRow& row : rows) {
    os << row.mu << ", " << row.lambda << ", " << csv_double(row.gap) << ", "
       << csv_double(row.mu_pow_d_times_gap) << ", "
       << (row.is_exception ? 1 : 0) << "\n";
  }
}

ScanReport gap_bound_scan(long long mu_max, double d) {
  if (mu_max < 1) throw std::invalid_argument("need mu_max >= 1");
  if (!(d > 2.0)) throw std::invalid_argument("need exponent d > 2");

  ScanReport report;
  report.d = d;
  report.rows.reserve(mu_max);
  report.minimum = std::numeric_limits<double>::infinity();
  const BigFloat& e = euler_constant();
  const BigFloat d_big(d);
  for (long long mu = 1; mu <= mu_max; ++mu) {
    const BigFloat mu_big(mu);
    const BigInt lambda = floor_to_int(mu_big * e);
    const BigFloat gap = e - BigFloat(lambda) / mu_big;
    const BigFloat scaled = boost::multiprecision::pow(mu_big, d_big) * gap;

    ScanRow row;
    row.mu = mu;
    row.lambda = lambda.convert_to<long long>();
    row.gap = gap.convert_to<double>();
    row.mu_pow_d_times_gap = scaled.convert_to<double>();
    row.is_exception = scaled < 1;
    if (row.mu_pow_d_times_gap < report.minimum) {
      report.minimum = row.mu_pow_d_times_gap;
      report.minimum_mu = mu;
    }
    if (row.is_exception) report.exceptions.push_back(mu);
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace commalab
