// Release acceptance gate: one pass/fail line per criterion, pinned
// tolerances, fixed seeds.  Exits with the number of failed criteria.

#include <sys/wait.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "commalab/config.hpp"
#include "commalab/core_ea.hpp"
#include "commalab/level_dynamics.hpp"
#include "commalab/number_theory.hpp"
#include "commalab/orchestrator.hpp"
#include "commalab/potential.hpp"
#include "commalab/reports.hpp"
#include "commalab/surrogate.hpp"
#include "commalab/transition_math.hpp"

namespace fs = std::filesystem;
using namespace commalab;

namespace {

constexpr std::uint64_t kSeed = 2024;

struct CriterionResult {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) { return csv_double(v); }

// ---------------------------------------------------------------------------
// Independent enumeration oracle over all 2^n flip masks (n <= 12).

std::vector<double> oracle_pmf(int n, int d) {
  std::vector<long double> acc(2 * n + 1, 0.0L);
  const long double p = 1.0L / n;
  const long double q = 1.0L - p;
  const std::uint64_t zero_mask = (std::uint64_t{1} << d) - 1;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    const int bits = std::popcount(mask);
    const int flipped_zeros = std::popcount(mask & zero_mask);
    long double term = 1.0L;
    for (int i = 0; i < bits; ++i) term *= p;
    for (int i = 0; i < n - bits; ++i) term *= q;
    acc[2 * flipped_zeros - bits + n] += term;
  }
  std::vector<double> out(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) {
    out[i] = static_cast<double>(acc[i]);
  }
  return out;
}

CriterionResult criterion_pmf_exactness() {
  const double tolerance = 1e-12;
  double worst = 0.0;
  long long pmfs = 0;
  for (int n = 1; n <= 12; ++n) {
    for (int d = 0; d <= n; ++d) {
      const std::vector<double> oracle = oracle_pmf(n, d);
      const DeltaPmf pmf = delta_pmf_exact({n, d});
      ++pmfs;
      for (int delta = -n; delta <= n; ++delta) {
        const double got =
            (delta >= pmf.min_delta() && delta <= pmf.max_delta())
                ? pmf.at(delta)
                : 0.0;
        worst = std::max(worst, std::fabs(got - oracle[delta + n]));
      }
      const double dz = delta_zero_exact({n, d});
      if (dz != pmf.at(0)) {
        return {false, "closed-form zero-move probability deviates from the "
                       "pmf at n=" + std::to_string(n) +
                       " d=" + std::to_string(d)};
      }
      worst = std::max(worst, std::fabs(dz - oracle[n]));
    }
  }
  return {worst <= tolerance,
          "worst |pmf - enumeration| = " + fmt(worst) + " over " +
              std::to_string(pmfs) + " distributions (tolerance 1e-12)"};
}

CriterionResult criterion_gain_bound() {
  double worst_margin = 1.0;
  long long points = 0;
  for (int n = 1; n <= 12; ++n) {
    for (int d = 0; d <= n; ++d) {
      const std::vector<double> oracle = oracle_pmf(n, d);
      for (int k = 1; k <= n; ++k) {
        const double exact = oracle[k + n];
        const double bound = delta_up_bound({n, d}, k);
        worst_margin = std::min(worst_margin, bound - exact);
        ++points;
      }
    }
  }
  return {worst_margin >= -1e-15,
          "min(bound - exact) = " + fmt(worst_margin) + " over " +
              std::to_string(points) + " gain probabilities"};
}

CriterionResult criterion_domination() {
  // n = 1 sits outside the ordering fact: the flip probability 1/n is then 1,
  // mutation is the deterministic complement, and the better parent provably
  // yields the worse offspring.  The check demonstrates that reversal rather
  // than scanning past it silently.
  if (domination_check(1, 0, 1)) {
    return {false, "single-bit instance unexpectedly reports domination"};
  }
  long long pairs = 0;
  for (int n = 2; n <= 12; ++n) {
    // Offspring-fitness CDFs from the enumeration oracle, per parent level.
    std::vector<std::vector<double>> cdf(n + 1);
    for (int f = 0; f <= n; ++f) {
      const std::vector<double> pmf = oracle_pmf(n, n - f);
      cdf[f].assign(n + 1, 0.0);
      double run = 0.0;
      for (int t = 0; t <= n; ++t) {
        const int delta = t - f;
        run += (delta >= -n && delta <= n) ? pmf[delta + n] : 0.0;
        cdf[f][t] = run;
      }
    }
    for (int f1 = 0; f1 <= n; ++f1) {
      for (int f2 = f1; f2 <= n; ++f2) {
        ++pairs;
        if (!domination_check(n, f1, f2)) {
          return {false, "library check rejects n=" + std::to_string(n) +
                             " pair (" + std::to_string(f1) + ", " +
                             std::to_string(f2) + ")"};
        }
        for (int t = 0; t <= n; ++t) {
          if (cdf[f2][t] > cdf[f1][t] + 1e-12) {
            return {false, "oracle CDFs cross at n=" + std::to_string(n) +
                               " f1=" + std::to_string(f1) +
                               " f2=" + std::to_string(f2) +
                               " t=" + std::to_string(t)};
          }
        }
      }
    }
  }
  return {true, std::to_string(pairs) + " ordered fitness pairs dominated for "
                "n in [2, 12]; the n=1 reversal (flip probability 1) is "
                "confirmed as the domain boundary"};
}

CriterionResult criterion_mean_exceedance() {
  long long points = 0;
  double min_prob = 1.0;
  for (int m = 2; m <= 60; ++m) {
    for (int pc = 1; pc <= 100; ++pc) {
      if (pc * m <= 100) continue;  // requires p > 1/m exactly
      const double p = pc / 100.0;
      const MeanExceedance lib = check_mean_exceedance({m, p});

      // Independent tail: long double pmf recurrence summed from ceil(mp),
      // with the integer-mean case resolved in exact arithmetic.
      const long long mk = static_cast<long long>(m) * pc;
      const int k0 = static_cast<int>(mk % 100 == 0 ? mk / 100 : mk / 100 + 1);
      long double pmf = 1.0L;
      for (int i = 0; i < m; ++i) pmf *= (1.0L - p);
      long double tail = (k0 == 0) ? pmf : 0.0L;
      for (int k = 0; k < m; ++k) {
        pmf *= static_cast<long double>(m - k) / (k + 1) * p / (1.0L - p);
        if (k + 1 >= k0) tail += pmf;
      }
      const double oracle = static_cast<double>(tail);

      ++points;
      min_prob = std::min(min_prob, lib.probability);
      if (std::fabs(lib.probability - oracle) > 1e-10) {
        return {false, "tail mismatch at m=" + std::to_string(m) +
                           " p=" + fmt(p) + ": " + fmt(lib.probability) +
                           " vs oracle " + fmt(oracle)};
      }
      if (!(lib.probability > 0.25) || !lib.exceeds_quarter) {
        return {false, "quarter bound fails at m=" + std::to_string(m) +
                           " p=" + fmt(p) + ": " + fmt(lib.probability)};
      }
    }
  }
  return {true, "min Pr(X >= mean) = " + fmt(min_prob) + " > 1/4 across " +
                    std::to_string(points) + " grid points"};
}

CriterionResult criterion_smin_scan() {
  const SminScanResult scan = scan_log1p_smin(200);
  std::ostringstream report;
  report << "mean, p, m, holds\n";
  for (const SminScanPoint& f : scan.failures) {
    report << f.mp << ", " << fmt(f.p) << ", " << f.m << ", 0\n";
  }
  report << "# points_checked = " << scan.points_checked << "\n";
  report << "# empirical_smin = " << scan.empirical_smin << "\n";
  write_text_file("acceptance_artifacts/smin_report.csv", report.str());

  bool consistent = scan.empirical_smin >= 1;
  for (const SminScanPoint& f : scan.failures) {
    if (f.mp >= scan.empirical_smin) consistent = false;
  }
  return {consistent,
          "empirical threshold " + std::to_string(scan.empirical_smin) +
              ", " + std::to_string(scan.failures.size()) + " failing points, " +
              std::to_string(scan.points_checked) +
              " checked; report in acceptance_artifacts/smin_report.csv"};
}

CriterionResult criterion_variation_bound() {
  struct Set {
    int mu, lambda, x0, t;
    double delta;
  };
  const std::vector<Set> sets = {{100, 272, 50, 5, 30.0},
                                 {50, 136, 25, 4, 15.0},
                                 {200, 544, 100, 8, 50.0},
                                 {100, 272, 60, 10, 40.0},
                                 {30, 81, 15, 3, 10.0}};
  RngStream rng(kSeed);
  std::string detail;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const Set& s = sets[i];
    const BoundReport r = check_variation_bound(
        {s.mu, s.lambda, {}}, s.x0, s.delta, s.t, 10000, rng.child(i));
    if (i == 0) {
      const double reference = 5.0 * 50.0 / 900.0;
      if (std::fabs(r.bound - reference) > 1e-12) {
        return {false, "reference bound drifted: " + fmt(r.bound)};
      }
      detail = "reference set: empirical " + fmt(r.empirical) + " vs bound " +
               fmt(r.bound);
    }
    if (!r.pass) {
      return {false, "set " + std::to_string(i) + " exceeds its bound: " +
                         fmt(r.empirical) + " vs " + fmt(r.bound)};
    }
  }
  return {true, detail + "; 5 parameter sets x 10000 trajectories"};
}

CriterionResult criterion_hitting_time() {
  struct Set {
    int mu, lambda, x0, xprime;
    double influx;
  };
  // Each set satisfies the lower threshold on the target and half capacity.
  const std::vector<Set> sets = {{2000, 5437, 0, 100, 50.0},
                                 {2000, 5437, 0, 130, 10.0},
                                 {3000, 8155, 10, 120, 25.0}};
  RngStream rng(kSeed + 1);
  std::string detail;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const Set& s = sets[i];
    const BoundReport r = check_hitting_time({s.mu, s.lambda, {s.influx}},
                                             s.x0, s.xprime, 1000,
                                             rng.child(i));
    if (!r.hypothesis_ok) {
      return {false, "set " + std::to_string(i) + " left the hypothesis"};
    }
    if (!r.pass) {
      return {false, "set " + std::to_string(i) + " mean hit " +
                         fmt(r.empirical) + " above bound " + fmt(r.bound)};
    }
    if (!detail.empty()) detail += ", ";
    detail += fmt(r.empirical) + " <= " + fmt(r.bound);
  }
  return {true, "mean hitting times vs bounds: " + detail +
                    " (3 in-hypothesis sets x 1000 trials)"};
}

CriterionResult criterion_potential_drift() {
  const DriftReport live = check_population_g_drift({100, 25, 54}, 0.2, 20000,
                                                    1, RngStream(kSeed + 2));
  if (!live.hypothesis_ok) return {false, "live-run hypothesis violated"};
  if (!live.pass) {
    return {false, "live drift " + fmt(live.estimate) + " above 2*lambda = " +
                       fmt(live.bound) + " at 95%"};
  }
  const DriftReport at_top = check_offspring_g_bound(3000, 0.2, 2999, 20000,
                                                     RngStream(kSeed + 3));
  if (!at_top.pass || !at_top.hypothesis_ok) {
    return {false, "per-parent bound fails at the threshold level: " +
                       fmt(at_top.estimate) + " vs " + fmt(at_top.bound)};
  }
  const DriftReport below = check_offspring_g_bound(3000, 0.2, 2998, 20000,
                                                    RngStream(kSeed + 4));
  if (!below.pass || !below.hypothesis_ok) {
    return {false, "per-parent constant bound fails below the threshold: " +
                       fmt(below.estimate) + " vs " + fmt(below.bound)};
  }
  return {true, "live drift " + fmt(live.estimate) + " <= " + fmt(live.bound) +
                    " (95%); per-parent " + fmt(at_top.estimate) + " <= " +
                    fmt(at_top.bound) + " and " + fmt(below.estimate) +
                    " <= 2 (3 SE)"};
}

CriterionResult criterion_initial_shortfall() {
  const BoundReport r = check_initial_z(20, 10, 0.5, 1000, RngStream(kSeed + 5));
  return {r.pass, "mean initial shortfall " + fmt(r.empirical) +
                      " vs half-capacity bound " + fmt(r.bound) +
                      " over 1000 seeds"};
}

CriterionResult criterion_continued_fraction() {
  const std::vector<long long> expected = {2, 1, 2, 1, 1,  4, 1, 1, 6, 1,
                                           1, 8, 1, 1, 10, 1, 1, 12, 1, 1};
  const std::vector<BigInt> pattern = e_continued_fraction(20);
  const std::vector<BigInt> numeric = e_continued_fraction_numeric(20);
  for (int i = 0; i < 20; ++i) {
    if (pattern[i] != BigInt(expected[i]) || numeric[i] != pattern[i]) {
      return {false, "expansion deviates at term " + std::to_string(i)};
    }
  }
  const BigFloat& e_value = euler_constant();
  for (const Convergent& c : e_convergents(20)) {
    const BigFloat q(c.q);
    if (boost::multiprecision::abs(e_value - BigFloat(c.p) / q) >=
        1 / (q * q)) {
      return {false, "convergent " + c.p.str() + "/" + c.q.str() +
                         " misses the quadratic rate"};
    }
  }
  const ScanReport scan = gap_bound_scan(10000, 2.25);
  const std::vector<long long> known_exceptions = {1, 3, 7, 1001};
  if (scan.exceptions != known_exceptions) {
    std::string got;
    for (long long mu : scan.exceptions) got += " " + std::to_string(mu);
    return {false, "exception list changed:" + got};
  }
  if (std::fabs(scan.minimum - 0.31849929695821383) > 1e-12 ||
      scan.minimum_mu != 7) {
    return {false, "scan minimum drifted: " + fmt(scan.minimum) + " at mu=" +
                       std::to_string(scan.minimum_mu)};
  }
  return {true, "20 terms match; all convergents beat 1/q^2; scan to 10000 "
                "flags exceptions {1, 3, 7, 1001} with minimum " +
                    fmt(scan.minimum) + " at mu=7"};
}

CriterionResult criterion_phase_transition() {
  const long long budget = BudgetSpec{false, 0, 50.0}.resolve(150);
  RngStream rng(kSeed + 6);
  const SweepCell fast = run_sweep_cell(150, 10, 33, budget, 30, rng.child(0));
  const SweepCell slow = run_sweep_cell(150, 10, 21, budget, 30, rng.child(1));
  const double fast_rate = fast.successes / 30.0;
  const double slow_rate = slow.successes / 30.0;
  // Thresholds frozen after a 30-seed pilot: 30/30 above, 0/30 below.
  const bool pass = fast_rate >= 0.9 && slow_rate <= 0.1;
  return {pass, "success " + fmt(fast_rate) + " at lambda=33 (need >= 0.9), " +
                    fmt(slow_rate) + " at lambda=21 (need <= 0.1), budget " +
                    std::to_string(budget) + " generations"};
}

CriterionResult criterion_large_mu_contrast() {
  RngStream rng(kSeed + 7);
  const long long big_budget = BudgetSpec{false, 0, 100.0}.resolve(64);
  const SweepCell big = run_sweep_cell(64, 256, 696, big_budget, 20,
                                       rng.child(0));
  const double big_rate = big.successes / 20.0;
  const long long small_budget = BudgetSpec{false, 0, 100.0}.resolve(150);
  const SweepCell small = run_sweep_cell(150, 10, 27, small_budget, 20,
                                         rng.child(1));
  const double small_rate = small.successes / 20.0;
  const bool big_ok = big_rate >= 0.9 && !big.in_hypothesis;
  const bool contrast_ok = small_rate <= 0.5;
  return {big_ok && contrast_ok,
          "large-population cell " + fmt(big_rate) +
              " success (need >= 0.9, correctly flagged out of the full size "
              "hypothesis); small cell at lambda = floor(e mu) reaches " +
              fmt(small_rate) + " under the same normalized budget (need <= "
              "0.5; the slowdown emerges only at larger n)"};
}

CriterionResult criterion_level_gain() {
  const PhaseReport r = run_phase2_experiment({60, 4307, 11708}, 59, 30,
                                              RngStream(kSeed + 8));
  const bool pass = r.pass && r.loss_pass && r.hypothesis_ok;
  return {pass, "mean generations to gain " + fmt(r.mean_generations) +
                    " vs bound " + fmt(r.bound) + "; loss rate " +
                    fmt(r.loss_rate) + " vs " + fmt(r.loss_bound) +
                    " (30 replicates, full-size population)"};
}

// ---------------------------------------------------------------------------
// Determinism through the real binary.

std::string shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  if (status < 0 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw std::runtime_error("command failed: " + cmd);
  }
  return cmd;
}

std::map<std::string, std::string> snapshot_dir(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    out[fs::relative(entry.path(), root).string()] = buf.str();
  }
  return out;
}

CriterionResult criterion_determinism() {
  const fs::path base = "acceptance_artifacts/determinism";
  fs::remove_all(base);
  fs::create_directories(base);
  const fs::path config = base / "config.json";
  {
    std::ofstream out(config);
    out << R"({"n": 60, "mu": 8, "lambda": 22, "replicates": 2,
               "budget": {"nlogn": 5},
               "trackers": ["g", "h", "levels", "phase_process", "n_events"],
               "seed": 7, "format": "csv"})";
  }
  const std::string cli = std::string("'") + COMMALAB_CLI_PATH + "'";
  shell(cli + " run --config " + config.string() + " --out " +
        (base / "a").string() + " --jobs 1 > /dev/null 2>&1");
  shell(cli + " run --config " + config.string() + " --out " +
        (base / "b").string() + " --jobs 4 > /dev/null 2>&1");
  const auto a = snapshot_dir(base / "a");
  const auto b = snapshot_dir(base / "b");
  if (a.empty() || a.size() != b.size()) {
    return {false, "artifact sets differ in size"};
  }
  for (const auto& [name, bytes] : a) {
    auto it = b.find(name);
    if (it == b.end()) return {false, "missing artifact " + name};
    if (it->second != bytes) return {false, "bytes differ in " + name};
  }
  return {true, std::to_string(a.size()) +
                    " artifacts byte-identical across repeated runs and "
                    "worker counts"};
}

CriterionResult criterion_throughput() {
  const double rate = measure_offspring_throughput(150, 25, 54, 1.5);
  const double floor = 1e7;
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(0);
  os << rate;
  return {rate >= floor, os.str() + " offspring evaluations/s at n=150 "
                                    "(floor 1e7)"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<CriterionResult()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "transition pmf matches full enumeration (n <= 12)",
       criterion_pmf_exactness},
      {2, "gain bound dominates exact gain probabilities",
       criterion_gain_bound},
      {3, "offspring distributions are stochastically ordered",
       criterion_domination},
      {4, "binomial mean exceedance stays above 1/4 on the grid",
       criterion_mean_exceedance},
      {5, "log1p lower-bound threshold located by grid scan",
       criterion_smin_scan},
      {6, "chain variation probability within t*x0/delta^2",
       criterion_variation_bound},
      {7, "influx chain hitting times within the additive bound",
       criterion_hitting_time},
      {8, "potential drift bounds hold live and per parent",
       criterion_potential_drift},
      {9, "initial shortfall keeps half the capacity",
       criterion_initial_shortfall},
      {10, "continued fraction of e and the gap scan",
       criterion_continued_fraction},
      {11, "phase transition across the lambda = e*mu threshold",
       criterion_phase_transition},
      {12, "large-population threshold cell with small-cell contrast",
       criterion_large_mu_contrast},
      {13, "top-level gain time and loss rate at full population size",
       criterion_level_gain},
      {14, "byte-identical artifacts for identical config and seed",
       criterion_determinism},
      {15, "offspring evaluation throughput floor",
       criterion_throughput},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    CriterionResult result;
    try {
      result = c.run();
    } catch (const std::exception& e) {
      result = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::ostringstream line;
    line << (result.pass ? "[PASS] " : "[FAIL] ");
    line.width(2);
    line.fill('0');
    line << c.id;
    line << " " << c.title;
    if (!result.detail.empty()) line << "  --  " << result.detail;
    line.setf(std::ios::fixed);
    line.precision(1);
    line << "  [" << seconds << " s]";
    std::cout << line.str() << "\n" << std::flush;
    if (!result.pass) ++failures;
  }
  std::cout << "acceptance: " << (criteria.size() - failures) << " of "
            << criteria.size() << " criteria passed";
  if (failures > 0) std::cout << ", " << failures << " failed";
  std::cout << "\n";
  return failures;
}
