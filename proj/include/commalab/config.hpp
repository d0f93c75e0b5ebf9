#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "commalab/reports.hpp"

namespace commalab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class RoundMode { down, up, nearest };

// Lambda given either outright or as ratio * e * mu with an explicit rounding
// mode; the regimes hinge on which side of e*mu lambda falls, so rounding is
// never implicit.
struct LambdaRule {
  bool is_explicit = true;
  int explicit_value = 0;
  double ratio = 1.0;
  RoundMode round = RoundMode::up;

  int resolve(int mu) const;
  std::string describe() const;
};

// Generation budget, absolute or as a multiple of n ln n.
struct BudgetSpec {
  bool is_absolute = false;
  long long absolute = 0;
  double nlogn_multiple = 100.0;

  long long resolve(int n) const;
  std::string describe() const;
};

enum class OutputFormat { csv, json };

struct CommonOptions {
  std::uint64_t seed = 1;
  std::string out_dir;
  std::optional<OutputFormat> format;
  int jobs = 0;
};

struct ExperimentConfig {
  int n = 0;
  int mu = 0;
  LambdaRule lambda;
  int replicates = 1;
  BudgetSpec budget;
  std::set<std::string> trackers{"g", "h", "n_events"};
  double epsilon = 0.2;
  double phase_c = 0.25;
  CommonOptions common;
};

struct SweepConfig {
  int n = 0;
  std::vector<int> mu_grid;
  std::vector<double> ratio_grid;
  BudgetSpec budget;
  int replicates = 1;
  CommonOptions common;
};

struct CheckerSuiteConfig {
  std::vector<std::string> suite;
  double tolerance_sigma = 3.0;
  std::map<std::string, long long> samples;
  CommonOptions common;
};

struct ApproxConfig {
  long long mu_max = 10000;
  double d = 2.25;
  int cf_terms = 20;
  CommonOptions common;
};

struct SurrogateStudyConfig {
  std::string study;
  int n = 0;
  int mu = 0;
  int lambda = 0;
  int x0 = 0;
  int xprime = 0;
  int t = 0;
  int s = 0;
  double delta = 0.0;
  double delta_min = 0.0;
  double c = 0.25;
  long long trials = 0;
  long long samples = 0;
  long long steps = 0;
  std::string pn_mode = "analytic";
  CommonOptions common;
};

using ParsedConfig = std::variant<ExperimentConfig, SweepConfig,
                                  CheckerSuiteConfig, ApproxConfig,
                                  SurrogateStudyConfig>;

// Parses and fully validates a JSON config document.  The optional top-level
// "task" key selects the config kind (default "run"); unknown keys, unknown
// identifiers, and range violations raise ConfigError with the field path.
ParsedConfig parse_config(const std::string& text);

// Identifiers accepted in a checker-suite "suite" list.
const std::vector<std::string>& checker_suite_vocabulary();

// Tracker names accepted in an experiment "trackers" list.
const std::vector<std::string>& tracker_vocabulary();

// Study names accepted in a surrogate "study" field.
const std::vector<std::string>& surrogate_study_vocabulary();

// Flat key/value echo of a config, embedded in artifact headers so outputs
// are self-describing and reproducible.
Json config_echo(const ParsedConfig& config);

}  // namespace commalab
