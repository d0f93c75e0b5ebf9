#pragma once

#include <string>
#include <vector>

#include "commalab/config.hpp"
#include "commalab/reports.hpp"
#include "commalab/rng.hpp"

namespace commalab {

// Environment variable consulted for the artifact directory when neither the
// command line nor the config names one.
inline constexpr const char* kOutDirEnvVar = "COMMALAB_OUT";

// An explicit CLI path wins, then the config's "out" field, then the
// environment variable, then "out" in the working directory.
std::string resolve_out_dir(const CommonOptions& common,
                            const std::string& cli_out);

struct CheckerOutcome {
  std::string id;
  Json report = Json::object();
  bool pass = false;
  bool hypothesis_ok = true;
};

struct TaskOutcome {
  int exit_code = 0;  // 0 unless a checker inside its hypothesis failed
  std::vector<std::string> artifacts;
  std::vector<std::string> log_lines;
};

// Runs one parsed config end to end and writes its artifacts under out_dir.
// Artifacts contain no timestamps and every random stream is derived from the
// config seed by index, so reruns are byte-identical regardless of --jobs.
TaskOutcome execute(const ParsedConfig& config, const std::string& out_dir);

// One checker by suite id, with that checker's primary sample knob replaced
// when samples_override is positive.  tolerance_sigma re-derives the verdict
// of the simple one-sided checkers from their reported standard error;
// composite and exact checkers keep their built-in comparison.
CheckerOutcome run_checker(const std::string& id, long long samples_override,
                           double tolerance_sigma, RngStream rng);

// Sustained offspring creation-plus-evaluation rate of a live engine over
// roughly the given wall-clock time, in offspring per second.
double measure_offspring_throughput(int n, int mu, int lambda, double seconds);

}  // namespace commalab
