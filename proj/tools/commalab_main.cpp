#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "commalab/config.hpp"
#include "commalab/orchestrator.hpp"
#include "commalab/version.hpp"

namespace {

using commalab::CommonOptions;
using commalab::ConfigError;
using commalab::OutputFormat;
using commalab::ParsedConfig;

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  std::string format;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int jobs = -1;
};

void add_common_options(CLI::App* sub, CliOptions& opts,
                        bool config_required) {
  auto* config =
      sub->add_option("--config", opts.config_path, "JSON config file");
  if (config_required) config->required();
  sub->add_option("--seed", opts.seed, "override the config seed")
      ->each([&opts](const std::string&) { opts.seed_set = true; });
  sub->add_option("--out", opts.out_dir, "artifact directory");
  sub->add_option("--jobs", opts.jobs, "worker threads (0 = all cores)")
      ->check(CLI::Range(0, 4096));
  sub->add_option("--format", opts.format, "tabular artifact format")
      ->check(CLI::IsMember({"csv", "json"}));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string task_name(const ParsedConfig& config) {
  if (std::holds_alternative<commalab::ExperimentConfig>(config)) return "run";
  if (std::holds_alternative<commalab::SweepConfig>(config)) return "sweep";
  if (std::holds_alternative<commalab::CheckerSuiteConfig>(config)) {
    return "check";
  }
  if (std::holds_alternative<commalab::ApproxConfig>(config)) return "approx";
  return "surrogate";
}

CommonOptions& common_of(ParsedConfig& config) {
  return std::visit(
      [](auto& cfg) -> CommonOptions& { return cfg.common; }, config);
}

int run_task(const std::string& expected_task, const CliOptions& opts) {
  ParsedConfig config;
  if (opts.config_path.empty()) {
    config = commalab::ApproxConfig{};  // only approx runs without a config
  } else {
    config = commalab::parse_config(read_file(opts.config_path));
  }
  const std::string task = task_name(config);
  if (task != expected_task) {
    throw ConfigError("config task '" + task +
                      "' does not match subcommand '" + expected_task + "'");
  }
  CommonOptions& common = common_of(config);
  if (opts.seed_set) common.seed = opts.seed;
  if (opts.jobs >= 0) common.jobs = opts.jobs;
  if (!opts.format.empty()) {
    common.format =
        opts.format == "csv" ? OutputFormat::csv : OutputFormat::json;
  }
  const std::string out_dir = commalab::resolve_out_dir(common, opts.out_dir);
  const commalab::TaskOutcome outcome = commalab::execute(config, out_dir);
  for (const std::string& line : outcome.log_lines) {
    std::cout << line << "\n";
  }
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"comma-selection population dynamics workbench"};
  app.set_version_flag("--version", std::string(commalab::kProjectVersion));
  app.require_subcommand(1);

  CliOptions run_opts;
  CliOptions sweep_opts;
  CliOptions check_opts;
  CliOptions approx_opts;
  CliOptions surrogate_opts;

  CLI::App* run_cmd =
      app.add_subcommand("run", "live runs with potential telemetry");
  add_common_options(run_cmd, run_opts, true);
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "success surface over a mu/ratio grid");
  add_common_options(sweep_cmd, sweep_opts, true);
  CLI::App* check_cmd =
      app.add_subcommand("check", "bound and drift checker suite");
  add_common_options(check_cmd, check_opts, true);
  CLI::App* approx_cmd = app.add_subcommand(
      "approx", "continued-fraction and gap-scan diagnostics");
  add_common_options(approx_cmd, approx_opts, false);
  CLI::App* surrogate_cmd =
      app.add_subcommand("surrogate", "reduced-chain studies");
  add_common_options(surrogate_cmd, surrogate_opts, true);

  int bench_n = 150;
  int bench_mu = 25;
  int bench_lambda = 54;
  double bench_seconds = 2.0;
  CLI::App* bench_cmd =
      app.add_subcommand("bench", "offspring throughput microbenchmark");
  bench_cmd->add_option("--n", bench_n, "bit-string length")
      ->check(CLI::Range(1, 100000000));
  bench_cmd->add_option("--mu", bench_mu, "parent population size")
      ->check(CLI::Range(1, 100000000));
  bench_cmd->add_option("--lambda", bench_lambda, "offspring per generation")
      ->check(CLI::Range(1, 100000000));
  bench_cmd->add_option("--seconds", bench_seconds, "timed window length")
      ->check(CLI::Range(0.01, 600.0));

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return run_task("run", run_opts);
    if (sweep_cmd->parsed()) return run_task("sweep", sweep_opts);
    if (check_cmd->parsed()) return run_task("check", check_opts);
    if (approx_cmd->parsed()) return run_task("approx", approx_opts);
    if (surrogate_cmd->parsed()) return run_task("surrogate", surrogate_opts);
    if (bench_cmd->parsed()) {
      const double rate = commalab::measure_offspring_throughput(
          bench_n, bench_mu, bench_lambda, bench_seconds);
      std::cout << "offspring_per_second "
                << static_cast<long long>(rate) << "\n";
      return 0;
    }
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 0;
}
