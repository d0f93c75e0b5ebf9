#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <variant>

#include "commalab/config.hpp"

using namespace commalab;

namespace {

std::string error_of(const std::string& text) {
  try {
    (void)parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("malformed JSON reports the byte offset") {
  const std::string msg = error_of("{\"task\": run}");
  CHECK(msg.find("not well-formed JSON") != std::string::npos);
  CHECK(msg.find("byte") != std::string::npos);
}

TEST_CASE("a minimal run config fills documented defaults") {
  const ParsedConfig parsed =
      parse_config(R"({"n": 100, "mu": 10, "lambda": 30})");
  const auto cfg = std::get<ExperimentConfig>(parsed);
  CHECK(cfg.n == 100);
  CHECK(cfg.mu == 10);
  CHECK(cfg.lambda.resolve(10) == 30);
  CHECK(cfg.replicates == 1);
  CHECK_FALSE(cfg.budget.is_absolute);
  CHECK(cfg.budget.nlogn_multiple == 100.0);
  CHECK(cfg.trackers == std::set<std::string>{"g", "h", "n_events"});
  CHECK(cfg.epsilon == 0.2);
  CHECK(cfg.phase_c == 0.25);
  CHECK(cfg.common.seed == 1);
}

TEST_CASE("task defaults to run and dispatches by name") {
  CHECK(std::holds_alternative<ExperimentConfig>(
      parse_config(R"({"n": 10, "mu": 2, "lambda": 6})")));
  CHECK(std::holds_alternative<SweepConfig>(parse_config(
      R"({"task": "sweep", "n": 50, "mu_grid": [3], "ratio_grid": [1.2]})")));
  CHECK(std::holds_alternative<CheckerSuiteConfig>(
      parse_config(R"({"task": "check", "suite": ["lemma1"]})")));
  CHECK(std::holds_alternative<ApproxConfig>(
      parse_config(R"({"task": "approx"})")));
  CHECK(error_of(R"({"task": "dance"})").find("task") != std::string::npos);
}

TEST_CASE("unknown keys are rejected with their name") {
  const std::string msg =
      error_of(R"({"n": 10, "mu": 2, "lambda": 6, "bogus": 1})");
  CHECK(msg.find("unknown key") != std::string::npos);
  CHECK(msg.find("bogus") != std::string::npos);
}

TEST_CASE("lambda accepts an explicit value or a ratio rule") {
  const auto explicit_cfg = std::get<ExperimentConfig>(
      parse_config(R"({"n": 10, "mu": 4, "lambda": 12})"));
  CHECK(explicit_cfg.lambda.resolve(4) == 12);

  const auto ratio_cfg = std::get<ExperimentConfig>(parse_config(
      R"({"n": 10, "mu": 10, "lambda": {"ratio": 1.2, "round": "ceil"}})"));
  CHECK(ratio_cfg.lambda.resolve(10) == 33);

  const auto floor_cfg = std::get<ExperimentConfig>(parse_config(
      R"({"n": 10, "mu": 10, "lambda": {"ratio": 0.8, "round": "floor"}})"));
  CHECK(floor_cfg.lambda.resolve(10) == 21);

  const auto nearest_cfg = std::get<ExperimentConfig>(parse_config(
      R"({"n": 10, "mu": 10, "lambda": {"ratio": 1.0, "round": "nearest"}})"));
  CHECK(nearest_cfg.lambda.resolve(10) == 27);

  CHECK(error_of(R"({"n": 10, "mu": 2, "lambda": {"ratio": 1.2,
                     "round": "sideways"}})")
            .find("floor, ceil, nearest") != std::string::npos);
}

TEST_CASE("lambda below mu is rejected at parse time") {
  const std::string msg = error_of(R"({"n": 10, "mu": 8, "lambda": 6})");
  CHECK(msg.find("below mu") != std::string::npos);
}

TEST_CASE("budget accepts absolute generations or an n log n multiple") {
  const auto abs_cfg = std::get<ExperimentConfig>(
      parse_config(R"({"n": 10, "mu": 2, "lambda": 6, "budget": 500})"));
  CHECK(abs_cfg.budget.is_absolute);
  CHECK(abs_cfg.budget.resolve(10) == 500);

  const auto rel_cfg = std::get<ExperimentConfig>(parse_config(
      R"({"n": 150, "mu": 2, "lambda": 6, "budget": {"nlogn": 50}})"));
  CHECK_FALSE(rel_cfg.budget.is_absolute);
  CHECK(rel_cfg.budget.resolve(150) == 37580);
  CHECK(rel_cfg.budget.resolve(64) ==
        static_cast<long long>(std::llround(50.0 * 64.0 * std::log(64.0))));
}

TEST_CASE("tracker names are validated") {
  const std::string msg = error_of(
      R"({"n": 10, "mu": 2, "lambda": 6, "trackers": ["g", "bogus"]})");
  CHECK(msg.find("unknown tracker") != std::string::npos);
  CHECK(msg.find("bogus") != std::string::npos);

  const auto cfg = std::get<ExperimentConfig>(parse_config(
      R"({"n": 10, "mu": 2, "lambda": 6, "trackers": []})"));
  CHECK(cfg.trackers.empty());
}

TEST_CASE("epsilon and phase_c stay inside their open intervals") {
  CHECK(error_of(R"({"n": 10, "mu": 2, "lambda": 6, "epsilon": 1.5})")
            .find("epsilon") != std::string::npos);
  CHECK(error_of(R"({"n": 10, "mu": 2, "lambda": 6, "phase_c": 0.7})")
            .find("phase_c") != std::string::npos);
}

TEST_CASE("checker suite ids are validated and samples keys checked") {
  const auto cfg = std::get<CheckerSuiteConfig>(parse_config(
      R"({"task": "check", "suite": ["lemma1", "thm5"],
          "samples": {"lemma1": 500}})"));
  CHECK(cfg.suite.size() == 2);
  CHECK(cfg.tolerance_sigma == 3.0);
  CHECK(cfg.samples.at("lemma1") == 500);

  CHECK(error_of(R"({"task": "check", "suite": ["lemma99"]})")
            .find("unknown checker id") != std::string::npos);
  CHECK(error_of(R"({"task": "check", "suite": []})")
            .find("non-empty") != std::string::npos);
  CHECK(error_of(R"({"task": "check", "suite": ["lemma1"],
                     "samples": {"nope": 10}})")
            .find("unknown checker id") != std::string::npos);
}

TEST_CASE("checker vocabulary covers every dispatchable id") {
  const auto& vocab = checker_suite_vocabulary();
  CHECK(vocab.size() == 23);
  for (const char* id : {"lemma1", "thm6", "lemma29", "thm26", "thm15"}) {
    CHECK(std::find(vocab.begin(), vocab.end(), id) != vocab.end());
  }
}

TEST_CASE("approx config bounds its parameters") {
  const auto cfg = std::get<ApproxConfig>(parse_config(
      R"({"task": "approx", "mu_max": 500, "d": 2.5, "cf_terms": 25})"));
  CHECK(cfg.mu_max == 500);
  CHECK(cfg.d == 2.5);
  CHECK(cfg.cf_terms == 25);
  CHECK(error_of(R"({"task": "approx", "d": 1.5})").find("d") !=
        std::string::npos);
  CHECK(error_of(R"({"task": "approx", "cf_terms": 90})").find("cf_terms") !=
        std::string::npos);
}

TEST_CASE("surrogate study names are validated") {
  const auto cfg = std::get<SurrogateStudyConfig>(parse_config(
      R"({"task": "surrogate", "study": "variation", "mu": 100,
          "lambda": 272, "x0": 50, "delta": 30, "t": 5, "trials": 100})"));
  CHECK(cfg.study == "variation");
  CHECK(cfg.mu == 100);
  CHECK(error_of(R"({"task": "surrogate", "study": "alchemy"})")
            .find("unknown study") != std::string::npos);
}

TEST_CASE("config echo is flat, ordered, and omits the worker count") {
  const ParsedConfig parsed = parse_config(
      R"({"n": 100, "mu": 10, "lambda": 30, "jobs": 4, "seed": 9})");
  const Json echo = config_echo(parsed);
  CHECK(echo.at("task") == "run");
  CHECK(echo.at("n") == 100);
  CHECK(echo.at("lambda") == 30);
  CHECK(echo.at("seed") == 9);
  CHECK_FALSE(echo.contains("jobs"));
}
