#include "commalab/config.hpp"

#include <algorithm>
#include <cmath>

namespace commalab {

namespace {

constexpr double kEulerE = 2.718281828459045235;

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw ConfigError("config is not well-formed JSON (byte " +
                      std::to_string(err.byte) + "): " + err.what());
  }
}

// Wraps one JSON object: typed, range-checked field access with field-path
// error messages, plus an unknown-key sweep once every field was claimed.
class ConfigReader {
 public:
  ConfigReader(const Json& node, std::string path)
      : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) {
      throw ConfigError(path_ + ": expected an object");
    }
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  const Json& claim(const std::string& key) {
    seen_.insert(key);
    return node_.at(key);
  }

  long long require_int(const std::string& key, long long lo, long long hi) {
    if (!has(key)) throw ConfigError(field(key) + ": required field missing");
    return read_int(key, lo, hi);
  }

  long long optional_int(const std::string& key, long long fallback,
                         long long lo, long long hi) {
    if (!has(key)) return fallback;
    return read_int(key, lo, hi);
  }

  double require_real(const std::string& key, double lo, double hi) {
    if (!has(key)) throw ConfigError(field(key) + ": required field missing");
    return read_real(key, lo, hi);
  }

  double optional_real(const std::string& key, double fallback, double lo,
                       double hi) {
    if (!has(key)) return fallback;
    return read_real(key, lo, hi);
  }

  std::string require_string(const std::string& key) {
    if (!has(key)) throw ConfigError(field(key) + ": required field missing");
    return read_string(key);
  }

  std::string optional_string(const std::string& key,
                              const std::string& fallback) {
    if (!has(key)) return fallback;
    return read_string(key);
  }

  std::uint64_t optional_u64(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const Json& v = claim(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
      throw ConfigError(field(key) + ": expected an integer");
    }
    if (v.is_number_integer() && v.get<long long>() < 0) {
      throw ConfigError(field(key) + ": must be non-negative");
    }
    return v.get<std::uint64_t>();
  }

  const Json* optional_node(const std::string& key) {
    if (!has(key)) return nullptr;
    return &claim(key);
  }

  std::string field(const std::string& key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& item : node_.items()) {
      if (!seen_.count(item.key())) {
        throw ConfigError(path_ + ": unknown key '" + item.key() + "'");
      }
    }
  }

 private:
  long long read_int(const std::string& key, long long lo, long long hi) {
    const Json& v = claim(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
      throw ConfigError(field(key) + ": expected an integer");
    }
    const long long value = v.get<long long>();
    if (value < lo || value > hi) {
      throw ConfigError(field(key) + ": must lie in [" + std::to_string(lo) +
                        ", " + std::to_string(hi) + "]");
    }
    return value;
  }

  double read_real(const std::string& key, double lo, double hi) {
    const Json& v = claim(key);
    if (!v.is_number()) {
      throw ConfigError(field(key) + ": expected a number");
    }
    const double value = v.get<double>();
    if (!(value >= lo && value <= hi)) {
      throw ConfigError(field(key) + ": must lie in [" + std::to_string(lo) +
                        ", " + std::to_string(hi) + "]");
    }
    return value;
  }

  std::string read_string(const std::string& key) {
    const Json& v = claim(key);
    if (!v.is_string()) throw ConfigError(field(key) + ": expected a string");
    return v.get<std::string>();
  }

  const Json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

RoundMode parse_round_mode(const std::string& word, const std::string& path) {
  if (word == "floor") return RoundMode::down;
  if (word == "ceil") return RoundMode::up;
  if (word == "nearest") return RoundMode::nearest;
  throw ConfigError(path + ": expected one of floor, ceil, nearest");
}

LambdaRule parse_lambda_rule(ConfigReader& reader) {
  if (!reader.has("lambda")) {
    throw ConfigError(reader.field("lambda") + ": required field missing");
  }
  const Json& node = reader.claim("lambda");
  LambdaRule rule;
  if (node.is_number_integer() || node.is_number_unsigned()) {
    rule.is_explicit = true;
    rule.explicit_value = node.get<int>();
    if (rule.explicit_value < 1) {
      throw ConfigError(reader.field("lambda") + ": must be at least 1");
    }
    return rule;
  }
  if (!node.is_object()) {
    throw ConfigError(reader.field("lambda") +
                      ": expected an integer or a ratio rule object");
  }
  ConfigReader inner(node, reader.field("lambda"));
  rule.is_explicit = false;
  rule.ratio = inner.require_real("ratio", 1e-9, 1e9);
  rule.round = parse_round_mode(inner.require_string("round"),
                                inner.field("round"));
  inner.finish();
  return rule;
}

BudgetSpec parse_budget(ConfigReader& reader) {
  BudgetSpec budget;
  if (!reader.has("budget")) return budget;
  const Json& node = reader.claim("budget");
  if (node.is_number_integer() || node.is_number_unsigned()) {
    budget.is_absolute = true;
    budget.absolute = node.get<long long>();
    if (budget.absolute < 1) {
      throw ConfigError(reader.field("budget") + ": must be at least 1");
    }
    return budget;
  }
  if (!node.is_object()) {
    throw ConfigError(reader.field("budget") +
                      ": expected an integer or an n-log-n rule object");
  }
  ConfigReader inner(node, reader.field("budget"));
  budget.is_absolute = false;
  budget.nlogn_multiple = inner.require_real("nlogn", 1e-9, 1e12);
  inner.finish();
  return budget;
}

CommonOptions parse_common(ConfigReader& reader) {
  CommonOptions common;
  common.seed = reader.optional_u64("seed", 1);
  common.out_dir = reader.optional_string("out", "");
  if (reader.has("format")) {
    const std::string word = reader.optional_string("format", "");
    if (word == "csv") {
      common.format = OutputFormat::csv;
    } else if (word == "json") {
      common.format = OutputFormat::json;
    } else {
      throw ConfigError(reader.field("format") + ": expected csv or json");
    }
  }
  common.jobs =
      static_cast<int>(reader.optional_int("jobs", 0, 0, 4096));
  return common;
}

std::vector<std::string> parse_string_list(const Json& node,
                                           const std::string& path) {
  if (!node.is_array()) throw ConfigError(path + ": expected a list");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    if (!node[i].is_string()) {
      throw ConfigError(path + "[" + std::to_string(i) +
                        "]: expected a string");
    }
    out.push_back(node[i].get<std::string>());
  }
  return out;
}

ExperimentConfig parse_run(ConfigReader& reader) {
  ExperimentConfig cfg;
  cfg.n = static_cast<int>(reader.require_int("n", 1, 100000000));
  cfg.mu = static_cast<int>(reader.require_int("mu", 1, 100000000));
  cfg.lambda = parse_lambda_rule(reader);
  const int lambda = cfg.lambda.resolve(cfg.mu);
  if (lambda < cfg.mu) {
    throw ConfigError(reader.field("lambda") +
                      ": resolved value " + std::to_string(lambda) +
                      " is below mu; selection needs lambda >= mu");
  }
  cfg.replicates =
      static_cast<int>(reader.optional_int("replicates", 1, 1, 1000000));
  cfg.budget = parse_budget(reader);
  if (const Json* node = reader.optional_node("trackers")) {
    cfg.trackers.clear();
    std::size_t index = 0;
    for (const std::string& name :
         parse_string_list(*node, reader.field("trackers"))) {
      const auto& vocab = tracker_vocabulary();
      if (std::find(vocab.begin(), vocab.end(), name) == vocab.end()) {
        throw ConfigError(reader.field("trackers") + "[" +
                          std::to_string(index) + "]: unknown tracker '" +
                          name + "'");
      }
      cfg.trackers.insert(name);
      ++index;
    }
  }
  cfg.epsilon = reader.optional_real("epsilon", 0.2, 1e-9, 1.0 - 1e-9);
  cfg.phase_c = reader.optional_real("phase_c", 0.25, 1e-9, 0.5 - 1e-9);
  cfg.common = parse_common(reader);
  reader.finish();
  return cfg;
}

SweepConfig parse_sweep(ConfigReader& reader) {
  SweepConfig cfg;
  cfg.n = static_cast<int>(reader.require_int("n", 1, 100000000));
  if (!reader.has("mu_grid")) {
    throw ConfigError(reader.field("mu_grid") + ": required field missing");
  }
  {
    const Json& node = reader.claim("mu_grid");
    if (!node.is_array() || node.empty()) {
      throw ConfigError(reader.field("mu_grid") + ": expected a non-empty list");
    }
    for (std::size_t i = 0; i < node.size(); ++i) {
      if (!node[i].is_number_integer() || node[i].get<long long>() < 1) {
        throw ConfigError(reader.field("mu_grid") + "[" + std::to_string(i) +
                          "]: expected a positive integer");
      }
      cfg.mu_grid.push_back(node[i].get<int>());
    }
  }
  if (!reader.has("ratio_grid")) {
    throw ConfigError(reader.field("ratio_grid") + ": required field missing");
  }
  {
    const Json& node = reader.claim("ratio_grid");
    if (!node.is_array() || node.empty()) {
      throw ConfigError(reader.field("ratio_grid") +
                        ": expected a non-empty list");
    }
    for (std::size_t i = 0; i < node.size(); ++i) {
      if (!node[i].is_number() || !(node[i].get<double>() > 0.0)) {
        throw ConfigError(reader.field("ratio_grid") + "[" +
                          std::to_string(i) + "]: expected a positive number");
      }
      cfg.ratio_grid.push_back(node[i].get<double>());
    }
  }
  cfg.budget = parse_budget(reader);
  cfg.replicates =
      static_cast<int>(reader.optional_int("replicates", 1, 1, 1000000));
  cfg.common = parse_common(reader);
  reader.finish();
  return cfg;
}

CheckerSuiteConfig parse_check(ConfigReader& reader) {
  CheckerSuiteConfig cfg;
  if (!reader.has("suite")) {
    throw ConfigError(reader.field("suite") + ": required field missing");
  }
  const auto& vocab = checker_suite_vocabulary();
  {
    const Json& node = reader.claim("suite");
    std::size_t index = 0;
    for (const std::string& id :
         parse_string_list(node, reader.field("suite"))) {
      if (std::find(vocab.begin(), vocab.end(), id) == vocab.end()) {
        throw ConfigError(reader.field("suite") + "[" + std::to_string(index) +
                          "]: unknown checker id '" + id + "'");
      }
      cfg.suite.push_back(id);
      ++index;
    }
  }
  if (cfg.suite.empty()) {
    throw ConfigError(reader.field("suite") + ": expected a non-empty list");
  }
  cfg.tolerance_sigma =
      reader.optional_real("tolerance_sigma", 3.0, 1e-9, 100.0);
  if (const Json* node = reader.optional_node("samples")) {
    if (!node->is_object()) {
      throw ConfigError(reader.field("samples") + ": expected an object");
    }
    for (const auto& item : node->items()) {
      if (std::find(vocab.begin(), vocab.end(), item.key()) == vocab.end()) {
        throw ConfigError(reader.field("samples") + ": unknown checker id '" +
                          item.key() + "'");
      }
      if (!item.value().is_number_integer() ||
          item.value().get<long long>() < 1) {
        throw ConfigError(reader.field("samples") + "." + item.key() +
                          ": expected a positive integer");
      }
      cfg.samples[item.key()] = item.value().get<long long>();
    }
  }
  cfg.common = parse_common(reader);
  reader.finish();
  return cfg;
}

ApproxConfig parse_approx(ConfigReader& reader) {
  ApproxConfig cfg;
  cfg.mu_max = reader.optional_int("mu_max", 10000, 1, 10000000);
  cfg.d = reader.optional_real("d", 2.25, 2.0 + 1e-9, 10.0);
  cfg.cf_terms = static_cast<int>(reader.optional_int("cf_terms", 20, 1, 40));
  cfg.common = parse_common(reader);
  reader.finish();
  return cfg;
}

SurrogateStudyConfig parse_surrogate(ConfigReader& reader) {
  SurrogateStudyConfig cfg;
  cfg.study = reader.require_string("study");
  const auto& vocab = surrogate_study_vocabulary();
  if (std::find(vocab.begin(), vocab.end(), cfg.study) == vocab.end()) {
    throw ConfigError(reader.field("study") + ": unknown study '" + cfg.study +
                      "'");
  }
  if (cfg.study == "variation") {
    cfg.mu = static_cast<int>(reader.require_int("mu", 1, 100000000));
    cfg.lambda = static_cast<int>(reader.require_int("lambda", 1, 100000000));
    cfg.x0 = static_cast<int>(reader.require_int("x0", 0, cfg.mu));
    cfg.delta = reader.require_real("delta", 1e-9, 1e18);
    cfg.t = static_cast<int>(reader.require_int("t", 1, 1000000000));
    cfg.trials = reader.optional_int("trials", 10000, 1, 1000000000);
  } else if (cfg.study == "hitting") {
    cfg.mu = static_cast<int>(reader.require_int("mu", 1, 100000000));
    cfg.lambda = static_cast<int>(reader.require_int("lambda", 1, 100000000));
    cfg.delta_min = reader.require_real("delta_min", 1e-9, 1e18);
    cfg.x0 = static_cast<int>(reader.require_int("x0", 0, cfg.mu));
    cfg.xprime = static_cast<int>(reader.require_int("xprime", 1, cfg.mu));
    cfg.trials = reader.optional_int("trials", 1000, 1, 1000000000);
  } else if (cfg.study == "conditioned") {
    cfg.n = static_cast<int>(reader.require_int("n", 2, 100000000));
    cfg.mu = static_cast<int>(reader.require_int("mu", 1, 100000000));
    cfg.lambda = static_cast<int>(reader.require_int("lambda", 1, 100000000));
    cfg.s = static_cast<int>(reader.require_int("s", 1, cfg.mu));
    cfg.samples = reader.optional_int("samples", 100000, 2, 1000000000);
    cfg.pn_mode = reader.optional_string("pn_mode", "analytic");
    if (cfg.pn_mode != "analytic" && cfg.pn_mode != "empirical") {
      throw ConfigError(reader.field("pn_mode") +
                        ": expected analytic or empirical");
    }
  } else if (cfg.study == "h_drift") {
    cfg.n = static_cast<int>(reader.require_int("n", 2, 100000000));
    cfg.mu = static_cast<int>(reader.require_int("mu", 1, 100000000));
    cfg.lambda = static_cast<int>(reader.require_int("lambda", 1, 100000000));
  } else if (cfg.study == "exponential_moment" ||
             cfg.study == "jump_profile") {
    cfg.n = static_cast<int>(reader.require_int("n", 2, 100000000));
    cfg.mu = static_cast<int>(reader.require_int("mu", 1, 100000000));
    cfg.lambda = static_cast<int>(reader.require_int("lambda", 1, 100000000));
    cfg.c = reader.optional_real("c", 0.25, 1e-9, 0.5 - 1e-9);
    cfg.steps = reader.optional_int("steps", 2000, 1, 1000000000);
  } else {  // top_loss
    cfg.n = static_cast<int>(reader.require_int("n", 2, 100000000));
    cfg.mu = static_cast<int>(reader.require_int("mu", 1, 100000000));
    cfg.lambda = static_cast<int>(reader.require_int("lambda", 1, 100000000));
    cfg.c = reader.optional_real("c", 0.25, 1e-9, 0.5 - 1e-9);
    cfg.trials = reader.optional_int("trials", 200, 1, 1000000000);
  }
  cfg.common = parse_common(reader);
  reader.finish();
  return cfg;
}

// The jobs count is deliberately not echoed: artifacts are byte-identical
// for any worker count, and recording it would break that comparison.
void echo_common(const CommonOptions& common, Json& out) {
  out["seed"] = common.seed;
  if (!common.out_dir.empty()) out["out"] = common.out_dir;
  if (common.format.has_value()) {
    out["format"] = *common.format == OutputFormat::csv ? "csv" : "json";
  }
}

}  // namespace

int LambdaRule::resolve(int mu) const {
  if (mu < 1) throw ConfigError("lambda rule applied to mu < 1");
  if (is_explicit) return explicit_value;
  const double target = ratio * kEulerE * mu;
  double value = 0.0;
  switch (round) {
    case RoundMode::down:
      value = std::floor(target + 1e-9);
      break;
    case RoundMode::up:
      value = std::ceil(target - 1e-9);
      break;
    case RoundMode::nearest:
      value = std::floor(target + 0.5);
      break;
  }
  if (value < 1.0 || value > 2147483647.0) {
    throw ConfigError("lambda rule resolves outside the integer range");
  }
  return static_cast<int>(value);
}

std::string LambdaRule::describe() const {
  if (is_explicit) return std::to_string(explicit_value);
  std::string mode = round == RoundMode::down
                         ? "floor"
                         : (round == RoundMode::up ? "ceil" : "nearest");
  return "ratio " + Json(ratio).dump() + " " + mode;
}

long long BudgetSpec::resolve(int n) const {
  if (is_absolute) return absolute;
  const double value =
      nlogn_multiple * n * std::log(static_cast<double>(n));
  return std::max<long long>(1, std::llround(value));
}

std::string BudgetSpec::describe() const {
  if (is_absolute) return std::to_string(absolute);
  return Json(nlogn_multiple).dump() + " n ln n";
}

ParsedConfig parse_config(const std::string& text) {
  const Json root = parse_json(text);
  ConfigReader reader(root, "config");
  const std::string task = reader.optional_string("task", "run");
  ParsedConfig parsed;
  if (task == "run") {
    parsed = parse_run(reader);
  } else if (task == "sweep") {
    parsed = parse_sweep(reader);
  } else if (task == "check") {
    parsed = parse_check(reader);
  } else if (task == "approx") {
    parsed = parse_approx(reader);
  } else if (task == "surrogate") {
    parsed = parse_surrogate(reader);
  } else {
    throw ConfigError(
        "config.task: expected one of run, sweep, check, approx, surrogate");
  }
  return parsed;
}

const std::vector<std::string>& checker_suite_vocabulary() {
  static const std::vector<std::string> vocab{
      "lemma1",  "lemma2",  "lemma3",  "thm5",    "thm6",    "lemma6",
      "lemma7",  "lemma8",  "thm12",   "lemma13", "lemma14", "thm15",
      "thm17",   "lemma19", "lemma20", "thm21",   "cor23",   "lemma24",
      "lemma25", "lemma27", "lemma28", "lemma29", "thm26"};
  return vocab;
}

const std::vector<std::string>& tracker_vocabulary() {
  static const std::vector<std::string> vocab{"g", "h", "levels",
                                              "phase_process", "n_events"};
  return vocab;
}

const std::vector<std::string>& surrogate_study_vocabulary() {
  static const std::vector<std::string> vocab{
      "variation",  "hitting",      "conditioned", "h_drift",
      "exponential_moment", "jump_profile", "top_loss"};
  return vocab;
}

Json config_echo(const ParsedConfig& config) {
  Json out;
  if (const auto* cfg = std::get_if<ExperimentConfig>(&config)) {
    out["task"] = "run";
    out["n"] = cfg->n;
    out["mu"] = cfg->mu;
    out["lambda_rule"] = cfg->lambda.describe();
    out["lambda"] = cfg->lambda.resolve(cfg->mu);
    out["replicates"] = cfg->replicates;
    out["budget"] = cfg->budget.describe();
    out["budget_generations"] = cfg->budget.resolve(cfg->n);
    out["trackers"] = Json(cfg->trackers);
    out["epsilon"] = cfg->epsilon;
    out["phase_c"] = cfg->phase_c;
    echo_common(cfg->common, out);
  } else if (const auto* cfg = std::get_if<SweepConfig>(&config)) {
    out["task"] = "sweep";
    out["n"] = cfg->n;
    out["mu_grid"] = Json(cfg->mu_grid);
    out["ratio_grid"] = Json(cfg->ratio_grid);
    out["budget"] = cfg->budget.describe();
    out["budget_generations"] = cfg->budget.resolve(cfg->n);
    out["replicates"] = cfg->replicates;
    echo_common(cfg->common, out);
  } else if (const auto* cfg = std::get_if<CheckerSuiteConfig>(&config)) {
    out["task"] = "check";
    out["suite"] = Json(cfg->suite);
    out["tolerance_sigma"] = cfg->tolerance_sigma;
    if (!cfg->samples.empty()) out["samples"] = Json(cfg->samples);
    echo_common(cfg->common, out);
  } else if (const auto* cfg = std::get_if<ApproxConfig>(&config)) {
    out["task"] = "approx";
    out["mu_max"] = cfg->mu_max;
    out["d"] = cfg->d;
    out["cf_terms"] = cfg->cf_terms;
    echo_common(cfg->common, out);
  } else if (const auto* cfg = std::get_if<SurrogateStudyConfig>(&config)) {
    out["task"] = "surrogate";
    out["study"] = cfg->study;
    if (cfg->n > 0) out["n"] = cfg->n;
    out["mu"] = cfg->mu;
    if (cfg->lambda > 0) out["lambda"] = cfg->lambda;
    if (cfg->study == "variation") {
      out["x0"] = cfg->x0;
      out["delta"] = cfg->delta;
      out["t"] = cfg->t;
      out["trials"] = cfg->trials;
    } else if (cfg->study == "hitting") {
      out["delta_min"] = cfg->delta_min;
      out["x0"] = cfg->x0;
      out["xprime"] = cfg->xprime;
      out["trials"] = cfg->trials;
    } else if (cfg->study == "conditioned") {
      out["s"] = cfg->s;
      out["samples"] = cfg->samples;
      out["pn_mode"] = cfg->pn_mode;
    } else if (cfg->study == "exponential_moment" ||
               cfg->study == "jump_profile") {
      out["c"] = cfg->c;
      out["steps"] = cfg->steps;
    } else if (cfg->study == "top_loss") {
      out["c"] = cfg->c;
      out["trials"] = cfg->trials;
    }
    echo_common(cfg->common, out);
  }
  return out;
}

}  // namespace commalab
