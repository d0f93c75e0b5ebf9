#pragma once

#include <optional>
#include <string>

#include <json.hpp>

namespace commalab {

using Json = nlohmann::ordered_json;

// Drift-style checker result: an estimated conditional expectation with its
// confidence interval against a stated bound.
struct DriftReport {
  std::string quantity;
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double bound = 0.0;
  bool pass = false;
  long long samples = 0;
  bool hypothesis_ok = true;
};

// Bound-style checker result: empirical frequency or mean against a stated
// bound, with the hypothesis gate and sampling metadata.
struct BoundReport {
  std::string lemma;
  bool hypothesis_ok = true;
  Json parameters = Json::object();
  double empirical = 0.0;
  double standard_error = 0.0;
  double bound = 0.0;
  bool pass = false;
  long long samples = 0;
  std::optional<double> rejection_rate;
};

// Serializers emit exactly the documented key sets.
Json to_json(const DriftReport& report);
Json to_json(const BoundReport& report);

// Round-trip decimal rendering for CSV cells; infinities and NaN are spelled
// out since the JSON-based shortest form cannot represent them.
std::string csv_double(double value);

// Writes content to path, creating parent directories; throws on I/O failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace commalab
