#include "commalab/reports.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace commalab {

Json to_json(const DriftReport& report) {
  Json j;
  j["quantity"] = report.quantity;
  j["estimate"] = report.estimate;
  j["ci_low"] = report.ci_low;
  j["ci_high"] = report.ci_high;
  j["bound"] = report.bound;
  j["pass"] = report.pass;
  return j;
}

Json to_json(const BoundReport& report) {
  Json j;
  j["lemma"] = report.lemma;
  j["hypothesis_ok"] = report.hypothesis_ok;
  j["parameters"] = report.parameters;
  j["empirical"] = report.empirical;
  j["standard_error"] = report.standard_error;
  j["bound"] = report.bound;
  j["pass"] = report.pass;
  j["samples"] = report.samples;
  if (report.rejection_rate.has_value()) {
    j["rejection_rate"] = *report.rejection_rate;
  }
  return j;
}

std::string csv_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return Json(value).dump();
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::filesystem::create_directories(p.parent_path());
  }
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace commalab
