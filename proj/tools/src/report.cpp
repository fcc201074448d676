#include "report.hpp"

#include <algorithm>
#include <cmath>

#include "version.hpp"

namespace volcrit::cli {

std::string to_string(Compare c) {
  switch (c) {
    case Compare::abs_le: return "abs";
    case Compare::rel_le: return "rel";
    case Compare::rel_strict: return "rel_strict";
    case Compare::le: return "le";
    case Compare::ge: return "ge";
    case Compare::positive: return "positive";
    case Compare::negative: return "negative";
    case Compare::diagnostic: return "diagnostic";
  }
  return "?";
}

CheckEntry& Report::check(std::string name, double value, std::optional<double> reference,
                          double tolerance, Compare compare, std::string anchor) {
  CheckEntry e;
  e.name = std::move(name);
  e.value = value;
  e.reference = reference;
  e.tolerance = tolerance;
  e.compare = compare;
  e.anchor = std::move(anchor);
  const double ref = reference.value_or(0.0);
  switch (compare) {
    case Compare::abs_le:
      e.error = std::abs(value - ref);
      e.pass = e.error <= tolerance;
      break;
    case Compare::rel_le:
      e.error = std::abs(value - ref) / std::max(std::abs(ref), 1.0);
      e.pass = e.error <= tolerance;
      break;
    case Compare::rel_strict:
      e.error = std::abs(value - ref) / std::abs(ref);
      e.pass = e.error <= tolerance;
      break;
    case Compare::le:
      e.error = value;
      e.pass = value <= tolerance;
      break;
    case Compare::ge:
      e.error = value;
      e.pass = value >= tolerance;
      break;
    case Compare::positive:
      e.error = value;
      e.pass = value > 0;
      break;
    case Compare::negative:
      e.error = value;
      e.pass = value < 0;
      break;
    case Compare::diagnostic:
      e.error = reference ? std::abs(value - ref) : 0.0;
      e.pass = true;
      break;
  }
  if (!std::isfinite(value)) e.pass = compare == Compare::diagnostic;
  checks_.push_back(std::move(e));
  return checks_.back();
}

void Report::out_of_scope(std::string name, std::string reason) {
  out_of_scope_.push_back({{"name", std::move(name)}, {"reason", std::move(reason)}});
}

bool Report::pass() const {
  return std::all_of(checks_.begin(), checks_.end(), [](const CheckEntry& e) { return e.pass; });
}

namespace {
nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}
}  // namespace

nlohmann::json Report::to_json(const nlohmann::json& config_echo) const {
  nlohmann::json checks = nlohmann::json::array();
  for (const CheckEntry& e : checks_) {
    nlohmann::json c;
    c["name"] = e.name;
    c["value"] = number(e.value);
    c["reference"] = e.reference ? number(*e.reference) : nlohmann::json(nullptr);
    c["error"] = number(e.error);
    c["tolerance"] = number(e.tolerance);
    c["compare"] = to_string(e.compare);
    c["pass"] = e.pass;
    c["anchor"] = e.anchor;
    checks.push_back(std::move(c));
  }
  nlohmann::json j;
  j["tool"] = "volcrit";
  j["version"] = kVersion;
  j["command"] = command_;
  j["config"] = config_echo;
  j["checks"] = std::move(checks);
  j["out_of_scope"] = out_of_scope_;
  j["data"] = data_;
  j["pass"] = pass();
  return j;
}

}  // namespace volcrit::cli
