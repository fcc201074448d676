#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace volcrit::cli {

enum class Compare {
  abs_le,       // |value - reference| <= tolerance
  rel_le,       // |value - reference| / max(|reference|, 1) <= tolerance
  rel_strict,   // |value - reference| / |reference| <= tolerance
  le,           // value <= tolerance (reference unused)
  ge,           // value >= tolerance
  positive,     // value > 0
  negative,     // value < 0
  diagnostic    // reported only, always passes
};

struct CheckEntry {
  std::string name;
  double value = 0.0;
  std::optional<double> reference;
  double error = 0.0;
  double tolerance = 0.0;
  Compare compare = Compare::abs_le;
  bool pass = false;
  std::string anchor;
};

class Report {
 public:
  explicit Report(std::string command) : command_(std::move(command)) {}

  /// Adds a check and evaluates pass/fail from `compare`.
  CheckEntry& check(std::string name, double value, std::optional<double> reference,
                    double tolerance, Compare compare, std::string anchor);
  void out_of_scope(std::string name, std::string reason);

  nlohmann::json& data() { return data_; }
  const std::vector<CheckEntry>& checks() const { return checks_; }
  bool pass() const;

  nlohmann::json to_json(const nlohmann::json& config_echo) const;

 private:
  std::string command_;
  std::vector<CheckEntry> checks_;
  nlohmann::json out_of_scope_ = nlohmann::json::array();
  nlohmann::json data_ = nlohmann::json::object();
};

std::string to_string(Compare c);

}  // namespace volcrit::cli
