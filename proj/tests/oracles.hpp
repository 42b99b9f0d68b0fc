#pragma once

// Test-only reference implementations. Nothing here calls into the code
// paths it is used to check.

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace oracle {

// Chi-square critical value, 4 degrees of freedom, upper tail 0.001
// (scipy.stats.chi2.ppf(0.999, 4)).
inline constexpr double kChiSquareDf4Alpha001 = 18.46682695290317;
// Two-sided 99% normal quantile.
inline constexpr double kZ99 = 2.5758293035489004;

inline double binomial_ci99_half_width(double p, std::size_t n) {
  return kZ99 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

// Majority verdict by explicit enumeration of candidate options, written
// independently of the library rule: collect every option whose vote count
// equals the maximum, then apply the tie-break.
inline std::size_t reference_verdict(const std::vector<std::size_t>& stances, std::size_t moderator_position,
                                     std::size_t option_count) {
  std::size_t best = 0;
  for (std::size_t option = 0; option < option_count; ++option) {
    std::size_t votes = 0;
    for (std::size_t s : stances) votes += (s == option);
    best = std::max(best, votes);
  }
  std::set<std::size_t> tied;
  for (std::size_t option = 0; option < option_count; ++option) {
    std::size_t votes = 0;
    for (std::size_t s : stances) votes += (s == option);
    if (votes == best) tied.insert(option);
  }
  const std::size_t own = stances[moderator_position];
  if (tied.count(own)) return own;
  return *tied.begin();
}

// Probability that a forum with `fact_based` truthful agents (one of them the
// moderator), one saboteur pinned on a uniformly placed wrong option, no
// switching, and the plurality moderator rule picks the correct option.
// Enumerates correct position, saboteur position and every fact-based stance
// vector, weighting each by its probability.
inline double forum_accuracy(std::size_t fact_based, double p_correct, std::size_t option_count) {
  const std::size_t k = option_count;
  double total = 0.0;
  std::vector<std::size_t> stances(fact_based, 0);
  std::size_t combos = 1;
  for (std::size_t i = 0; i < fact_based; ++i) combos *= k;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t t = 0; t < k; ++t) {
      if (t == c) continue;
      const double placement = 1.0 / static_cast<double>(k * (k - 1));
      for (std::size_t code = 0; code < combos; ++code) {
        std::size_t rest = code;
        double prob = placement;
        for (std::size_t i = 0; i < fact_based; ++i) {
          stances[i] = rest % k;
          rest /= k;
          prob *= stances[i] == c ? p_correct : (1.0 - p_correct) / static_cast<double>(k - 1);
        }
        std::vector<std::size_t> votes = stances;
        votes.push_back(t);
        if (reference_verdict(votes, 0, k) == c) total += prob;
      }
    }
  }
  return total;
}

// Subset JSON-Schema check: type, required, properties, items, enum,
// minimum, minItems, additionalProperties(false). Returns "" when valid.
inline std::string validate_schema(const nlohmann::json& value, const nlohmann::json& schema,
                                   const std::string& path = "$") {
  if (schema.contains("type")) {
    const std::string type = schema["type"];
    bool ok = false;
    if (type == "object") ok = value.is_object();
    else if (type == "array") ok = value.is_array();
    else if (type == "string") ok = value.is_string();
    else if (type == "number") ok = value.is_number();
    else if (type == "integer") ok = value.is_number_integer();
    else if (type == "boolean") ok = value.is_boolean();
    if (!ok) return path + ": expected " + type;
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& e : schema["enum"]) found = found || e == value;
    if (!found) return path + ": value not in enum";
  }
  if (schema.contains("minimum") && value.is_number() && value.get<double>() < schema["minimum"].get<double>()) {
    return path + ": below minimum";
  }
  if (schema.contains("minItems") && value.is_array() && value.size() < schema["minItems"].get<std::size_t>()) {
    return path + ": too few items";
  }
  if (value.is_object()) {
    if (schema.contains("required")) {
      for (const auto& r : schema["required"]) {
        if (!value.contains(r.get<std::string>())) return path + ": missing " + r.get<std::string>();
      }
    }
    const auto props = schema.value("properties", nlohmann::json::object());
    for (auto it = value.begin(); it != value.end(); ++it) {
      if (props.contains(it.key())) {
        auto err = validate_schema(it.value(), props[it.key()], path + "." + it.key());
        if (!err.empty()) return err;
      } else if (schema.contains("additionalProperties") && schema["additionalProperties"] == false) {
        return path + ": unexpected property " + it.key();
      }
    }
  }
  if (value.is_array() && schema.contains("items")) {
    for (std::size_t i = 0; i < value.size(); ++i) {
      auto err = validate_schema(value[i], schema["items"], path + "[" + std::to_string(i) + "]");
      if (!err.empty()) return err;
    }
  }
  return "";
}

}  // namespace oracle
