#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "seudep/error.hpp"

namespace seudep {

/// One datapath component as characterized for a target device:
/// area in LUTs and the number of configuration bits whose upset can
/// alter the implemented circuit. Essential bits are taken as the
/// worst-case critical-bit count.
struct ComponentSpec {
  std::string name;
  std::string op_class;  // operation class served, e.g. "add", "mul"
  long lut_count = 0;
  long essential_bits = 0;
};

/// Radiation environment, reduced to a per-bit upset rate.
struct Environment {
  std::string name;
  double lambda_bit_per_sec = 0.0;
};

struct CharacterizationLibrary {
  std::vector<ComponentSpec> components;
  std::vector<Environment> environments;

  const ComponentSpec& component(const std::string& name) const {
    for (const auto& c : components)
      if (c.name == name) return c;
    throw error("unknown component '" + name + "'");
  }

  const Environment& environment(const std::string& name) const {
    for (const auto& e : environments)
      if (e.name == name) return e;
    throw error("unknown environment '" + name + "'");
  }
};

inline constexpr double kSecondsPerDay = 86400.0;

/// Component upset rate in failures per day. All rates downstream of the
/// library are day-denominated; the seconds-to-days conversion happens
/// here and nowhere else.
inline double failure_rate_per_day(const ComponentSpec& comp, const Environment& env) {
  return static_cast<double>(comp.essential_bits) * env.lambda_bit_per_sec * kSecondsPerDay;
}

/// Mean time between failures in days for an exponential rate.
inline double mtbf_days(double rate_per_day) {
  if (!(rate_per_day > 0.0)) throw error("mtbf_days: non-positive rate");
  return 1.0 / rate_per_day;
}

namespace detail {

inline double require_positive_number(const nlohmann::json& v, const std::string& where) {
  if (!v.is_number()) throw error(where + ": expected a number");
  double x = v.get<double>();
  if (!(x > 0.0)) throw error(where + ": must be > 0 (got " + v.dump() + ")");
  return x;
}

inline long require_positive_integer(const nlohmann::json& v, const std::string& where) {
  if (!v.is_number_integer()) throw error(where + ": expected an integer");
  long x = v.get<long>();
  if (x <= 0) throw error(where + ": must be > 0 (got " + v.dump() + ")");
  return x;
}

inline std::string require_string(const nlohmann::json& v, const std::string& where) {
  if (!v.is_string() || v.get<std::string>().empty())
    throw error(where + ": expected a non-empty string");
  return v.get<std::string>();
}

inline const nlohmann::json& require_field(const nlohmann::json& obj, const char* key,
                                           const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw error(where + ": missing field '" + key + "'");
  return *it;
}

inline nlohmann::json parse_json_document(const std::string& text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw error(what + ": malformed document: " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("file not found: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

/// Parse a characterization library document.
///
/// Expected layout:
///   { "components":   [ {"name","op_class","luts","essential_bits"}, ... ],
///     "environments": [ {"name","lambda_bit_per_sec"}, ... ] }
inline CharacterizationLibrary parse_library(const std::string& text) {
  nlohmann::json doc = detail::parse_json_document(text, "library");
  if (!doc.is_object()) throw error("library: top level must be an object");

  CharacterizationLibrary lib;
  const auto& comps = detail::require_field(doc, "components", "library");
  if (!comps.is_array()) throw error("library.components: expected an array");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    std::string where = "library.components[" + std::to_string(i) + "]";
    const auto& c = comps[i];
    if (!c.is_object()) throw error(where + ": expected an object");
    ComponentSpec spec;
    spec.name = detail::require_string(detail::require_field(c, "name", where), where + ".name");
    spec.op_class =
        detail::require_string(detail::require_field(c, "op_class", where), where + ".op_class");
    spec.lut_count =
        detail::require_positive_integer(detail::require_field(c, "luts", where), where + ".luts");
    spec.essential_bits = detail::require_positive_integer(
        detail::require_field(c, "essential_bits", where), where + ".essential_bits");
    if (!seen.insert(spec.name).second)
      throw error(where + ": duplicate component '" + spec.name + "'");
    lib.components.push_back(std::move(spec));
  }
  if (lib.components.empty()) throw error("library: empty library (no components)");

  const auto& envs = detail::require_field(doc, "environments", "library");
  if (!envs.is_array()) throw error("library.environments: expected an array");
  std::set<std::string> seen_env;
  for (std::size_t i = 0; i < envs.size(); ++i) {
    std::string where = "library.environments[" + std::to_string(i) + "]";
    const auto& e = envs[i];
    if (!e.is_object()) throw error(where + ": expected an object");
    Environment env;
    env.name = detail::require_string(detail::require_field(e, "name", where), where + ".name");
    env.lambda_bit_per_sec = detail::require_positive_number(
        detail::require_field(e, "lambda_bit_per_sec", where), where + ".lambda_bit_per_sec");
    if (!seen_env.insert(env.name).second)
      throw error(where + ": duplicate environment '" + env.name + "'");
    lib.environments.push_back(std::move(env));
  }
  if (lib.environments.empty()) throw error("library: empty library (no environments)");
  return lib;
}

inline CharacterizationLibrary load_library(const std::string& path) {
  return parse_library(detail::read_file(path));
}

}  // namespace seudep
