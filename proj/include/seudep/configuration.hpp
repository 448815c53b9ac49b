#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "seudep/charlib.hpp"
#include "seudep/error.hpp"
#include "seudep/schedule.hpp"

namespace seudep {

/// One design option to evaluate: the allocation the schedule actually
/// uses, cold spares on top of it, the minimum allocation below which
/// the application cannot run, fault detection coverage, the blind
/// scrub interval, and the component bound to each operation class.
struct Configuration {
  std::string name;
  Allocation base_alloc;
  Allocation spares;
  Allocation min_alloc;
  double coverage = 1.0;
  double scrub_interval_days = 1.0;
  std::map<std::string, std::string> binding;
  std::string environment;

  double scrub_rate_per_day() const { return 1.0 / scrub_interval_days; }

  int total(const std::string& cls) const {
    int spare = 0;
    if (auto it = spares.find(cls); it != spares.end()) spare = it->second;
    return base_alloc.at(cls) + spare;
  }

  void validate() const {
    if (base_alloc.empty()) throw error("configuration: base_alloc must not be empty");
    if (!(coverage >= 0.0 && coverage <= 1.0))
      throw error("configuration: coverage must be in [0,1]");
    if (!(scrub_interval_days > 0.0))
      throw error("configuration: scrub_interval_days must be > 0");
    for (const auto& [cls, count] : base_alloc) {
      if (count < 0) throw error("configuration: base_alloc." + cls + " must be >= 0");
      auto mi = min_alloc.find(cls);
      if (mi == min_alloc.end())
        throw error("configuration: min_alloc missing op class '" + cls + "'");
      if (mi->second < 0 || mi->second > count)
        throw error("configuration: need min_alloc <= base_alloc for op class '" + cls + "'");
      if (auto sp = spares.find(cls); sp != spares.end() && sp->second < 0)
        throw error("configuration: spares." + cls + " must be >= 0");
    }
    for (const auto& [cls, count] : spares) {
      (void)count;
      if (base_alloc.find(cls) == base_alloc.end())
        throw error("configuration: spares name unknown op class '" + cls + "'");
    }
  }
};

namespace detail {

inline Allocation parse_allocation(const nlohmann::json& obj, const std::string& where) {
  if (!obj.is_object()) throw error(where + ": expected an object of class -> count");
  Allocation a;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!it.value().is_number_integer() || it.value().get<long>() < 0)
      throw error(where + "." + it.key() + ": expected a count >= 0");
    a[it.key()] = it.value().get<int>();
  }
  return a;
}

}  // namespace detail

inline Configuration parse_configuration(const std::string& text) {
  nlohmann::json doc = detail::parse_json_document(text, "configuration");
  if (!doc.is_object()) throw error("configuration: top level must be an object");

  Configuration cfg;
  if (auto it = doc.find("name"); it != doc.end())
    cfg.name = detail::require_string(*it, "configuration.name");
  cfg.base_alloc = detail::parse_allocation(
      detail::require_field(doc, "base_alloc", "configuration"), "configuration.base_alloc");
  if (auto it = doc.find("spares"); it != doc.end())
    cfg.spares = detail::parse_allocation(*it, "configuration.spares");
  cfg.min_alloc = detail::parse_allocation(
      detail::require_field(doc, "min_alloc", "configuration"), "configuration.min_alloc");

  const auto& cov = detail::require_field(doc, "coverage", "configuration");
  if (!cov.is_number()) throw error("configuration.coverage: expected a number");
  cfg.coverage = cov.get<double>();
  cfg.scrub_interval_days = detail::require_positive_number(
      detail::require_field(doc, "scrub_interval_days", "configuration"),
      "configuration.scrub_interval_days");

  const auto& binding = detail::require_field(doc, "binding", "configuration");
  if (!binding.is_object()) throw error("configuration.binding: expected an object");
  for (auto it = binding.begin(); it != binding.end(); ++it)
    cfg.binding[it.key()] =
        detail::require_string(it.value(), "configuration.binding." + it.key());
  cfg.environment = detail::require_string(
      detail::require_field(doc, "environment", "configuration"), "configuration.environment");

  cfg.validate();
  return cfg;
}

inline Configuration load_configuration(const std::string& path) {
  return parse_configuration(detail::read_file(path));
}

}  // namespace seudep
