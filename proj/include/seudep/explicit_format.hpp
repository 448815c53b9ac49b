#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "seudep/error.hpp"
#include "seudep/mrm.hpp"

namespace seudep {

/// Textual explicit-state dump of a model, whitespace-delimited and
/// deterministic:
///   .tra  "<states> <transitions>" header, then "from to rate" rows
///   .lab  "<state> <class>" rows; the initial state carries an extra
///         "init" token
///   .rew  "<reward-name> <state> <value>" rows
struct ExplicitDump {
  std::string tra, lab, rew;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline ExplicitDump export_explicit(const MarkovRewardModel& m) {
  ExplicitDump out;
  std::size_t transitions = 0;
  for (const auto& row : m.rates) transitions += row.size();

  std::ostringstream tra;
  tra << m.size() << ' ' << transitions << '\n';
  for (std::size_t s = 0; s < m.size(); ++s)
    for (auto [to, r] : m.rates[s])
      tra << s << ' ' << to << ' ' << detail::format_double(r) << '\n';
  out.tra = tra.str();

  std::ostringstream lab;
  for (std::size_t s = 0; s < m.size(); ++s) {
    lab << s << ' ' << to_string(m.label[s]);
    if (static_cast<int>(s) == m.initial) lab << " init";
    lab << '\n';
  }
  out.lab = lab.str();

  std::ostringstream rew;
  for (const auto& [name, values] : m.rewards)
    for (std::size_t s = 0; s < values.size(); ++s)
      rew << name << ' ' << s << ' ' << detail::format_double(values[s]) << '\n';
  out.rew = rew.str();
  return out;
}

/// Rebuild a model from an explicit dump. Counter metadata is not part
/// of the format, so counter-atom predicates are unavailable on
/// imported models; labels, rates and rewards round-trip exactly.
inline MarkovRewardModel import_explicit(const ExplicitDump& dump) {
  MarkovRewardModel m;

  std::istringstream tra(dump.tra);
  std::size_t n = 0, transitions = 0;
  if (!(tra >> n >> transitions)) throw error("explicit import: bad .tra header");
  m.states.resize(n);
  m.rates.assign(n, {});
  m.label.assign(n, StateClass::Degraded);
  std::size_t seen = 0;
  std::size_t from, to;
  std::string rate_text;
  while (tra >> from >> to >> rate_text) {
    if (from >= n || to >= n) throw error("explicit import: .tra state out of range");
    m.rates[from].emplace_back(static_cast<int>(to), std::stod(rate_text));
    ++seen;
  }
  if (seen != transitions)
    throw error("explicit import: .tra header promises " + std::to_string(transitions) +
                " transitions, found " + std::to_string(seen));

  std::istringstream lab(dump.lab);
  std::string line;
  bool saw_init = false;
  while (std::getline(lab, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::size_t s;
    std::string cls, init_tok;
    if (!(ls >> s >> cls) || s >= n) throw error("explicit import: bad .lab record: " + line);
    if (cls == "operational") m.label[s] = StateClass::Operational;
    else if (cls == "degraded") m.label[s] = StateClass::Degraded;
    else if (cls == "failed_safe") m.label[s] = StateClass::FailedSafe;
    else if (cls == "failed_unsafe") m.label[s] = StateClass::FailedUnsafe;
    else throw error("explicit import: unknown class '" + cls + "'");
    if (ls >> init_tok) {
      if (init_tok != "init") throw error("explicit import: bad .lab trailer: " + line);
      if (saw_init) throw error("explicit import: multiple init states");
      m.initial = static_cast<int>(s);
      saw_init = true;
    }
  }
  if (!saw_init) throw error("explicit import: no init state marked");

  std::istringstream rew(dump.rew);
  std::string name;
  std::size_t s;
  while (rew >> name >> s >> rate_text) {
    if (s >= n) throw error("explicit import: .rew state out of range");
    auto& vec = m.rewards[name];
    if (vec.empty()) vec.assign(n, 0.0);
    vec[s] = std::stod(rate_text);
  }
  return m;
}

inline void write_explicit_files(const MarkovRewardModel& m, const std::string& prefix) {
  ExplicitDump dump = export_explicit(m);
  for (auto [ext, text] : {std::pair<const char*, const std::string*>{".tra", &dump.tra},
                           {".lab", &dump.lab},
                           {".rew", &dump.rew}}) {
    std::ofstream out(prefix + ext, std::ios::binary);
    if (!out) throw error("cannot write " + prefix + ext);
    out << *text;
  }
}

inline MarkovRewardModel read_explicit_files(const std::string& prefix) {
  ExplicitDump dump;
  dump.tra = detail::read_file(prefix + ".tra");
  dump.lab = detail::read_file(prefix + ".lab");
  dump.rew = detail::read_file(prefix + ".rew");
  return import_explicit(dump);
}

}  // namespace seudep
