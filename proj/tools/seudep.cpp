// Command-line front end: load a characterization library, a CDFG and a
// configuration, then check properties, sweep parameters, simulate,
// reproduce the reference tables/figures, export explicit-state files,
// or print a schedule.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seudep/harness.hpp"

namespace {

struct CommonPaths {
  std::string library, cdfg, config;
};

void add_common(CLI::App* cmd, CommonPaths& paths) {
  cmd->add_option("--library", paths.library, "characterization library JSON")->required();
  cmd->add_option("--cdfg", paths.cdfg, "application CDFG JSON")->required();
  cmd->add_option("--config", paths.config, "configuration JSON")->required();
}

seudep::Allocation parse_alloc_string(const std::string& text) {
  seudep::Allocation alloc;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw seudep::error("bad --alloc item '" + item + "' (expected class=count)");
    alloc[item.substr(0, eq)] = std::stoi(item.substr(eq + 1));
  }
  if (alloc.empty()) throw seudep::error("empty --alloc");
  return alloc;
}

seudep::Measure parse_measure_string(const std::string& text, const seudep::MarkovRewardModel& m) {
  // kind:state-expr[:time], e.g. class-time:"operational":3650
  auto split = [&](const std::string& s) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    bool quoted = false;
    for (std::size_t i = 0; i <= s.size(); ++i) {
      if (i < s.size() && s[i] == '"') quoted = !quoted;
      if (i == s.size() || (s[i] == ':' && !quoted)) {
        parts.push_back(s.substr(start, i - start));
        start = i + 1;
      }
    }
    return parts;
  };
  auto parts = split(text);
  if (parts.size() < 2) throw seudep::error("bad --measure '" + text + "'");
  seudep::Measure ms;
  ms.name = text;
  ms.set = seudep::csl::resolve_states(seudep::csl::parse_state_expr(parts[1]), m);
  if (parts[0] == "class-time") ms.kind = seudep::Measure::Kind::ClassTime;
  else if (parts[0] == "invariance") ms.kind = seudep::Measure::Kind::Invariance;
  else if (parts[0] == "transient-indicator") ms.kind = seudep::Measure::Kind::TransientIndicator;
  else if (parts[0] == "reach-time") ms.kind = seudep::Measure::Kind::ReachTime;
  else throw seudep::error("unknown measure kind '" + parts[0] + "'");
  if (ms.kind == seudep::Measure::Kind::TransientIndicator) {
    if (parts.size() != 3) throw seudep::error("transient-indicator needs kind:expr:time");
    ms.t = std::stod(parts[2]);
  }
  return ms;
}

}  // namespace

using seudep::harness::kExitError;

int main(int argc, char** argv) {
  CLI::App app{"Markov-reward dependability and performability analysis for SEU-prone datapaths"};
  app.require_subcommand(1);

  CommonPaths paths;
  std::string property_text, property_file, out_path;

  auto* check = app.add_subcommand("check", "evaluate properties against a model");
  add_common(check, paths);
  check->add_option("--property", property_text, "property text");
  check->add_option("--property-file", property_file, "batch file, one property per line");

  auto* sweep = app.add_subcommand("sweep", "evaluate a property over a parameter grid");
  add_common(sweep, paths);
  std::string sweep_param;
  std::string sweep_values;
  sweep->add_option("--param", sweep_param, "scrub_interval_days | coverage | mission_days")
      ->required();
  sweep->add_option("--values", sweep_values, "comma-separated grid values")->required();
  sweep->add_option("--property", property_text, "property text ({T} for mission_days)")
      ->required();
  sweep->add_option("--out", out_path, "CSV output path (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimates with confidence bounds");
  add_common(simulate, paths);
  std::vector<std::string> measure_args;
  seudep::SimConfig simcfg;
  simulate->add_option("--measure", measure_args,
                       "kind:state-expr[:time]; kinds: class-time, invariance, "
                       "transient-indicator, reach-time")
      ->required();
  simulate->add_option("--horizon", simcfg.horizon_days, "horizon in days")->required();
  simulate->add_option("--trajectories", simcfg.trajectories, "trajectory count");
  simulate->add_option("--seed", simcfg.master_seed, "master seed");
  simulate->add_option("--confidence", simcfg.confidence, "CI confidence level");
  simulate->add_option("--out", out_path, "CSV output path (default stdout)");

  auto* reproduce = app.add_subcommand("reproduce", "regenerate reference tables and figures");
  std::string target, data_dir = "data", out_dir = ".";
  reproduce->add_option("target", target, "table1|table3|table4|fig8|fig9|fig10|fig11|fig12|fig13")
      ->required();
  reproduce->add_option("--data-dir", data_dir, "fixture directory (default ./data)");
  reproduce->add_option("--out-dir", out_dir, "where to write CSV and verdict files");

  auto* exportc = app.add_subcommand("export", "write explicit-state .tra/.lab/.rew files");
  add_common(exportc, paths);
  exportc->add_option("--out", out_path, "output file prefix")->required();

  auto* schedule = app.add_subcommand("schedule", "list-schedule a CDFG and print the assignment");
  std::string alloc_text;
  schedule->add_option("--cdfg", paths.cdfg, "application CDFG JSON")->required();
  schedule->add_option("--alloc", alloc_text, "units per class, e.g. add=2,mul=2")->required();
  schedule->add_option("--out", out_path, "CSV output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    auto write_or_stdout = [&](const std::string& text) {
      if (out_path.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw seudep::error("cannot write " + out_path);
        out << text;
      }
    };

    if (check->parsed()) {
      auto inputs = seudep::harness::load_inputs(paths.library, paths.cdfg, paths.config);
      std::vector<std::string> properties;
      if (!property_text.empty()) properties.push_back(property_text);
      if (!property_file.empty()) {
        auto lines = seudep::harness::detail::split_property_lines(
            seudep::detail::read_file(property_file));
        properties.insert(properties.end(), lines.begin(), lines.end());
      }
      if (properties.empty()) throw seudep::error("check: no property given");
      return seudep::harness::cmd_check(inputs, properties, std::cout);
    }
    if (sweep->parsed()) {
      auto inputs = seudep::harness::load_inputs(paths.library, paths.cdfg, paths.config);
      seudep::harness::SweepSpec spec;
      spec.param = seudep::harness::SweepSpec::parse_param(sweep_param);
      std::istringstream vs(sweep_values);
      std::string item;
      while (std::getline(vs, item, ',')) spec.values.push_back(std::stod(item));
      std::ostringstream csv;
      int rc = seudep::harness::cmd_sweep(inputs, spec, property_text, csv);
      write_or_stdout(csv.str());
      return rc;
    }
    if (simulate->parsed()) {
      auto inputs = seudep::harness::load_inputs(paths.library, paths.cdfg, paths.config);
      auto model = seudep::harness::build(inputs);
      std::vector<seudep::Measure> measures;
      for (const auto& t : measure_args) measures.push_back(parse_measure_string(t, model));
      std::ostringstream csv;
      int rc = seudep::harness::cmd_simulate(inputs, simcfg, measures, csv);
      write_or_stdout(csv.str());
      return rc;
    }
    if (reproduce->parsed()) {
      return seudep::harness::cmd_reproduce(target, data_dir, out_dir, std::cout);
    }
    if (exportc->parsed()) {
      auto inputs = seudep::harness::load_inputs(paths.library, paths.cdfg, paths.config);
      return seudep::harness::cmd_export(inputs, out_path, std::cout);
    }
    if (schedule->parsed()) {
      seudep::Cdfg g = seudep::load_cdfg(paths.cdfg);
      std::ostringstream csv;
      int rc = seudep::harness::cmd_schedule(g, parse_alloc_string(alloc_text), csv);
      write_or_stdout(csv.str());
      return rc;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
