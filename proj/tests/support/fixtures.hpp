#pragma once

#include <string>

#include "seudep/cdfg.hpp"
#include "seudep/charlib.hpp"
#include "seudep/configuration.hpp"
#include "seudep/mrm.hpp"

namespace seudep::testing {

inline std::string data_dir() { return SEUDEP_DATA_DIR; }

struct Fixture {
  CharacterizationLibrary lib;
  Cdfg fir;

  Fixture() {
    lib = load_library(data_dir() + "/virtex5_heo.json");
    fir = load_cdfg(data_dir() + "/fir16.cdfg.json");
  }

  Configuration config(const std::string& name, double scrub_days = 1.0,
                       double coverage = 0.99) const {
    Configuration cfg = load_configuration(data_dir() + "/" + name + ".json");
    cfg.scrub_interval_days = scrub_days;
    cfg.coverage = coverage;
    return cfg;
  }

  MarkovRewardModel model(const std::string& name, double scrub_days = 1.0,
                          double coverage = 0.99) const {
    return build_model(config(name, scrub_days, coverage), lib, fir);
  }

  double lambda(const std::string& component) const {
    return failure_rate_per_day(lib.component(component), lib.environment("HEO"));
  }
};

}  // namespace seudep::testing
