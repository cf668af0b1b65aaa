// Copyright 2026 The rfsense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: runs the experiments and writes plot-ready CSV.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rfsense/experiments.hpp"

namespace {

struct Common {
  std::string config = "default";
  std::string out = ".";
  std::uint64_t seed = 0;
  bool seed_given = false;
  unsigned workers = 1;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "Scenario config (JSON path or 'default')");
  sub->add_option("--out", c.out, "Output directory for CSV files");
  sub->add_option_function<std::uint64_t>(
      "--seed",
      [&c](const std::uint64_t& v) {
        c.seed = v;
        c.seed_given = true;
      },
      "Random seed (default: config value, 0)");
  sub->add_option("--workers", c.workers, "Parallel scenario workers")
      ->check(CLI::PositiveNumber);
}

rfsense::ConfigDocument load(const Common& c) {
  rfsense::ConfigDocument doc = rfsense::load_config(c.config);
  if (c.seed_given) doc.scenario.seed = c.seed;
  return doc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rfsense: passive UHF RFID sensor node simulator"};
  app.require_subcommand(1);

  Common common;
  std::string input;
  double inflow_uw = 5.0;

  auto* sens = app.add_subcommand("sensitivity-sweep", "Turn-on sensitivity vs frequency");
  add_common(sens, common);
  auto* range = app.add_subcommand("range-sweep", "Read rate vs distance, both power modes");
  add_common(range, common);
  auto* trace = app.add_subcommand("trace", "Replay a temperature trace through the node");
  add_common(trace, common);
  trace->add_option("--input", input, "CSV with columns time_s,temp_c")->required();
  auto* duty = app.add_subcommand("duty-cycle", "Boosted charge/burst cycle for an inflow");
  add_common(duty, common);
  duty->add_option("--inflow-uw", inflow_uw, "Effective capacitor inflow in microwatts");
  auto* ingest = app.add_subcommand("ingest", "Sensitivity from measured turn-on EIRPs");
  add_common(ingest, common);
  ingest->add_option("--input", input,
                     "CSV with columns freq_mhz,eirp_on_dbm,distance_m,plf,node_gain_dbi")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    rfsense::RunOptions opt;
    opt.out_dir = common.out;
    opt.workers = common.workers;
    rfsense::CommandResult res;
    if (*sens) {
      res = rfsense::cmd_sensitivity_sweep(load(common), opt);
    } else if (*range) {
      res = rfsense::cmd_range_sweep(load(common), opt);
    } else if (*trace) {
      res = rfsense::cmd_trace(load(common), input, opt);
    } else if (*duty) {
      res = rfsense::cmd_duty_cycle(load(common), inflow_uw, opt);
    } else if (*ingest) {
      std::vector<std::string> diags;
      res = rfsense::cmd_ingest(input, opt, &diags);
      for (const auto& d : diags) std::cerr << "rfsense: " << d << '\n';
    }
    std::cout << res.summary << " -> " << res.csv_path.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "rfsense: error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
