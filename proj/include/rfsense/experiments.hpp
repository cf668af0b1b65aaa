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

#pragma once

// The CLI's subcommands as library calls: each takes a loaded config, writes
// its CSV under an output directory and returns a one-line summary.
//
// CSV dialect: comma separated, header row, '.' decimal point, LF endings,
// fixed decimal places per column so files are byte-stable.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rfsense/config.hpp"
#include "rfsense/errors.hpp"
#include "rfsense/gen2sim.hpp"
#include "rfsense/harvester.hpp"
#include "rfsense/linkbudget.hpp"

namespace rfsense {

inline std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s(buf);
  // "-0.000" prints as "0.000".
  if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

namespace csv {

inline std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  for (auto& c : cells) {
    const auto b = c.find_first_not_of(" \t");
    const auto e = c.find_last_not_of(" \t");
    c = b == std::string::npos ? std::string() : c.substr(b, e - b + 1);
  }
  return cells;
}

inline bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stod(s, &pos);
  } catch (const std::exception&) {
    return false;
  }
  return pos == s.size() && std::isfinite(out);
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace csv

// --- table formatting -------------------------------------------------------

inline std::string sensitivity_csv(const std::vector<TurnOnPoint>& pts) {
  std::string out = "freq_mhz,sensitivity_dbm,mode\n";
  for (const auto& p : pts) {
    out += fixed(p.frequency.megahertz(), 3) + ',' +
           (p.energizable ? fixed(p.sensitivity_dbm, 2) : std::string("not-energizable")) + ',' +
           std::string(to_string(p.mode)) + '\n';
  }
  return out;
}

inline std::string range_csv(const std::vector<RangePoint>& pts) {
  std::string out = "distance_m,reads_per_min,mode\n";
  for (const auto& p : pts) {
    out += fixed(p.distance_m, 3) + ',' + fixed(p.reads_per_min, 3) + ',' +
           std::string(to_string(p.mode)) + '\n';
  }
  return out;
}

inline std::string trace_csv(const std::vector<TraceRow>& rows) {
  std::string out = "t_s,true_c,decoded_c,err_c\n";
  for (const auto& r : rows) {
    out += fixed(r.t, 3) + ',' + fixed(r.true_c, 3) + ',' + fixed(r.decoded_c, 3) + ',' +
           fixed(r.err_c, 3) + '\n';
  }
  return out;
}

// --- inputs ----------------------------------------------------------------

/// time_s,temp_c with a header row. Throws on malformed rows; an empty
/// trace is an error.
inline std::vector<TracePoint> parse_trace_csv(std::string_view text) {
  std::vector<TracePoint> trace;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++lineno;
    const auto cells = csv::split(line);
    if (cells.size() == 1 && cells[0].empty()) continue;
    if (header) {
      header = false;
      if (cells.size() == 2 && cells[0] == "time_s" && cells[1] == "temp_c") continue;
      throw ConfigError("trace line 1: expected header 'time_s,temp_c'");
    }
    TracePoint p;
    if (cells.size() != 2 || !csv::parse_double(cells[0], p.t) ||
        !csv::parse_double(cells[1], p.celsius)) {
      throw ConfigError("trace line " + std::to_string(lineno) + ": malformed row");
    }
    if (!trace.empty() && p.t <= trace.back().t) {
      throw ConfigError("trace line " + std::to_string(lineno) + ": time not increasing");
    }
    trace.push_back(p);
  }
  if (trace.empty()) throw ConfigError("empty trace");
  return trace;
}

struct MeasurementRow {
  double freq_mhz = 0.0;
  double eirp_on_dbm = 0.0;
  double distance_m = 0.0;
  double plf = 0.0;
  double node_gain_dbi = 0.0;
};

struct IngestResult {
  struct Row {
    MeasurementRow input;
    double sensitivity_dbm = 0.0;
  };
  std::vector<Row> rows;
  std::size_t skipped = 0;
  std::vector<std::string> diagnostics;  // "line N: ..."
};

/// Turns measured turn-on EIRPs into sensitivities. Bad rows are reported
/// with their line number and skipped.
inline IngestResult ingest_measurements(std::string_view text) {
  static constexpr const char* kColumns[] = {"freq_mhz", "eirp_on_dbm", "distance_m", "plf",
                                             "node_gain_dbi"};
  IngestResult res;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++lineno;
    auto cells = csv::split(line);
    if (cells.size() == 1 && cells[0].empty()) continue;
    if (header) {
      header = false;
      bool ok = cells.size() == 5;
      for (std::size_t i = 0; ok && i < 5; ++i) ok = cells[i] == kColumns[i];
      if (!ok) {
        throw ConfigError(
            "measurements line 1: expected header "
            "'freq_mhz,eirp_on_dbm,distance_m,plf,node_gain_dbi'");
      }
      continue;
    }
    auto bad = [&](const std::string& why) {
      ++res.skipped;
      res.diagnostics.push_back("line " + std::to_string(lineno) + ": " + why);
    };
    MeasurementRow m;
    double* fields[] = {&m.freq_mhz, &m.eirp_on_dbm, &m.distance_m, &m.plf, &m.node_gain_dbi};
    if (cells.size() != 5) {
      bad("expected 5 columns, got " + std::to_string(cells.size()));
      continue;
    }
    bool parsed = true;
    for (std::size_t i = 0; i < 5 && parsed; ++i) {
      if (!csv::parse_double(cells[i], *fields[i])) {
        bad(std::string("bad number in column ") + kColumns[i]);
        parsed = false;
      }
    }
    if (!parsed) continue;
    try {
      const PowerLevel s = sensitivity_from_turn_on(
          Eirp{m.eirp_on_dbm}, AntennaGain{m.node_gain_dbi}, Frequency::mhz(m.freq_mhz),
          LinkGeometry{m.distance_m, m.plf});
      res.rows.push_back({m, s.dbm});
    } catch (const Error& e) {
      bad(e.what());
    }
  }
  return res;
}

inline std::string ingest_csv(const IngestResult& r) {
  std::string out = "freq_mhz,sensitivity_dbm\n";
  for (const auto& row : r.rows) {
    out += fixed(row.input.freq_mhz, 3) + ',' + fixed(row.sensitivity_dbm, 2) + '\n';
  }
  return out;
}

// --- duty cycle --------------------------------------------------------------

struct DutyCycle {
  double inflow_w = 0.0;        // effective power into the capacitor
  double energy_window_j = 0.0;
  double charge_time_s = 0.0;
  double burst_s = 0.0;         // time to drain the window under load
  double reads_per_min = 0.0;   // one read per burst
};

/// Steady-state boosted cycle for a given effective inflow: charge the window,
/// then run one task and idle down to the cutoff.
inline DutyCycle duty_cycle(double inflow_w, const HarvesterConfig& h, const NodeConfig& n) {
  if (!(inflow_w > 0.0)) throw NeverChargesError("duty cycle: inflow must be > 0 W");
  StorageCapacitor cap;
  cap.capacitance = h.capacitance;
  DutyCycle d;
  d.inflow_w = inflow_w;
  d.energy_window_j = energy_window(h.pump, cap);
  d.charge_time_s = d.energy_window_j / inflow_w;
  const double task_net = n.task.power() - inflow_w;
  const double idle_net = n.idle_active_power_w - inflow_w;
  if (task_net <= 0.0 || idle_net <= 0.0) {
    throw InvalidArgument("duty cycle: inflow exceeds the node's draw, no cutoff");
  }
  const double after_task = d.energy_window_j - task_net * n.task.task_duration;
  d.burst_s = after_task > 0.0 ? n.task.task_duration + after_task / idle_net
                               : d.energy_window_j / task_net;
  d.reads_per_min = 60.0 / (d.charge_time_s + d.burst_s);
  return d;
}

inline std::string duty_cycle_csv(const DutyCycle& d) {
  return "inflow_uw,energy_window_uj,charge_time_s,burst_s,reads_per_min\n" +
         fixed(d.inflow_w * 1e6, 3) + ',' + fixed(d.energy_window_j * 1e6, 4) + ',' +
         fixed(d.charge_time_s, 4) + ',' + fixed(d.burst_s, 4) + ',' +
         fixed(d.reads_per_min, 3) + '\n';
}

// --- subcommands ------------------------------------------------------------

struct RunOptions {
  std::filesystem::path out_dir = ".";
  unsigned workers = 1;
};

struct CommandResult {
  std::filesystem::path csv_path;
  std::string summary;
};

inline Scenario turn_on_base(const ConfigDocument& cfg) {
  Scenario base = cfg.scenario;
  base.geometry.distance_m = cfg.sweeps.turn_on_distance_m;
  return base;
}

inline CommandResult cmd_sensitivity_sweep(const ConfigDocument& cfg, const RunOptions& opt) {
  std::vector<Frequency> freqs;
  for (double f : cfg.sweeps.frequencies_mhz) freqs.push_back(Frequency::mhz(f));
  const auto pts = turn_on_sweep(freqs, turn_on_base(cfg),
                                 {PowerMode::Boosted, PowerMode::Bypass}, cfg.sweeps.search,
                                 opt.workers);
  CommandResult r{opt.out_dir / "sensitivity_sweep.csv", {}};
  csv::write_file(r.csv_path, sensitivity_csv(pts));

  std::string best[2];
  double best_s[2] = {INFINITY, INFINITY};
  for (const auto& p : pts) {
    const int m = p.mode == PowerMode::Boosted ? 0 : 1;
    if (p.energizable && p.sensitivity_dbm < best_s[m]) {
      best_s[m] = p.sensitivity_dbm;
      best[m] = fixed(p.frequency.megahertz(), 1);
    }
  }
  r.summary = "sensitivity-sweep: " + std::to_string(pts.size()) + " points; best boosted " +
              (best[0].empty() ? "n/a" : fixed(best_s[0], 2) + " dBm @ " + best[0] + " MHz") +
              ", best bypass " +
              (best[1].empty() ? "n/a" : fixed(best_s[1], 2) + " dBm @ " + best[1] + " MHz");
  return r;
}

inline CommandResult cmd_range_sweep(const ConfigDocument& cfg, const RunOptions& opt) {
  const auto pts = range_sweep(cfg.sweeps.distances_m, cfg.scenario,
                               {PowerMode::Boosted, PowerMode::Bypass}, opt.workers);
  CommandResult r{opt.out_dir / "range_sweep.csv", {}};
  csv::write_file(r.csv_path, range_csv(pts));
  double last[2] = {0.0, 0.0};
  for (const auto& p : pts) {
    if (p.reads > 0) {
      double& l = last[p.mode == PowerMode::Boosted ? 0 : 1];
      l = std::max(l, p.distance_m);
    }
  }
  r.summary = "range-sweep: " + std::to_string(pts.size()) +
              " points; farthest distance with reads: boosted " + fixed(last[0], 2) +
              " m, bypass " + fixed(last[1], 2) + " m";
  return r;
}

inline CommandResult cmd_trace(const ConfigDocument& cfg, const std::filesystem::path& input,
                               const RunOptions& opt) {
  const auto trace = parse_trace_csv(csv::read_file(input));
  const auto rows = temperature_trace(cfg.scenario, trace);
  CommandResult r{opt.out_dir / "trace.csv", {}};
  csv::write_file(r.csv_path, trace_csv(rows));
  r.summary = "trace: " + std::to_string(rows.size()) + " reads; max |error| " +
              fixed(max_abs_error(rows), 3) + " C";
  return r;
}

inline CommandResult cmd_duty_cycle(const ConfigDocument& cfg, double inflow_uw,
                                    const RunOptions& opt) {
  const DutyCycle d = duty_cycle(inflow_uw * 1e-6, cfg.scenario.harvester, cfg.scenario.node);
  CommandResult r{opt.out_dir / "duty_cycle.csv", {}};
  csv::write_file(r.csv_path, duty_cycle_csv(d));
  r.summary = "duty-cycle: energy window " + fixed(d.energy_window_j * 1e6, 2) +
              " uJ, charge time " + fixed(d.charge_time_s, 2) + " s, burst " +
              fixed(d.burst_s * 1e3, 1) + " ms, " + fixed(d.reads_per_min, 1) + " reads/min";
  return r;
}

inline CommandResult cmd_ingest(const std::filesystem::path& input, const RunOptions& opt,
                                std::vector<std::string>* diagnostics = nullptr) {
  const IngestResult res = ingest_measurements(csv::read_file(input));
  CommandResult r{opt.out_dir / "ingest.csv", {}};
  csv::write_file(r.csv_path, ingest_csv(res));
  if (diagnostics) *diagnostics = res.diagnostics;
  r.summary = "ingest: " + std::to_string(res.rows.size()) + " rows converted, " +
              std::to_string(res.skipped) + " skipped";
  return r;
}

}  // namespace rfsense
