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

// Scenario configuration document. JSON, one section per component; every
// key is optional and falls back to the documented default, unknown keys are
// rejected. The schema is described in README.md.

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rfsense/errors.hpp"
#include "rfsense/gen2sim.hpp"

namespace rfsense {

inline constexpr const char* kConfigSchema = "rfsense.scenario/1";

struct SweepConfig {
  std::vector<double> frequencies_mhz = {840.0, 845.0, 850.0, 855.0, 860.0, 865.0, 866.5,
                                         870.0, 875.0, 880.0, 885.0, 890.0, 895.0, 900.0};
  // Turn-on measurement geometry (anechoic chamber, reader 1 m away).
  double turn_on_distance_m = 1.0;
  TurnOnSearch search;
  std::vector<double> distances_m = {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0,
                                     2.5,  3.0, 3.5,  4.0, 4.5,  4.8, 5.0,  5.5, 6.0};

  void validate() const {
    detail::require(!frequencies_mhz.empty(), "sweeps.frequencies_mhz is empty");
    for (double f : frequencies_mhz) detail::require(f > 0.0, "sweep frequencies must be > 0");
    detail::require(turn_on_distance_m > 0.0, "sweeps.turn_on_distance_m must be > 0");
    detail::require(search.step_db > 0.0, "sweeps.step_db must be > 0");
    detail::require(search.max_eirp_dbm >= search.min_eirp_dbm, "sweeps EIRP range empty");
    detail::require(search.probe_timeout > 0.0, "sweeps.probe_timeout_s must be > 0");
    detail::require(!distances_m.empty(), "sweeps.distances_m is empty");
    for (double d : distances_m) detail::require(d > 0.0, "sweep distances must be > 0");
  }
};

struct ConfigDocument {
  Scenario scenario;
  SweepConfig sweeps;

  void validate() const {
    scenario.validate();
    sweeps.validate();
  }
};

namespace detail {

// Walks one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown.
class Section {
 public:
  Section(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(path_ + "." + key + ": wrong type");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }

  Section sub(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    static const nlohmann::json kEmpty = nlohmann::json::object();
    return Section(it == j_.end() ? kEmpty : *it, path_ + "." + key);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(path_ + "." + it.key() + ": unknown key");
    }
  }

 private:
  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline PowerMode parse_mode(const std::string& s) {
  if (s == "boosted") return PowerMode::Boosted;
  if (s == "bypass") return PowerMode::Bypass;
  throw ConfigError("simulation.mode: expected \"boosted\" or \"bypass\", got \"" + s + "\"");
}

}  // namespace detail

inline ConfigDocument config_from_json(const nlohmann::json& j) {
  ConfigDocument doc;
  Scenario& s = doc.scenario;
  detail::Section root(j, "config");

  std::string schema = kConfigSchema;
  root.get("schema", schema);
  if (schema != kConfigSchema) {
    throw ConfigError("config.schema: unsupported schema \"" + schema + "\"");
  }

  {
    auto r = root.sub("reader");
    double mhz = s.reader.frequency.megahertz();
    r.get("eirp_dbm", s.reader.eirp.dbm);
    r.get("frequency_mhz", mhz);
    r.get("query_period_s", s.reader.query_period);
    r.get("read_duration_s", s.reader.read_duration);
    r.get("regulatory_check", s.reader.regulatory_check);
    r.finish();
    if (!(mhz > 0.0)) throw ConfigError("reader.frequency_mhz must be > 0");
    s.reader.frequency = Frequency::mhz(mhz);
  }
  {
    auto g = root.sub("geometry");
    g.get("distance_m", s.geometry.distance_m);
    g.get("plf", s.geometry.plf);
    g.get("node_gain_dbi", s.node_gain.dbi);
    g.finish();
  }
  {
    auto e = root.sub("environment");
    e.get("excess_loss_db", s.environment.excess_loss_db);
    e.get("bypass_in_situ_loss_db", s.environment.bypass_in_situ_loss_db);
    e.finish();
  }
  {
    auto h = root.sub("harvester");
    HarvesterConfig& hc = s.harvester;
    {
      auto r = h.sub("rectifier");
      RectifierModel& rm = hc.rectifier;
      double center = rm.center_freq.megahertz();
      r.get("stages", rm.stages);
      r.get("center_freq_mhz", center);
      r.get("detuning_rolloff_db_per_mhz2", rm.detuning_rolloff_db_per_mhz2);
      r.get("reference_dbm", rm.reference_dbm);
      r.get("reference_volts", rm.reference_volts);
      r.get("reference_stages", rm.reference_stages);
      r.get("peak_efficiency", rm.peak_efficiency);
      r.get("half_efficiency_dbm", rm.half_efficiency_dbm);
      r.finish();
      if (!(center > 0.0)) throw ConfigError("harvester.rectifier.center_freq_mhz must be > 0");
      rm.center_freq = Frequency::mhz(center);
      rm.validate();
    }
    {
      auto p = h.sub("charge_pump");
      p.get("v_start", hc.pump.v_start);
      p.get("v_high", hc.pump.v_high);
      p.get("v_low", hc.pump.v_low);
      p.get("pump_efficiency", hc.pump.pump_efficiency);
      p.get("max_output_w", hc.pump.max_output_w);
      p.finish();
    }
    h.get("capacitance_f", hc.capacitance);
    // Follows the (possibly overridden) rectifier unless given explicitly.
    hc.bypass_threshold_v =
        rectified_dc(PowerLevel{-9.0}, hc.rectifier.center_freq, hc.rectifier).volts;
    h.get("bypass_threshold_v", hc.bypass_threshold_v);
    h.finish();
  }
  {
    auto n = root.sub("node");
    NodeConfig& nc = s.node;
    n.get("node_id", nc.node_id);
    n.get("idle_active_power_w", nc.idle_active_power_w);
    {
      auto t = n.sub("sensor");
      t.get("v0", nc.sensor.v0);
      t.get("slope_v_per_c", nc.sensor.slope);
      t.get("accuracy_bias_c", nc.sensor.accuracy_bias);
      t.get("noise_sigma_c", nc.sensor.noise_sigma);
      t.finish();
    }
    {
      auto a = n.sub("adc");
      a.get("bits", nc.adc.bits);
      a.get("vref", nc.adc.vref);
      a.finish();
    }
    {
      auto t = n.sub("task");
      t.get("sample_energy_j", nc.task.sample_energy);
      t.get("i2c_write_energy_j", nc.task.i2c_write_energy);
      t.get("task_duration_s", nc.task.task_duration);
      t.finish();
    }
    n.finish();
  }
  {
    auto m = root.sub("memory");
    m.get("reserved_bits", s.memory.reserved_bits);
    m.get("epc_bits", s.memory.epc_bits);
    m.get("tid_bits", s.memory.tid_bits);
    m.get("user_bits", s.memory.user_bits);
    m.finish();
  }
  {
    auto m = root.sub("simulation");
    std::string mode(to_string(s.mode));
    m.get("mode", mode);
    s.mode = detail::parse_mode(mode);
    m.get("duration_s", s.duration);
    m.get("dt_s", s.dt);
    m.get("energy_trace_period_s", s.energy_trace_period);
    m.get("ambient_c", s.ambient_c);
    m.get("seed", s.seed);
    m.finish();
  }
  {
    auto w = root.sub("sweeps");
    SweepConfig& sw = doc.sweeps;
    w.get("frequencies_mhz", sw.frequencies_mhz);
    w.get("turn_on_distance_m", sw.turn_on_distance_m);
    w.get("step_db", sw.search.step_db);
    w.get("min_eirp_dbm", sw.search.min_eirp_dbm);
    w.get("max_eirp_dbm", sw.search.max_eirp_dbm);
    w.get("probe_timeout_s", sw.search.probe_timeout);
    w.get("distances_m", sw.distances_m);
    w.finish();
  }
  root.finish();

  try {
    doc.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  return doc;
}

/// Every effective value, defaults included.
inline nlohmann::json config_to_json(const ConfigDocument& doc) {
  const Scenario& s = doc.scenario;
  const HarvesterConfig& hc = s.harvester;
  const NodeConfig& nc = s.node;
  nlohmann::json j;
  j["schema"] = kConfigSchema;
  j["reader"] = {{"eirp_dbm", s.reader.eirp.dbm},
                 {"frequency_mhz", s.reader.frequency.megahertz()},
                 {"query_period_s", s.reader.query_period},
                 {"read_duration_s", s.reader.read_duration},
                 {"regulatory_check", s.reader.regulatory_check}};
  j["geometry"] = {{"distance_m", s.geometry.distance_m},
                   {"plf", s.geometry.plf},
                   {"node_gain_dbi", s.node_gain.dbi}};
  j["environment"] = {{"excess_loss_db", s.environment.excess_loss_db},
                      {"bypass_in_situ_loss_db", s.environment.bypass_in_situ_loss_db}};
  j["harvester"] = {
      {"rectifier",
       {{"stages", hc.rectifier.stages},
        {"center_freq_mhz", hc.rectifier.center_freq.megahertz()},
        {"detuning_rolloff_db_per_mhz2", hc.rectifier.detuning_rolloff_db_per_mhz2},
        {"reference_dbm", hc.rectifier.reference_dbm},
        {"reference_volts", hc.rectifier.reference_volts},
        {"reference_stages", hc.rectifier.reference_stages},
        {"peak_efficiency", hc.rectifier.peak_efficiency},
        {"half_efficiency_dbm", hc.rectifier.half_efficiency_dbm}}},
      {"charge_pump",
       {{"v_start", hc.pump.v_start},
        {"v_high", hc.pump.v_high},
        {"v_low", hc.pump.v_low},
        {"pump_efficiency", hc.pump.pump_efficiency},
        {"max_output_w", hc.pump.max_output_w}}},
      {"capacitance_f", hc.capacitance},
      {"bypass_threshold_v", hc.bypass_threshold_v}};
  j["node"] = {{"node_id", nc.node_id},
               {"idle_active_power_w", nc.idle_active_power_w},
               {"sensor",
                {{"v0", nc.sensor.v0},
                 {"slope_v_per_c", nc.sensor.slope},
                 {"accuracy_bias_c", nc.sensor.accuracy_bias},
                 {"noise_sigma_c", nc.sensor.noise_sigma}}},
               {"adc", {{"bits", nc.adc.bits}, {"vref", nc.adc.vref}}},
               {"task",
                {{"sample_energy_j", nc.task.sample_energy},
                 {"i2c_write_energy_j", nc.task.i2c_write_energy},
                 {"task_duration_s", nc.task.task_duration}}}};
  j["memory"] = {{"reserved_bits", s.memory.reserved_bits},
                 {"epc_bits", s.memory.epc_bits},
                 {"tid_bits", s.memory.tid_bits},
                 {"user_bits", s.memory.user_bits}};
  j["simulation"] = {{"mode", std::string(to_string(s.mode))},
                     {"duration_s", s.duration},
                     {"dt_s", s.dt},
                     {"energy_trace_period_s", s.energy_trace_period},
                     {"ambient_c", s.ambient_c},
                     {"seed", s.seed}};
  j["sweeps"] = {{"frequencies_mhz", doc.sweeps.frequencies_mhz},
                 {"turn_on_distance_m", doc.sweeps.turn_on_distance_m},
                 {"step_db", doc.sweeps.search.step_db},
                 {"min_eirp_dbm", doc.sweeps.search.min_eirp_dbm},
                 {"max_eirp_dbm", doc.sweeps.search.max_eirp_dbm},
                 {"probe_timeout_s", doc.sweeps.search.probe_timeout},
                 {"distances_m", doc.sweeps.distances_m}};
  return j;
}

inline ConfigDocument parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

inline std::string serialize_config(const ConfigDocument& doc) {
  return config_to_json(doc).dump(2) + "\n";
}

/// "default" (or empty) yields the built-in defaults; anything else is a path.
inline ConfigDocument load_config(const std::string& path_or_default) {
  if (path_or_default.empty() || path_or_default == "default") return ConfigDocument{};
  std::ifstream in(path_or_default);
  if (!in) throw IoError("cannot read config file '" + path_or_default + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace rfsense
