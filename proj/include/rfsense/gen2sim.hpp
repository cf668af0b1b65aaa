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

// Single-tag scenario engine: a reader issuing periodic inventory queries, the
// free-space link, the harvester, the duty-cycled node and the tag memory it
// writes into. Reproduces the turn-on sweep, the read-rate vs distance sweep
// and the temperature trace experiments.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rfsense/epc.hpp"
#include "rfsense/errors.hpp"
#include "rfsense/event_queue.hpp"
#include "rfsense/harvester.hpp"
#include "rfsense/linkbudget.hpp"
#include "rfsense/node.hpp"
#include "rfsense/units.hpp"

namespace rfsense {

// European UHF RFID limits: 3.2 W EIRP in 865-868 MHz.
inline constexpr double kRegulatoryMaxEirpW = 3.2;
inline constexpr double kRegulatoryLowMhz = 865.0;
inline constexpr double kRegulatoryHighMhz = 868.0;

struct ReaderConfig {
  Eirp eirp{35.05};
  Frequency frequency = Frequency::mhz(866.5);
  double query_period = 50e-3;  // s
  double read_duration = 1e-3;  // s, inventory round length
  bool regulatory_check = true;

  void validate() const {
    detail::require(std::isfinite(eirp.dbm), "reader EIRP must be finite");
    detail::require(query_period > 0.0, "query period must be > 0 s");
    detail::require(read_duration >= 0.0 && read_duration < query_period,
                    "read duration must be in [0, query_period)");
    if (regulatory_check) {
      const double cap_dbm = 10.0 * std::log10(kRegulatoryMaxEirpW * 1e3);
      if (eirp.dbm > cap_dbm + 1e-9) {
        throw ConfigError("reader EIRP exceeds the 3.2 W regulatory limit");
      }
      const double mhz = frequency.megahertz();
      if (mhz < kRegulatoryLowMhz || mhz > kRegulatoryHighMhz) {
        throw ConfigError("reader frequency outside the 865-868 MHz band");
      }
    }
  }
};

/// Losses on top of free space. The defaults are the office calibration; an
/// anechoic measurement has none.
struct Environment {
  double excess_loss_db = 3.0;
  // Applied only in bypass mode: without the booster the node browns out
  // under load well before free space says it should.
  double bypass_in_situ_loss_db = 4.6;

  static Environment anechoic() { return Environment{0.0, 0.0}; }

  void validate() const {
    detail::require(excess_loss_db >= 0.0 && bypass_in_situ_loss_db >= 0.0,
                    "environment losses must be >= 0 dB");
  }

  double loss_db(PowerMode mode) const {
    return excess_loss_db + (mode == PowerMode::Bypass ? bypass_in_situ_loss_db : 0.0);
  }
};

struct TracePoint {
  double t = 0.0;
  double celsius = 0.0;
};

struct Scenario {
  ReaderConfig reader;
  LinkGeometry geometry;
  AntennaGain node_gain{1.8};
  Environment environment;
  HarvesterConfig harvester;
  NodeConfig node;
  BankLayout memory;
  PowerMode mode = PowerMode::Boosted;
  double duration = 60.0;  // s
  double dt = 1e-3;        // s, harvester integration step
  double energy_trace_period = 0.1;  // s
  double ambient_c = 25.0;
  // Sample-and-hold ambient temperature; overrides ambient_c when present.
  std::vector<TracePoint> temperature;
  std::uint64_t seed = 0;
  // Stop at this many reads (0 = run the full duration).
  std::size_t stop_after_reads = 0;

  void validate() const {
    reader.validate();
    geometry.validate();
    detail::require(std::isfinite(node_gain.dbi), "node gain must be finite");
    environment.validate();
    harvester.validate();
    node.validate();
    memory.validate();
    detail::require(std::isfinite(duration) && duration >= 0.0,
                    "scenario duration must be >= 0 s");
    detail::require(dt > 0.0, "integration step must be > 0 s");
    detail::require(energy_trace_period > 0.0, "energy trace period must be > 0 s");
    for (std::size_t i = 1; i < temperature.size(); ++i) {
      detail::require(temperature[i].t > temperature[i - 1].t,
                      "temperature trace times must be strictly increasing");
    }
  }

  double ambient_at(double t) const {
    if (temperature.empty()) return ambient_c;
    auto it = std::upper_bound(
        temperature.begin(), temperature.end(), t,
        [](double v, const TracePoint& p) { return v < p.t; });
    if (it == temperature.begin()) return temperature.front().celsius;
    return std::prev(it)->celsius;
  }

  /// RF power at the node's rectifier input, environment losses included.
  PowerLevel node_input_power() const {
    const PowerLevel fs = received_power(reader.eirp, node_gain, reader.frequency, geometry);
    return PowerLevel{fs.dbm - environment.loss_db(mode)};
  }
};

struct ReadRecord {
  double timestamp = 0.0;
  Epc96 epc;
  double decoded_c = 0.0;
  // Bookkeeping for trace comparisons.
  double sampled_at = 0.0;
  double true_c = 0.0;
};

struct EnergySample {
  double t = 0.0;
  PumpPhase phase = PumpPhase::Idle;
  double cap_volts = 0.0;
  double harvested_j = 0.0;
  double delivered_j = 0.0;
};

struct EnergyTotals {
  double harvested_j = 0.0;       // integral of rectifier DC output
  double stored_j = 0.0;          // pumped into the capacitor
  double delivered_j = 0.0;       // handed to the node
  double cap_gain_j = 0.0;        // final minus initial capacitor energy
  double task_delivered_j = 0.0;  // delivered while a task was running
  double task_energy_j = 0.0;     // sum of TaskOutcome::energy_used committed
  std::size_t tasks_started = 0;
  std::size_t tasks_committed = 0;
  std::size_t bursts = 0;  // Charging -> Supplying transitions

  /// harvested - (delivered + cap gain); never negative for a passive node.
  double conservation_margin_j() const {
    return harvested_j - (delivered_j + cap_gain_j);
  }
};

struct ReadLog {
  std::vector<ReadRecord> reads;
  std::vector<EnergySample> energy;
  EnergyTotals totals;
  double duration = 0.0;
  std::optional<TagMemory> final_memory;
};

inline double read_rate(const ReadLog& log, double duration) {
  detail::require(duration > 0.0, "read_rate: duration must be > 0 s");
  return 60.0 * static_cast<double>(log.reads.size()) / duration;
}

namespace detail {

enum class SimEvent { Query, Tick, EnergySample };

struct RunningTask {
  bool active = false;
  SimClock::Ticks done_at = 0;
  double load_w = 0.0;
  TaskOutcome outcome;
  double sampled_at = 0.0;
  double true_c = 0.0;
};

}  // namespace detail

/// Runs one scenario to completion. Deterministic for a fixed scenario.
inline ReadLog run_scenario(const Scenario& s) {
  s.validate();
  using Ticks = SimClock::Ticks;

  const Ticks end = SimClock::to_ticks(s.duration);
  const Ticks dt_ticks = std::max<Ticks>(1, SimClock::to_ticks(s.dt));
  const double dt = SimClock::to_seconds(dt_ticks);
  const Ticks query_ticks = std::max<Ticks>(1, SimClock::to_ticks(s.reader.query_period));
  const Ticks sample_ticks = std::max<Ticks>(1, SimClock::to_ticks(s.energy_trace_period));

  // Fixed geometry: the rectifier sees constant input for the whole run.
  const RectifiedDc dc =
      rectified_dc(s.node_input_power(), s.reader.frequency, s.harvester.rectifier);
  const bool boosted = s.mode == PowerMode::Boosted;
  const bool rf_threshold_met =
      boosted ? dc.volts >= s.harvester.pump.v_start
              : bypass_operational(dc.volts, s.harvester.bypass_threshold_v);

  HarvesterState hs;
  hs.mode = s.mode;
  hs.cap.capacitance = s.harvester.capacitance;
  hs.cap.voltage = 0.0;
  const double initial_cap_energy = hs.cap.energy();

  TagMemory memory(s.memory);
  bool memory_valid = false;
  bool fresh = false;
  std::uint32_t seq = 0;
  double committed_sampled_at = 0.0;
  double committed_true_c = 0.0;
  detail::RunningTask task;
  SensorNoise noise(s.seed);

  ReadLog log;
  log.duration = s.duration;
  EnergyTotals& tot = log.totals;

  SimClock clock;
  EventQueue<detail::SimEvent> queue;
  // Queries go in first so they precede node activity at equal timestamps.
  queue.push(query_ticks, detail::SimEvent::Query);
  queue.push(dt_ticks, detail::SimEvent::Tick);
  queue.push(0, detail::SimEvent::EnergySample);

  auto start_task = [&](Ticks now, double available, double load_w) {
    const double t_now = SimClock::to_seconds(now);
    const double ambient = s.ambient_at(t_now);
    TaskOutcome out = execute_task_cycle(s.node, available, ambient, t_now, noise);
    if (!out.epc_written) return;
    // Whole steps at load_w that cover both the nominal duration and the energy.
    const double needed = std::max(s.node.task.task_duration,
                                   load_w > 0.0 ? s.node.task.energy() / load_w : 0.0);
    const auto steps = static_cast<Ticks>(std::ceil(needed / dt - 1e-9));
    task.active = true;
    task.done_at = now + std::max<Ticks>(1, steps) * dt_ticks;
    task.load_w = load_w;
    task.outcome = out;
    task.sampled_at = t_now;
    task.true_c = ambient;
    ++tot.tasks_started;
  };

  auto finish_task = [&]() {
    const Epc96 epc = encode_epc(s.node.node_id, seq++, task.outcome.code.value);
    memory = commit(std::move(memory), epc);
    memory_valid = true;
    fresh = true;
    committed_sampled_at = task.sampled_at;
    committed_true_c = task.true_c;
    tot.task_energy_j += task.outcome.energy_used;
    ++tot.tasks_committed;
    task.active = false;
  };


  while (!queue.empty() && queue.top().time <= end) {
    const auto ev = queue.pop();
    clock.advance_to(ev.time);
    const Ticks now = clock.now();

    switch (ev.payload) {
      case detail::SimEvent::Query: {
        const bool readable = boosted ? fresh : memory_valid;
        if (readable && rf_threshold_met) {
          if (auto epc = read_epc(memory)) {
            const SensorSample sample = decode_epc(*epc);
            ReadRecord r;
            r.timestamp = clock.seconds() + s.reader.read_duration;
            r.epc = *epc;
            r.decoded_c = decode_temperature(sample.code, s.node.sensor, s.node.adc);
            r.sampled_at = committed_sampled_at;
            r.true_c = committed_true_c;
            log.reads.push_back(r);
            fresh = false;
          }
        }
        queue.push(now + query_ticks, detail::SimEvent::Query);
        break;
      }
      case detail::SimEvent::Tick: {
        double load = 0.0;
        if (boosted) {
          if (hs.phase == PumpPhase::Supplying) {
            load = task.active ? task.load_w : s.node.idle_active_power_w;
          }
        } else if (task.active) {
          load = task.load_w;
        }
        const PumpPhase before = hs.phase;
        const StepResult r = step(hs, dc, load, dt, s.harvester);
        hs = r.state;
        tot.harvested_j += dc.watts * dt;
        tot.stored_j += r.stored;
        tot.delivered_j += r.delivered;
        if (task.active) tot.task_delivered_j += r.delivered;

        if (boosted) {
          if (before == PumpPhase::Supplying && hs.phase != PumpPhase::Supplying) {
            task.active = false;  // cutoff before the write landed
          }
          if (task.active && now >= task.done_at) finish_task();
          if (before != PumpPhase::Supplying && hs.phase == PumpPhase::Supplying) {
            ++tot.bursts;
            const double available =
                hs.cap.energy() - hs.cap.energy_at(s.harvester.pump.v_low);
            start_task(now, available, s.node.task.power());
          }
        } else {
          const bool up = bypass_operational(dc.volts, s.harvester.bypass_threshold_v);
          if (!up) {
            task.active = false;
          } else {
            if (task.active && now >= task.done_at) finish_task();
            if (!task.active) {
              const double load_w = std::min(s.node.task.power(), dc.watts);
              // Power-limited supply: the task is funded as it runs.
              const double available =
                  load_w > 0.0 ? s.node.task.energy() : 0.0;
              if (load_w > 0.0) start_task(now, available, load_w);
            }
          }
        }
        queue.push(now + dt_ticks, detail::SimEvent::Tick);
        break;
      }
      case detail::SimEvent::EnergySample: {
        log.energy.push_back(EnergySample{clock.seconds(), hs.phase, hs.cap.voltage,
                                          tot.harvested_j, tot.delivered_j});
        queue.push(now + sample_ticks, detail::SimEvent::EnergySample);
        break;
      }
    }
    if (s.stop_after_reads > 0 && log.reads.size() >= s.stop_after_reads) break;
  }

  tot.cap_gain_j = hs.cap.energy() - initial_cap_energy;
  log.final_memory = memory;
  return log;
}

// ---------------------------------------------------------------------------
// Sweeps. Each point is an independent scenario; `workers` > 1 runs them on
// separate threads and results are merged back in input order.

template <typename Result>
std::vector<Result> run_jobs(const std::vector<std::function<Result()>>& jobs,
                             unsigned workers) {
  std::vector<Result> out(jobs.size());
  if (workers <= 1 || jobs.size() <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) out[i] = jobs[i]();
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> pool;
  const unsigned n = std::min<unsigned>(workers, static_cast<unsigned>(jobs.size()));
  for (unsigned w = 0; w < n; ++w) {
    pool.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i = next++; i < jobs.size(); i = next++) out[i] = jobs[i]();
    }));
  }
  for (auto& f : pool) f.get();
  return out;
}

struct TurnOnPoint {
  Frequency frequency;
  PowerMode mode = PowerMode::Boosted;
  bool energizable = false;
  double eirp_on_dbm = 0.0;
  double sensitivity_dbm = 0.0;
};

struct TurnOnSearch {
  double min_eirp_dbm = -10.0;
  double max_eirp_dbm = 40.0;
  double step_db = 0.1;
  double probe_timeout = 60.0;  // s of simulated time per probe
};

/// Lab turn-on measurement: free space (no excess loss), reader at the base
/// scenario's geometry, EIRP raised on a `step_db` grid until the node
/// returns one correct sample. The grid is bisected, which relies on
/// success being monotone in EIRP.
inline TurnOnPoint find_turn_on(const Scenario& base, Frequency f, PowerMode mode,
                                const TurnOnSearch& search = {}) {
  detail::require(search.step_db > 0.0, "turn-on search step must be > 0 dB");
  detail::require(search.max_eirp_dbm >= search.min_eirp_dbm,
                  "turn-on search range is empty");
  Scenario probe = base;
  probe.reader.frequency = f;
  probe.reader.regulatory_check = false;
  probe.environment = Environment::anechoic();
  probe.mode = mode;
  probe.duration = search.probe_timeout;
  probe.stop_after_reads = 1;
  probe.temperature.clear();

  auto eirp_at = [&](long k) { return search.min_eirp_dbm + k * search.step_db; };
  auto succeeds = [&](long k) {
    probe.reader.eirp = Eirp{eirp_at(k)};
    return !run_scenario(probe).reads.empty();
  };

  const long k_max = static_cast<long>(
      std::floor((search.max_eirp_dbm - search.min_eirp_dbm) / search.step_db + 1e-9));
  TurnOnPoint pt;
  pt.frequency = f;
  pt.mode = mode;
  if (!succeeds(k_max)) return pt;

  long lo = -1, hi = k_max;  // succeeds(hi), !succeeds(lo) (lo = -1 sentinel)
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    if (succeeds(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  pt.energizable = true;
  pt.eirp_on_dbm = eirp_at(hi);
  pt.sensitivity_dbm =
      sensitivity_from_turn_on(Eirp{pt.eirp_on_dbm}, base.node_gain, f, base.geometry).dbm;
  return pt;
}

/// One row per (frequency, mode), frequencies outermost, in input order.
inline std::vector<TurnOnPoint> turn_on_sweep(const std::vector<Frequency>& freqs,
                                              const Scenario& base,
                                              const std::vector<PowerMode>& modes,
                                              const TurnOnSearch& search = {},
                                              unsigned workers = 1) {
  std::vector<std::function<TurnOnPoint()>> jobs;
  for (const Frequency& f : freqs) {
    for (PowerMode m : modes) {
      jobs.emplace_back([&base, &search, f, m] { return find_turn_on(base, f, m, search); });
    }
  }
  return run_jobs(jobs, workers);
}

struct RangePoint {
  double distance_m = 0.0;
  PowerMode mode = PowerMode::Boosted;
  std::size_t reads = 0;
  double reads_per_min = 0.0;
};

inline Scenario at_distance(const Scenario& base, double distance_m, PowerMode mode) {
  Scenario s = base;
  s.geometry.distance_m = distance_m;
  s.mode = mode;
  return s;
}

/// Read rate vs distance for each mode: distances outermost, then `modes`.
inline std::vector<RangePoint> range_sweep(const std::vector<double>& distances,
                                           const Scenario& base,
                                           const std::vector<PowerMode>& modes = {PowerMode::Boosted,
                                                                                  PowerMode::Bypass},
                                           unsigned workers = 1) {
  for (double d : distances) {
    detail::require(std::isfinite(d) && d > 0.0, "range sweep distances must be > 0 m");
  }
  detail::require(base.duration > 0.0, "range sweep needs a positive duration");
  std::vector<std::function<RangePoint()>> jobs;
  for (double d : distances) {
    for (PowerMode m : modes) {
      jobs.emplace_back([&base, d, m] {
        const Scenario s = at_distance(base, d, m);
        const ReadLog log = run_scenario(s);
        return RangePoint{d, m, log.reads.size(), read_rate(log, s.duration)};
      });
    }
  }
  return run_jobs(jobs, workers);
}

/// Largest distance at which a run still logs at least one read, bisected
/// to `tolerance_m` in [lo_m, hi_m]. Returns 0 if even lo_m fails.
inline double operating_range(const Scenario& base, PowerMode mode, double lo_m = 0.05,
                              double hi_m = 50.0, double tolerance_m = 1e-3) {
  auto reads_at = [&](double d) { return !run_scenario(at_distance(base, d, mode)).reads.empty(); };
  if (!reads_at(lo_m)) return 0.0;
  if (reads_at(hi_m)) return hi_m;
  while (hi_m - lo_m > tolerance_m) {
    const double mid = 0.5 * (lo_m + hi_m);
    if (reads_at(mid)) {
      lo_m = mid;
    } else {
      hi_m = mid;
    }
  }
  return lo_m;
}

struct TraceRow {
  double t = 0.0;
  double true_c = 0.0;
  double decoded_c = 0.0;
  double err_c = 0.0;
};

/// Replays a reference temperature trace through the node and reader. One row
/// per successful read: read time, reference temperature at the instant the
/// node sampled, the temperature decoded from the EPC, and their difference.
inline std::vector<TraceRow> temperature_trace(const Scenario& base,
                                               const std::vector<TracePoint>& trace) {
  if (trace.empty()) throw InvalidArgument("temperature_trace: empty trace");
  Scenario s = base;
  s.temperature = trace;
  const ReadLog log = run_scenario(s);
  std::vector<TraceRow> rows;
  rows.reserve(log.reads.size());
  for (const ReadRecord& r : log.reads) {
    rows.push_back(TraceRow{r.timestamp, r.true_c, r.decoded_c, r.decoded_c - r.true_c});
  }
  return rows;
}

inline double max_abs_error(const std::vector<TraceRow>& rows) {
  double m = 0.0;
  for (const TraceRow& r : rows) m = std::max(m, std::abs(r.err_c));
  return m;
}

}  // namespace rfsense
