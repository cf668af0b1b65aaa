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

// RF-DC rectifier and the SOI charge pump that meters rectified energy into a
// storage capacitor between two hysteresis thresholds.

#include <algorithm>
#include <cmath>
#include <string_view>

#include "rfsense/errors.hpp"
#include "rfsense/units.hpp"

namespace rfsense {

/// Cockcroft-Walton multiplier transfer model.
///
/// The open-circuit voltage follows the square root of the (detuning
/// attenuated) input power and scales linearly with the stage count. It is
/// anchored at a single calibration point: `reference_volts` out of a
/// `reference_stages`-stage ladder at `reference_dbm`. Detuning costs
/// `detuning_rolloff_db_per_mhz2 * (f - center)^2` dB of effective input.
///
/// DC output power uses a saturating efficiency
/// eta(P) = peak_efficiency * P / (P + P_half), so output power is monotone in
/// input power and never exceeds it.
struct RectifierModel {
  int stages = 5;
  Frequency center_freq = Frequency::mhz(866.5);
  double detuning_rolloff_db_per_mhz2 = 0.005;

  double reference_dbm = -14.0;
  double reference_volts = 0.35;
  int reference_stages = 5;

  double peak_efficiency = 0.6;
  double half_efficiency_dbm = -10.0;

  void validate() const {
    detail::require(stages > 0, "rectifier stages must be > 0");
    detail::require(reference_stages > 0, "reference stages must be > 0");
    detail::require(std::isfinite(detuning_rolloff_db_per_mhz2) &&
                        detuning_rolloff_db_per_mhz2 >= 0.0,
                    "detuning rolloff must be >= 0");
    detail::require(std::isfinite(reference_dbm), "reference dBm not finite");
    detail::require(std::isfinite(reference_volts) && reference_volts > 0.0,
                    "reference voltage must be > 0");
    detail::require(peak_efficiency >= 0.0 && peak_efficiency <= 1.0,
                    "peak efficiency must be in [0, 1]");
    detail::require(std::isfinite(half_efficiency_dbm),
                    "half-efficiency point not finite");
  }

  double detuning_loss_db(Frequency f) const {
    const double offset_mhz = f.megahertz() - center_freq.megahertz();
    return detuning_rolloff_db_per_mhz2 * offset_mhz * offset_mhz;
  }

  PowerLevel effective_input(PowerLevel p_in, Frequency f) const {
    return PowerLevel{p_in.dbm - detuning_loss_db(f)};
  }

  double efficiency(PowerLevel effective) const {
    const double p = effective.milliwatts();
    const double half = mw_from_dbm(PowerLevel{half_efficiency_dbm});
    return peak_efficiency * p / (p + half);
  }
};

struct RectifiedDc {
  double volts = 0.0;
  double watts = 0.0;
};

inline RectifiedDc rectified_dc(PowerLevel p_in, Frequency f,
                                const RectifierModel& model) {
  const PowerLevel eff = model.effective_input(p_in, f);
  RectifiedDc out;
  out.volts = model.reference_volts *
              (static_cast<double>(model.stages) / model.reference_stages) *
              std::pow(10.0, (eff.dbm - model.reference_dbm) / 20.0);
  out.watts = model.efficiency(eff) * eff.watts();
  return out;
}

/// S-882Z style hysteresis window. `max_output_w` bounds the power the pump
/// can push into the capacitor regardless of how much it is fed.
struct ChargePumpParams {
  double v_start = 0.35;
  double v_high = 2.4;
  double v_low = 1.85;
  double pump_efficiency = 0.5;
  double max_output_w = 5e-6;

  void validate() const {
    detail::require(v_start > 0.0 && v_start < v_low && v_low < v_high,
                    "charge pump thresholds must satisfy 0 < v_start < v_low "
                    "< v_high");
    detail::require(pump_efficiency > 0.0 && pump_efficiency <= 1.0,
                    "pump efficiency must be in (0, 1]");
    detail::require(max_output_w > 0.0, "pump max output must be > 0 W");
  }

  /// Power actually delivered into the storage capacitor.
  double inflow(double p_dc) const {
    return std::min(pump_efficiency * std::max(p_dc, 0.0), max_output_w);
  }
};

struct StorageCapacitor {
  double capacitance = 10e-6;
  double voltage = 0.0;

  double energy() const { return 0.5 * capacitance * voltage * voltage; }
  double energy_at(double v) const { return 0.5 * capacitance * v * v; }
  void set_energy(double joules) {
    voltage = std::sqrt(2.0 * std::max(joules, 0.0) / capacitance);
  }
};

enum class PumpPhase { Idle, Charging, Supplying };
enum class PowerMode { Boosted, Bypass };

inline std::string_view to_string(PumpPhase p) {
  switch (p) {
    case PumpPhase::Idle: return "idle";
    case PumpPhase::Charging: return "charging";
    case PumpPhase::Supplying: return "supplying";
  }
  return "?";
}

inline std::string_view to_string(PowerMode m) {
  return m == PowerMode::Boosted ? "boosted" : "bypass";
}

struct HarvesterState {
  PumpPhase phase = PumpPhase::Idle;
  StorageCapacitor cap;
  PowerMode mode = PowerMode::Boosted;
};

/// Energy released between the start and cutoff thresholds.
inline double energy_window(const ChargePumpParams& params,
                            const StorageCapacitor& cap) {
  return 0.5 * cap.capacitance *
         (params.v_high * params.v_high - params.v_low * params.v_low);
}

inline double charge_time(double p_dc, const ChargePumpParams& params,
                          const StorageCapacitor& cap) {
  if (!(p_dc > 0.0)) {
    throw NeverChargesError("charge_time: no DC input power, never charges");
  }
  return energy_window(params, cap) / params.inflow(p_dc);
}

inline bool bypass_operational(double v_dc, double threshold) {
  return v_dc >= threshold;
}

/// Harvester configuration shared by both power modes.
struct HarvesterConfig {
  RectifierModel rectifier;
  ChargePumpParams pump;
  double capacitance = 10e-6;
  // Rectifier voltage needed to run the regulator without the booster.
  // Default: the rectifier output at -9 dBm, center frequency.
  double bypass_threshold_v =
      rectified_dc(PowerLevel{-9.0}, rectifier.center_freq, rectifier).volts;

  void validate() const {
    rectifier.validate();
    pump.validate();
    detail::require(capacitance > 0.0, "storage capacitance must be > 0 F");
    detail::require(bypass_threshold_v > 0.0,
                    "bypass threshold must be > 0 V");
  }
};

struct StepResult {
  HarvesterState state;
  double delivered = 0.0;  // J handed to the load
  double stored = 0.0;     // J added to the capacitor by the pump
};

/// Advances the harvester by `dt` seconds.
///
/// `dc` is the rectifier output during the step, `load` the power the node
/// asks for. Threshold crossings are resolved at the end of the step, except
/// the cutoff which clamps exactly at v_low.
inline StepResult step(const HarvesterState& state, const RectifiedDc& dc,
                       double load, double dt, const HarvesterConfig& cfg) {
  detail::require(dt > 0.0, "harvester step: dt must be > 0 s");
  detail::require(dc.watts >= 0.0 && load >= 0.0,
                  "harvester step: powers must be >= 0");
  StepResult r{state, 0.0, 0.0};

  if (state.mode == PowerMode::Bypass) {
    if (bypass_operational(dc.volts, cfg.bypass_threshold_v)) {
      r.delivered = load * dt;
    }
    return r;
  }

  const ChargePumpParams& pp = cfg.pump;
  const bool oscillating = dc.volts >= pp.v_start;
  const double inflow = oscillating ? pp.inflow(dc.watts) * dt : 0.0;
  StorageCapacitor& cap = r.state.cap;

  switch (state.phase) {
    case PumpPhase::Idle:
    case PumpPhase::Charging: {
      if (!oscillating) {
        r.state.phase = PumpPhase::Idle;
        return r;
      }
      r.state.phase = PumpPhase::Charging;
      cap.set_energy(cap.energy() + inflow);
      r.stored = inflow;
      if (cap.voltage >= pp.v_high) r.state.phase = PumpPhase::Supplying;
      return r;
    }
    case PumpPhase::Supplying: {
      const double floor = cap.energy_at(pp.v_low);
      const double before = cap.energy();
      const double after = before + inflow - load * dt;
      r.stored = inflow;
      if (after <= floor) {
        r.delivered = std::max(before + inflow - floor, 0.0);
        cap.voltage = pp.v_low;
        r.state.phase = PumpPhase::Charging;
      } else {
        r.delivered = load * dt;
        cap.set_energy(after);
      }
      return r;
    }
  }
  return r;
}

}  // namespace rfsense
