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

// Duty-cycled MCU: linear analog temperature sensor, N-bit ADC, and the
// sample/I2C-write task that runs whenever the harvester can fund it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>

#include "rfsense/errors.hpp"

namespace rfsense {

/// v(T) = v0 + slope * T, with a fixed accuracy bias and optional Gaussian
/// noise, both in degrees C at the sensor input.
struct TemperatureSensor {
  double v0 = 1.300;
  double slope = -0.0055;
  double accuracy_bias = 0.0;
  double noise_sigma = 0.0;

  void validate() const {
    detail::require(std::isfinite(v0), "sensor intercept not finite");
    detail::require(std::isfinite(slope) && slope != 0.0,
                    "sensor slope must be finite and non-zero");
    detail::require(std::isfinite(accuracy_bias), "sensor bias not finite");
    detail::require(noise_sigma >= 0.0, "sensor noise sigma must be >= 0");
  }

  double volts(double celsius) const { return v0 + slope * celsius; }
};

struct Adc {
  int bits = 10;
  double vref = 1.5;

  void validate() const {
    detail::require(bits > 0 && bits <= 24, "ADC bits must be in [1, 24]");
    detail::require(vref > 0.0, "ADC vref must be > 0 V");
  }

  std::uint32_t max_code() const { return (1u << bits) - 1u; }
  double lsb_volts() const { return vref / max_code(); }
  double volts(std::uint32_t code) const {
    return static_cast<double>(code) / max_code() * vref;
  }
};

struct AdcCode {
  std::uint32_t value = 0;
  bool clamped = false;  // analog input was outside [0, vref]

  friend bool operator==(const AdcCode&, const AdcCode&) = default;
};

struct TaskProfile {
  double sample_energy = 3e-6;     // J
  double i2c_write_energy = 5e-6;  // J
  double task_duration = 10e-3;    // s

  void validate() const {
    detail::require(sample_energy >= 0.0 && i2c_write_energy >= 0.0 &&
                        task_duration > 0.0,
                    "task energies must be >= 0 and duration > 0");
  }

  double energy() const { return sample_energy + i2c_write_energy; }
  double power() const { return energy() / task_duration; }
};

struct NodeConfig {
  TemperatureSensor sensor;
  Adc adc;
  TaskProfile task;
  // Regulator + MCU draw while powered but not running the task.
  double idle_active_power_w = 0.8e-3;
  int node_id = 1;

  void validate() const {
    sensor.validate();
    adc.validate();
    task.validate();
    detail::require(idle_active_power_w >= 0.0, "idle power must be >= 0 W");
    detail::require(node_id >= 0 && node_id <= 255,
                    "node_id must be in [0, 255]");
  }
};

/// Seeded noise source; one per simulation instance.
class SensorNoise {
 public:
  explicit SensorNoise(std::uint64_t seed) : engine_(seed) {}

  double draw(double sigma) {
    if (sigma <= 0.0) return 0.0;
    return std::normal_distribution<double>(0.0, sigma)(engine_);
  }

 private:
  std::mt19937_64 engine_;
};

inline AdcCode quantize(double volts, const Adc& adc) {
  AdcCode code;
  double v = volts;
  if (v < 0.0 || v > adc.vref) {
    code.clamped = true;
    v = std::clamp(v, 0.0, adc.vref);
  }
  code.value = static_cast<std::uint32_t>(std::lround(v / adc.vref * adc.max_code()));
  return code;
}

inline AdcCode sense(const TemperatureSensor& sensor, const Adc& adc,
                     double t_ambient, SensorNoise& noise) {
  const double t = t_ambient + sensor.accuracy_bias + noise.draw(sensor.noise_sigma);
  return quantize(sensor.volts(t), adc);
}

inline AdcCode sense(const TemperatureSensor& sensor, const Adc& adc,
                     double t_ambient, std::uint64_t rng_seed) {
  SensorNoise noise(rng_seed);
  return sense(sensor, adc, t_ambient, noise);
}

inline double decode_temperature(std::uint32_t code, const TemperatureSensor& sensor,
                                 const Adc& adc) {
  detail::require(code <= adc.max_code(), "ADC code out of range");
  return (adc.volts(code) - sensor.v0) / sensor.slope;
}

/// Half an LSB expressed in degrees C.
inline double quantization_bound_c(const TemperatureSensor& sensor, const Adc& adc) {
  return adc.lsb_volts() / std::abs(sensor.slope) / 2.0;
}

struct TaskOutcome {
  AdcCode code;
  bool epc_written = false;
  double energy_used = 0.0;
  double timestamp = 0.0;  // s, when the write lands
};

/// Runs one sample + I2C write if `available` joules cover it. The caller
/// commits the resulting code to tag memory at `timestamp`.
inline TaskOutcome execute_task_cycle(const NodeConfig& node, double available,
                                      double t_ambient, double clock,
                                      SensorNoise& noise) {
  TaskOutcome out;
  out.timestamp = clock;
  if (available < node.task.energy()) return out;
  out.code = sense(node.sensor, node.adc, t_ambient, noise);
  out.epc_written = true;
  out.energy_used = node.task.energy();
  out.timestamp = clock + node.task.task_duration;
  return out;
}

}  // namespace rfsense
