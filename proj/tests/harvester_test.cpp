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

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "rfsense/harvester.hpp"

namespace rfsense {
namespace {

const Frequency kCenter = Frequency::mhz(866.5);

HarvesterState boosted_at(PumpPhase phase, double volts) {
  HarvesterState s;
  s.mode = PowerMode::Boosted;
  s.phase = phase;
  s.cap.capacitance = 10e-6;
  s.cap.voltage = volts;
  return s;
}

TEST(Rectifier, BoostedTurnOnAnchor) {
  const RectifierModel m;
  EXPECT_EQ(rectified_dc(PowerLevel{-14.0}, kCenter, m).volts, 0.35);
}

TEST(Rectifier, FarBelowSensitivity) {
  const RectifiedDc dc = rectified_dc(PowerLevel{-60.0}, kCenter, RectifierModel{});
  EXPECT_LT(dc.volts, 0.35);
  EXPECT_LT(dc.watts, 1e-12);
}

TEST(Rectifier, DetuningCostsSensitivity) {
  // 890 MHz is 23.5 MHz off center: 0.005 * 23.5^2 = 2.76 dB down.
  const RectifiedDc dc = rectified_dc(PowerLevel{-14.0}, Frequency::mhz(890), RectifierModel{});
  EXPECT_LT(dc.volts, 0.35);
  EXPECT_NEAR(dc.volts, 0.25468627664891663, 1e-12);
}

TEST(Rectifier, VoltageScalesWithStages) {
  RectifierModel m;
  const double five = rectified_dc(PowerLevel{-14}, kCenter, m).volts;
  m.stages = 3;
  EXPECT_NEAR(rectified_dc(PowerLevel{-14}, kCenter, m).volts, five * 3.0 / 5.0, 1e-15);
}

TEST(Rectifier, PassivityAndMonotonicityProperty) {
  const RectifierModel m;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> p(-50, 20), f(840, 900), dp(0.001, 5);
  for (int i = 0; i < 5000; ++i) {
    const PowerLevel in{p(rng)};
    const Frequency fr = Frequency::mhz(f(rng));
    const RectifiedDc a = rectified_dc(in, fr, m);
    const RectifiedDc b = rectified_dc(PowerLevel{in.dbm + dp(rng)}, fr, m);
    EXPECT_LE(a.watts, in.watts());
    EXPECT_GE(a.watts, 0.0);
    EXPECT_GE(b.volts, a.volts);
    EXPECT_GE(b.watts, a.watts);
    const RectifiedDc c = rectified_dc(in, kCenter, m);
    EXPECT_GE(c.volts, a.volts);
    EXPECT_GE(c.watts, a.watts);
    const double eta = m.efficiency(m.effective_input(in, fr));
    EXPECT_GE(eta, 0.0);
    EXPECT_LE(eta, 1.0);
  }
}

TEST(EnergyWindow, Examples) {
  const ChargePumpParams p;
  StorageCapacitor cap;
  EXPECT_NEAR(energy_window(p, cap), 11.6875e-6, 1e-15);
  ChargePumpParams flat = p;
  flat.v_low = flat.v_high;
  EXPECT_EQ(energy_window(flat, cap), 0.0);
  StorageCapacitor twice;
  twice.capacitance = 20e-6;
  EXPECT_NEAR(energy_window(p, twice), 2 * energy_window(p, cap), 1e-18);
}

TEST(ChargeTime, Examples) {
  const ChargePumpParams p;  // efficiency 0.5
  const StorageCapacitor cap;
  EXPECT_NEAR(charge_time(10e-6, p, cap), 2.3375, 1e-12);  // 5 uW effective
  ChargePumpParams wide = p;
  wide.max_output_w = 1.0;
  EXPECT_NEAR(charge_time(20e-6, wide, cap), charge_time(10e-6, wide, cap) / 2, 1e-12);
  EXPECT_NEAR(charge_time(2 * 11.6875e-6, wide, cap), 1.0, 1e-12);
  EXPECT_THROW(charge_time(0.0, p, cap), NeverChargesError);
  EXPECT_THROW(charge_time(-1e-6, p, cap), NeverChargesError);
}

TEST(ChargeTime, SaturatesAtPumpOutputLimit) {
  const ChargePumpParams p;
  const StorageCapacitor cap;
  EXPECT_NEAR(charge_time(1e-3, p, cap), 2.3375, 1e-12);
  EXPECT_GT(charge_time(5e-6, p, cap), charge_time(6e-6, p, cap));
}

TEST(BypassOperational, CalibratedThreshold) {
  const HarvesterConfig cfg;
  const auto v = [&](double dbm) {
    return rectified_dc(PowerLevel{dbm}, kCenter, cfg.rectifier).volts;
  };
  EXPECT_TRUE(bypass_operational(v(-9.0), cfg.bypass_threshold_v));
  EXPECT_FALSE(bypass_operational(v(-9.1), cfg.bypass_threshold_v));
  EXPECT_FALSE(bypass_operational(0.0, cfg.bypass_threshold_v));
  EXPECT_NEAR(cfg.bypass_threshold_v, 0.35 * std::pow(10.0, 0.25), 1e-12);
}

TEST(Step, ChargesThroughWindowToSupplying) {
  const HarvesterConfig cfg;
  const RectifiedDc dc{1.0, 10e-6};  // 5 uW into the capacitor
  HarvesterState s = boosted_at(PumpPhase::Charging, 1.85);
  for (int i = 0; i < 2337; ++i) s = step(s, dc, 0.0, 1e-3, cfg).state;
  EXPECT_EQ(s.phase, PumpPhase::Charging);
  EXPECT_LT(s.cap.voltage, 2.4);
  s = step(s, dc, 0.0, 1e-3, cfg).state;
  EXPECT_EQ(s.phase, PumpPhase::Supplying);
  EXPECT_NEAR(s.cap.voltage, 2.4, 1e-3);
}

TEST(Step, IdleWithoutInputIsUnchanged) {
  const HarvesterConfig cfg;
  const HarvesterState s = boosted_at(PumpPhase::Idle, 0.7);
  const StepResult r = step(s, RectifiedDc{0.0, 0.0}, 0.0, 1e-3, cfg);
  EXPECT_EQ(r.state.phase, PumpPhase::Idle);
  EXPECT_EQ(r.state.cap.voltage, 0.7);
  EXPECT_EQ(r.delivered, 0.0);
}

TEST(Step, DrainStopsExactlyAtCutoff) {
  const HarvesterConfig cfg;
  const HarvesterState s = boosted_at(PumpPhase::Supplying, 2.4);
  const StepResult r = step(s, RectifiedDc{0.0, 0.0}, 11.6875e-6 / 1e-3, 1e-3, cfg);
  EXPECT_EQ(r.state.phase, PumpPhase::Charging);
  EXPECT_EQ(r.state.cap.voltage, 1.85);
  EXPECT_NEAR(r.delivered, 11.6875e-6, 1e-15);

  // Asking for more than the window still delivers only the window.
  const StepResult over = step(s, RectifiedDc{0.0, 0.0}, 1.0, 1e-3, cfg);
  EXPECT_EQ(over.state.cap.voltage, 1.85);
  EXPECT_NEAR(over.delivered, 11.6875e-6, 1e-15);
}

TEST(Step, BelowStartVoltageGoesIdle) {
  const HarvesterConfig cfg;
  const HarvesterState s = boosted_at(PumpPhase::Charging, 1.0);
  const StepResult r = step(s, RectifiedDc{0.3, 1e-6}, 0.0, 1e-3, cfg);
  EXPECT_EQ(r.state.phase, PumpPhase::Idle);
  EXPECT_EQ(r.state.cap.voltage, 1.0);
}

TEST(Step, BypassDeliversOnlyAboveThreshold) {
  const HarvesterConfig cfg;
  HarvesterState s;
  s.mode = PowerMode::Bypass;
  EXPECT_NEAR(step(s, RectifiedDc{cfg.bypass_threshold_v, 1e-4}, 5e-5, 1e-3, cfg).delivered,
              5e-8, 1e-20);
  EXPECT_EQ(step(s, RectifiedDc{cfg.bypass_threshold_v * 0.99, 1e-4}, 5e-5, 1e-3, cfg).delivered,
            0.0);
}

TEST(Step, RejectsNonPositiveDt) {
  const HarvesterConfig cfg;
  EXPECT_THROW(step(HarvesterState{}, RectifiedDc{}, 0.0, 0.0, cfg), InvalidArgument);
  EXPECT_THROW(step(HarvesterState{}, RectifiedDc{}, 0.0, -1e-3, cfg), InvalidArgument);
}

// Random input schedules exercise the state machine invariants together.
struct Trajectory {
  std::vector<HarvesterState> states;
  std::vector<RectifiedDc> inputs;
  double harvested = 0, delivered = 0;
};

Trajectory random_run(std::uint64_t seed, const HarvesterConfig& cfg) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> p(-25, 5), frac(0, 1);
  Trajectory t;
  HarvesterState s = boosted_at(PumpPhase::Idle, 0.0);
  t.states.push_back(s);
  const double dt = 1e-3;
  for (int i = 0; i < 20000; ++i) {
    // Input power holds for a while, then jumps.
    if (i % 500 == 0) {
      t.inputs.push_back(rectified_dc(PowerLevel{p(rng)}, Frequency::mhz(866.5), cfg.rectifier));
    }
    const RectifiedDc dc = t.inputs.back();
    const double load = s.phase == PumpPhase::Supplying ? 1e-4 + 1e-3 * frac(rng) : 0.0;
    const StepResult r = step(s, dc, load, dt, cfg);
    t.harvested += dc.watts * dt;
    t.delivered += r.delivered;
    s = r.state;
    t.states.push_back(s);
  }
  return t;
}

TEST(StepProperties, ConservationBoundsHysteresisDeterminism) {
  const HarvesterConfig cfg;
  const double eps_v = 0.01;  // one step of inflow is far below this
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Trajectory t = random_run(seed, cfg);
    const double gain = t.states.back().cap.energy() - t.states.front().cap.energy();
    EXPECT_LE(gain + t.delivered, t.harvested + 1e-15) << "seed " << seed;

    for (std::size_t i = 1; i < t.states.size(); ++i) {
      const auto& prev = t.states[i - 1];
      const auto& cur = t.states[i];
      EXPECT_GE(cur.cap.voltage, 0.0);
      EXPECT_LE(cur.cap.voltage, cfg.pump.v_high + eps_v);
      if (cur.phase == PumpPhase::Supplying) {
        EXPECT_GT(cur.cap.voltage, cfg.pump.v_low);
        // Supplying is only entered from Charging.
        EXPECT_TRUE(prev.phase == PumpPhase::Supplying || prev.phase == PumpPhase::Charging);
      }
      if (prev.phase == PumpPhase::Supplying && cur.phase == PumpPhase::Charging) {
        EXPECT_EQ(cur.cap.voltage, cfg.pump.v_low);
      }
    }

    const Trajectory again = random_run(seed, cfg);
    ASSERT_EQ(again.states.size(), t.states.size());
    for (std::size_t i = 0; i < t.states.size(); ++i) {
      ASSERT_EQ(again.states[i].phase, t.states[i].phase);
      ASSERT_EQ(again.states[i].cap.voltage, t.states[i].cap.voltage);
    }
  }
}

TEST(StepProperties, NoChargingToIdleWhileOscillating) {
  const HarvesterConfig cfg;
  HarvesterState s = boosted_at(PumpPhase::Charging, 1.0);
  const RectifiedDc dc{cfg.pump.v_start, 2e-6};
  for (int i = 0; i < 10000; ++i) {
    s = step(s, dc, s.phase == PumpPhase::Supplying ? 1e-3 : 0.0, 1e-3, cfg).state;
    ASSERT_NE(s.phase, PumpPhase::Idle);
  }
}

}  // namespace
}  // namespace rfsense
