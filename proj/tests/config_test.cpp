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

#include <string>

#include <gtest/gtest.h>

#include "rfsense/config.hpp"

namespace rfsense {
namespace {

const std::string kFixtures = RFSENSE_FIXTURE_DIR;

TEST(Config, DefaultDocumentIsValid) {
  const ConfigDocument doc;
  EXPECT_NO_THROW(doc.validate());
  const ConfigDocument parsed = parse_config("{}");
  EXPECT_EQ(serialize_config(parsed), serialize_config(doc));
  EXPECT_EQ(load_config("default").scenario.seed, 0u);
}

TEST(Config, RoundTripPreservesEffectiveValues) {
  ConfigDocument doc = load_config(kFixtures + "/office.json");
  doc.scenario.node.sensor.accuracy_bias = 0.75;
  doc.scenario.harvester.pump.max_output_w = 7.5e-6;
  doc.scenario.mode = PowerMode::Bypass;
  doc.scenario.seed = 99;
  doc.sweeps.search.step_db = 0.05;
  const std::string once = serialize_config(doc);
  const ConfigDocument back = parse_config(once);
  EXPECT_EQ(serialize_config(back), once);
  EXPECT_EQ(back.scenario.mode, PowerMode::Bypass);
  EXPECT_EQ(back.scenario.node.sensor.accuracy_bias, 0.75);
  EXPECT_EQ(back.scenario.seed, 99u);
  EXPECT_EQ(back.sweeps.frequencies_mhz, (std::vector<double>{850.0, 866.5, 880.0}));
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_THROW(load_config(kFixtures + "/unknown_key.json"), ConfigError);
  EXPECT_THROW(parse_config(R"({"readr": {}})"), ConfigError);
  try {
    parse_config(R"({"node": {"adc": {"bitz": 12}}})");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("config.node.adc.bitz"), std::string::npos);
  }
}

TEST(Config, SchemaAndTypeErrors) {
  EXPECT_THROW(parse_config(R"({"schema": "rfsense.scenario/2"})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"reader": {"eirp_dbm": "loud"}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"simulation": {"mode": "turbo"}})"), ConfigError);
  EXPECT_THROW(parse_config("{not json"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/rfsense.json"), IoError);
}

TEST(Config, InvalidValuesRejected) {
  EXPECT_THROW(parse_config(R"({"harvester": {"charge_pump": {"v_low": 3.0}}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"geometry": {"plf": 1.5}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"memory": {"user_bits": 4096}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"reader": {"eirp_dbm": 40.0}})"), ConfigError);
  EXPECT_NO_THROW(
      parse_config(R"({"reader": {"eirp_dbm": 40.0, "regulatory_check": false}})"));
}

TEST(Config, BypassThresholdFollowsRectifier) {
  const ConfigDocument a = parse_config(R"({"harvester": {"rectifier": {"stages": 4}}})");
  EXPECT_NEAR(a.scenario.harvester.bypass_threshold_v,
              ConfigDocument{}.scenario.harvester.bypass_threshold_v * 4.0 / 5.0, 1e-12);
  const ConfigDocument b = parse_config(R"({"harvester": {"bypass_threshold_v": 0.5}})");
  EXPECT_EQ(b.scenario.harvester.bypass_threshold_v, 0.5);
}

}  // namespace
}  // namespace rfsense
