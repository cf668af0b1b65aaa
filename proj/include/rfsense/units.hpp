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

#include <cmath>
#include <compare>
#include <string>

#include "rfsense/errors.hpp"

namespace rfsense {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s, exact
inline constexpr double kPi = 3.14159265358979323846;

/// Absolute power on the dBm scale.
struct PowerLevel {
  double dbm = 0.0;

  static PowerLevel from_milliwatts(double mw);
  static PowerLevel from_watts(double w) { return from_milliwatts(w * 1e3); }

  double milliwatts() const;
  double watts() const { return milliwatts() * 1e-3; }

  friend auto operator<=>(const PowerLevel&, const PowerLevel&) = default;
};

/// Effective isotropic radiated power, P_tx * G_tx folded into one dBm figure.
struct Eirp {
  double dbm = 0.0;

  double watts() const;
  friend auto operator<=>(const Eirp&, const Eirp&) = default;
};

struct AntennaGain {
  double dbi = 0.0;
  friend auto operator<=>(const AntennaGain&, const AntennaGain&) = default;
};

class Frequency {
 public:
  constexpr Frequency() = default;
  static Frequency hz(double value);
  static Frequency mhz(double value) { return hz(value * 1e6); }

  constexpr double hertz() const { return hertz_; }
  constexpr double megahertz() const { return hertz_ * 1e-6; }
  double wavelength_m() const { return kSpeedOfLight / hertz_; }

  friend auto operator<=>(const Frequency&, const Frequency&) = default;

 private:
  constexpr explicit Frequency(double hz) : hertz_(hz) {}
  double hertz_ = 866.5e6;
};

class Distance {
 public:
  static Distance meters(double m);
  constexpr double meters() const { return meters_; }
  friend auto operator<=>(const Distance&, const Distance&) = default;

 private:
  constexpr explicit Distance(double m) : meters_(m) {}
  double meters_ = 1.0;
};

inline double mw_from_dbm(PowerLevel p) {
  detail::require(std::isfinite(p.dbm), "power level must be finite");
  return std::pow(10.0, p.dbm / 10.0);
}

inline PowerLevel dbm_from_mw(double mw) {
  detail::require(std::isfinite(mw) && mw > 0.0,
                  "milliwatt value must be finite and positive");
  return PowerLevel{10.0 * std::log10(mw)};
}

inline double db_from_ratio(double ratio) {
  detail::require(std::isfinite(ratio) && ratio > 0.0,
                  "power ratio must be finite and positive");
  return 10.0 * std::log10(ratio);
}

inline double ratio_from_db(double db) { return std::pow(10.0, db / 10.0); }

inline PowerLevel PowerLevel::from_milliwatts(double mw) {
  return dbm_from_mw(mw);
}
inline double PowerLevel::milliwatts() const { return mw_from_dbm(*this); }
inline double Eirp::watts() const { return mw_from_dbm(PowerLevel{dbm}) * 1e-3; }

inline Frequency Frequency::hz(double value) {
  detail::require(std::isfinite(value) && value > 0.0,
                  "frequency must be finite and > 0 Hz");
  return Frequency(value);
}

inline Distance Distance::meters(double m) {
  detail::require(std::isfinite(m) && m > 0.0,
                  "distance must be finite and > 0 m");
  return Distance(m);
}

}  // namespace rfsense
