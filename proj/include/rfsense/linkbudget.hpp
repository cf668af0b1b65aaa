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

// Free-space link budget between the reader and the node's harvesting
// antenna. Everything is carried in dB so microwatt-scale results never
// suffer from cancellation.

#include <cmath>

#include "rfsense/errors.hpp"
#include "rfsense/units.hpp"

namespace rfsense {

/// Reader-to-node separation plus polarization loss factor (fraction of
/// power surviving the polarization mismatch, 0.5 for circular-to-linear).
struct LinkGeometry {
  double distance_m = 1.0;
  double plf = 0.5;

  void validate() const {
    detail::require(std::isfinite(distance_m) && distance_m > 0.0,
                    "link distance must be > 0 m");
    detail::require(std::isfinite(plf) && plf > 0.0 && plf <= 1.0,
                    "polarization loss factor must be in (0, 1]");
  }
};

/// (lambda / (4 pi d))^2
inline double friis_factor(Frequency f, double distance_m) {
  detail::require(std::isfinite(distance_m) && distance_m > 0.0,
                  "friis_factor: distance must be > 0 m");
  const double ratio = f.wavelength_m() / (4.0 * kPi * distance_m);
  return ratio * ratio;
}

inline double friis_factor(Frequency f, Distance d) {
  return friis_factor(f, d.meters());
}

inline double friis_factor_db(Frequency f, double distance_m) {
  return db_from_ratio(friis_factor(f, distance_m));
}

/// Distance at which the Friis factor is exactly one.
inline double unity_gain_distance(Frequency f) {
  return f.wavelength_m() / (4.0 * kPi);
}

inline PowerLevel received_power(Eirp eirp, AntennaGain node_gain, Frequency f,
                                 const LinkGeometry& geo) {
  geo.validate();
  return PowerLevel{eirp.dbm + node_gain.dbi +
                    friis_factor_db(f, geo.distance_m) +
                    db_from_ratio(geo.plf)};
}

// Sensitivity estimate from a measured turn-on EIRP. Same arithmetic as
// received_power: the node's sensitivity is the power it received at the
// lowest EIRP that woke it up.
inline PowerLevel sensitivity_from_turn_on(Eirp eirp_on, AntennaGain node_gain,
                                           Frequency f,
                                           const LinkGeometry& geo) {
  return received_power(eirp_on, node_gain, f, geo);
}

/// Distance at which received_power falls to `sensitivity`. Closed form;
/// throws NoRangeError when the budget is not positive at any distance
/// beyond the unity-gain point.
inline double max_range(Eirp eirp, PowerLevel sensitivity, AntennaGain node_gain,
                        Frequency f, double plf) {
  detail::require(std::isfinite(plf) && plf > 0.0 && plf <= 1.0,
                  "polarization loss factor must be in (0, 1]");
  detail::require(std::isfinite(sensitivity.dbm) && std::isfinite(eirp.dbm),
                  "max_range: non-finite power");
  // Margin available for the (lambda/4 pi d)^2 term.
  const double margin_db =
      eirp.dbm + node_gain.dbi + db_from_ratio(plf) - sensitivity.dbm;
  if (!(margin_db >= 0.0)) {
    throw NoRangeError(
        "max_range: EIRP + gain + plf does not reach the sensitivity");
  }
  return unity_gain_distance(f) * std::pow(10.0, margin_db / 20.0);
}

}  // namespace rfsense
