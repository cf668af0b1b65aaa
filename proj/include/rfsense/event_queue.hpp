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
#include <cstdint>
#include <queue>
#include <vector>

#include "rfsense/errors.hpp"

namespace rfsense {

/// Simulation time in integer nanoseconds. Periodic events built from whole
/// tick counts coincide exactly, which floating-point seconds would not.
class SimClock {
 public:
  using Ticks = std::int64_t;
  static constexpr Ticks kTicksPerSecond = 1'000'000'000;

  static Ticks to_ticks(double seconds) {
    detail::require(std::isfinite(seconds) && seconds >= 0.0,
                    "simulation time must be finite and >= 0");
    return static_cast<Ticks>(std::llround(seconds * kTicksPerSecond));
  }
  static double to_seconds(Ticks t) {
    return static_cast<double>(t) / kTicksPerSecond;
  }

  Ticks now() const { return now_; }
  double seconds() const { return to_seconds(now_); }
  void advance_to(Ticks t) {
    detail::require(t >= now_, "simulation clock cannot run backwards");
    now_ = t;
  }

 private:
  Ticks now_ = 0;
};

/// Min-queue on (time, insertion index): equal-time events come out in the
/// order they were pushed.
template <typename Payload>
class EventQueue {
 public:
  struct Event {
    SimClock::Ticks time;
    std::uint64_t seq;
    Payload payload;
  };

  void push(SimClock::Ticks time, Payload payload) {
    heap_.push(Event{time, next_seq_++, std::move(payload)});
  }

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  const Event& top() const { return heap_.top(); }

  Event pop() {
    Event e = heap_.top();
    heap_.pop();
    return e;
  }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_seq_ = 0;
};

}  // namespace rfsense
