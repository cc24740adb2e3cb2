// Copyright 2026 The Buzzwire Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Scripted operators: pure pursuit along the wire plus seeded, bounded
// tremor. They stand in for people in headless experiments.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "buzzwire/course.hpp"
#include "buzzwire/errors.hpp"
#include "buzzwire/geometry.hpp"

namespace buzzwire {

/// Uniform doubles in [0, 1) from a 64-bit Mersenne Twister. The bit
/// manipulation is spelled out so streams match across standard libraries.
class SeededStream {
 public:
  explicit SeededStream(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

struct OperatorPolicy {
  std::string name = "typical";
  double lookahead = 0.05;         // m
  double nominal_speed = 0.08;     // m/s
  double tremor_amplitude = 0.055;  // m, bound on the tremor offset norm
  double tremor_frequency = 0.5;    // Hz
  double reaction_delay = 0.25;    // s
  std::uint64_t noise_seed = 1;

  void validate() const {
    if (!(lookahead > 0.0)) throw ConfigError("policy.lookahead must be positive");
    if (!(nominal_speed > 0.0)) throw ConfigError("policy.nominal_speed must be positive");
    if (tremor_amplitude < 0.0) throw ConfigError("policy.tremor_amplitude must be >= 0");
    if (!(tremor_frequency > 0.0)) throw ConfigError("policy.tremor_frequency must be positive");
    if (reaction_delay < 0.0) throw ConfigError("policy.reaction_delay must be >= 0");
  }
};

inline std::vector<std::string> operator_preset_names() { return {"novice", "typical", "expert"}; }

inline OperatorPolicy operator_preset(const std::string& name) {
  OperatorPolicy p;
  p.name = name;
  if (name == "novice") {
    p.lookahead = 0.06;
    p.nominal_speed = 0.10;
    p.tremor_amplitude = 0.07;
    p.tremor_frequency = 0.6;
    p.reaction_delay = 0.4;
  } else if (name == "typical") {
    p.lookahead = 0.05;
    p.nominal_speed = 0.08;
    p.tremor_amplitude = 0.055;
    p.tremor_frequency = 0.5;
    p.reaction_delay = 0.25;
  } else if (name == "expert") {
    p.lookahead = 0.04;
    p.nominal_speed = 0.06;
    p.tremor_amplitude = 0.003;
    p.tremor_frequency = 0.4;
    p.reaction_delay = 0.1;
  } else {
    throw ConfigError("unknown operator preset '" + name + "'");
  }
  return p;
}

/// Stateful driver for one OperatorPolicy over one trial.
class ScriptedOperator {
 public:
  explicit ScriptedOperator(OperatorPolicy policy) : policy_(std::move(policy)) { policy_.validate(); }

  const OperatorPolicy& policy() const { return policy_; }

  /// Starts a trial with the handle at `start` (normally the robot's pose).
  void reset(const WireCourse& course, const Pose& start) {
    SeededStream rng(policy_.noise_seed);
    for (int axis = 0; axis < 3; ++axis) {
      for (int h = 0; h < 2; ++h) {
        auto& c = tremor_[static_cast<std::size_t>(axis * 2 + h)];
        const double base = policy_.tremor_frequency * (h == 0 ? 1.0 : 1.7);
        c.omega = 2.0 * M_PI * base * rng.uniform(0.8, 1.2);
        c.phase = 2.0 * M_PI * rng.uniform();
        c.weight = h == 0 ? 0.6 : 0.4;
      }
    }
    command_ = start.position;
    velocity_ = Vector3d::Zero();
    robot_s_ = course.project(start.position).s;
    target_s_ = robot_s_;
    history_.clear();
  }

  /// Noiseless pursuit command from the last step (the tremor-free handle).
  const Vector3d& nominal_position() const { return command_; }

  /// Tremor offset at time t; its norm never exceeds tremor_amplitude.
  Vector3d tremor(double t) const {
    if (policy_.tremor_amplitude == 0.0) return Vector3d::Zero();
    Vector3d v;
    for (int axis = 0; axis < 3; ++axis) {
      double s = 0.0;
      for (int h = 0; h < 2; ++h) {
        const auto& c = tremor_[static_cast<std::size_t>(axis * 2 + h)];
        s += c.weight * std::sin(c.omega * t + c.phase);
      }
      v[axis] = s;
    }
    // Each axis is bounded by amplitude/sqrt(3), so the norm never exceeds it.
    return v * (policy_.tremor_amplitude / std::sqrt(3.0));
  }

  /// Handle input for time t given the robot pose observed now. The operator
  /// reacts to the observation from `reaction_delay` seconds ago.
  Pose step(const Pose& observed_robot, const WireCourse& course, double t, double dt) {
    history_.push_back({t, observed_robot.position});
    while (history_.size() > 1 && history_[1].t <= t - policy_.reaction_delay + 1e-12) history_.pop_front();
    const Vector3d seen = history_.front().position;

    // Track the robot's arc coordinate locally so bends that pass close to
    // each other cannot make the estimate jump.
    robot_s_ = course.project_window(seen, robot_s_ - 0.05, robot_s_ + 0.15).s;
    target_s_ = std::max(target_s_, std::min(robot_s_ + policy_.lookahead, course.total_length()));

    // Head for the target at up to nominal_speed, easing in near it; the
    // velocity itself follows with a first-order lag so the command is smooth.
    const Vector3d to_target = course.point_at(target_s_) - command_;
    const double dist = to_target.norm();
    Vector3d v_des = Vector3d::Zero();
    if (dist > 1e-12) v_des = to_target * (std::min(policy_.nominal_speed, kApproachGain * dist) / dist);
    velocity_ += (v_des - velocity_) * std::min(1.0, dt / kVelocityLag);
    command_ += velocity_ * dt;

    const double cmd_s = course.project_window(command_, target_s_ - policy_.lookahead - 0.05, target_s_ + 0.01).s;
    const double h = 0.01;
    const Vector3d tangent = course.point_at(cmd_s + h) - course.point_at(cmd_s - h);
    return Pose(command_ + tremor(t), ring_facing(tangent));
  }

 private:
  struct Harmonic {
    double omega = 0.0;
    double phase = 0.0;
    double weight = 0.0;
  };
  struct Observation {
    double t;
    Vector3d position;
  };

  static constexpr double kApproachGain = 4.0;  // 1/s
  static constexpr double kVelocityLag = 0.15;  // s

  OperatorPolicy policy_;
  std::array<Harmonic, 6> tremor_{};
  Vector3d command_ = Vector3d::Zero();
  Vector3d velocity_ = Vector3d::Zero();
  double robot_s_ = 0.0;
  double target_s_ = 0.0;
  std::deque<Observation> history_;
};

}  // namespace buzzwire
