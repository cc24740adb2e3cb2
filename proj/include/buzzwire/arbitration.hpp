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

// User-editable arbitration: five factors, the 3-vector theta, the fixed
// 6x3 mask, and the per-axis blend of autonomy and human commands.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "buzzwire/apf.hpp"
#include "buzzwire/errors.hpp"
#include "buzzwire/geometry.hpp"

namespace buzzwire {

enum class Factor { Speed = 0, DepthAssist, Turnability, Safety, Responsiveness };

inline constexpr std::array<Factor, 5> kAllFactors{Factor::Speed, Factor::DepthAssist, Factor::Turnability,
                                                   Factor::Safety, Factor::Responsiveness};

inline constexpr std::string_view factor_name(Factor f) {
  constexpr std::array<std::string_view, 5> names{"speed", "depth_assist", "turnability", "safety",
                                                  "responsiveness"};
  return names[static_cast<std::size_t>(f)];
}

inline std::optional<Factor> parse_factor(std::string_view name) {
  for (auto f : kAllFactors)
    if (factor_name(f) == name) return f;
  return std::nullopt;
}

enum class EditDirection { Increase, Decrease };

/// Five factors on [0.1, 1.0], held as integer multiples of the 0.05 quantum
/// so values stay exact through any number of edits.
class FactorSet {
 public:
  static constexpr int kMinSteps = 2;   // 0.10
  static constexpr int kMaxSteps = 20;  // 1.00
  static constexpr double kQuantum = 0.05;

  FactorSet() { steps_.fill(10); }

  /// Rounds each value to the nearest quantum; throws if outside [0.1, 1].
  static FactorSet from_values(double speed, double depth_assist, double turnability, double safety,
                               double responsiveness) {
    FactorSet f;
    const std::array<double, 5> v{speed, depth_assist, turnability, safety, responsiveness};
    for (std::size_t i = 0; i < 5; ++i) f.set(kAllFactors[i], v[i]);
    return f;
  }

  double value(Factor f) const { return steps_[idx(f)] / 20.0; }
  int steps(Factor f) const { return steps_[idx(f)]; }
  /// Presentation scale [10, 100].
  int ui_value(Factor f) const { return steps_[idx(f)] * 5; }

  void set(Factor f, double value) {
    const double q = std::round(value / kQuantum);
    if (!std::isfinite(value) || q < kMinSteps || q > kMaxSteps || std::abs(q * kQuantum - value) > 1e-9)
      throw ConfigError("factor " + std::string(factor_name(f)) + " must be a multiple of 0.05 in [0.1, 1]");
    steps_[idx(f)] = static_cast<int>(q);
  }

  void set_steps(Factor f, int steps) { steps_[idx(f)] = std::clamp(steps, kMinSteps, kMaxSteps); }

  double speed() const { return value(Factor::Speed); }
  double depth_assist() const { return value(Factor::DepthAssist); }
  double turnability() const { return value(Factor::Turnability); }
  double safety() const { return value(Factor::Safety); }
  double responsiveness() const { return value(Factor::Responsiveness); }

  friend bool operator==(const FactorSet&, const FactorSet&) = default;

 private:
  static std::size_t idx(Factor f) { return static_cast<std::size_t>(f); }
  std::array<int, 5> steps_{};
};

/// theta = (speed, 1 - depth_assist, turnability).
struct Theta {
  Eigen::Vector3d v = Eigen::Vector3d::Constant(0.5);

  static constexpr double kLower[3] = {0.1, 0.0, 0.1};
  static constexpr double kUpper[3] = {1.0, 0.9, 1.0};

  Theta clamped() const {
    Theta t;
    for (int i = 0; i < 3; ++i) t.v[i] = std::clamp(v[i], kLower[i], kUpper[i]);
    return t;
  }
};

struct ArbitrationMatrix {
  Vector6d alpha = Vector6d::Ones();

  static ArbitrationMatrix identity() { return {}; }
  Eigen::Matrix<double, 6, 6> matrix() const { return alpha.asDiagonal(); }
};

/// Rows (x, y, z, roll, pitch, yaw), columns (speed, depth, turn).
inline Eigen::Matrix<double, 6, 3> mask_w() {
  Eigen::Matrix<double, 6, 3> w;
  // clang-format off
  w << 1.0, 0.0, 0.0,
       0.0, 1.0, 0.0,
       1.0, 0.0, 0.0,
       0.0, 0.2, 0.8,
       0.4, 0.0, 0.6,
       0.2, 0.0, 0.8;
  // clang-format on
  return w;
}

inline Theta theta_from_factors(const FactorSet& f) {
  return Theta{Eigen::Vector3d(f.speed(), 1.0 - f.depth_assist(), f.turnability())};
}

inline ArbitrationMatrix alpha_from_theta(const Theta& theta) {
  ArbitrationMatrix a;
  a.alpha = (mask_w() * theta.v).cwiseMax(0.0).cwiseMin(1.0);
  return a;
}

/// (I - A) u_r + A u_h, componentwise.
inline Twist blend(const Twist& u_r, const Twist& u_h, const ArbitrationMatrix& a) {
  const Vector6d r = u_r.vector();
  const Vector6d h = u_h.vector();
  Vector6d out;
  for (int j = 0; j < 6; ++j) out[j] = (1.0 - a.alpha[j]) * r[j] + a.alpha[j] * h[j];
  return Twist::from_vector(out);
}

/// One 0.05 step, clamped to [0.1, 1]. Phase gating lives with the caller
/// (session / gateway) which rejects edits while a trial is running.
inline FactorSet apply_factor_edit(FactorSet f, Factor which, EditDirection dir) {
  f.set_steps(which, f.steps(which) + (dir == EditDirection::Increase ? 1 : -1));
  return f;
}

/// Safety scales f_max, responsiveness scales stiffness; both linear.
inline std::pair<FieldParams, Vector6d> apply_gain_factors(const FactorSet& f, const FieldParams& base_field,
                                                           const Vector6d& base_stiffness) {
  FieldParams field = base_field;
  field.f_max = f.safety() * base_field.f_max;
  return {field, f.responsiveness() * base_stiffness};
}

}  // namespace buzzwire
