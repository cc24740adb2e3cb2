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

// Discrete admittance controllers for the human and autonomy channels and
// the shared-control tick that blends them.

#pragma once

#include <stdexcept>

#include "buzzwire/arbitration.hpp"
#include "buzzwire/geometry.hpp"

namespace buzzwire {

struct AdmittanceParams {
  Vector6d mass = (Vector6d() << 1.0, 1.0, 1.0, 0.1, 0.1, 0.1).finished();
  Vector6d stiffness = Vector6d::Constant(50.0);
  Vector6d damping = Vector6d::Constant(10.0);
  Vector6d velocity_limit = (Vector6d() << 0.5, 0.5, 0.5, 2.0, 2.0, 2.0).finished();
  double windup_limit = 10.0;
  double leak_h = 0.0;  // 1/s, exponential decay of the human integral
  double leak_r = 5.0;  // 1/s, exponential decay of the autonomy integral

  void validate() const {
    if (!(mass.array() > 0.0).all()) throw std::invalid_argument("AdmittanceParams: mass must be positive");
    if (!(stiffness.array() >= 0.0).all() || !(damping.array() >= 0.0).all())
      throw std::invalid_argument("AdmittanceParams: stiffness and damping must be non-negative");
    if (!(velocity_limit.array() > 0.0).all())
      throw std::invalid_argument("AdmittanceParams: velocity limits must be positive");
    if (!(windup_limit > 0.0)) throw std::invalid_argument("AdmittanceParams: windup_limit must be positive");
    if (leak_h < 0.0 || leak_r < 0.0) throw std::invalid_argument("AdmittanceParams: leaks must be >= 0");
  }
};

struct IntegratorState {
  Vector6d accum_h = Vector6d::Zero();
  Vector6d accum_r = Vector6d::Zero();
  PoseError prev_e;
  bool has_prev = false;

  void reset() { *this = IntegratorState{}; }
};

namespace detail {

inline Vector6d clamp_abs(const Vector6d& v, const Vector6d& limit) { return v.cwiseMax(-limit).cwiseMin(limit); }

inline void integrate_channel(Vector6d& accum, const Vector6d& rate, double leak, double windup, double dt) {
  if (leak > 0.0) accum *= std::exp(-leak * dt);
  accum += rate * dt;
  accum = clamp_abs(accum, Vector6d::Constant(windup));
}

}  // namespace detail

/// u_h = M^-1 * integral(k.e + d.e_dot).
inline Twist human_command(const PoseError& e, const Vector6d& e_dot, const AdmittanceParams& params,
                           IntegratorState& state, double dt) {
  const Vector6d rate = params.stiffness.cwiseProduct(e.e) + params.damping.cwiseProduct(e_dot);
  detail::integrate_channel(state.accum_h, rate, params.leak_h, params.windup_limit, dt);
  return Twist::from_vector(detail::clamp_abs(state.accum_h.cwiseQuotient(params.mass), params.velocity_limit));
}

/// u_r = M^-1 * integral(w_a).
inline Twist autonomy_command(const Wrench& w_a, const AdmittanceParams& params, IntegratorState& state, double dt) {
  detail::integrate_channel(state.accum_r, w_a.vector(), params.leak_r, params.windup_limit, dt);
  return Twist::from_vector(detail::clamp_abs(state.accum_r.cwiseQuotient(params.mass), params.velocity_limit));
}

struct TickOutput {
  Twist u_h;
  Twist u_r;
  Twist u_sc;
  Pose robot;
};

/// One shared-control step: pose error, both channel commands, blend, then
/// integrate the robot pose with the blended twist.
inline TickOutput control_tick(const Pose& handle_input, const Pose& robot, const Wrench& w_a,
                               const ArbitrationMatrix& a, const AdmittanceParams& params, IntegratorState& state,
                               double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("control_tick: dt must be positive");
  const PoseError e = pose_error(handle_input, robot);
  const Vector6d e_dot = state.has_prev ? Vector6d((e.e - state.prev_e.e) / dt) : Vector6d::Zero();
  state.prev_e = e;
  state.has_prev = true;

  TickOutput out;
  out.u_h = human_command(e, e_dot, params, state, dt);
  out.u_r = autonomy_command(w_a, params, state, dt);
  out.u_sc = blend(out.u_r, out.u_h, a);
  out.robot = integrate_pose(robot, out.u_sc, dt);
  return out;
}

}  // namespace buzzwire
