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

// Assistive wrench from logistic potential fields between the eight ring
// control points and the classified wire points.

#pragma once

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>

#include "buzzwire/course.hpp"
#include "buzzwire/geometry.hpp"

namespace buzzwire {

struct FieldParams {
  double f_max = 1.0;       // N
  double rho = 0.05;        // m
  double lambda_att = 10.0;
  double lambda_rep = -10.0;
  double d_att = 1.0;
  double d_rep = 1.0;

  void validate() const {
    if (!(f_max > 0.0) || !(rho > 0.0) || !(d_att > 0.0) || !(d_rep > 0.0))
      throw std::invalid_argument("FieldParams: f_max, rho, d_att, d_rep must be positive");
    if (!(lambda_att > 0.0)) throw std::invalid_argument("FieldParams: lambda_att must be positive");
    if (!(lambda_rep < 0.0)) throw std::invalid_argument("FieldParams: lambda_rep must be negative");
  }
};

/// Logistic magnitude f_max / (1 + exp(-lambda (dist/rho - d0))).
inline double field_magnitude(double dist, PointClass cls, const FieldParams& params) {
  const bool rep = cls == PointClass::Repulsive;
  const double lambda = rep ? params.lambda_rep : params.lambda_att;
  const double d0 = rep ? params.d_rep : params.d_att;
  return params.f_max / (1.0 + std::exp(-lambda * (dist / params.rho - d0)));
}

/// Force on control point `p_i` from environment point `p_k`. Repulsive
/// forces push p_i away from p_k; attractive forces pull it toward p_k.
inline Vector3d pair_force(const Vector3d& p_i, const Vector3d& p_k, PointClass cls, const FieldParams& params) {
  const Vector3d d = p_i - p_k;
  const double dist = d.norm();
  if (!(dist > 0.0)) throw std::domain_error("pair_force: control and environment points coincide");
  const Vector3d dir = (cls == PointClass::Repulsive ? 1.0 : -1.0) * d / dist;
  return field_magnitude(dist, cls, params) * dir;
}

inline Vector3d pair_torque(const Vector3d& f_ik, const Vector3d& p_i, const Vector3d& p_com) {
  return f_ik.cross(p_com - p_i);
}

/// Aggregates pair terms per control point: each point contributes the unit
/// direction of its summed force (torque) scaled by its largest single pair
/// magnitude. Points whose sum vanishes contribute nothing.
inline Wrench net_wrench(std::span<const Vector3d> control_points, const NeighborhoodSet& nbhd,
                         const Vector3d& p_com, const FieldParams& params) {
  Wrench w;
  for (const auto& p_i : control_points) {
    Vector3d f_sum = Vector3d::Zero();
    Vector3d t_sum = Vector3d::Zero();
    double f_peak = 0.0;
    double t_peak = 0.0;
    const Vector3d lever = p_com - p_i;
    auto accumulate = [&](const std::vector<EnvironmentPoint>& pts, PointClass cls) {
      for (const auto& pk : pts) {
        const Vector3d f = pair_force(p_i, pk.position, cls, params);
        const Vector3d t = f.cross(lever);
        f_sum += f;
        t_sum += t;
        f_peak = std::max(f_peak, f.norm());
        t_peak = std::max(t_peak, t.norm());
      }
    };
    accumulate(nbhd.attractive, PointClass::Attractive);
    accumulate(nbhd.repulsive, PointClass::Repulsive);

    const double fn = f_sum.norm();
    if (fn > 0.0) w.force += (f_sum / fn) * f_peak;
    const double tn = t_sum.norm();
    if (tn > 0.0) w.torque += (t_sum / tn) * t_peak;
  }
  return w;
}

inline Wrench net_wrench(const std::array<Vector3d, 8>& control_points, const NeighborhoodSet& nbhd,
                         const Vector3d& p_com, const FieldParams& params) {
  return net_wrench(std::span<const Vector3d>(control_points.data(), control_points.size()), nbhd, p_com, params);
}

}  // namespace buzzwire
