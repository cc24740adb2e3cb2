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

#pragma once

#include <array>
#include <cmath>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace buzzwire {

using Vector3d = Eigen::Vector3d;
using Vector6d = Eigen::Matrix<double, 6, 1>;
using Quaterniond = Eigen::Quaterniond;

// World frame: x runs along the wire, y is depth (camera line of sight),
// z is vertical. All 6-vectors are laid out [linear; angular].

struct Pose {
  Vector3d position = Vector3d::Zero();
  Quaterniond orientation = Quaterniond::Identity();

  Pose() = default;
  Pose(const Vector3d& p, const Quaterniond& q) : position(p), orientation(q.normalized()) {}

  /// Maps a point from the handle-local frame to the world frame.
  Vector3d transform(const Vector3d& local) const { return position + orientation * local; }
};

struct Twist {
  Vector3d linear = Vector3d::Zero();
  Vector3d angular = Vector3d::Zero();

  static Twist from_vector(const Vector6d& v) { return {v.head<3>(), v.tail<3>()}; }
  Vector6d vector() const {
    Vector6d v;
    v << linear, angular;
    return v;
  }
};

struct Wrench {
  Vector3d force = Vector3d::Zero();
  Vector3d torque = Vector3d::Zero();

  static Wrench from_vector(const Vector6d& v) { return {v.head<3>(), v.tail<3>()}; }
  Vector6d vector() const {
    Vector6d v;
    v << force, torque;
    return v;
  }
};

/// Translational error (m) in 0..2, rotation vector (rad, |.| <= pi) in 3..5.
struct PoseError {
  Vector6d e = Vector6d::Zero();

  Vector3d translation() const { return e.head<3>(); }
  Vector3d rotation() const { return e.tail<3>(); }
};

/// Rotation vector of a unit quaternion, taking the shortest arc.
inline Vector3d log_map(Quaterniond q) {
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  const Vector3d v = q.vec();
  const double s = v.norm();
  if (s < 1e-12) {
    // small-angle: angle ~ 2 s, axis*angle ~ 2 v
    return 2.0 * v;
  }
  const double angle = 2.0 * std::atan2(s, q.w());
  return v * (angle / s);
}

inline Quaterniond exp_map(const Vector3d& rotvec) {
  const double angle = rotvec.norm();
  if (angle < 1e-12) {
    Quaterniond q(1.0, 0.5 * rotvec.x(), 0.5 * rotvec.y(), 0.5 * rotvec.z());
    return q.normalized();
  }
  return Quaterniond(Eigen::AngleAxisd(angle, rotvec / angle));
}

inline PoseError pose_error(const Pose& target, const Pose& current) {
  PoseError out;
  out.e.head<3>() = target.position - current.position;
  out.e.tail<3>() = log_map(target.orientation * current.orientation.conjugate());
  return out;
}

/// Explicit Euler step; angular velocity is expressed in the world frame.
inline Pose integrate_pose(const Pose& p, const Twist& v, double dt) {
  Pose out;
  out.position = p.position + v.linear * dt;
  out.orientation = (exp_map(v.angular * dt) * p.orientation).normalized();
  return out;
}

/// Octagon vertices on the ring circle in the handle's local x-y plane,
/// k * 45 degrees from local +x, mapped to world.
inline std::array<Vector3d, 8> octagon_points(const Pose& handle_pose, double ring_radius) {
  std::array<Vector3d, 8> pts;
  for (int k = 0; k < 8; ++k) {
    const double a = k * (M_PI / 4.0);
    pts[k] = handle_pose.transform(Vector3d(ring_radius * std::cos(a), ring_radius * std::sin(a), 0.0));
  }
  return pts;
}

/// Orientation whose local z axis points along `tangent` (minimal rotation from +z).
inline Quaterniond ring_facing(const Vector3d& tangent) {
  const Vector3d t = tangent.normalized();
  return Quaterniond::FromTwoVectors(Vector3d::UnitZ(), t).normalized();
}

}  // namespace buzzwire
