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

// Assist-as-needed baseline: theta is rescaled after every trial from the
// gap between the trial's mean assistive wrench (projected through the
// mask pseudo-inverse) and an expert reference.

#pragma once

#include <cmath>
#include <optional>
#include <span>

#include <Eigen/SVD>

#include "buzzwire/arbitration.hpp"
#include "buzzwire/errors.hpp"

namespace buzzwire {

using Vector3 = Eigen::Vector3d;

struct AdaptState {
  Theta theta;
  std::optional<Vector3> r_prev;  // empty before the first trial
  Vector3 r_desired = Vector3::Ones();
  double chi_nom = 0.1;
  int trial_index = 0;
};

/// Moore-Penrose pseudo-inverse of the 6x3 mask.
inline Eigen::Matrix<double, 3, 6> pinv_mask() {
  const Eigen::MatrixXd w = mask_w();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd s = svd.singularValues();
  Eigen::VectorXd s_inv(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) s_inv[i] = s[i] > 1e-12 * s[0] ? 1.0 / s[i] : 0.0;
  return svd.matrixV() * s_inv.asDiagonal() * svd.matrixU().transpose();
}

inline Vector3 trial_error(const Wrench& mean_wrench) { return pinv_mask() * mean_wrench.vector(); }

/// Componentwise mean of a wrench sequence (zero for an empty sequence).
inline Wrench mean_wrench(std::span<const Wrench> wrenches) {
  Vector6d sum = Vector6d::Zero();
  for (const auto& w : wrenches) sum += w.vector();
  if (!wrenches.empty()) sum /= static_cast<double>(wrenches.size());
  return Wrench::from_vector(sum);
}

/// chi^i = chi_nom * (r - r_d)/r_d * (|r - r_d| / |r_prev - r_d|)^sign(r_d - r).
/// The ratio factor is 1 with no previous trial or a vanishing previous gap.
inline Vector3 change_rate(const Vector3& r_now, const std::optional<Vector3>& r_prev, const Vector3& r_d,
                           double chi_nom) {
  constexpr double kEps = 1e-9;
  Vector3 chi;
  for (int i = 0; i < 3; ++i) {
    if (r_d[i] == 0.0) throw ConfigError("change_rate: desired error component " + std::to_string(i) + " is zero");
    const double gap = r_now[i] - r_d[i];
    if (gap == 0.0) {
      chi[i] = 0.0;
      continue;
    }
    double ratio = 1.0;
    if (r_prev && std::abs((*r_prev)[i] - r_d[i]) >= kEps) {
      const double base = std::abs(gap) / std::abs((*r_prev)[i] - r_d[i]);
      const double sgn = (r_d[i] - r_now[i]) > 0.0 ? 1.0 : -1.0;
      ratio = std::pow(base, sgn);
    }
    chi[i] = chi_nom * gap / r_d[i] * ratio;
  }
  return chi;
}

template <typename Derived>
Vector3 change_rate(const Vector3& r_now, const Eigen::MatrixBase<Derived>& r_prev, const Vector3& r_d,
                    double chi_nom) {
  return change_rate(r_now, std::optional<Vector3>(Vector3(r_prev)), r_d, chi_nom);
}

/// theta <- clamp((1 + chi) . theta); records r_now as the previous error.
inline AdaptState update_theta(AdaptState state, const Vector3& r_now) {
  const Vector3 chi = change_rate(r_now, state.r_prev, state.r_desired, state.chi_nom);
  state.theta.v = ((Vector3::Ones() + chi).cwiseProduct(state.theta.v));
  state.theta = state.theta.clamped();
  state.r_prev = r_now;
  ++state.trial_index;
  return state;
}

struct ExpertReference {
  Vector3 r_desired = Vector3::Zero();
  bool degenerate = false;  // some component ~0; change_rate would divide by it
};

/// r_d from an expert demonstration's assistive wrenches.
inline ExpertReference expert_reference(std::span<const Wrench> wrenches, bool expert_succeeded) {
  if (!expert_succeeded) throw ConfigError("expert_reference: expert demonstration did not succeed");
  ExpertReference ref;
  ref.r_desired = trial_error(mean_wrench(wrenches));
  ref.degenerate = (ref.r_desired.array().abs() < 1e-9).any();
  return ref;
}

}  // namespace buzzwire
