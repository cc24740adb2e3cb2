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

#include <gtest/gtest.h>

#include "buzzwire/apf.hpp"
#include "support.hpp"

using namespace buzzwire;
using testing_support::Gen;

TEST(Field, LogisticMidpoint) {
  const FieldParams p;
  EXPECT_NEAR(field_magnitude(p.rho * p.d_rep, PointClass::Repulsive, p), p.f_max / 2, 1e-12);
  EXPECT_NEAR(field_magnitude(p.rho * p.d_att, PointClass::Attractive, p), p.f_max / 2, 1e-12);
}

TEST(Field, RepulsiveValueAndDirection) {
  const FieldParams p;  // f_max 1, rho 0.05, d_rep 1, lambda_rep -10
  const Vector3d pk(0, 0, 0), pi(0.025, 0, 0);
  const Vector3d f = pair_force(pi, pk, PointClass::Repulsive, p);
  EXPECT_NEAR(f.norm(), 1.0 / (1.0 + std::exp(-5.0)), 1e-12);
  EXPECT_NEAR(f.norm(), 0.99331, 1e-5);
  EXPECT_GT(f.dot(pi - pk), 0.0);  // pushes the control point away
}

TEST(Field, AttractivePullsTowardThePoint) {
  const FieldParams p;
  const Vector3d pk(0.01, 0.02, 0), pi(0.05, -0.01, 0.03);
  EXPECT_LT(pair_force(pi, pk, PointClass::Attractive, p).dot(pi - pk), 0.0);
}

TEST(Field, RepulsiveTail) {
  const FieldParams p;
  EXPECT_LT(field_magnitude(10 * p.rho * p.d_rep, PointClass::Repulsive, p), 1e-6 * p.f_max);
}

TEST(Field, CoincidentPointsAreADomainError) {
  EXPECT_THROW(pair_force({1, 2, 3}, {1, 2, 3}, PointClass::Repulsive, FieldParams{}), std::domain_error);
}

TEST(Field, ParamsValidation) {
  FieldParams p;
  p.lambda_rep = 1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.rho = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Torque, ParallelForceHasNoTorque) {
  EXPECT_LT(pair_torque({2, 0, 0}, {0, 0, 0}, {1, 0, 0}).norm(), 1e-15);
}

TEST(Torque, HandCrossProduct) {
  const Vector3d t = pair_torque({0, 1, 0}, {0, 0, 0}, {1, 0, 0});
  EXPECT_LT((t - Vector3d(0, 0, -1)).norm(), 1e-15);
}

TEST(Torque, MagnitudeIdentity) {
  Gen g(21);
  for (int i = 0; i < 100; ++i) {
    const Vector3d f = g.vec3(-1, 1), pi = g.vec3(-1, 1), pc = g.vec3(-1, 1);
    const Vector3d r = pc - pi;
    const double sin_a = std::sqrt(std::max(0.0, 1 - std::pow(f.normalized().dot(r.normalized()), 2)));
    EXPECT_NEAR(pair_torque(f, pi, pc).norm(), f.norm() * r.norm() * sin_a, 1e-9);
  }
}

TEST(NetWrench, EmptyNeighborhood) {
  const std::array<Vector3d, 8> cps{};
  const Wrench w = net_wrench(cps, NeighborhoodSet{}, Vector3d::Zero(), FieldParams{});
  EXPECT_EQ(w.vector(), Vector6d::Zero());
}

TEST(NetWrench, SinglePairIsThatPairForce) {
  const Vector3d pi(0.05, 0, 0), pk(0.05, 0.02, 0.01), com(0, 0, 0.01);
  NeighborhoodSet n;
  n.repulsive.push_back({pk, PointClass::Repulsive, 0});
  const std::vector<Vector3d> cps{pi};
  const Wrench w = net_wrench(cps, n, com, FieldParams{});
  const Vector3d f = pair_force(pi, pk, PointClass::Repulsive, FieldParams{});
  EXPECT_LT((w.force - f).norm(), 1e-15);
  EXPECT_LT((w.torque - pair_torque(f, pi, com)).norm(), 1e-15);
}

TEST(NetWrench, SameDirectionPairsTakeTheLargerMagnitude) {
  // Two repulsive points on the same ray below pi; magnitudes solved so the
  // pair forces are 0.3 and 0.4 along +y.
  const FieldParams p;
  auto dist_for = [&](double m) {  // invert the logistic for the repulsive class
    return p.rho * (p.d_rep + std::log(p.f_max / m - 1.0) / (-p.lambda_rep));
  };
  const Vector3d pi(0, 0, 0);
  NeighborhoodSet n;
  n.repulsive.push_back({{0, -dist_for(0.3), 0}, PointClass::Repulsive, 0});
  n.repulsive.push_back({{0, -dist_for(0.4), 0}, PointClass::Repulsive, 0});
  ASSERT_NEAR(pair_force(pi, n.repulsive[0].position, PointClass::Repulsive, p).norm(), 0.3, 1e-12);
  const std::vector<Vector3d> cps{pi};
  const Wrench w = net_wrench(cps, n, Vector3d::Zero(), p);
  EXPECT_LT((w.force - Vector3d(0, 0.4, 0)).norm(), 1e-12);
}

TEST(NetWrench, BoundedByEightFmaxOnRandomScenes) {
  Gen g(22);
  FieldParams p;
  for (int scene = 0; scene < 300; ++scene) {
    p.f_max = g.uniform(0.1, 5.0);
    Pose pose(g.vec3(-0.1, 0.1), g.rotation());
    const auto cps = octagon_points(pose, 0.05);
    NeighborhoodSet n;
    const int k = g.integer(1, 60);
    for (int i = 0; i < k; ++i) {
      const Vector3d q = pose.position + g.vec3(-0.12, 0.12);
      (g.uniform(0, 1) < 0.5 ? n.attractive : n.repulsive).push_back({q, PointClass::Attractive, 0});
    }
    for (auto& e : n.repulsive) e.cls = PointClass::Repulsive;
    EXPECT_LE(net_wrench(cps, n, pose.position, p).force.norm(), 8 * p.f_max * (1 + 1e-12));
  }
}
