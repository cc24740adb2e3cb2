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

// Seeded generators and brute-force oracles shared by the tests.

#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace testing_support {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  Eigen::Vector3d vec3(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)}; }
  Eigen::Matrix<double, 6, 1> vec6(double lo, double hi) {
    Eigen::Matrix<double, 6, 1> v;
    for (int i = 0; i < 6; ++i) v[i] = uniform(lo, hi);
    return v;
  }
  Eigen::Vector3d unit() {
    Eigen::Vector3d v;
    do {
      v = vec3(-1.0, 1.0);
    } while (v.norm() < 1e-3 || v.norm() > 1.0);
    return v.normalized();
  }
  Eigen::Quaterniond rotation() {
    Eigen::Vector4d c;
    do {
      c = {uniform(-1, 1), uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)};
    } while (c.norm() < 1e-3 || c.norm() > 1.0);
    c.normalize();
    return Eigen::Quaterniond(c[0], c[1], c[2], c[3]);
  }

 private:
  std::mt19937_64 eng_;
};

/// Distance from q to segment [a, b] by dense parameter sweep.
inline double brute_point_segment(const Eigen::Vector3d& q, const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                                  int n = 2000) {
  double best = INFINITY;
  for (int i = 0; i <= n; ++i) best = std::min(best, (q - (a + (b - a) * (double(i) / n))).norm());
  return best;
}

}  // namespace testing_support
