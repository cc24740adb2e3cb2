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

// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "buzzwire/buzzwire.hpp"
#include "support.hpp"

using namespace buzzwire;
using testing_support::Gen;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(const char* name, bool ok, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

using Clock = std::chrono::steady_clock;
double ms_since(Clock::time_point t0) { return std::chrono::duration<double, std::milli>(Clock::now() - t0).count(); }

// Mask entries in tenths, as printed.
constexpr int kMaskTenths[6][3] = {{10, 0, 0}, {0, 10, 0}, {10, 0, 0}, {0, 2, 8}, {4, 0, 6}, {2, 0, 8}};

void alpha_reproduction() {
  // Integer arithmetic in hundredths: theta = (10, 9, 1) tenths.
  const int theta[3] = {10, 9, 1};
  double worst = 0.0;
  const Vector6d alpha = alpha_from_theta(Theta{Vector3d(1.0, 0.9, 0.1)}).alpha;
  const double expected[6] = {1.0, 0.9, 1.0, 0.26, 0.46, 0.28};
  bool mask_ok = true;
  for (int r = 0; r < 6; ++r) {
    int hundredths = 0;
    for (int c = 0; c < 3; ++c) {
      hundredths += kMaskTenths[r][c] * theta[c];
      mask_ok = mask_ok && mask_w()(r, c) == kMaskTenths[r][c] / 10.0;
    }
    const double exact = std::clamp(hundredths, 0, 100) / 100.0;
    worst = std::max({worst, std::abs(alpha[r] - exact), std::abs(alpha[r] - expected[r])});
  }
  report("alpha_reproduction", mask_ok && worst <= 1e-12,
         fmt("max |alpha - (1.0, 0.9, 1.0, 0.26, 0.46, 0.28)| = %.3g, mask matches printed W: ", worst) +
             (mask_ok ? "yes" : "no"));
}

void teleop_equivalence() {
  const auto t0 = Clock::now();
  Gen g(1001);
  IntegratorState shared, human_only;
  Pose robot_shared, robot_human;
  const AdmittanceParams params;
  bool commands_equal = true, trajectory_equal = true;
  for (int i = 0; i < 1000; ++i) {
    const Pose input(robot_human.position + g.vec3(-0.05, 0.05), g.rotation());
    const Wrench w_a = Wrench::from_vector(g.vec6(-2, 2));
    const auto out = control_tick(input, robot_shared, w_a, ArbitrationMatrix::identity(), params, shared, 0.01);
    commands_equal = commands_equal && (out.u_sc.vector() - out.u_h.vector()).norm() == 0.0;

    // Human-only controller, written out without blending.
    const PoseError e = pose_error(input, robot_human);
    const Vector6d e_dot = human_only.has_prev ? Vector6d((e.e - human_only.prev_e.e) / 0.01) : Vector6d::Zero();
    human_only.prev_e = e;
    human_only.has_prev = true;
    const Twist u_h = human_command(e, e_dot, params, human_only, 0.01);
    robot_human = integrate_pose(robot_human, u_h, 0.01);
    robot_shared = out.robot;
    trajectory_equal = trajectory_equal && robot_shared.position == robot_human.position &&
                       robot_shared.orientation.coeffs() == robot_human.orientation.coeffs();
  }
  const double ms = ms_since(t0);
  report("teleop_equivalence", commands_equal && trajectory_equal && ms < 1000.0,
         std::string("u_sc == u_h on 1000 ticks: ") + (commands_equal ? "yes" : "no") +
             ", trajectory bit-identical: " + (trajectory_equal ? "yes" : "no") + fmt(", %.1f ms", ms));
}

void pseudo_inverse() {
  const auto t0 = Clock::now();
  const double left = (pinv_mask() * mask_w() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  Gen g(1002);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vector3d x = g.vec3(-5, 5);
    worst = std::max(worst, (trial_error(Wrench::from_vector(mask_w() * x)) - x).cwiseAbs().maxCoeff());
  }
  const double ms = ms_since(t0);
  report("pseudo_inverse", left <= 1e-9 && worst <= 1e-9 && ms < 1000.0,
         fmt("max|W+W - I| = %.3g, max|trial_error(Wx) - x| over 100 x = %.3g, %.1f ms", left, worst, ms));
}

void logistic_field() {
  const auto t0 = Clock::now();
  const FieldParams p;
  const double mid = std::max(std::abs(field_magnitude(p.d_rep * p.rho, PointClass::Repulsive, p) - p.f_max / 2),
                              std::abs(field_magnitude(p.d_att * p.rho, PointClass::Attractive, p) - p.f_max / 2));
  bool rep_dec = true, att_inc = true;
  double prev_r = INFINITY, prev_a = -INFINITY;
  for (int i = 1; i <= 1000; ++i) {
    const double d = 3.0 * p.rho * i / 1000.0;
    const double r = field_magnitude(d, PointClass::Repulsive, p), a = field_magnitude(d, PointClass::Attractive, p);
    rep_dec = rep_dec && r < prev_r;
    att_inc = att_inc && a > prev_a;
    prev_r = r;
    prev_a = a;
  }
  Gen g(1003);
  double worst_ratio = 0.0;
  FieldParams q = p;
  for (int scene = 0; scene < 1000; ++scene) {
    q.f_max = g.uniform(0.1, 3.0);
    const Pose pose(g.vec3(-0.1, 0.1), g.rotation());
    NeighborhoodSet n;
    const int k = g.integer(1, 80);
    for (int i = 0; i < k; ++i) {
      const bool rep = g.uniform(0, 1) < 0.5;
      (rep ? n.repulsive : n.attractive)
          .push_back({pose.position + g.vec3(-0.12, 0.12), rep ? PointClass::Repulsive : PointClass::Attractive, 0});
    }
    const Wrench w = net_wrench(octagon_points(pose, 0.05), n, pose.position, q);
    worst_ratio = std::max(worst_ratio, w.force.norm() / q.f_max);
  }
  const double ms = ms_since(t0);
  report("logistic_field", mid <= 1e-9 && rep_dec && att_inc && worst_ratio <= 8.0 && ms < 5000.0,
         fmt("midpoint error %.3g, max |f_net|/f_max over 1000 scenes = %.4f (bound 8), %.0f ms", mid, worst_ratio, ms) +
             ", monotone sweep: repulsive " + (rep_dec ? "decreasing" : "NOT decreasing") + ", attractive " +
             (att_inc ? "increasing" : "NOT increasing"));
}

void adaptation_law() {
  const Vector3d rd = Vector3d::Ones();
  const double up = change_rate(Vector3d::Constant(1.5), Vector3d::Constant(2.0), rd, 0.1)[0];
  const double down = change_rate(Vector3d::Constant(0.5), Vector3d::Constant(0.75), rd, 0.1)[0];
  AdaptState s;
  s.r_desired = Vector3d(0.3, 0.2, 0.1);
  s.theta.v = Vector3d(0.4, 0.7, 0.6);
  const Vector3d theta0 = s.theta.v;
  bool constant = true;
  for (int i = 0; i < 20; ++i) {
    s = update_theta(s, s.r_desired);
    constant = constant && s.theta.v == theta0;
  }
  report("adaptation_law", std::abs(up - 0.1) <= 1e-12 && std::abs(down + 0.1) <= 1e-12 && constant,
         fmt("chi = %.15f and %.15f (expected +0.1, -0.1)", up, down) +
             ", theta constant over 20 trials at r = r_d: " + (constant ? "yes" : "no"));
}

void jerk_metric() {
  const double dt = 0.01;
  std::vector<Vector3d> line, sine;
  for (int i = 0; i < 1000; ++i) line.emplace_back(0.08 * i * dt, 0.01 - 0.03 * i * dt, 0.5);
  const int n = static_cast<int>(std::round(10 * 2 * M_PI / dt));
  for (int i = 0; i < n; ++i) sine.emplace_back(std::sin(i * dt), 0, 0);
  const double j0 = mean_squared_jerk(line, dt), j1 = mean_squared_jerk(sine, dt);
  report("jerk_metric", std::abs(j0) <= 1e-12 && std::abs(j1 - 0.5) <= 0.005,
         fmt("constant velocity %.3g, sine over 10 periods %.6f (expected 0.5 within 1%%)", j0, j1));
}

void directional_check() {
  const auto t0 = Clock::now();
  const auto course = builtin_course("training");
  const auto typical = operator_preset("typical");
  const SimParams params;
  struct Condition {
    const char* name;
    Mode mode;
    FactorSet factors;
    double mean = 0.0;
  };
  Condition cs[] = {{"sc_user", Mode::ScUser, FactorSet::from_values(0.5, 0.9, 0.5, 1.0, 0.5)},
                    {"sc_user_low_safety", Mode::ScUser, FactorSet::from_values(0.5, 0.9, 0.5, 0.1, 0.5)},
                    {"teleop", Mode::Teleop, FactorSet{}}};
  for (auto& c : cs) {
    int total = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed)
      total += compute_metrics(run_trial(c.mode, course, c.factors, typical, seed, params)).collisions;
    c.mean = total / 20.0;
  }
  const double s = ms_since(t0) / 1000.0;
  const bool ok = cs[0].mean < cs[1].mean && cs[0].mean < cs[2].mean && s < 120.0;
  report("directional_collisions", ok,
         fmt("mean collisions over seeds 1..20: assisted %.2f, safety 0.1 %.2f, teleop ", cs[0].mean, cs[1].mean) +
             fmt("%.2f (%.1f s)", cs[2].mean, s));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void determinism() {
  const auto t0 = Clock::now();
  const auto cfg = parse_experiment_config({{"version", 1},
                                            {"mode", "sc"},
                                            {"sessions", 2},
                                            {"trials_per_session", 2},
                                            {"seeds", 77},
                                            {"policy", "novice"}});
  const fs::path a = fs::temp_directory_path() / "buzzwire_accept_a", b = fs::temp_directory_path() / "buzzwire_accept_b";
  fs::remove_all(a);
  fs::remove_all(b);
  run_experiment(cfg, a);
  run_experiment(cfg, b);
  int files = 0, differ = 0;
  std::size_t bytes = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    ++files;
    const std::string x = slurp(e.path()), y = slurp(b / fs::relative(e.path(), a));
    bytes += x.size();
    if (x != y) ++differ;
  }
  const double s = ms_since(t0) / 1000.0;
  report("determinism", files > 0 && differ == 0 && s < 60.0,
         fmt("%.0f files, %.1f MB compared, ", files, bytes / 1e6) + fmt("%.0f differ (%.1f s)", differ, s));
}

void performance() {
  Gen g(1004);
  const Pose pose(Vector3d::Zero(), g.rotation());
  const auto cps = octagon_points(pose, 0.05);
  NeighborhoodSet n;
  for (int i = 0; i < 5000; ++i) {
    const bool rep = i % 2 == 0;
    (rep ? n.repulsive : n.attractive)
        .push_back({g.vec3(-0.15, 0.15), rep ? PointClass::Repulsive : PointClass::Attractive, 0});
  }
  std::vector<double> times;
  double sink = 0.0;
  for (int rep = 0; rep < 101; ++rep) {
    const auto t0 = Clock::now();
    sink += net_wrench(cps, n, pose.position, FieldParams{}).force.norm();
    times.push_back(ms_since(t0));
  }
  std::nth_element(times.begin(), times.begin() + 50, times.end());
  const double median = times[50];

  // Full closed-loop ticks on the training course.
  const auto course = builtin_course("training");
  const SimParams params;
  const TrialSetup setup = make_trial_setup(Mode::ScUser, FactorSet::from_values(0.5, 0.9, 0.5, 1.0, 0.5), {}, params);
  TrialHeader h;
  h.mode = Mode::ScUser;
  h.arbitration = setup.arbitration;
  h.params = setup.params;
  auto policy = operator_preset("expert");
  ScriptedInput input(policy);
  TrialRunner runner(course, h);
  input.reset(course, runner.robot());
  std::vector<double> tick_ms;
  const auto wall0 = Clock::now();
  while (!runner.finished() && tick_ms.size() < 3000) {
    const auto t0 = Clock::now();
    runner.step(*input.next(runner.robot(), course, runner.time(), params.dt));
    tick_ms.push_back(ms_since(t0));
  }
  const double wall = ms_since(wall0);
  const double sim = tick_ms.size() * params.dt * 1000.0;
  std::sort(tick_ms.begin(), tick_ms.end());
  const double p99 = tick_ms[tick_ms.size() * 99 / 100];
  const bool ok = median < 5.0 && wall < sim && p99 < params.dt * 1000.0;
  report("performance", ok,
         fmt("net_wrench 8 x 5000 median %.3f ms; tick p99 %.3f ms, ", median, p99) +
             fmt("%.0f sim-ms in %.0f wall-ms", sim, wall) + (sink > -1 ? "" : " "));
}

}  // namespace

int main() {
  alpha_reproduction();
  teleop_equivalence();
  pseudo_inverse();
  logistic_field();
  adaptation_law();
  jerk_metric();
  directional_check();
  determinism();
  performance();
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
