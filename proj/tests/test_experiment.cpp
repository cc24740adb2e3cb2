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

#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "buzzwire/experiment.hpp"

using namespace buzzwire;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("buzzwire_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TrialLog read_log(const fs::path& p) {
  std::ifstream in(p);
  return read_jsonl(in);
}

std::string config_error(const json& doc) {
  try {
    parse_experiment_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Config, DefaultsPutTransferLast) {
  const auto cfg = parse_experiment_config({{"version", 1}, {"mode", "sc_user"}});
  ASSERT_EQ(cfg.course_ids.size(), 4u);
  EXPECT_EQ(cfg.course_ids[0], "training");
  EXPECT_EQ(cfg.course_ids[3], "transfer");
  EXPECT_EQ(cfg.total_trials(), 20);
  EXPECT_EQ(cfg.seeds.size(), 20u);
}

TEST(Config, ValidationListsEveryBadField) {
  const std::string msg = config_error({{"version", 3},
                                        {"mode", "autopilot"},
                                        {"sessions", 0},
                                        {"seeds", "lots"},
                                        {"factors", {{"speed", 0.33}}},
                                        {"controller", {{"damping", "soft"}}}});
  for (const char* field : {"version", "mode", "sessions", "seeds", "factors.speed", "controller.damping"})
    EXPECT_NE(msg.find(field), std::string::npos) << field << " missing from:\n" << msg;
}

TEST(Config, EditsOnlyInScUser) {
  const json edits = json::array({{{"after_trial", 1}, {"factor", "speed"}, {"direction", "+"}}});
  EXPECT_NE(config_error({{"version", 1}, {"mode", "sc"}, {"edits", edits}}).find("edits"), std::string::npos);
  EXPECT_TRUE(config_error({{"version", 1}, {"mode", "sc_user"}, {"edits", edits}}).empty());
  const json bad = json::array({{{"after_trial", 1}, {"factor", "speeed"}, {"direction", "up"}}});
  EXPECT_NE(config_error({{"version", 1}, {"mode", "sc_user"}, {"edits", bad}}).find("edits[0].factor"),
            std::string::npos);
}

TEST(Config, InlineCourseDescriptor) {
  const json course = {{"version", 1}, {"name", "line"}, {"points", {{0, 0, 0}, {0.5, 0, 0}}},
                       {"wire_radius", 0.002}, {"start_s", 0.05}, {"end_s", 0.45}};
  const auto cfg = parse_experiment_config({{"version", 1}, {"mode", "teleop"}, {"sessions", 1}, {"courses", json::array({course})}});
  EXPECT_EQ(resolve_course(cfg, 0).name(), "line");
  json broken = course;
  broken["wire_radius"] = -1;
  EXPECT_NE(config_error({{"version", 1}, {"mode", "teleop"}, {"sessions", 1}, {"courses", json::array({broken})}})
                .find("courses[0].wire_radius"),
            std::string::npos);
}

TEST(Config, ResolvedConfigIsAFixedPoint) {
  const auto cfg = parse_experiment_config({{"version", 1}, {"mode", "sc_user"}, {"policy", "novice"}, {"seeds", 40}});
  const json once = resolved_config(cfg);
  EXPECT_EQ(resolved_config(parse_experiment_config(once)), once);
}

TEST(Experiment, TeleopSessionRecordsIdentityArbitration) {
  const auto cfg = parse_experiment_config(
      {{"version", 1}, {"mode", "teleop"}, {"sessions", 1}, {"trials_per_session", 5}, {"seeds", 11}, {"time_limit", 3.0}});
  const auto out = scratch("teleop");
  const auto res = run_experiment(cfg, out);
  ASSERT_EQ(res.trials.size(), 5u);
  for (int t = 1; t <= 5; ++t) {
    const auto log = read_log(out / "trials" / ("s1_t" + std::to_string(t) + ".jsonl"));
    EXPECT_EQ(log.header.arbitration.alpha, Vector6d::Ones());
    EXPECT_EQ(log.header.seed, 11u + t - 1);
  }
  std::ifstream summary(out / "summary.jsonl");
  int lines = 0;
  for (std::string line; std::getline(summary, line);) ++lines;
  EXPECT_EQ(lines, 5);
  EXPECT_TRUE(fs::exists(out / "resolved_config.json"));
}

TEST(Experiment, AdaptationFixedPointKeepsTheta) {
  const Vector3d rd(0.2, -0.1, 0.05);
  const auto cfg = parse_experiment_config({{"version", 1},
                                            {"mode", "sc"},
                                            {"sessions", 2},
                                            {"trials_per_session", 3},
                                            {"time_limit", 2.0},
                                            {"adaptation", {{"r_desired", {rd.x(), rd.y(), rd.z()}}}}});
  ExperimentHooks hooks;
  hooks.trial_error = [&](const TrialLog&) { return rd; };
  const auto res = run_experiment(cfg, scratch("fixed_point"), hooks);
  ASSERT_EQ(res.trials.size(), 6u);
  for (const auto& t : res.trials) EXPECT_EQ(t.theta.v, res.trials.front().theta.v);
}

TEST(Experiment, AdaptationMovesThetaOtherwise) {
  const auto cfg = parse_experiment_config({{"version", 1},
                                            {"mode", "sc"},
                                            {"sessions", 1},
                                            {"trials_per_session", 3},
                                            {"time_limit", 2.0},
                                            {"adaptation", {{"r_desired", {1.0, 1.0, 1.0}}}}});
  ExperimentHooks hooks;
  hooks.trial_error = [](const TrialLog&) { return Vector3d(1.5, 1.5, 1.5); };
  const auto res = run_experiment(cfg, scratch("adapt"), hooks);
  EXPECT_GT(res.trials[1].theta.v[0], res.trials[0].theta.v[0]);
}

TEST(Experiment, DerivesTheReferenceFromAnExpert) {
  const auto cfg = parse_experiment_config(
      {{"version", 1}, {"mode", "sc"}, {"sessions", 1}, {"trials_per_session", 1}, {"time_limit", 2.0}});
  const auto out = scratch("expert");
  const auto res = run_experiment(cfg, out);
  ASSERT_TRUE(res.r_desired);
  ASSERT_TRUE(fs::exists(out / "expert.jsonl"));
  const auto expert = read_log(out / "expert.jsonl");
  EXPECT_LT((expert_reference(expert).r_desired - *res.r_desired).norm(), 1e-12);
}

TEST(Experiment, ScriptedEditsLandInTheNextTrialHeader) {
  const auto cfg = parse_experiment_config(
      {{"version", 1},
       {"mode", "sc_user"},
       {"sessions", 1},
       {"trials_per_session", 3},
       {"time_limit", 1.0},
       {"factors", {{"speed", 0.5}}},
       {"edits", json::array({{{"after_trial", 1}, {"factor", "speed"}, {"direction", "+"}},
                              {{"after_trial", 2}, {"factor", "safety"}, {"direction", "-"}}})}});
  const auto res = run_experiment(cfg, scratch("edits"));
  EXPECT_DOUBLE_EQ(res.trials[0].factors.speed(), 0.5);
  EXPECT_DOUBLE_EQ(res.trials[1].factors.speed(), 0.55);
  EXPECT_DOUBLE_EQ(res.trials[1].factors.safety(), 0.5);
  EXPECT_DOUBLE_EQ(res.trials[2].factors.safety(), 0.45);
}

TEST(Experiment, SameConfigSameBytes) {
  const json doc = {{"version", 1}, {"mode", "sc"}, {"sessions", 2}, {"trials_per_session", 2}, {"seeds", 5},
                    {"time_limit", 4.0}};
  const auto cfg = parse_experiment_config(doc);
  const auto a = scratch("det_a"), b = scratch("det_b");
  run_experiment(cfg, a);
  run_experiment(cfg, b);
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), a);
    EXPECT_EQ(slurp(entry.path()), slurp(b / rel)) << rel;
  }
}
