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

// Trials: the fixed-rate closed loop (sampling, field, control, contact,
// progress), its JSONL log, and the per-trial metrics.

#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "buzzwire/adaptation.hpp"
#include "buzzwire/admittance.hpp"
#include "buzzwire/apf.hpp"
#include "buzzwire/arbitration.hpp"
#include "buzzwire/course.hpp"
#include "buzzwire/errors.hpp"
#include "buzzwire/operator.hpp"

namespace buzzwire {

inline constexpr int kLogSchemaVersion = 1;

enum class Mode { Teleop, Sc, ScUser };

inline std::string mode_name(Mode m) {
  switch (m) {
    case Mode::Teleop:
      return "teleop";
    case Mode::Sc:
      return "sc";
    case Mode::ScUser:
      return "sc_user";
  }
  return "?";
}

inline Mode parse_mode(const std::string& s) {
  if (s == "teleop") return Mode::Teleop;
  if (s == "sc") return Mode::Sc;
  if (s == "sc_user") return Mode::ScUser;
  throw ParseError("mode", "expected one of teleop, sc, sc_user");
}

enum class Outcome { Success, Fatal, Timeout, Aborted };

inline std::string outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Success:
      return "success";
    case Outcome::Fatal:
      return "fatal";
    case Outcome::Timeout:
      return "timeout";
    case Outcome::Aborted:
      return "aborted";
  }
  return "?";
}

inline Outcome parse_outcome(const std::string& s) {
  if (s == "success") return Outcome::Success;
  if (s == "fatal") return Outcome::Fatal;
  if (s == "timeout") return Outcome::Timeout;
  if (s == "aborted") return Outcome::Aborted;
  throw ParseError("outcome", "unknown outcome '" + s + "'");
}

/// Everything the closed loop needs besides the arbitration and the input.
struct SimParams {
  double dt = 0.01;
  double time_limit = 120.0;
  AdmittanceParams controller;
  FieldParams field;
  double sample_spacing = 0.005;  // m, wire sampling for the neighborhood
  double sample_range = 0.10;     // m, neighborhood radius around control points
  double k_wire = 1000.0;         // N/m
  double fatal_force = 1.0;       // N
  double debounce = 0.1;          // s
  double ring_radius = 0.05;
  double tube_radius = 0.004;
  Vector3d com_offset = Vector3d::Zero();

  void validate() const {
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(time_limit > 0.0)) throw ConfigError("time_limit must be positive");
    controller.validate();
    field.validate();
    if (!(sample_spacing > 0.0) || !(sample_range > 0.0))
      throw ConfigError("environment spacing and range must be positive");
    if (!(k_wire > 0.0) || !(fatal_force > 0.0)) throw ConfigError("k_wire and fatal_force must be positive");
    if (debounce < 0.0) throw ConfigError("debounce must be >= 0");
    if (!(tube_radius > 0.0)) throw ConfigError("tube_radius must be positive");
  }
};

/// Immutable for the life of a trial.
struct TrialHeader {
  int schema_version = kLogSchemaVersion;
  Mode mode = Mode::Teleop;
  FactorSet factors;
  Theta theta;
  ArbitrationMatrix arbitration;
  std::string course_id;
  std::uint64_t seed = 0;
  int session = 0;
  int trial = 0;
  std::string input_source;
  SimParams params;  // effective gains (after safety/responsiveness scaling)
};

struct TickRecord {
  double t = 0.0;
  Pose handle_input;
  Pose robot;
  Twist u_h;
  Twist u_r;
  Twist u_sc;
  Wrench w_a;
  ContactReport contact;
  double progress = 0.0;
};

struct TrialLog {
  TrialHeader header;
  std::vector<TickRecord> ticks;
  Outcome outcome = Outcome::Timeout;
};

struct Metrics {
  std::optional<double> time_to_success;
  int collisions = 0;
  double mean_squared_jerk = 0.0;
  Outcome outcome = Outcome::Timeout;
};

/// Effective controller/field gains and the arbitration for a trial. TELEOP
/// ignores the factors entirely: A = I and the base gains.
struct TrialSetup {
  ArbitrationMatrix arbitration;
  Theta theta;
  SimParams params;
};

inline TrialSetup make_trial_setup(Mode mode, const FactorSet& factors, const std::optional<Theta>& theta_override,
                                   const SimParams& base) {
  TrialSetup s;
  s.params = base;
  if (mode == Mode::Teleop) {
    s.arbitration = ArbitrationMatrix::identity();
    s.theta = Theta{Eigen::Vector3d::Ones()};
    return s;
  }
  s.theta = theta_override ? *theta_override : theta_from_factors(factors);
  s.arbitration = alpha_from_theta(s.theta);
  auto [field, stiffness] = apply_gain_factors(factors, base.field, base.controller.stiffness);
  s.params.field = field;
  s.params.controller.stiffness = stiffness;
  return s;
}

/// Robot and handle start centered on the wire at start_s, ring facing along it.
inline Pose start_pose(const WireCourse& course) {
  const double s = course.start_s();
  const Vector3d tangent = course.point_at(s + 0.01) - course.point_at(s - 0.01);
  return Pose(course.point_at(s), ring_facing(tangent));
}

/// One trial's closed loop, advanced one fixed tick at a time. Used both by
/// the headless harness and by the live gateway.
class TrialRunner {
 public:
  TrialRunner(const WireCourse& course, TrialHeader header)
      : course_(&course), header_(std::move(header)), robot_(start_pose(course)) {
    header_.params.validate();
    samples_ = course.resample(header_.params.sample_spacing);
  }

  const TrialHeader& header() const { return header_; }
  const Pose& robot() const { return robot_; }
  bool finished() const { return outcome_.has_value(); }
  const std::optional<Outcome>& outcome() const { return outcome_; }
  long tick_count() const { return tick_; }
  double time() const { return static_cast<double>(tick_) * header_.params.dt; }

  LoopHandle handle_at(const Pose& pose) const {
    LoopHandle h;
    h.pose = pose;
    h.ring_radius = header_.params.ring_radius;
    h.tube_radius = header_.params.tube_radius;
    h.com_offset = header_.params.com_offset;
    return h;
  }

  /// Assistive wrench acting on the robot at its current pose.
  Wrench assistive_wrench() const {
    const LoopHandle h = handle_at(robot_);
    const NeighborhoodSet nbhd = classify_neighborhood(samples_, h, header_.params.sample_range);
    return net_wrench(octagon_points(robot_, h.ring_radius), nbhd, h.com(), header_.params.field);
  }

  TickRecord step(const Pose& handle_input) {
    const SimParams& p = header_.params;
    TickRecord rec;
    rec.handle_input = handle_input;
    rec.w_a = assistive_wrench();
    const TickOutput out = control_tick(handle_input, robot_, rec.w_a, header_.arbitration, p.controller, state_, p.dt);
    robot_ = out.robot;
    ++tick_;
    rec.t = time();
    rec.robot = robot_;
    rec.u_h = out.u_h;
    rec.u_r = out.u_r;
    rec.u_sc = out.u_sc;
    const LoopHandle h = handle_at(robot_);
    rec.contact = check_contact(*course_, h, p.k_wire, p.fatal_force);
    rec.progress = progress(*course_, h);

    if (rec.contact.fatal) {
      outcome_ = Outcome::Fatal;
    } else if (rec.progress >= 1.0) {
      outcome_ = Outcome::Success;
    } else if (rec.t >= p.time_limit - 1e-9) {
      outcome_ = Outcome::Timeout;
    }
    return rec;
  }

  void abort() { outcome_ = Outcome::Aborted; }

 private:
  const WireCourse* course_;
  TrialHeader header_;
  std::vector<std::pair<double, Vector3d>> samples_;
  Pose robot_;
  IntegratorState state_;
  long tick_ = 0;
  std::optional<Outcome> outcome_;
};

/// Source of handle poses. Returning nullopt means the source went away.
class InputSource {
 public:
  virtual ~InputSource() = default;
  virtual void reset(const WireCourse& course, const Pose& start) = 0;
  virtual std::optional<Pose> next(const Pose& observed_robot, const WireCourse& course, double t, double dt) = 0;
  virtual std::string describe() const = 0;
};

class ScriptedInput final : public InputSource {
 public:
  explicit ScriptedInput(OperatorPolicy policy) : op_(std::move(policy)) {}
  void reset(const WireCourse& course, const Pose& start) override { op_.reset(course, start); }
  std::optional<Pose> next(const Pose& observed_robot, const WireCourse& course, double t, double dt) override {
    return op_.step(observed_robot, course, t, dt);
  }
  std::string describe() const override { return "policy:" + op_.policy().name; }

 private:
  ScriptedOperator op_;
};

/// Replays recorded handle inputs; reports a disconnect once they run out.
class RecordedInput final : public InputSource {
 public:
  explicit RecordedInput(std::vector<Pose> poses) : poses_(std::move(poses)) {}
  void reset(const WireCourse&, const Pose&) override { next_ = 0; }
  std::optional<Pose> next(const Pose&, const WireCourse&, double, double) override {
    if (next_ >= poses_.size()) return std::nullopt;
    return poses_[next_++];
  }
  std::string describe() const override { return "recorded"; }

 private:
  std::vector<Pose> poses_;
  std::size_t next_ = 0;
};

inline TrialLog run_trial(const WireCourse& course, TrialHeader header, InputSource& input) {
  if (header.input_source.empty()) header.input_source = input.describe();
  TrialRunner runner(course, std::move(header));
  TrialLog log;
  log.header = runner.header();
  input.reset(course, runner.robot());
  const double dt = runner.header().params.dt;
  while (!runner.finished()) {
    const auto pose = input.next(runner.robot(), course, runner.time(), dt);
    if (!pose) {
      runner.abort();
      break;
    }
    log.ticks.push_back(runner.step(*pose));
  }
  log.outcome = *runner.outcome();
  return log;
}

/// Headless trial with a scripted operator.
inline TrialLog run_trial(Mode mode, const WireCourse& course, const FactorSet& factors, const OperatorPolicy& policy,
                          std::uint64_t seed, const SimParams& params, std::optional<Theta> theta = std::nullopt) {
  const TrialSetup setup = make_trial_setup(mode, factors, theta, params);
  TrialHeader h;
  h.mode = mode;
  h.factors = factors;
  h.theta = setup.theta;
  h.arbitration = setup.arbitration;
  h.course_id = course.name();
  h.seed = seed;
  h.params = setup.params;
  OperatorPolicy p = policy;
  p.noise_seed = seed;
  ScriptedInput input(p);
  return run_trial(course, std::move(h), input);
}

// ---------------------------------------------------------------------------
// Metrics

/// Mean of |x'''|^2 over interior samples, central differences.
inline double mean_squared_jerk(std::span<const Vector3d> positions, double dt) {
  if (positions.size() < 7) throw MetricError("mean_squared_jerk: need at least 7 samples");
  const double scale = 1.0 / (2.0 * dt * dt * dt);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 2; i + 2 < positions.size(); ++i) {
    const Vector3d j =
        (positions[i + 2] - 2.0 * positions[i + 1] + 2.0 * positions[i - 1] - positions[i - 2]) * scale;
    sum += j.squaredNorm();
    ++n;
  }
  return sum / static_cast<double>(n);
}

inline Metrics compute_metrics(const TrialLog& log) {
  if (log.ticks.size() < 7) throw MetricError("compute_metrics: trial has fewer than 7 ticks");
  Metrics m;
  m.outcome = log.outcome;
  std::vector<ContactReport> contacts;
  std::vector<Vector3d> inputs;
  contacts.reserve(log.ticks.size());
  inputs.reserve(log.ticks.size());
  for (const auto& t : log.ticks) {
    contacts.push_back(t.contact);
    inputs.push_back(t.handle_input.position);
  }
  m.collisions = buzz_events(contacts, log.header.params.dt, log.header.params.debounce);
  m.mean_squared_jerk = mean_squared_jerk(inputs, log.header.params.dt);
  if (log.outcome == Outcome::Success) m.time_to_success = log.ticks.back().t;
  return m;
}

inline Wrench mean_wrench(const TrialLog& log) {
  std::vector<Wrench> w;
  w.reserve(log.ticks.size());
  for (const auto& t : log.ticks) w.push_back(t.w_a);
  return mean_wrench(w);
}

inline ExpertReference expert_reference(const TrialLog& expert_log) {
  std::vector<Wrench> w;
  w.reserve(expert_log.ticks.size());
  for (const auto& t : expert_log.ticks) w.push_back(t.w_a);
  return expert_reference(w, expert_log.outcome == Outcome::Success);
}

/// Re-runs the logged handle inputs through a fresh closed loop.
inline TrialLog replay_trial(const WireCourse& course, const TrialLog& log) {
  std::vector<Pose> inputs;
  inputs.reserve(log.ticks.size());
  for (const auto& t : log.ticks) inputs.push_back(t.handle_input);
  RecordedInput src(std::move(inputs));
  TrialHeader h = log.header;
  h.input_source = "recorded";
  return run_trial(course, std::move(h), src);
}

// ---------------------------------------------------------------------------
// JSON

namespace json_io {

using nlohmann::json;

inline json vec(const Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }
inline json vec(const Vector6d& v) { return json::array({v[0], v[1], v[2], v[3], v[4], v[5]}); }

inline Vector3d to_vec3(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) throw ParseError(field, "expected 3 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline Vector6d to_vec6(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 6) throw ParseError(field, "expected 6 numbers");
  Vector6d v;
  for (int i = 0; i < 6; ++i) v[i] = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

inline json pose(const Pose& p) {
  const auto& q = p.orientation;
  return {{"p", vec(p.position)}, {"q", json::array({q.w(), q.x(), q.y(), q.z()})}};
}

/// Orientation is stored as given; callers validate unit norm where needed.
inline Pose to_pose(const json& j, const std::string& field) {
  if (!j.is_object() || !j.contains("p") || !j.contains("q")) throw ParseError(field, "expected {p, q}");
  const auto& q = j.at("q");
  if (!q.is_array() || q.size() != 4) throw ParseError(field + ".q", "expected [w,x,y,z]");
  Pose out;
  out.position = to_vec3(j.at("p"), field + ".p");
  out.orientation = Quaterniond(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>());
  return out;
}

inline json factors(const FactorSet& f) {
  json j = json::object();
  for (auto id : kAllFactors) j[std::string(factor_name(id))] = f.value(id);
  return j;
}

inline FactorSet to_factors(const json& j, const std::string& field) {
  if (!j.is_object()) throw ParseError(field, "expected an object of factor values");
  FactorSet f;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto id = parse_factor(it.key());
    if (!id) throw ParseError(field + "." + it.key(), "unknown factor");
    if (!it.value().is_number()) throw ParseError(field + "." + it.key(), "expected a number");
    try {
      f.set(*id, it.value().get<double>());
    } catch (const ConfigError& e) {
      throw ParseError(field + "." + it.key(), e.what());
    }
  }
  return f;
}

inline json sim_params(const SimParams& p) {
  const auto& c = p.controller;
  const auto& f = p.field;
  return {{"dt", p.dt},
          {"time_limit", p.time_limit},
          {"controller",
           {{"mass", vec(c.mass)},
            {"stiffness", vec(c.stiffness)},
            {"damping", vec(c.damping)},
            {"velocity_limit", vec(c.velocity_limit)},
            {"windup_limit", c.windup_limit},
            {"leak_h", c.leak_h},
            {"leak_r", c.leak_r}}},
          {"field",
           {{"f_max", f.f_max},
            {"rho", f.rho},
            {"lambda_att", f.lambda_att},
            {"lambda_rep", f.lambda_rep},
            {"d_att", f.d_att},
            {"d_rep", f.d_rep}}},
          {"environment", {{"spacing", p.sample_spacing}, {"range", p.sample_range}}},
          {"contact", {{"k_wire", p.k_wire}, {"fatal_force", p.fatal_force}, {"debounce", p.debounce}}},
          {"handle",
           {{"ring_radius", p.ring_radius}, {"tube_radius", p.tube_radius}, {"com_offset", vec(p.com_offset)}}}};
}

/// Overlays whatever keys are present in `j` onto `base`.
inline SimParams to_sim_params(const json& j, SimParams base = {}) {
  auto num = [](const json& obj, const char* key, double& out, const std::string& path) {
    if (!obj.contains(key)) return;
    if (!obj.at(key).is_number()) throw ParseError(path + "." + key, "expected a number");
    out = obj.at(key).get<double>();
  };
  auto v6 = [](const json& obj, const char* key, Vector6d& out, const std::string& path) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (v.is_number()) {
      out = Vector6d::Constant(v.get<double>());
    } else {
      out = to_vec6(v, path + "." + key);
    }
  };
  if (!j.is_object()) throw ParseError("params", "expected an object");
  num(j, "dt", base.dt, "params");
  num(j, "time_limit", base.time_limit, "params");
  if (j.contains("controller")) {
    const auto& c = j.at("controller");
    v6(c, "mass", base.controller.mass, "controller");
    v6(c, "stiffness", base.controller.stiffness, "controller");
    v6(c, "damping", base.controller.damping, "controller");
    v6(c, "velocity_limit", base.controller.velocity_limit, "controller");
    num(c, "windup_limit", base.controller.windup_limit, "controller");
    num(c, "leak_h", base.controller.leak_h, "controller");
    num(c, "leak_r", base.controller.leak_r, "controller");
  }
  if (j.contains("field")) {
    const auto& f = j.at("field");
    num(f, "f_max", base.field.f_max, "field");
    num(f, "rho", base.field.rho, "field");
    num(f, "lambda_att", base.field.lambda_att, "field");
    num(f, "lambda_rep", base.field.lambda_rep, "field");
    num(f, "d_att", base.field.d_att, "field");
    num(f, "d_rep", base.field.d_rep, "field");
  }
  if (j.contains("environment")) {
    num(j.at("environment"), "spacing", base.sample_spacing, "environment");
    num(j.at("environment"), "range", base.sample_range, "environment");
  }
  if (j.contains("contact")) {
    num(j.at("contact"), "k_wire", base.k_wire, "contact");
    num(j.at("contact"), "fatal_force", base.fatal_force, "contact");
    num(j.at("contact"), "debounce", base.debounce, "contact");
  }
  if (j.contains("handle")) {
    const auto& h = j.at("handle");
    num(h, "ring_radius", base.ring_radius, "handle");
    num(h, "tube_radius", base.tube_radius, "handle");
    if (h.contains("com_offset")) base.com_offset = to_vec3(h.at("com_offset"), "handle.com_offset");
  }
  return base;
}

inline json header(const TrialHeader& h) {
  return {{"type", "header"},
          {"schema_version", h.schema_version},
          {"mode", mode_name(h.mode)},
          {"factors", factors(h.factors)},
          {"theta", json::array({h.theta.v[0], h.theta.v[1], h.theta.v[2]})},
          {"alpha", vec(h.arbitration.alpha)},
          {"course", h.course_id},
          {"seed", h.seed},
          {"session", h.session},
          {"trial", h.trial},
          {"input", h.input_source},
          {"params", sim_params(h.params)}};
}

inline TrialHeader to_header(const json& j) {
  TrialHeader h;
  try {
    h.schema_version = j.at("schema_version").get<int>();
    if (h.schema_version != kLogSchemaVersion) throw ParseError("schema_version", "unsupported log schema");
    h.mode = parse_mode(j.at("mode").get<std::string>());
    h.factors = to_factors(j.at("factors"), "factors");
    const auto& th = j.at("theta");
    h.theta.v = Eigen::Vector3d(th.at(0).get<double>(), th.at(1).get<double>(), th.at(2).get<double>());
    h.arbitration.alpha = to_vec6(j.at("alpha"), "alpha");
    h.course_id = j.at("course").get<std::string>();
    h.seed = j.at("seed").get<std::uint64_t>();
    h.session = j.at("session").get<int>();
    h.trial = j.at("trial").get<int>();
    h.input_source = j.value("input", std::string{});
    h.params = to_sim_params(j.at("params"));
  } catch (const json::exception& e) {
    throw ParseError("header", e.what());
  }
  return h;
}

inline json contact(const ContactReport& c) {
  return {{"in_contact", c.in_contact}, {"penetration", c.penetration}, {"proxy_force", c.proxy_force},
          {"fatal", c.fatal}};
}

inline json tick(const TickRecord& r) {
  return {{"type", "tick"},
          {"t", r.t},
          {"handle_input", pose(r.handle_input)},
          {"robot", pose(r.robot)},
          {"u_h", vec(r.u_h.vector())},
          {"u_r", vec(r.u_r.vector())},
          {"u_sc", vec(r.u_sc.vector())},
          {"w_a", vec(r.w_a.vector())},
          {"contact", contact(r.contact)},
          {"progress", r.progress}};
}

inline TickRecord to_tick(const json& j) {
  TickRecord r;
  try {
    r.t = j.at("t").get<double>();
    r.handle_input = to_pose(j.at("handle_input"), "handle_input");
    r.robot = to_pose(j.at("robot"), "robot");
    r.u_h = Twist::from_vector(to_vec6(j.at("u_h"), "u_h"));
    r.u_r = Twist::from_vector(to_vec6(j.at("u_r"), "u_r"));
    r.u_sc = Twist::from_vector(to_vec6(j.at("u_sc"), "u_sc"));
    r.w_a = Wrench::from_vector(to_vec6(j.at("w_a"), "w_a"));
    const auto& c = j.at("contact");
    r.contact.in_contact = c.at("in_contact").get<bool>();
    r.contact.penetration = c.at("penetration").get<double>();
    r.contact.proxy_force = c.at("proxy_force").get<double>();
    r.contact.fatal = c.at("fatal").get<bool>();
    r.progress = j.at("progress").get<double>();
  } catch (const json::exception& e) {
    throw ParseError("tick", e.what());
  }
  return r;
}

inline json metrics(const Metrics& m) {
  json j = {{"outcome", outcome_name(m.outcome)},
            {"collisions", m.collisions},
            {"mean_squared_jerk", m.mean_squared_jerk}};
  j["time_to_success"] = m.time_to_success ? json(*m.time_to_success) : json(nullptr);
  return j;
}

}  // namespace json_io

/// Header line, one line per tick, then an end line carrying the outcome.
inline void write_jsonl(std::ostream& out, const TrialLog& log) {
  out << json_io::header(log.header).dump() << '\n';
  for (const auto& t : log.ticks) out << json_io::tick(t).dump() << '\n';
  out << nlohmann::json{{"type", "end"}, {"outcome", outcome_name(log.outcome)}, {"ticks", log.ticks.size()}}.dump()
      << '\n';
}

/// Reads a log written by write_jsonl. A log cut short (no end line) is
/// treated as aborted.
inline TrialLog read_jsonl(std::istream& in) {
  TrialLog log;
  bool have_header = false;
  bool have_end = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("line " + std::to_string(lineno), e.what());
    }
    const std::string type = j.value("type", std::string{});
    if (type == "header") {
      log.header = json_io::to_header(j);
      have_header = true;
    } else if (type == "tick") {
      log.ticks.push_back(json_io::to_tick(j));
    } else if (type == "end") {
      log.outcome = parse_outcome(j.at("outcome").get<std::string>());
      have_end = true;
    } else {
      throw ParseError("line " + std::to_string(lineno), "unknown record type '" + type + "'");
    }
  }
  if (!have_header) throw ParseError("header", "log has no header record");
  if (!have_end) log.outcome = Outcome::Aborted;
  return log;
}

}  // namespace buzzwire
