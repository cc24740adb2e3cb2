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

// Live-session protocol state machine. Transport-free: the server feeds it
// decoded text frames and sim ticks, and ships whatever it returns.
//
// Inbound messages (JSON objects; the body may also be nested in "payload"):
//   hello                      -> hello reply with the config snapshot
//   input {pose:{p,q}}         -> handle pose for the next tick (latest wins)
//   edit_factor {factor, direction:"+"|"-"}
//   start_trial, end_review
// Outbound: state frames, replies (hello, ack, rejected, error) and
// broadcast events (trial_started, trial_ended).

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "buzzwire/experiment.hpp"

namespace buzzwire {

inline constexpr int kProtocolVersion = 1;
inline constexpr double kStateRateHz = 60.0;
inline constexpr double kQuaternionNormTolerance = 1e-3;

enum class TrialPhase { BetweenTrials, Running };

inline std::string phase_name(TrialPhase p) { return p == TrialPhase::Running ? "running" : "between_trials"; }

using ClientId = std::uint64_t;

/// What the server must send after feeding the session one event.
struct Effects {
  std::vector<nlohmann::json> replies;     // to the sender only
  std::vector<nlohmann::json> broadcasts;  // to every client
};

/// Ingest rule for operator poses: a quaternion within 1e-3 of unit norm is
/// normalized, anything further off is refused.
inline std::optional<Pose> ingest_pose(const nlohmann::json& j) {
  Pose p;
  try {
    p = json_io::to_pose(j, "pose");
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (!p.position.allFinite() || !p.orientation.coeffs().allFinite()) return std::nullopt;
  const double n = p.orientation.norm();
  if (std::abs(n - 1.0) > kQuaternionNormTolerance) return std::nullopt;
  p.orientation.normalize();
  return p;
}

inline nlohmann::json ui_factors(const FactorSet& f) {
  nlohmann::json j = nlohmann::json::object();
  for (auto id : kAllFactors) j[std::string(factor_name(id))] = f.ui_value(id);
  return j;
}

class LiveSession {
 public:
  /// `log_dir`, when set, receives live_t{N}.jsonl for every finished trial.
  explicit LiveSession(ExperimentConfig cfg, std::optional<std::filesystem::path> log_dir = std::nullopt)
      : cfg_(std::move(cfg)), log_dir_(std::move(log_dir)), factors_(cfg_.factors) {
    course_ = std::make_unique<WireCourse>(resolve_course(cfg_, 0));
    adapt_.theta = theta_from_factors(cfg_.factors);
    adapt_.chi_nom = cfg_.adaptation.chi_nom;
    if (cfg_.mode == Mode::Sc) {
      if (cfg_.adaptation.r_desired) {
        adapt_.r_desired = *cfg_.adaptation.r_desired;
      } else {
        adapt_.r_desired = expert_reference(run_expert_demonstration(cfg_)).r_desired;
      }
    }
    handle_ = start_pose(*course_);
    if (log_dir_) std::filesystem::create_directories(*log_dir_);
  }

  TrialPhase phase() const { return phase_; }
  bool review_pending() const { return review_pending_; }
  const FactorSet& factors() const { return factors_; }
  const WireCourse& course() const { return *course_; }
  const std::vector<TrialLog>& completed() const { return completed_; }
  int trials_started() const { return trials_started_; }
  const ExperimentConfig& config() const { return cfg_; }
  double dt() const { return cfg_.params.dt; }

  /// Decodes one text frame and dispatches it.
  Effects handle_text(std::string_view text, ClientId from) {
    nlohmann::json msg;
    try {
      msg = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error&) {
      return reply(error("parse"));
    }
    return handle_message(msg, from);
  }

  Effects handle_message(const nlohmann::json& msg, ClientId from) {
    if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) return reply(error("parse"));
    const std::string type = msg["type"].get<std::string>();
    const nlohmann::json& body = msg.contains("payload") && msg["payload"].is_object() ? msg["payload"] : msg;

    if (type == "hello") return reply(hello());
    if (type == "input") {
      if (!body.contains("pose")) return reply(rejected("invalid_pose"));
      const auto pose = ingest_pose(body["pose"]);
      if (!pose) return reply(rejected("invalid_pose"));
      handle_ = *pose;
      input_owner_ = from;
      return {};
    }
    if (type == "edit_factor") return edit_factor(body);
    if (type == "start_trial") return start_trial();
    if (type == "end_review") {
      if (phase_ == TrialPhase::Running) return reply(rejected("trial_running"));
      review_pending_ = false;
      return reply(ack("end_review"));
    }
    return reply(error("unknown_type"));
  }

  /// One simulation tick. Between trials nothing moves.
  Effects tick() {
    if (phase_ != TrialPhase::Running) return {};
    last_tick_ = runner_->step(handle_);
    log_.ticks.push_back(*last_tick_);
    if (runner_->finished()) return finish(*runner_->outcome());
    return {};
  }

  /// A client went away. Losing the input source mid-trial aborts it.
  Effects disconnect(ClientId who) {
    if (phase_ == TrialPhase::Running && input_owner_ && *input_owner_ == who) {
      runner_->abort();
      return finish(Outcome::Aborted);
    }
    return {};
  }

  nlohmann::json state_frame() {
    nlohmann::json j;
    j["type"] = "state";
    j["seq"] = next_seq();
    const bool running = phase_ == TrialPhase::Running;
    j["t"] = running ? runner_->time() : 0.0;
    j["robot_pose"] = json_io::pose(running ? runner_->robot() : idle_robot());
    j["handle_pose"] = json_io::pose(handle_);
    j["progress"] = last_tick_ ? last_tick_->progress : 0.0;
    j["buzz"] = last_tick_ ? last_tick_->contact.in_contact : false;
    j["fatal"] = last_tick_ ? last_tick_->contact.fatal : false;
    j["trial_phase"] = phase_name(phase_);
    j["trial"] = trials_started_;
    j["factors"] = ui_factors(running ? runner_->header().factors : factors_);
    j["alpha"] = json_io::vec(running ? runner_->header().arbitration.alpha : next_setup().arbitration.alpha);
    return j;
  }

  nlohmann::json hello() {
    return {{"type", "hello"},
            {"seq", next_seq()},
            {"protocol_version", kProtocolVersion},
            {"mode", mode_name(cfg_.mode)},
            {"trial_phase", phase_name(phase_)},
            {"review_pending", review_pending_},
            {"trial", trials_started_},
            {"factors", ui_factors(factors_)},
            {"factor_step", 5},
            {"editing_enabled", edits_allowed()},
            {"dt", cfg_.params.dt},
            {"state_rate_hz", kStateRateHz},
            {"handle",
             {{"ring_radius", cfg_.params.ring_radius},
              {"tube_radius", cfg_.params.tube_radius},
              {"com_offset", json_io::vec(cfg_.params.com_offset)}}},
            {"start_pose", json_io::pose(start_pose(*course_))},
            {"course", course_descriptor(*course_)}};
  }

 private:
  bool edits_allowed() const { return cfg_.mode == Mode::ScUser && phase_ == TrialPhase::BetweenTrials; }

  Pose idle_robot() const { return last_tick_ ? last_tick_->robot : start_pose(*course_); }

  TrialSetup next_setup() const {
    const std::optional<Theta> theta = cfg_.mode == Mode::Sc ? std::optional<Theta>(adapt_.theta) : std::nullopt;
    return make_trial_setup(cfg_.mode, factors_, theta, cfg_.params);
  }

  Effects edit_factor(const nlohmann::json& body) {
    if (phase_ == TrialPhase::Running) return reply(rejected("trial_running"));
    if (cfg_.mode != Mode::ScUser) return reply(rejected("mode"));
    const auto f = body.contains("factor") && body["factor"].is_string()
                       ? parse_factor(body["factor"].get<std::string>())
                       : std::nullopt;
    if (!f) return reply(rejected("unknown_factor"));
    const std::string dir = body.contains("direction") && body["direction"].is_string()
                                ? body["direction"].get<std::string>()
                                : std::string{};
    if (dir != "+" && dir != "-") return reply(rejected("bad_direction"));
    factors_ = apply_factor_edit(factors_, *f, dir == "+" ? EditDirection::Increase : EditDirection::Decrease);
    nlohmann::json a = ack("edit_factor");
    a["factor"] = std::string(factor_name(*f));
    a["value"] = factors_.ui_value(*f);
    return reply(a);
  }

  Effects start_trial() {
    if (phase_ == TrialPhase::Running) return reply(rejected("trial_running"));
    if (review_pending_) return reply(rejected("review_pending"));
    const int session = std::min(trials_started_ / cfg_.trials_per_session, cfg_.sessions - 1);
    if (cfg_.course_ids[static_cast<std::size_t>(session)] != course_->name() || session != course_session_) {
      course_ = std::make_unique<WireCourse>(resolve_course(cfg_, session));
      course_session_ = session;
    }
    const TrialSetup setup = next_setup();
    TrialHeader h;
    h.mode = cfg_.mode;
    h.factors = factors_;
    h.theta = setup.theta;
    h.arbitration = setup.arbitration;
    h.course_id = course_->name();
    h.seed = 0;
    h.session = session + 1;
    h.trial = trials_started_ % cfg_.trials_per_session + 1;
    h.input_source = "live";
    h.params = setup.params;
    runner_.emplace(*course_, h);
    log_ = TrialLog{};
    log_.header = runner_->header();
    last_tick_.reset();
    handle_ = runner_->robot();
    phase_ = TrialPhase::Running;
    ++trials_started_;
    Effects e = reply(ack("start_trial"));
    e.broadcasts.push_back({{"type", "trial_started"},
                            {"seq", next_seq()},
                            {"trial", trials_started_},
                            {"course", course_->name()},
                            {"factors", ui_factors(h.factors)},
                            {"alpha", json_io::vec(h.arbitration.alpha)}});
    return e;
  }

  Effects finish(Outcome outcome) {
    log_.outcome = outcome;
    phase_ = TrialPhase::BetweenTrials;
    review_pending_ = true;
    nlohmann::json ev = {{"type", "trial_ended"}, {"seq", next_seq()}, {"trial", trials_started_},
                         {"outcome", outcome_name(outcome)}};
    try {
      ev["metrics"] = json_io::metrics(compute_metrics(log_));
    } catch (const MetricError&) {
      ev["metrics"] = nullptr;
    }
    if (cfg_.mode == Mode::Sc && !log_.ticks.empty()) adapt_ = update_theta(adapt_, trial_error(mean_wrench(log_)));
    if (log_dir_) {
      std::ofstream out(*log_dir_ / ("live_t" + std::to_string(trials_started_) + ".jsonl"));
      write_jsonl(out, log_);
    }
    completed_.push_back(std::move(log_));
    log_ = TrialLog{};
    runner_.reset();
    Effects e;
    e.broadcasts.push_back(std::move(ev));
    return e;
  }

  std::uint64_t next_seq() { return ++seq_; }
  Effects reply(nlohmann::json j) {
    Effects e;
    e.replies.push_back(std::move(j));
    return e;
  }
  nlohmann::json error(const char* reason) { return {{"type", "error"}, {"seq", next_seq()}, {"reason", reason}}; }
  nlohmann::json rejected(const char* reason) {
    return {{"type", "rejected"}, {"seq", next_seq()}, {"reason", reason}};
  }
  nlohmann::json ack(const char* of) { return {{"type", "ack"}, {"seq", next_seq()}, {"of", of}}; }

  ExperimentConfig cfg_;
  std::optional<std::filesystem::path> log_dir_;
  FactorSet factors_;
  AdaptState adapt_;
  std::unique_ptr<WireCourse> course_;
  int course_session_ = 0;
  TrialPhase phase_ = TrialPhase::BetweenTrials;
  bool review_pending_ = false;
  int trials_started_ = 0;
  std::optional<TrialRunner> runner_;
  TrialLog log_;
  std::optional<TickRecord> last_tick_;
  Pose handle_;
  std::optional<ClientId> input_owner_;
  std::vector<TrialLog> completed_;
  std::uint64_t seq_ = 0;
};

}  // namespace buzzwire
