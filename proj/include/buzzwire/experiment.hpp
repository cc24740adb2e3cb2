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

// Headless experiments: sessions of consecutive trials with arbitration
// frozen during each trial and updated only in between (adaptation in sc,
// scripted factor edits in sc_user).

#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "buzzwire/session.hpp"

namespace buzzwire {

inline constexpr int kConfigSchemaVersion = 1;

struct ScriptedEdit {
  int after_trial = 0;  // 1-based global trial index; applied before the next trial
  Factor factor = Factor::Speed;
  EditDirection direction = EditDirection::Increase;
};

struct AdaptationConfig {
  double chi_nom = 0.1;
  std::optional<Eigen::Vector3d> r_desired;  // derived from an expert run when absent
  std::uint64_t expert_seed = 0;
};

struct ExperimentConfig {
  Mode mode = Mode::ScUser;
  int sessions = 4;
  int trials_per_session = 5;
  std::vector<std::string> course_ids;       // one per session after resolution
  std::vector<nlohmann::json> course_docs;   // inline descriptors, parallel to course_ids (null if built-in)
  OperatorPolicy policy = operator_preset("typical");
  std::vector<std::uint64_t> seeds;          // one per trial after resolution
  SimParams params;
  FactorSet factors = FactorSet::from_values(0.5, 0.5, 0.5, 0.5, 0.5);
  std::vector<ScriptedEdit> edits;
  AdaptationConfig adaptation;

  int total_trials() const { return sessions * trials_per_session; }
};

namespace detail {

inline std::string edit_dir_name(EditDirection d) { return d == EditDirection::Increase ? "+" : "-"; }

}  // namespace detail

/// Parses and validates a config document. Every problem found is reported
/// in one ConfigError, one field per line.
inline ExperimentConfig parse_experiment_config(const nlohmann::json& doc) {
  using nlohmann::json;
  std::vector<std::string> problems;
  auto bad = [&](const std::string& field, const std::string& why) { problems.push_back(field + ": " + why); };

  ExperimentConfig cfg;
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");

  if (!doc.contains("version") || !doc["version"].is_number_integer() ||
      doc["version"].get<int>() != kConfigSchemaVersion)
    bad("version", "required, must be " + std::to_string(kConfigSchemaVersion));

  if (!doc.contains("mode") || !doc["mode"].is_string()) {
    bad("mode", "required: teleop | sc | sc_user");
  } else {
    try {
      cfg.mode = parse_mode(doc["mode"].get<std::string>());
    } catch (const ParseError& e) {
      bad("mode", "expected one of teleop, sc, sc_user");
    }
  }

  auto positive_int = [&](const char* key, int& out) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number_integer() || doc[key].get<int>() < 1) {
      bad(key, "must be a positive integer");
    } else {
      out = doc[key].get<int>();
    }
  };
  positive_int("sessions", cfg.sessions);
  positive_int("trials_per_session", cfg.trials_per_session);

  // Courses: one entry for every session, or a single entry for all. Default:
  // training throughout with the transfer course in the final session.
  if (doc.contains("courses")) {
    const auto& cs = doc["courses"];
    if (!cs.is_array() || cs.empty() ||
        (cs.size() != 1 && cs.size() != static_cast<std::size_t>(cfg.sessions))) {
      bad("courses", "expected an array with one entry or one entry per session");
    } else {
      for (std::size_t i = 0; i < static_cast<std::size_t>(cfg.sessions); ++i) {
        const auto& c = cs[cs.size() == 1 ? 0 : i];
        if (c.is_string()) {
          try {
            (void)builtin_course(c.get<std::string>());
            cfg.course_ids.push_back(c.get<std::string>());
            cfg.course_docs.push_back(nullptr);
          } catch (const ParseError&) {
            bad("courses[" + std::to_string(i) + "]", "unknown built-in course");
          }
        } else if (c.is_object()) {
          try {
            const WireCourse wc = load_course(c);
            cfg.course_ids.push_back(wc.name());
            cfg.course_docs.push_back(c);
          } catch (const ParseError& e) {
            bad("courses[" + std::to_string(i) + "]." + e.field(), e.what());
          }
        } else {
          bad("courses[" + std::to_string(i) + "]", "expected a built-in id or a course descriptor");
        }
      }
    }
  } else {
    for (int i = 0; i < cfg.sessions; ++i) {
      cfg.course_ids.push_back(cfg.sessions > 1 && i == cfg.sessions - 1 ? "transfer" : "training");
      cfg.course_docs.push_back(nullptr);
    }
  }

  if (doc.contains("policy")) {
    const auto& p = doc["policy"];
    try {
      if (p.is_string()) {
        cfg.policy = operator_preset(p.get<std::string>());
      } else if (p.is_object()) {
        cfg.policy = operator_preset(p.value("preset", std::string("typical")));
        if (p.contains("name")) cfg.policy.name = p["name"].get<std::string>();
        cfg.policy.lookahead = p.value("lookahead", cfg.policy.lookahead);
        cfg.policy.nominal_speed = p.value("nominal_speed", cfg.policy.nominal_speed);
        cfg.policy.tremor_amplitude = p.value("tremor_amplitude", cfg.policy.tremor_amplitude);
        cfg.policy.tremor_frequency = p.value("tremor_frequency", cfg.policy.tremor_frequency);
        cfg.policy.reaction_delay = p.value("reaction_delay", cfg.policy.reaction_delay);
        cfg.policy.validate();
      } else {
        bad("policy", "expected a preset name or an object");
      }
    } catch (const ConfigError& e) {
      bad("policy", e.what());
    } catch (const json::exception& e) {
      bad("policy", e.what());
    }
  }

  // Seeds: a base integer (trial k gets base + k) or an explicit list.
  std::uint64_t base_seed = 1;
  std::vector<std::uint64_t> seed_list;
  if (doc.contains("seeds")) {
    const auto& s = doc["seeds"];
    if (s.is_number_unsigned() || (s.is_number_integer() && s.get<long long>() >= 0)) {
      base_seed = s.get<std::uint64_t>();
    } else if (s.is_array()) {
      for (const auto& v : s) {
        if (!v.is_number_integer() || v.get<long long>() < 0) {
          bad("seeds", "list entries must be non-negative integers");
          break;
        }
        seed_list.push_back(v.get<std::uint64_t>());
      }
      if (seed_list.size() != static_cast<std::size_t>(cfg.total_trials()))
        bad("seeds", "list must hold one seed per trial (" + std::to_string(cfg.total_trials()) + ")");
    } else {
      bad("seeds", "expected a non-negative integer or a list");
    }
  }
  for (int k = 0; k < cfg.total_trials(); ++k)
    cfg.seeds.push_back(seed_list.empty() ? base_seed + static_cast<std::uint64_t>(k)
                                          : seed_list[static_cast<std::size_t>(k) % std::max<std::size_t>(1, seed_list.size())]);

  try {
    cfg.params = json_io::to_sim_params(doc);
    cfg.params.validate();
  } catch (const ParseError& e) {
    bad(e.field(), e.what());
  } catch (const std::exception& e) {
    bad("params", e.what());
  }

  if (doc.contains("factors")) {
    try {
      FactorSet f = cfg.factors;
      const FactorSet parsed = json_io::to_factors(doc["factors"], "factors");
      for (auto it = doc["factors"].begin(); it != doc["factors"].end(); ++it) {
        const auto id = *parse_factor(it.key());
        f.set_steps(id, parsed.steps(id));
      }
      cfg.factors = f;
    } catch (const ParseError& e) {
      bad(e.field(), e.what());
    }
  }

  if (doc.contains("edits")) {
    const auto& es = doc["edits"];
    if (!es.is_array()) {
      bad("edits", "expected an array");
    } else {
      for (std::size_t i = 0; i < es.size(); ++i) {
        const auto& e = es[i];
        const std::string at = "edits[" + std::to_string(i) + "]";
        if (!e.is_object() || !e.contains("after_trial") || !e.contains("factor") || !e.contains("direction")) {
          bad(at, "expected {after_trial, factor, direction}");
          continue;
        }
        ScriptedEdit ed;
        if (!e["after_trial"].is_number_integer() || e["after_trial"].get<int>() < 1 ||
            e["after_trial"].get<int>() >= cfg.total_trials()) {
          bad(at + ".after_trial", "must be in [1, total trials - 1]");
          continue;
        }
        ed.after_trial = e["after_trial"].get<int>();
        const auto f = e["factor"].is_string() ? parse_factor(e["factor"].get<std::string>()) : std::nullopt;
        if (!f) {
          bad(at + ".factor", "unknown factor");
          continue;
        }
        ed.factor = *f;
        const std::string d = e["direction"].is_string() ? e["direction"].get<std::string>() : "";
        if (d != "+" && d != "-") {
          bad(at + ".direction", "expected \"+\" or \"-\"");
          continue;
        }
        ed.direction = d == "+" ? EditDirection::Increase : EditDirection::Decrease;
        cfg.edits.push_back(ed);
      }
      if (!cfg.edits.empty() && cfg.mode != Mode::ScUser) bad("edits", "factor edits are only allowed in sc_user mode");
    }
  }

  if (doc.contains("adaptation")) {
    const auto& a = doc["adaptation"];
    if (!a.is_object()) {
      bad("adaptation", "expected an object");
    } else {
      if (a.contains("chi_nom")) {
        if (!a["chi_nom"].is_number() || !(a["chi_nom"].get<double>() > 0.0) || !(a["chi_nom"].get<double>() < 1.0))
          bad("adaptation.chi_nom", "must be in (0, 1)");
        else
          cfg.adaptation.chi_nom = a["chi_nom"].get<double>();
      }
      if (a.contains("r_desired")) {
        try {
          const Vector3d r = json_io::to_vec3(a["r_desired"], "adaptation.r_desired");
          if ((r.array() == 0.0).any()) bad("adaptation.r_desired", "components must be non-zero");
          cfg.adaptation.r_desired = r;
        } catch (const std::exception& e) {
          bad("adaptation.r_desired", "expected 3 numbers");
        }
      }
      if (a.contains("expert_seed")) {
        if (!a["expert_seed"].is_number_integer() || a["expert_seed"].get<long long>() < 0)
          bad("adaptation.expert_seed", "must be a non-negative integer");
        else
          cfg.adaptation.expert_seed = a["expert_seed"].get<std::uint64_t>();
      }
    }
  }

  if (!problems.empty()) {
    std::ostringstream msg;
    msg << "invalid experiment config:";
    for (const auto& p : problems) msg << "\n  " << p;
    throw ConfigError(msg.str());
  }
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_experiment_config(doc);
}

/// Config with every default filled in, as written next to the logs.
inline nlohmann::json resolved_config(const ExperimentConfig& cfg) {
  using nlohmann::json;
  json courses = json::array();
  for (std::size_t i = 0; i < cfg.course_ids.size(); ++i)
    courses.push_back(cfg.course_docs[i].is_null() ? json(cfg.course_ids[i]) : cfg.course_docs[i]);
  json edits = json::array();
  for (const auto& e : cfg.edits)
    edits.push_back({{"after_trial", e.after_trial},
                     {"factor", std::string(factor_name(e.factor))},
                     {"direction", detail::edit_dir_name(e.direction)}});
  json doc = json_io::sim_params(cfg.params);
  doc["version"] = kConfigSchemaVersion;
  doc["mode"] = mode_name(cfg.mode);
  doc["sessions"] = cfg.sessions;
  doc["trials_per_session"] = cfg.trials_per_session;
  doc["courses"] = courses;
  doc["policy"] = {{"name", cfg.policy.name},
                   {"lookahead", cfg.policy.lookahead},
                   {"nominal_speed", cfg.policy.nominal_speed},
                   {"tremor_amplitude", cfg.policy.tremor_amplitude},
                   {"tremor_frequency", cfg.policy.tremor_frequency},
                   {"reaction_delay", cfg.policy.reaction_delay}};
  doc["seeds"] = cfg.seeds;
  doc["factors"] = json_io::factors(cfg.factors);
  doc["edits"] = edits;
  json adapt = {{"chi_nom", cfg.adaptation.chi_nom}, {"expert_seed", cfg.adaptation.expert_seed}};
  if (cfg.adaptation.r_desired) adapt["r_desired"] = json_io::vec(*cfg.adaptation.r_desired);
  doc["adaptation"] = adapt;
  return doc;
}

inline WireCourse resolve_course(const ExperimentConfig& cfg, int session_index) {
  const auto i = static_cast<std::size_t>(session_index);
  return cfg.course_docs[i].is_null() ? builtin_course(cfg.course_ids[i]) : load_course(cfg.course_docs[i]);
}

/// Expert demonstration used to derive r_d: the expert preset on the
/// training course with strong assistance. A short per-trial time limit
/// does not cut the demonstration below the default one.
inline TrialLog run_expert_demonstration(const ExperimentConfig& cfg) {
  const FactorSet assisted = FactorSet::from_values(0.5, 0.9, 0.5, 1.0, cfg.factors.responsiveness());
  SimParams params = cfg.params;
  params.time_limit = std::max(params.time_limit, SimParams{}.time_limit);
  TrialLog log = run_trial(Mode::ScUser, builtin_course("training"), assisted, operator_preset("expert"),
                           cfg.adaptation.expert_seed, params);
  log.header.input_source = "policy:expert";
  return log;
}

struct TrialSummary {
  int session = 0;  // 1-based
  int trial = 0;    // 1-based within the session
  std::string course;
  std::uint64_t seed = 0;
  FactorSet factors;
  Theta theta;
  ArbitrationMatrix arbitration;
  Metrics metrics;
  std::string log_file;
};

struct ExperimentResult {
  std::vector<TrialSummary> trials;
  std::optional<Eigen::Vector3d> r_desired;
  std::vector<std::string> warnings;
};

struct ExperimentHooks {
  /// Replaces the per-trial performance error fed to the sc adaptation.
  std::function<Eigen::Vector3d(const TrialLog&)> trial_error;
  /// Called with every finished trial (e.g. for progress output).
  std::function<void(const TrialSummary&)> on_trial;
};

inline nlohmann::json summary_json(const TrialSummary& s, Mode mode) {
  nlohmann::json j = json_io::metrics(s.metrics);
  j["session"] = s.session;
  j["trial"] = s.trial;
  j["mode"] = mode_name(mode);
  j["course"] = s.course;
  j["seed"] = s.seed;
  j["factors"] = json_io::factors(s.factors);
  j["theta"] = {s.theta.v[0], s.theta.v[1], s.theta.v[2]};
  j["alpha"] = json_io::vec(s.arbitration.alpha);
  j["log"] = s.log_file;
  return j;
}

/// Runs every session in order and writes, under `out_dir`:
///   resolved_config.json, summary.jsonl, trials/sS_tT.jsonl, and
///   expert.jsonl when r_d had to be derived.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                                       const ExperimentHooks& hooks = {}) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir / "trials");
  ExperimentResult result;

  AdaptState adapt;
  adapt.theta = theta_from_factors(cfg.factors);
  adapt.chi_nom = cfg.adaptation.chi_nom;
  ExperimentConfig resolved = cfg;
  if (cfg.mode == Mode::Sc) {
    if (cfg.adaptation.r_desired) {
      adapt.r_desired = *cfg.adaptation.r_desired;
    } else {
      const TrialLog expert = run_expert_demonstration(cfg);
      std::ofstream ex(out_dir / "expert.jsonl");
      write_jsonl(ex, expert);
      const ExpertReference ref = expert_reference(expert);
      if (ref.degenerate)
        result.warnings.push_back("expert reference has a near-zero component; adaptation divides by it");
      adapt.r_desired = ref.r_desired;
      resolved.adaptation.r_desired = ref.r_desired;
    }
    result.r_desired = adapt.r_desired;
  }
  {
    std::ofstream rc(out_dir / "resolved_config.json");
    rc << resolved_config(resolved).dump(2) << '\n';
  }

  std::ofstream summary(out_dir / "summary.jsonl");
  FactorSet factors = cfg.factors;
  int global = 0;
  for (int s = 0; s < cfg.sessions; ++s) {
    const WireCourse course = resolve_course(cfg, s);
    for (int t = 0; t < cfg.trials_per_session; ++t, ++global) {
      const std::uint64_t seed = cfg.seeds[static_cast<std::size_t>(global)];
      const std::optional<Theta> theta =
          cfg.mode == Mode::Sc ? std::optional<Theta>(adapt.theta) : std::nullopt;
      TrialLog log = run_trial(cfg.mode, course, factors, cfg.policy, seed, cfg.params, theta);
      log.header.session = s + 1;
      log.header.trial = t + 1;

      TrialSummary sum;
      sum.session = s + 1;
      sum.trial = t + 1;
      sum.course = course.name();
      sum.seed = seed;
      sum.factors = log.header.factors;
      sum.theta = log.header.theta;
      sum.arbitration = log.header.arbitration;
      sum.metrics = compute_metrics(log);
      sum.log_file = "trials/s" + std::to_string(s + 1) + "_t" + std::to_string(t + 1) + ".jsonl";
      {
        std::ofstream lf(out_dir / sum.log_file);
        write_jsonl(lf, log);
      }
      summary << summary_json(sum, cfg.mode).dump() << '\n';
      if (hooks.on_trial) hooks.on_trial(sum);
      result.trials.push_back(sum);

      // Between trials: the only place arbitration may change.
      if (cfg.mode == Mode::Sc) {
        const Eigen::Vector3d r = hooks.trial_error ? hooks.trial_error(log) : trial_error(mean_wrench(log));
        adapt = update_theta(adapt, r);
      } else if (cfg.mode == Mode::ScUser) {
        for (const auto& e : cfg.edits)
          if (e.after_trial == global + 1) factors = apply_factor_edit(factors, e.factor, e.direction);
      }
    }
  }
  return result;
}

}  // namespace buzzwire
