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

// buzzwire: run experiments, recompute metrics, serve the live gateway,
// list built-in courses.

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "buzzwire/buzzwire.hpp"
#include "buzzwire/gateway_server.hpp"

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

int cmd_run(const std::string& config, const std::string& out, bool quiet) {
  const auto cfg = buzzwire::load_experiment_config(config);
  buzzwire::ExperimentHooks hooks;
  if (!quiet) {
    hooks.on_trial = [](const buzzwire::TrialSummary& s) {
      std::cout << "session " << s.session << " trial " << s.trial << " [" << s.course
                << "] outcome=" << buzzwire::outcome_name(s.metrics.outcome)
                << " collisions=" << s.metrics.collisions;
      if (s.metrics.time_to_success) std::cout << " time=" << *s.metrics.time_to_success << "s";
      std::cout << '\n';
    };
  }
  const auto result = buzzwire::run_experiment(cfg, out, hooks);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  if (!quiet) std::cout << result.trials.size() << " trials written to " << out << '\n';
  return 0;
}

int cmd_metrics(const std::vector<std::string>& logs) {
  int status = 0;
  for (const auto& path : logs) {
    std::ifstream in(path);
    if (!in) {
      std::cerr << path << ": cannot open\n";
      status = 1;
      continue;
    }
    try {
      const auto log = buzzwire::read_jsonl(in);
      auto j = buzzwire::json_io::metrics(buzzwire::compute_metrics(log));
      j["log"] = path;
      std::cout << j.dump() << '\n';
    } catch (const std::exception& e) {
      std::cerr << path << ": " << e.what() << '\n';
      status = 1;
    }
  }
  return status;
}

int cmd_serve(const std::string& host, unsigned short port, const std::string& config,
              const std::string& log_dir) {
  buzzwire::ExperimentConfig cfg;
  if (!config.empty()) {
    cfg = buzzwire::load_experiment_config(config);
  } else {
    cfg = buzzwire::parse_experiment_config({{"version", 1}, {"mode", "sc_user"}});
  }
  std::optional<std::filesystem::path> dir;
  if (!log_dir.empty()) dir = log_dir;
  buzzwire::LiveSession session(cfg, dir);
  buzzwire::GatewayServer server(session, {host, port});
  server.start();
  std::cout << "listening on ws://" << host << ":" << server.port() << "/ws (health: /healthz)" << std::endl;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  std::cout << session.completed().size() << " live trials completed\n";
  return 0;
}

int cmd_courses(const std::string& dump) {
  if (!dump.empty()) {
    std::cout << buzzwire::course_descriptor(buzzwire::builtin_course(dump)).dump(2) << '\n';
    return 0;
  }
  for (const auto& id : buzzwire::builtin_course_ids()) {
    const auto c = buzzwire::builtin_course(id);
    std::cout << id << "  length=" << c.total_length() << " m  wire_radius=" << c.wire_radius() << " m\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"buzz-wire shared-control simulator"};
  app.require_subcommand(1);

  std::string config, out = "out";
  bool quiet = false;
  auto* run = app.add_subcommand("run", "run a headless experiment from a config file");
  run->add_option("-c,--config", config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--out", out, "output directory")->capture_default_str();
  run->add_flag("-q,--quiet", quiet, "no per-trial output");

  std::vector<std::string> logs;
  auto* metrics = app.add_subcommand("metrics", "recompute metrics from trial logs");
  metrics->add_option("logs", logs, "JSONL trial logs")->required();

  std::string host = "127.0.0.1", serve_config, log_dir;
  unsigned short port = 8765;
  auto* serve = app.add_subcommand("serve", "start the live gateway (WebSocket /ws, HTTP /healthz)");
  serve->add_option("--host", host, "listen address")->capture_default_str();
  serve->add_option("-p,--port", port, "listen port (0 = any free port)")->capture_default_str();
  serve->add_option("-c,--config", serve_config, "experiment config (JSON); default: sc_user on training")
      ->check(CLI::ExistingFile);
  serve->add_option("--log-dir", log_dir, "write live trial logs here");

  std::string dump;
  auto* courses = app.add_subcommand("courses", "list built-in courses");
  courses->add_option("--dump", dump, "print one course's descriptor as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config, out, quiet);
    if (*metrics) return cmd_metrics(logs);
    if (*serve) return cmd_serve(host, port, serve_config, log_dir);
    if (*courses) return cmd_courses(dump);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
