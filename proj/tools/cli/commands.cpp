// Copyright 2026 The maevo Authors
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

#include "cli/commands.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "maevo/lifecycle.hpp"
#include "maevo/llm.hpp"
#include "maevo/optimizer.hpp"
#include "maevo/report.hpp"
#include "maevo/scenario.hpp"

namespace maevo::cli {
namespace {

std::string join_exact(const std::vector<double>& values, double scale = 1.0) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += exact(values[i] / scale);
  }
  return out;
}

void print_solution(std::ostream& out, const BeamformingSolution& s) {
  out << "strategy: " << to_string(s.strategy_used) << '\n'
      << "positions_wavelengths: " << join_exact(s.geometry.positions(), s.geometry.wavelength()) << '\n'
      << "gain_db: " << exact(s.gain_db) << '\n'
      << "gain_linear: " << exact(s.gain_linear) << '\n'
      << "iterations: " << s.iterations << '\n'
      << "converged: " << (s.converged ? "true" : "false") << '\n';
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) return false;
  f << content;
  return static_cast<bool>(f.flush());
}

ScenarioConfig load_scenario(const RunOptions& o) {
  ScenarioConfig cfg = default_scenario();
  if (o.config_path) {
    std::ifstream in(*o.config_path);
    if (!in) throw ScenarioError("--config", "cannot read " + *o.config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    cfg = parse_scenario(buf.str());
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.steps) cfg.trajectory.num_steps = *o.steps;
  if (o.snr_db) cfg.csi.snr_db = *o.snr_db;
  if (o.strategy == "auto") {
    cfg.forced_strategy.reset();
  } else if (o.strategy != "config") {
    const auto s = parse_strategy(o.strategy);
    if (!s || *s == Strategy::FixedBaseline) {
      throw ScenarioError("--strategy", "expected auto, gradient or coordinate");
    }
    cfg.forced_strategy = s;
  }
  if (o.llm) cfg.llm.enabled = true;
  cfg.validate();
  return cfg;
}

std::optional<BeamformingSolution> solve_for_strategy(const SolveOptions& o, const DoASet& doas, Strategy s) {
  OptimizerConfig cfg;
  cfg.restarts = o.restarts;
  cfg.seed = o.seed;
  cfg.max_outer_iterations = o.max_outer_iterations;
  cfg.step_size = o.step_size;
  cfg.strategy = s;
  return optimize_movable(doas, cfg, o.constraints);
}

}  // namespace

std::string exact(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err, ChatTransport* transport) {
  ScenarioConfig cfg;
  std::optional<EndpointConfig> endpoint;
  try {
    cfg = load_scenario(options);
    if (cfg.llm.enabled) endpoint = EndpointConfig::from_settings(cfg.llm);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  for (const auto& path : {options.metrics_out, options.events_out}) {
    std::ofstream probe(path, std::ios::app);
    if (!probe) {
      err << "error: cannot write " << path << '\n';
      return kExitOutput;
    }
  }

  EpisodeResult result;
  std::optional<std::pair<std::size_t, std::size_t>> routing;
  try {
    SimulatedServices services(cfg);
    if (endpoint) {
      HttpChatTransport http;
      LlmRouter router(*endpoint, transport ? *transport : static_cast<ChatTransport&>(http));
      result = run_episode(cfg, services, router);
      routing = std::make_pair(router.llm_count(), router.fallback_count());
    } else {
      DeterministicRouter router;
      result = run_episode(cfg, services, router);
    }
  } catch (const std::exception& e) {
    err << "error: episode failed: " << e.what() << '\n';
    return kExitRuntime;
  }

  if (!write_file(options.metrics_out, metrics_to_csv(result.metrics_history))) {
    err << "error: cannot write " << options.metrics_out << '\n';
    return kExitOutput;
  }
  if (!write_file(options.events_out, events_to_json(result.event_log))) {
    err << "error: cannot write " << options.events_out << '\n';
    return kExitOutput;
  }

  if (!options.quiet) {
    std::map<std::string, int> by_reason;
    for (const auto& e : result.event_log) ++by_reason[std::string(to_string(e.reason))];
    out << "steps: " << result.metrics_history.size() << '\n' << "events: " << result.event_log.size();
    for (const auto& [reason, count] : by_reason) out << ' ' << reason << '=' << count;
    out << '\n';
    if (routing) out << "routing: llm=" << routing->first << " fallback=" << routing->second << '\n';
    for (const auto& e : result.errors) out << "logged: " << e << '\n';
    out << "metrics: " << options.metrics_out << '\n' << "events_log: " << options.events_out << '\n';
  }
  return kExitOk;
}

int cmd_optimize(const SolveOptions& o, std::ostream& out, std::ostream& err) {
  try {
    const DoASet doas(o.angles_deg);
    std::optional<BeamformingSolution> best;
    if (o.strategy == "auto") {
      auto gradient = solve_for_strategy(o, doas, Strategy::GradientAlternating);
      auto coordinate = solve_for_strategy(o, doas, Strategy::CoordinateSearch);
      out << "candidate_gain_db: GradientAlternating=" << exact(gradient->gain_db)
          << " CoordinateSearch=" << exact(coordinate->gain_db) << '\n';
      best = coordinate->gain_linear > gradient->gain_linear ? std::move(coordinate) : std::move(gradient);
    } else {
      const auto s = parse_strategy(o.strategy);
      if (!s || *s == Strategy::FixedBaseline) {
        err << "error: --strategy: expected auto, gradient or coordinate\n";
        return kExitConfig;
      }
      best = solve_for_strategy(o, doas, *s);
    }
    print_solution(out, *best);
    out << "baseline_gain_db: " << exact(fixed_baseline(doas, o.constraints).gain_db) << '\n';
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}

int cmd_baseline(const SolveOptions& o, std::ostream& out, std::ostream& err) {
  try {
    const BeamformingSolution s = fixed_baseline(DoASet(o.angles_deg), o.constraints);
    out << "positions_wavelengths: " << join_exact(s.geometry.positions(), s.geometry.wavelength()) << '\n'
        << "gain_db: " << exact(s.gain_db) << '\n'
        << "gain_linear: " << exact(s.gain_linear) << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, ChatTransport* transport) {
  CLI::App app{"maevo: movable-antenna beamforming with a self-evolving agent loop"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario episode and write the gain table and event log");
  run_cmd->add_option("--config", run.config_path, "Scenario JSON file (defaults built in when omitted)");
  run_cmd->add_option("--seed", run.seed, "Override the scenario seed");
  run_cmd->add_option("--steps", run.steps, "Override trajectory.num_steps");
  run_cmd->add_option("--snr", run.snr_db, "Override csi.snr_db");
  run_cmd->add_option("--strategy", run.strategy, "auto | gradient | coordinate (default: from config)");
  run_cmd->add_flag("--llm", run.llm, "Route the supervisor through the configured chat endpoint");
  run_cmd->add_flag("--quiet", run.quiet, "Suppress the summary");
  run_cmd->add_option("--metrics-out", run.metrics_out, "CSV gain table path")->capture_default_str();
  run_cmd->add_option("--events-out", run.events_out, "JSON event log path")->capture_default_str();

  SolveOptions solve;
  double wavelength = kDefaultWavelength;
  std::optional<double> min_spacing;
  std::optional<double> position_bound;
  auto add_array_options = [&](CLI::App* cmd) {
    cmd->add_option("--angles", solve.angles_deg, "Arrival angles in degrees, comma separated")
        ->required()
        ->delimiter(',');
    cmd->add_option("--wavelength", wavelength, "Wavelength in meters")->capture_default_str();
    cmd->add_option("--num-elements", solve.constraints.num_elements, "Number of elements")->capture_default_str();
    cmd->add_option("--min-spacing", min_spacing, "Minimum spacing in meters (default lambda/2)");
    cmd->add_option("--position-bound", position_bound, "Position bound in meters (default 5 lambda)");
  };
  auto* opt_cmd = app.add_subcommand("optimize", "Jointly optimize positions and weights for fixed angles");
  add_array_options(opt_cmd);
  opt_cmd->add_option("--strategy", solve.strategy, "auto | gradient | coordinate")->capture_default_str();
  opt_cmd->add_option("--restarts", solve.restarts, "Multi-start count")->capture_default_str();
  opt_cmd->add_option("--seed", solve.seed, "Restart seed")->capture_default_str();
  opt_cmd->add_option("--max-iterations", solve.max_outer_iterations, "Outer iterations per restart")
      ->capture_default_str();
  opt_cmd->add_option("--step-size", solve.step_size, "Gradient step in wavelengths")->capture_default_str();
  auto* base_cmd = app.add_subcommand("baseline", "Fixed uniform-array gain with optimal weights");
  add_array_options(base_cmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  if (*run_cmd) return cmd_run(run, out, err, transport);

  solve.constraints = ArrayConstraints::for_wavelength(wavelength, solve.constraints.num_elements);
  if (min_spacing) solve.constraints.min_spacing = *min_spacing;
  if (position_bound) solve.constraints.position_bound = *position_bound;
  if (*opt_cmd) return cmd_optimize(solve, out, err);
  return cmd_baseline(solve, out, err);
}

}  // namespace maevo::cli
