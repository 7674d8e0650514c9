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

#include "maevo/lifecycle.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "maevo/errors.hpp"

namespace maevo {
namespace {

constexpr double kGainTieTolerance = 1e-9;
/// K * N at or below which gradient steps are preferred over coordinate sweeps.
constexpr int kGradientProblemSize = 64;

std::string format_angles(const DoASet& doas) {
  std::ostringstream os;
  os.precision(2);
  os << std::fixed << '[';
  for (std::size_t k = 0; k < doas.size(); ++k) os << (k ? ", " : "") << doas[k];
  os << ']';
  return os.str();
}

std::string format_db(double db) {
  std::ostringstream os;
  os.precision(4);
  os << std::fixed << db << " dB";
  return os.str();
}

AgentReport ok_report(AgentRole role, std::string message, std::vector<std::string> produced) {
  return AgentReport{role, true, {}, std::move(message), std::move(produced)};
}

AgentReport fail_report(AgentRole role, std::string reason) {
  AgentReport r{role, false, reason, std::string(to_string(role)) + " failed: " + reason, {}};
  return r;
}

AgentReport run_data_collection(Blackboard& bb, LifecycleServices& services) {
  CsiSnapshotBatch batch = services.collect_csi(bb.step_index, AgentRole::DataCollection, bb.retries);
  DoaEstimate estimate = services.estimate(batch, bb.num_sources);
  std::string message = "estimated DoAs " + format_angles(estimate.angles) + " from " +
                        std::to_string(batch.num_snapshots) + " CSI snapshots";
  if (estimate.low_confidence) message += " (low confidence)";
  bb.latest_csi = std::move(batch);
  bb.latest_estimate = std::move(estimate);
  return ok_report(AgentRole::DataCollection, std::move(message), {"latest_csi", "latest_estimate"});
}

AgentReport run_model_selection(Blackboard& bb, const SupervisorPolicy& policy) {
  if (!bb.latest_estimate) return fail_report(AgentRole::ModelSelection, "latest_estimate missing");
  const int problem_size = bb.num_sources * bb.constraint_set.num_elements;
  Strategy s = problem_size <= kGradientProblemSize ? Strategy::GradientAlternating : Strategy::CoordinateSearch;
  if (policy.forced_strategy) s = *policy.forced_strategy;
  bb.selected_strategy = s;
  return ok_report(AgentRole::ModelSelection,
                   "selected " + std::string(to_string(s)) + " for K*N = " + std::to_string(problem_size),
                   {"selected_strategy"});
}

AgentReport run_training(Blackboard& bb, LifecycleServices& services) {
  if (!bb.latest_estimate) return fail_report(AgentRole::Training, "latest_estimate missing");
  if (!bb.selected_strategy) return fail_report(AgentRole::Training, "selected_strategy missing");
  const int round = bb.open_event ? bb.open_event->training_rounds : 0;
  BeamformingSolution candidate =
      services.optimize(bb.latest_estimate->angles, *bb.selected_strategy, bb.step_index, round);
  if (bb.open_event) ++bb.open_event->training_rounds;
  if (!bb.best_candidate || candidate.gain_linear > bb.best_candidate->gain_linear) bb.best_candidate = candidate;
  std::string message = "trained candidate with gain " + format_db(candidate.gain_db) + " (round " +
                        std::to_string(round + 1) + ")";
  bb.candidate_solution = std::move(candidate);
  return ok_report(AgentRole::Training, std::move(message), {"candidate_solution"});
}

AgentReport run_evaluation(Blackboard& bb, LifecycleServices& services, const SupervisorPolicy& policy) {
  if (!bb.candidate_solution) return fail_report(AgentRole::Evaluation, "candidate_solution missing");
  if (!bb.latest_estimate) return fail_report(AgentRole::Evaluation, "latest_estimate missing");
  BeamformingSolution baseline = services.baseline(bb.latest_estimate->angles);
  const BeamformingSolution& candidate = *bb.candidate_solution;
  const double pre = bb.open_event ? bb.open_event->pre_gain_db : -std::numeric_limits<double>::infinity();

  EvaluationVerdict verdict{true, {}};
  if (candidate.gain_db < baseline.gain_db - kGainTieTolerance) {
    verdict = {false, "candidate " + format_db(candidate.gain_db) + " below baseline " + format_db(baseline.gain_db)};
  } else if (candidate.gain_db < pre - policy.evaluation_margin_db) {
    verdict = {false, "candidate " + format_db(candidate.gain_db) + " below pre-trigger gain " + format_db(pre)};
  }
  std::ostringstream msg;
  msg << (verdict.pass ? "pass" : "fail") << ": gain " << format_db(candidate.gain_db) << " vs baseline "
      << format_db(baseline.gain_db) << ", converged=" << (candidate.converged ? "yes" : "no")
      << ", iterations=" << candidate.iterations;
  if (!verdict.pass) msg << " (" << verdict.reason << ')';
  bb.baseline_solution = std::move(baseline);
  bb.evaluation_verdict = std::move(verdict);
  return ok_report(AgentRole::Evaluation, msg.str(), {"baseline_solution", "evaluation_verdict"});
}

AgentReport run_deployment(Blackboard& bb) {
  if (!bb.candidate_solution) return fail_report(AgentRole::Deployment, "candidate_solution missing");
  const double post = bb.candidate_solution->gain_db;
  bb.deployed_solution = std::move(*bb.candidate_solution);
  bb.candidate_solution.reset();
  bb.evaluation_verdict.reset();
  bb.best_candidate.reset();
  std::vector<std::string> produced{"deployed_solution", "candidate_solution"};
  if (bb.open_event) {
    EvolutionEvent event = std::move(*bb.open_event);
    bb.open_event.reset();
    event.post_gain_db = post;
    event.baseline_gain_db = bb.baseline_solution ? bb.baseline_solution->gain_db : event.pre_gain_db;
    bb.event_log.append(std::move(event));
    produced.push_back("event_log");
  }
  bb.last_deployed_gain_db = post;
  bb.evolved_this_step = true;
  return ok_report(AgentRole::Deployment, "deployed solution with gain " + format_db(post), std::move(produced));
}

AgentReport run_monitoring(Blackboard& bb, LifecycleServices& services, const SupervisorPolicy& policy) {
  CsiSnapshotBatch batch = services.collect_csi(bb.step_index, AgentRole::Monitoring, bb.retries);
  DoaEstimate estimate = services.estimate(batch, bb.num_sources);
  BeamformingSolution baseline = services.baseline(estimate.angles);
  const double baseline_db = baseline.gain_db;
  double deployed_db = baseline_db;
  if (bb.deployed_solution) {
    deployed_db = sum_beam_gain(bb.deployed_solution->geometry, bb.deployed_solution->weights, estimate.angles).db;
  }
  const double reference = bb.last_deployed_gain_db.value_or(deployed_db);
  TriggerDecision decision = monitoring_check(deployed_db, baseline_db, reference, policy.relative_drop_threshold_db);
  if (bb.hardware_change_pending) decision = {true, TriggerReason::HardwareChange};

  std::ostringstream msg;
  msg << "deployed " << format_db(deployed_db) << " vs fixed " << format_db(baseline_db) << " at "
      << format_angles(estimate.angles);
  if (decision.trigger) msg << "; trigger " << to_string(*decision.reason);
  bb.baseline_solution = std::move(baseline);
  bb.monitoring = MonitoringSnapshot{std::move(estimate), deployed_db, baseline_db};
  bb.trigger = decision;
  return ok_report(AgentRole::Monitoring, msg.str(), {"baseline_solution", "monitoring", "trigger"});
}

void clear_cycle_state(Blackboard& bb) {
  bb.candidate_solution.reset();
  bb.evaluation_verdict.reset();
  bb.best_candidate.reset();
  bb.selected_strategy.reset();
}

}  // namespace

Stage stage_of(AgentRole role) {
  switch (role) {
    case AgentRole::DataCollection: return Stage::DataCollection;
    case AgentRole::ModelSelection: return Stage::ModelSelection;
    case AgentRole::Training: return Stage::Training;
    case AgentRole::Evaluation: return Stage::Evaluation;
    case AgentRole::Deployment: return Stage::Deployment;
    case AgentRole::Monitoring: return Stage::Monitoring;
  }
  return Stage::Idle;
}

std::optional<AgentRole> role_of(Stage stage) {
  switch (stage) {
    case Stage::Idle: return std::nullopt;
    case Stage::DataCollection: return AgentRole::DataCollection;
    case Stage::ModelSelection: return AgentRole::ModelSelection;
    case Stage::Training: return AgentRole::Training;
    case Stage::Evaluation: return AgentRole::Evaluation;
    case Stage::Deployment: return AgentRole::Deployment;
    case Stage::Monitoring: return AgentRole::Monitoring;
  }
  return std::nullopt;
}

std::string_view to_string(AgentRole role) { return to_string(stage_of(role)); }

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::Idle: return "Idle";
    case Stage::DataCollection: return "DataCollection";
    case Stage::ModelSelection: return "ModelSelection";
    case Stage::Training: return "Training";
    case Stage::Evaluation: return "Evaluation";
    case Stage::Deployment: return "Deployment";
    case Stage::Monitoring: return "Monitoring";
  }
  return "?";
}

std::optional<Stage> parse_stage(std::string_view name) {
  for (Stage s : {Stage::Idle, Stage::DataCollection, Stage::ModelSelection, Stage::Training, Stage::Evaluation,
                  Stage::Deployment, Stage::Monitoring}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

std::string_view to_string(TriggerReason reason) {
  switch (reason) {
    case TriggerReason::BelowBaseline: return "BelowBaseline";
    case TriggerReason::RelativeDrop: return "RelativeDrop";
    case TriggerReason::HardwareChange: return "HardwareChange";
  }
  return "?";
}

std::optional<TriggerReason> parse_trigger_reason(std::string_view name) {
  for (auto r : {TriggerReason::BelowBaseline, TriggerReason::RelativeDrop, TriggerReason::HardwareChange}) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

std::string_view to_string(EventOutcome outcome) {
  switch (outcome) {
    case EventOutcome::Completed: return "Completed";
    case EventOutcome::Degraded: return "Degraded";
    case EventOutcome::Aborted: return "Aborted";
  }
  return "?";
}

std::optional<EventOutcome> parse_event_outcome(std::string_view name) {
  for (auto o : {EventOutcome::Completed, EventOutcome::Degraded, EventOutcome::Aborted}) {
    if (to_string(o) == name) return o;
  }
  return std::nullopt;
}

TriggerDecision monitoring_check(double deployed_gain_db, double baseline_gain_db, double last_deployed_gain_db,
                                 double relative_drop_threshold_db) {
  if (deployed_gain_db < baseline_gain_db) return {true, TriggerReason::BelowBaseline};
  if (last_deployed_gain_db - deployed_gain_db > relative_drop_threshold_db) return {true, TriggerReason::RelativeDrop};
  return {false, std::nullopt};
}

SupervisorPolicy SupervisorPolicy::from(const ScenarioConfig& scenario) {
  SupervisorPolicy p;
  p.max_training_rounds = scenario.monitoring.max_training_rounds;
  p.relative_drop_threshold_db = scenario.monitoring.relative_drop_threshold_db;
  p.evaluation_margin_db = scenario.monitoring.evaluation_margin_db;
  p.forced_strategy = scenario.forced_strategy;
  return p;
}

std::vector<DoASet> episode_trajectory(const ScenarioConfig& scenario) {
  TrajectoryConfig t = scenario.trajectory;
  t.seed = derive_seed(scenario.seed, 0);
  return generate_trajectory(t);
}

SimulatedServices::SimulatedServices(const ScenarioConfig& config)
    : config_(config),
      trajectory_(episode_trajectory(config)),
      sensing_geometry_(ArrayGeometry::uniform(config.constraints)) {}

CsiSnapshotBatch SimulatedServices::collect_csi(int step, AgentRole requester, int attempt) {
  const auto& truth = trajectory_.at(static_cast<std::size_t>(step));
  const std::uint64_t seed = derive_seed(config_.seed, 1, static_cast<std::uint64_t>(step),
                                         static_cast<std::uint64_t>(requester) * 16 + static_cast<std::uint64_t>(attempt));
  return synthesize_csi(sensing_geometry_, truth, config_.csi.snr_db, config_.csi.num_snapshots, seed);
}

DoaEstimate SimulatedServices::estimate(const CsiSnapshotBatch& batch, int num_sources) {
  return estimate_doas(sample_covariance(batch), sensing_geometry_, num_sources, config_.estimation);
}

BeamformingSolution SimulatedServices::optimize(const DoASet& doas, Strategy strategy, int step, int training_round) {
  OptimizerConfig cfg = config_.optimizer;
  cfg.strategy = strategy;
  cfg.seed = derive_seed(config_.seed, 2, static_cast<std::uint64_t>(step), static_cast<std::uint64_t>(training_round));
  return optimize_movable(doas, cfg, config_.constraints);
}

BeamformingSolution SimulatedServices::baseline(const DoASet& doas) {
  return fixed_baseline(doas, config_.constraints);
}

AgentReport agent_execute(AgentRole role, Blackboard& bb, LifecycleServices& services, const SupervisorPolicy& policy) {
  if (bb.stage != stage_of(role)) {
    throw ProtocolError(std::string(to_string(role)) + " invoked while the supervisor is at " +
                        std::string(to_string(bb.stage)));
  }
  if (bb.open_event && role != AgentRole::Monitoring) bb.open_event->agent_sequence.push_back(role);
  try {
    switch (role) {
      case AgentRole::DataCollection: return run_data_collection(bb, services);
      case AgentRole::ModelSelection: return run_model_selection(bb, policy);
      case AgentRole::Training: return run_training(bb, services);
      case AgentRole::Evaluation: return run_evaluation(bb, services, policy);
      case AgentRole::Deployment: return run_deployment(bb);
      case AgentRole::Monitoring: return run_monitoring(bb, services, policy);
    }
  } catch (const std::exception& e) {
    return fail_report(role, e.what());
  }
  return fail_report(role, "unknown role");
}

RoutePlan plan_route(const Blackboard& bb, const AgentReport& report, const SupervisorPolicy& policy) {
  if (bb.stage != stage_of(report.role)) {
    throw ProtocolError("report from " + std::string(to_string(report.role)) + " while the supervisor is at " +
                        std::string(to_string(bb.stage)));
  }
  if (!report.ok) {
    if (bb.retries == 0) return {stage_of(report.role), RouteEffect::Retry};
    return {Stage::Idle, RouteEffect::Abort};
  }
  switch (report.role) {
    case AgentRole::Monitoring:
      return bb.trigger.trigger ? RoutePlan{Stage::DataCollection, RouteEffect::OpenEvent}
                                : RoutePlan{Stage::Idle, RouteEffect::Finish};
    case AgentRole::DataCollection: return {Stage::ModelSelection, RouteEffect::Advance};
    case AgentRole::ModelSelection: return {Stage::Training, RouteEffect::Advance};
    case AgentRole::Training: return {Stage::Evaluation, RouteEffect::Advance};
    case AgentRole::Evaluation: {
      if (bb.evaluation_verdict && bb.evaluation_verdict->pass) return {Stage::Deployment, RouteEffect::Advance};
      const int rounds = bb.open_event ? bb.open_event->training_rounds : 0;
      if (rounds >= policy.max_training_rounds) return {Stage::Deployment, RouteEffect::ForceDeploy};
      return {Stage::Training, RouteEffect::RetrainRound};
    }
    case AgentRole::Deployment: return {Stage::Idle, RouteEffect::Finish};
  }
  return {Stage::Idle, RouteEffect::Finish};
}

void apply_route(Blackboard& bb, const AgentReport& report, const RoutePlan& plan) {
  switch (plan.effect) {
    case RouteEffect::Retry:
      bb.retries = 1;
      bb.error_log.append("step " + std::to_string(bb.step_index) + ": retrying " +
                          std::string(to_string(report.role)) + " after failure: " + report.reason);
      break;
    case RouteEffect::Abort: {
      bb.retries = 0;
      bb.error_log.append("step " + std::to_string(bb.step_index) + ": aborted at " +
                          std::string(to_string(report.role)) + ": " + report.reason);
      if (bb.open_event) {
        EvolutionEvent event = std::move(*bb.open_event);
        bb.open_event.reset();
        event.outcome = EventOutcome::Aborted;
        event.error = std::string(to_string(report.role)) + ": " + report.reason;
        event.post_gain_db = event.pre_gain_db;
        event.baseline_gain_db = bb.monitoring ? bb.monitoring->baseline_gain_db : event.pre_gain_db;
        if (event.reason == TriggerReason::HardwareChange) bb.hardware_change_pending = true;
        bb.event_log.append(std::move(event));
      }
      clear_cycle_state(bb);
      break;
    }
    case RouteEffect::OpenEvent: {
      bb.retries = 0;
      EvolutionEvent event;
      event.trigger_step = bb.step_index;
      event.reason = bb.trigger.reason.value_or(TriggerReason::BelowBaseline);
      event.pre_gain_db = bb.monitoring ? bb.monitoring->deployed_gain_db : 0.0;
      event.baseline_gain_db = bb.monitoring ? bb.monitoring->baseline_gain_db : 0.0;
      bb.open_event = std::move(event);
      bb.hardware_change_pending = false;
      clear_cycle_state(bb);
      break;
    }
    case RouteEffect::ForceDeploy:
      bb.retries = 0;
      if (bb.best_candidate) bb.candidate_solution = bb.best_candidate;
      if (bb.open_event) bb.open_event->outcome = EventOutcome::Degraded;
      break;
    case RouteEffect::RetrainRound:
    case RouteEffect::Advance:
    case RouteEffect::Finish:
      bb.retries = 0;
      break;
  }
  bb.stage = plan.next;
}

Stage supervisor_next(Blackboard& bb, const AgentReport& report, const SupervisorPolicy& policy) {
  const RoutePlan plan = plan_route(bb, report, policy);
  apply_route(bb, report, plan);
  return plan.next;
}

EpisodeResult run_episode(const ScenarioConfig& scenario) {
  SimulatedServices services(scenario);
  DeterministicRouter router;
  return run_episode(scenario, services, router);
}

EpisodeResult run_episode(const ScenarioConfig& scenario, LifecycleServices& services, Router& router) {
  scenario.validate();
  const SupervisorPolicy policy = SupervisorPolicy::from(scenario);
  const std::vector<DoASet> truth = episode_trajectory(scenario);

  Blackboard bb;
  bb.constraint_set = scenario.constraints;
  bb.num_sources = static_cast<int>(scenario.trajectory.initial_angles.size());
  EpisodeResult result;

  // Each role runs at most 2x (retry) per pass; Training/Evaluation repeat per round.
  const int max_invocations_per_step = 2 * (6 + 2 * (policy.max_training_rounds + 1));

  for (int step = 0; step < scenario.trajectory.num_steps; ++step) {
    bb.step_index = step;
    bb.evolved_this_step = false;
    bb.trigger = {};
    bb.monitoring.reset();
    if (step == 0) bb.hardware_change_pending = true;
    bb.stage = Stage::Monitoring;

    for (int guard = 0;; ++guard) {
      if (guard >= max_invocations_per_step) {
        throw std::logic_error("supervisor failed to reach Idle within one step");
      }
      const AgentRole role = *role_of(bb.stage);
      const AgentReport report = agent_execute(role, bb, services, policy);
      result.invocations.push_back(role);
      if (router.route(bb, report, policy) == Stage::Idle) break;
    }

    const DoASet& true_angles = truth[static_cast<std::size_t>(step)];
    MetricsRecord record{.step = step, .true_angles = true_angles, .estimated_angles = true_angles};
    if (bb.evolved_this_step && bb.latest_estimate && !bb.event_log.empty()) {
      record.estimated_angles = bb.latest_estimate->angles;
      record.movable_gain_db = bb.event_log.back().post_gain_db;
      record.fixed_gain_db = bb.event_log.back().baseline_gain_db;
      record.evolved = true;
    } else if (bb.monitoring) {
      record.estimated_angles = bb.monitoring->estimate.angles;
      record.movable_gain_db = bb.monitoring->deployed_gain_db;
      record.fixed_gain_db = bb.monitoring->baseline_gain_db;
    } else {
      record.movable_gain_db = std::numeric_limits<double>::quiet_NaN();
      record.fixed_gain_db = std::numeric_limits<double>::quiet_NaN();
    }
    if (bb.trigger.trigger) record.trigger_reason = bb.trigger.reason;
    bb.metrics_history.append(std::move(record));
  }

  result.metrics_history = bb.metrics_history.items();
  result.event_log = bb.event_log.items();
  result.errors = bb.error_log.items();
  return result;
}

}  // namespace maevo
