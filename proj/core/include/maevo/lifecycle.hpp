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

#pragma once

// The self-evolving loop. Six role agents share a blackboard; a supervisor
// routes between them, detects degradation against the fixed-array baseline
// and re-runs data collection -> model selection -> training -> evaluation
// -> deployment without outside intervention.

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "maevo/channel.hpp"
#include "maevo/doa.hpp"
#include "maevo/optimizer.hpp"
#include "maevo/scenario.hpp"

namespace maevo {

enum class AgentRole { DataCollection, ModelSelection, Training, Evaluation, Deployment, Monitoring };

inline constexpr std::array<AgentRole, 6> kAgentRoles{
    AgentRole::DataCollection, AgentRole::ModelSelection, AgentRole::Training,
    AgentRole::Evaluation,     AgentRole::Deployment,     AgentRole::Monitoring};

/// Where the supervisor currently points: one of the roles, or Idle.
enum class Stage { Idle, DataCollection, ModelSelection, Training, Evaluation, Deployment, Monitoring };

Stage stage_of(AgentRole role);
std::optional<AgentRole> role_of(Stage stage);
std::string_view to_string(AgentRole role);
std::string_view to_string(Stage stage);
/// Exact, case-sensitive inverse of to_string(Stage).
std::optional<Stage> parse_stage(std::string_view name);

enum class TriggerReason { BelowBaseline, RelativeDrop, HardwareChange };
std::string_view to_string(TriggerReason reason);
std::optional<TriggerReason> parse_trigger_reason(std::string_view name);

enum class EventOutcome {
  Completed,
  /// Deployed the best candidate after exhausting training rounds.
  Degraded,
  Aborted,
};
std::string_view to_string(EventOutcome outcome);
std::optional<EventOutcome> parse_event_outcome(std::string_view name);

/// Vector that only grows. Records are never modified once appended.
template <class T>
class AppendOnlyLog {
 public:
  void append(T item) { items_.push_back(std::move(item)); }
  const T& operator[](std::size_t i) const { return items_[i]; }
  const T& back() const { return items_.back(); }
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  auto begin() const { return items_.cbegin(); }
  auto end() const { return items_.cend(); }
  const std::vector<T>& items() const noexcept { return items_; }

  friend bool operator==(const AppendOnlyLog&, const AppendOnlyLog&) = default;

 private:
  std::vector<T> items_;
};

struct EvolutionEvent {
  int trigger_step = 0;
  TriggerReason reason = TriggerReason::HardwareChange;
  EventOutcome outcome = EventOutcome::Completed;
  double pre_gain_db = 0.0;
  double post_gain_db = 0.0;
  double baseline_gain_db = 0.0;
  std::vector<AgentRole> agent_sequence;
  int training_rounds = 0;
  /// Set for aborted events.
  std::string error;

  friend bool operator==(const EvolutionEvent&, const EvolutionEvent&) = default;
};

/// One row of the per-step gain curve. Gains are evaluated at the
/// estimated angles the system acted on during that step.
struct MetricsRecord {
  int step = 0;
  DoASet true_angles{std::vector<double>{90.0}};
  DoASet estimated_angles{std::vector<double>{90.0}};
  double movable_gain_db = 0.0;
  double fixed_gain_db = 0.0;
  bool evolved = false;
  std::optional<TriggerReason> trigger_reason;

  friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

struct EvaluationVerdict {
  bool pass = false;
  std::string reason;
};

struct TriggerDecision {
  bool trigger = false;
  std::optional<TriggerReason> reason;
};

/// BelowBaseline iff deployed < baseline (strict); otherwise RelativeDrop iff
/// last_deployed - deployed > threshold; otherwise no trigger.
TriggerDecision monitoring_check(double deployed_gain_db, double baseline_gain_db,
                                 double last_deployed_gain_db, double relative_drop_threshold_db = 3.0);

struct MonitoringSnapshot {
  DoaEstimate estimate;
  double deployed_gain_db = 0.0;
  double baseline_gain_db = 0.0;
};

struct Blackboard {
  int step_index = 0;
  int num_sources = 3;
  ArrayConstraints constraint_set;
  std::optional<BeamformingSolution> deployed_solution;
  std::optional<BeamformingSolution> baseline_solution;
  std::optional<DoaEstimate> latest_estimate;
  std::optional<CsiSnapshotBatch> latest_csi;
  std::optional<Strategy> selected_strategy;
  std::optional<BeamformingSolution> candidate_solution;
  std::optional<EvaluationVerdict> evaluation_verdict;
  AppendOnlyLog<MetricsRecord> metrics_history;
  AppendOnlyLog<EvolutionEvent> event_log;
  AppendOnlyLog<std::string> error_log;
  Stage stage = Stage::Idle;

  // Supervisor bookkeeping.
  bool hardware_change_pending = false;
  TriggerDecision trigger;
  std::optional<MonitoringSnapshot> monitoring;
  std::optional<EvolutionEvent> open_event;
  std::optional<BeamformingSolution> best_candidate;
  int retries = 0;
  /// Gain recorded when the current solution was deployed.
  std::optional<double> last_deployed_gain_db;
  /// Set by Deployment, cleared at the start of each step.
  bool evolved_this_step = false;
};

struct AgentReport {
  AgentRole role = AgentRole::Monitoring;
  bool ok = true;
  /// Why the agent failed; empty when ok.
  std::string reason;
  std::string message;
  /// Blackboard fields written by the agent.
  std::vector<std::string> produced;
};

/// Everything agents need from the outside world. The simulated
/// implementation owns the ground-truth trajectory.
class LifecycleServices {
 public:
  virtual ~LifecycleServices() = default;
  virtual CsiSnapshotBatch collect_csi(int step, AgentRole requester, int attempt) = 0;
  virtual DoaEstimate estimate(const CsiSnapshotBatch& batch, int num_sources) = 0;
  virtual BeamformingSolution optimize(const DoASet& doas, Strategy strategy, int step, int training_round) = 0;
  virtual BeamformingSolution baseline(const DoASet& doas) = 0;
};

class SimulatedServices : public LifecycleServices {
 public:
  explicit SimulatedServices(const ScenarioConfig& config);

  const std::vector<DoASet>& trajectory() const noexcept { return trajectory_; }

  CsiSnapshotBatch collect_csi(int step, AgentRole requester, int attempt) override;
  DoaEstimate estimate(const CsiSnapshotBatch& batch, int num_sources) override;
  BeamformingSolution optimize(const DoASet& doas, Strategy strategy, int step, int training_round) override;
  BeamformingSolution baseline(const DoASet& doas) override;

 private:
  ScenarioConfig config_;
  std::vector<DoASet> trajectory_;
  /// CSI is sensed with the uniform reference layout.
  ArrayGeometry sensing_geometry_;
};

struct SupervisorPolicy {
  int max_training_rounds = 5;
  double relative_drop_threshold_db = 3.0;
  double evaluation_margin_db = 0.1;
  /// When set, ModelSelection always picks this strategy.
  std::optional<Strategy> forced_strategy;

  static SupervisorPolicy from(const ScenarioConfig& scenario);
};

/// Ground-truth angles for every step of the scenario.
std::vector<DoASet> episode_trajectory(const ScenarioConfig& scenario);

/// Runs one role against the blackboard. Throws ProtocolError when
/// blackboard.stage != role; every other failure becomes a fail report.
AgentReport agent_execute(AgentRole role, Blackboard& blackboard, LifecycleServices& services,
                          const SupervisorPolicy& policy = {});

enum class RouteEffect { Advance, OpenEvent, Retry, RetrainRound, ForceDeploy, Abort, Finish };

struct RoutePlan {
  Stage next = Stage::Idle;
  RouteEffect effect = RouteEffect::Advance;
};

/// The routing relation: a pure function of the blackboard and the last report.
/// Throws ProtocolError when report.role does not match blackboard.stage.
RoutePlan plan_route(const Blackboard& blackboard, const AgentReport& report, const SupervisorPolicy& policy = {});

/// Applies a plan's side effects and moves blackboard.stage to plan.next.
void apply_route(Blackboard& blackboard, const AgentReport& report, const RoutePlan& plan);

/// plan_route followed by apply_route.
Stage supervisor_next(Blackboard& blackboard, const AgentReport& report, const SupervisorPolicy& policy = {});

/// Decides the next stage. The default router is supervisor_next; the LLM
/// router in llm.hpp delegates the decision and falls back to it.
class Router {
 public:
  virtual ~Router() = default;
  virtual Stage route(Blackboard& blackboard, const AgentReport& report, const SupervisorPolicy& policy) = 0;
};

class DeterministicRouter : public Router {
 public:
  Stage route(Blackboard& blackboard, const AgentReport& report, const SupervisorPolicy& policy) override {
    return supervisor_next(blackboard, report, policy);
  }
};

struct EpisodeResult {
  std::vector<MetricsRecord> metrics_history;
  std::vector<EvolutionEvent> event_log;
  std::vector<std::string> errors;
  /// Every role invoked, in order, across the episode.
  std::vector<AgentRole> invocations;
};

/// Step 0 runs the fixed-to-movable upgrade as a HardwareChange event; each
/// later step runs Monitoring and, when triggered, a complete evolution cycle.
EpisodeResult run_episode(const ScenarioConfig& scenario);
EpisodeResult run_episode(const ScenarioConfig& scenario, LifecycleServices& services, Router& router);

}  // namespace maevo
