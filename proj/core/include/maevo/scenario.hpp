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

// Scenario configuration: everything one episode needs, loadable from a
// versioned JSON document.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "maevo/array.hpp"
#include "maevo/channel.hpp"
#include "maevo/doa.hpp"
#include "maevo/errors.hpp"
#include "maevo/optimizer.hpp"

namespace maevo {

inline constexpr int kScenarioSchemaVersion = 1;
inline constexpr const char* kDefaultApiKeyEnv = "MAEVO_LLM_API_KEY";

struct MonitoringConfig {
  double relative_drop_threshold_db = 3.0;
  int max_training_rounds = 5;
  /// Evaluation accepts candidates down to this much below the pre-trigger gain.
  double evaluation_margin_db = 0.1;
};

struct CsiConfig {
  double snr_db = 20.0;
  int num_snapshots = kDefaultSnapshots;
};

/// Endpoint settings as they appear in a config file. The key itself is
/// never stored here, only the name of the environment variable holding it.
struct LlmSettings {
  bool enabled = false;
  std::string base_url = "http://127.0.0.1:8080";
  std::string model_name = "gpt-4o";
  std::string api_key_env = kDefaultApiKeyEnv;
  double timeout_s = 30.0;
  int max_retries = 2;
};

struct ScenarioConfig {
  int schema_version = kScenarioSchemaVersion;
  std::uint64_t seed = 0;
  TrajectoryConfig trajectory;
  ArrayConstraints constraints;
  /// optimizer.seed and optimizer.strategy are overwritten per training round.
  OptimizerConfig optimizer;
  /// Pins the training strategy; when empty ModelSelection decides.
  std::optional<Strategy> forced_strategy;
  MonitoringConfig monitoring;
  CsiConfig csi;
  EstimationOptions estimation{0.5, AngleBounds{}, 2.0, DoaMethod::Music};
  LlmSettings llm;

  /// Throws ScenarioError naming the offending field.
  void validate() const;
};

/// Configuration problem tied to a dotted field path, e.g. "constraints.min_spacing".
class ScenarioError : public ConfigurationError {
 public:
  ScenarioError(std::string field_path, const std::string& message)
      : ConfigurationError(field_path + ": " + message), field_path_(std::move(field_path)) {}
  const std::string& field_path() const noexcept { return field_path_; }

 private:
  std::string field_path_;
};

/// Reference case-study defaults: lambda = 0.125 m, N = 8, K = 3, lambda/2 spacing,
/// +/-5 lambda window, 50-step random walk.
ScenarioConfig default_scenario();

/// Missing sections take their defaults. Throws ScenarioError.
ScenarioConfig parse_scenario(std::string_view json_text);
std::string scenario_to_json(const ScenarioConfig& config);

/// splitmix64 over (seed, a, b, c); used to derive per-purpose seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

}  // namespace maevo
