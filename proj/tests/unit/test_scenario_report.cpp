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

#include <cmath>
#include <limits>

#include "doctest.h"
#include "json.hpp"
#include "maevo/errors.hpp"
#include "maevo/report.hpp"
#include "maevo/scenario.hpp"

using namespace maevo;

namespace {

std::string field_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ScenarioError& e) {
    return e.field_path();
  }
  return "<accepted>";
}

}  // namespace

TEST_SUITE("scenario config") {
  TEST_CASE("defaults carry the 2.4 GHz eight-element, three-UAV setup") {
    const auto cfg = default_scenario();
    CHECK(cfg.constraints.wavelength == 0.125);
    CHECK(cfg.constraints.num_elements == 8);
    CHECK(cfg.constraints.min_spacing == 0.0625);
    CHECK(cfg.constraints.position_bound == 0.625);
    CHECK(cfg.trajectory.initial_angles.size() == 3);
    CHECK(cfg.trajectory.num_steps == 50);
    CHECK(std::abs(kSpeedOfLight / 2.4e9 - cfg.constraints.wavelength) < 0.001);
    CHECK_NOTHROW(cfg.validate());
  }

  TEST_CASE("minimal document takes defaults") {
    const auto cfg = parse_scenario(R"({"schema_version": 1})");
    CHECK(scenario_to_json(cfg) == scenario_to_json(default_scenario()));
  }

  TEST_CASE("serialization round-trips") {
    auto cfg = default_scenario();
    cfg.seed = 1234567890123ULL;
    cfg.trajectory.num_steps = 3;
    cfg.trajectory.drift = ScriptedDrift{{DoASet({50.0, 80.0}), DoASet({51.0, 82.5}), DoASet({53.25, 85.0})}};
    cfg.trajectory.initial_angles = DoASet({50.0, 80.0});
    cfg.forced_strategy = Strategy::CoordinateSearch;
    cfg.csi.snr_db = 12.5;
    cfg.estimation.method = DoaMethod::Bartlett;
    cfg.llm.enabled = true;
    cfg.llm.base_url = "https://llm.example.org/v1";
    const auto text = scenario_to_json(cfg);
    CHECK(scenario_to_json(parse_scenario(text)) == text);
    const auto back = parse_scenario(text);
    CHECK(back.seed == cfg.seed);
    CHECK(back.forced_strategy == Strategy::CoordinateSearch);
    CHECK(std::get<ScriptedDrift>(back.trajectory.drift).waypoints[2] == DoASet({53.25, 85.0}));
  }

  TEST_CASE("scripted drift fills steps and start from the waypoints") {
    const auto cfg = parse_scenario(R"({"schema_version": 1,
      "trajectory": {"drift": {"type": "scripted", "waypoints": [[50, 80, 110], [90, 120, 150]]}}})");
    CHECK(cfg.trajectory.num_steps == 2);
    CHECK(cfg.trajectory.initial_angles == DoASet({50.0, 80.0, 110.0}));
  }

  TEST_CASE("errors name the offending field") {
    CHECK(field_of("{}") == "schema_version");
    CHECK(field_of(R"({"schema_version": 2})") == "schema_version");
    CHECK(field_of("not json") == "<root>");
    CHECK(field_of(R"({"schema_version": 1, "colour": 3})") == "colour");
    CHECK(field_of(R"({"schema_version": 1, "constraints": {"min_spacing": 0.5}})") == "constraints.min_spacing");
    CHECK(field_of(R"({"schema_version": 1, "constraints": {"wavelength": "short"}})") == "constraints.wavelength");
    CHECK(field_of(R"({"schema_version": 1, "optimizer": {"restarts": 0}})") == "optimizer");
    CHECK(field_of(R"({"schema_version": 1, "optimizer": {"strategy": "genetic"}})") == "optimizer.strategy");
    CHECK(field_of(R"({"schema_version": 1, "trajectory": {"num_steps": 3,
      "drift": {"type": "scripted", "waypoints": [[50], [60]]}}})") == "trajectory");
    CHECK(field_of(R"({"schema_version": 1, "trajectory": {"initial_angles": [40, 40]}})") ==
          "trajectory.initial_angles");
    CHECK(field_of(R"({"schema_version": 1, "csi": {"num_snapshots": 0}})") == "csi.num_snapshots");
    CHECK(field_of(R"({"schema_version": 1, "estimation": {"method": "esprit"}})") == "estimation.method");
    CHECK(field_of(R"({"schema_version": 1, "llm": {"timeout_s": 0}})") == "llm.timeout_s");
  }

  TEST_CASE("derived seeds separate purposes") {
    CHECK(derive_seed(1, 2, 3, 4) == derive_seed(1, 2, 3, 4));
    CHECK(derive_seed(1, 2, 3, 4) != derive_seed(1, 2, 3, 5));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  }
}

TEST_SUITE("metrics table") {
  const std::vector<MetricsRecord> kRecords{
      {.step = 0, .true_angles = DoASet({40.0, 85.0, 130.0}), .estimated_angles = DoASet({40.0, 85.5, 130.0}),
       .movable_gain_db = 11.105, .fixed_gain_db = 8.056, .evolved = true,
       .trigger_reason = TriggerReason::HardwareChange},
      {.step = 1, .true_angles = DoASet({41.25, 86.0, 129.0}), .estimated_angles = DoASet({41.0, 86.0, 129.0}),
       .movable_gain_db = 3.9847, .fixed_gain_db = 7.8169, .evolved = false,
       .trigger_reason = TriggerReason::BelowBaseline},
      {.step = 2, .true_angles = DoASet({42.0, 87.0, 128.0}), .estimated_angles = DoASet({42.0, 87.0, 128.0}),
       .movable_gain_db = -std::numeric_limits<double>::infinity(), .fixed_gain_db = 7.5, .evolved = false},
  };

  TEST_CASE("header columns in order") {
    const auto csv = metrics_to_csv(kRecords);
    CHECK(csv.substr(0, csv.find('\n')) ==
          "step,movable_gain_db,fixed_gain_db,evolved,trigger_reason,true_angles,estimated_angles");
    CHECK(csv.find("0,11.105000,8.056000,true,HardwareChange,40.000000;85.000000;130.000000,") != std::string::npos);
    CHECK(csv.find(",-inf,") != std::string::npos);
  }

  TEST_CASE("values with six decimals round-trip") {
    const auto back = metrics_from_csv(metrics_to_csv(kRecords));
    CHECK(back == kRecords);
  }

  TEST_CASE("malformed tables are rejected") {
    CHECK_THROWS_AS(metrics_from_csv("step,gain\n0,1\n"), ValidationError);
    CHECK_THROWS_AS(metrics_from_csv(std::string(kMetricsHeader) + "\n0,1.0,2.0,maybe,,40,40\n"), ValidationError);
    CHECK_THROWS_AS(metrics_from_csv(std::string(kMetricsHeader) + "\n0,1.0,2.0\n"), ValidationError);
  }

  TEST_CASE("six-decimal formatting") {
    CHECK(format_fixed6(9.030899869919435) == "9.030900");
    CHECK(format_fixed6(-std::numeric_limits<double>::infinity()) == "-inf");
  }
}

TEST_SUITE("event log") {
  TEST_CASE("full-precision round trip") {
    std::vector<EvolutionEvent> events{
        {.trigger_step = 0, .reason = TriggerReason::HardwareChange, .outcome = EventOutcome::Completed,
         .pre_gain_db = 8.056123456789012, .post_gain_db = 11.10512345678901, .baseline_gain_db = 8.056123456789012,
         .agent_sequence = {AgentRole::DataCollection, AgentRole::ModelSelection, AgentRole::Training,
                            AgentRole::Evaluation, AgentRole::Deployment},
         .training_rounds = 1},
        {.trigger_step = 7, .reason = TriggerReason::RelativeDrop, .outcome = EventOutcome::Aborted,
         .pre_gain_db = -std::numeric_limits<double>::infinity(), .post_gain_db = 1.0 / 3.0,
         .baseline_gain_db = 7.0, .agent_sequence = {AgentRole::DataCollection}, .training_rounds = 0,
         .error = "DataCollection: radio offline"},
    };
    const auto text = events_to_json(events);
    CHECK(events_from_json(text) == events);
    const auto doc = nlohmann::json::parse(text);
    CHECK(doc["schema_version"] == 1);
    CHECK(doc["events"][0]["agent_sequence"][4] == "Deployment");
    CHECK(doc["events"][1]["pre_gain_db"] == "-inf");
  }

  TEST_CASE("malformed logs are rejected") {
    CHECK_THROWS_AS(events_from_json("[]"), ValidationError);
    CHECK_THROWS_AS(events_from_json(R"({"schema_version":1,"events":[{"reason":"Sunspots"}]})"), ValidationError);
  }
}
