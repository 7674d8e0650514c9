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

#include "maevo/scenario.hpp"

#include <cmath>
#include <set>

#include "json.hpp"

namespace maevo {
namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

/// Walks one JSON object, rejecting unknown keys and reporting type errors by path.
class ObjectReader {
 public:
  ObjectReader(const json& node, std::string path, std::set<std::string> allowed)
      : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ScenarioError(path_.empty() ? "<root>" : path_, "expected an object");
    for (const auto& [key, value] : node_.items()) {
      if (!allowed.count(key)) throw ScenarioError(join(path_, key), "unknown field");
    }
  }

  bool has(const char* key) const { return node_.contains(key); }
  const json& at(const char* key) const { return node_.at(key); }
  std::string path(const char* key) const { return join(path_, key); }

  void read(const char* key, double& out) const {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_number()) throw ScenarioError(path(key), "expected a number");
    out = v.get<double>();
    if (!std::isfinite(out)) throw ScenarioError(path(key), "expected a finite number");
  }

  void read(const char* key, int& out) const {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_number_integer()) throw ScenarioError(path(key), "expected an integer");
    out = v.get<int>();
  }

  void read(const char* key, std::uint64_t& out) const {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_number_unsigned()) throw ScenarioError(path(key), "expected a non-negative integer");
    out = v.get<std::uint64_t>();
  }

  void read(const char* key, bool& out) const {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_boolean()) throw ScenarioError(path(key), "expected true or false");
    out = v.get<bool>();
  }

  void read(const char* key, std::string& out) const {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_string()) throw ScenarioError(path(key), "expected a string");
    out = v.get<std::string>();
  }

 private:
  const json& node_;
  std::string path_;
};

DoASet read_angles(const json& v, const std::string& path) {
  if (!v.is_array()) throw ScenarioError(path, "expected an array of angles in degrees");
  std::vector<double> angles;
  for (const auto& a : v) {
    if (!a.is_number()) throw ScenarioError(path, "expected numeric angles");
    angles.push_back(a.get<double>());
  }
  try {
    return DoASet(std::move(angles));
  } catch (const ValidationError& e) {
    throw ScenarioError(path, e.what());
  }
}

AngleBounds read_bounds(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ScenarioError(path, "expected [lower, upper] in degrees");
  }
  return AngleBounds{v[0].get<double>(), v[1].get<double>()};
}

void read_trajectory(const json& node, ScenarioConfig& cfg) {
  const ObjectReader r(node, "trajectory", {"num_steps", "initial_angles", "angle_bounds", "drift"});
  TrajectoryConfig& t = cfg.trajectory;
  const bool has_steps = r.has("num_steps");
  r.read("num_steps", t.num_steps);
  if (r.has("initial_angles")) t.initial_angles = read_angles(r.at("initial_angles"), r.path("initial_angles"));
  if (r.has("angle_bounds")) t.angle_bounds = read_bounds(r.at("angle_bounds"), r.path("angle_bounds"));
  if (!r.has("drift")) return;

  const ObjectReader d(r.at("drift"), r.path("drift"), {"type", "sigma_deg_per_step", "waypoints"});
  std::string type = "random_walk";
  d.read("type", type);
  if (type == "random_walk") {
    RandomWalkDrift walk;
    d.read("sigma_deg_per_step", walk.sigma_deg_per_step);
    t.drift = walk;
  } else if (type == "scripted") {
    if (!d.has("waypoints") || !d.at("waypoints").is_array()) {
      throw ScenarioError(d.path("waypoints"), "scripted drift needs an array of per-step angle lists");
    }
    ScriptedDrift scripted;
    const json& w = d.at("waypoints");
    for (std::size_t i = 0; i < w.size(); ++i) {
      scripted.waypoints.push_back(read_angles(w[i], d.path("waypoints") + "[" + std::to_string(i) + "]"));
    }
    if (scripted.waypoints.empty()) throw ScenarioError(d.path("waypoints"), "must not be empty");
    if (!has_steps) t.num_steps = static_cast<int>(scripted.waypoints.size());
    if (!r.has("initial_angles")) t.initial_angles = scripted.waypoints.front();
    t.drift = std::move(scripted);
  } else {
    throw ScenarioError(d.path("type"), "expected \"random_walk\" or \"scripted\"");
  }
}

void read_constraints(const json& node, ScenarioConfig& cfg) {
  const ObjectReader r(node, "constraints", {"wavelength", "num_elements", "min_spacing", "position_bound"});
  double wavelength = kDefaultWavelength;
  int n = kDefaultNumElements;
  r.read("wavelength", wavelength);
  r.read("num_elements", n);
  if (!(wavelength > 0.0)) throw ScenarioError(r.path("wavelength"), "must be positive");
  cfg.constraints = ArrayConstraints::for_wavelength(wavelength, n);
  r.read("min_spacing", cfg.constraints.min_spacing);
  r.read("position_bound", cfg.constraints.position_bound);
}

void read_optimizer(const json& node, ScenarioConfig& cfg) {
  const ObjectReader r(node, "optimizer",
                       {"restarts", "step_size", "max_outer_iterations", "gain_tolerance_db", "strategy"});
  r.read("restarts", cfg.optimizer.restarts);
  r.read("step_size", cfg.optimizer.step_size);
  r.read("max_outer_iterations", cfg.optimizer.max_outer_iterations);
  r.read("gain_tolerance_db", cfg.optimizer.gain_tolerance_db);
  std::string strategy = "auto";
  r.read("strategy", strategy);
  if (strategy == "auto") {
    cfg.forced_strategy.reset();
  } else {
    const auto s = parse_strategy(strategy);
    if (!s || *s == Strategy::FixedBaseline) {
      throw ScenarioError(r.path("strategy"), "expected \"auto\", \"gradient\" or \"coordinate\"");
    }
    cfg.forced_strategy = s;
  }
}

void read_sections(const json& root, ScenarioConfig& cfg) {
  const ObjectReader r(root, "", {"schema_version", "seed", "trajectory", "constraints", "optimizer", "monitoring",
                                  "csi", "estimation", "llm"});
  if (!r.has("schema_version")) throw ScenarioError("schema_version", "missing");
  r.read("schema_version", cfg.schema_version);
  if (cfg.schema_version != kScenarioSchemaVersion) {
    throw ScenarioError("schema_version", "unsupported version " + std::to_string(cfg.schema_version));
  }
  r.read("seed", cfg.seed);
  if (r.has("trajectory")) read_trajectory(r.at("trajectory"), cfg);
  if (r.has("constraints")) read_constraints(r.at("constraints"), cfg);
  if (r.has("optimizer")) read_optimizer(r.at("optimizer"), cfg);
  if (r.has("monitoring")) {
    const ObjectReader m(r.at("monitoring"), "monitoring",
                         {"relative_drop_threshold_db", "max_training_rounds", "evaluation_margin_db"});
    m.read("relative_drop_threshold_db", cfg.monitoring.relative_drop_threshold_db);
    m.read("max_training_rounds", cfg.monitoring.max_training_rounds);
    m.read("evaluation_margin_db", cfg.monitoring.evaluation_margin_db);
  }
  if (r.has("csi")) {
    const ObjectReader c(r.at("csi"), "csi", {"snr_db", "num_snapshots"});
    c.read("snr_db", cfg.csi.snr_db);
    c.read("num_snapshots", cfg.csi.num_snapshots);
  }
  if (r.has("estimation")) {
    const ObjectReader e(r.at("estimation"), "estimation",
                         {"grid_resolution_deg", "method", "min_peak_separation_deg", "angle_bounds"});
    e.read("grid_resolution_deg", cfg.estimation.grid_resolution_deg);
    e.read("min_peak_separation_deg", cfg.estimation.min_peak_separation_deg);
    if (e.has("angle_bounds")) cfg.estimation.angle_bounds = read_bounds(e.at("angle_bounds"), e.path("angle_bounds"));
    std::string method = std::string(to_string(cfg.estimation.method));
    e.read("method", method);
    const auto m = parse_doa_method(method);
    if (!m) throw ScenarioError(e.path("method"), "expected \"bartlett\" or \"music\"");
    cfg.estimation.method = *m;
  }
  if (r.has("llm")) {
    const ObjectReader l(r.at("llm"), "llm",
                         {"enabled", "base_url", "model", "api_key_env", "timeout_s", "max_retries"});
    l.read("enabled", cfg.llm.enabled);
    l.read("base_url", cfg.llm.base_url);
    l.read("model", cfg.llm.model_name);
    l.read("api_key_env", cfg.llm.api_key_env);
    l.read("timeout_s", cfg.llm.timeout_s);
    l.read("max_retries", cfg.llm.max_retries);
  }
}

json angles_json(const DoASet& d) { return json(d.angles()); }

}  // namespace

void ScenarioConfig::validate() const {
  if (schema_version != kScenarioSchemaVersion) throw ScenarioError("schema_version", "unsupported version");
  try {
    trajectory.validate();
  } catch (const ValidationError& e) {
    throw ScenarioError("trajectory", e.what());
  }
  for (double a : trajectory.initial_angles.angles()) {
    if (a < trajectory.angle_bounds.lower_deg || a > trajectory.angle_bounds.upper_deg) {
      throw ScenarioError("trajectory.initial_angles", "angle outside trajectory.angle_bounds");
    }
  }
  if (const auto* s = std::get_if<ScriptedDrift>(&trajectory.drift)) {
    for (std::size_t i = 0; i < s->waypoints.size(); ++i) {
      if (s->waypoints[i].size() != trajectory.initial_angles.size()) {
        throw ScenarioError("trajectory.drift.waypoints[" + std::to_string(i) + "]",
                            "every step must list the same number of UAVs");
      }
    }
  }
  try {
    constraints.validate();
  } catch (const ValidationError& e) {
    throw ScenarioError("constraints", e.what());
  }
  if (!constraints.feasible()) {
    throw ScenarioError("constraints.min_spacing", std::to_string(constraints.num_elements) +
                                                       " elements at min_spacing do not fit inside +/-position_bound");
  }
  if (static_cast<int>(trajectory.initial_angles.size()) >= constraints.num_elements) {
    throw ScenarioError("trajectory.initial_angles", "number of UAVs must be smaller than constraints.num_elements");
  }
  try {
    optimizer.validate();
  } catch (const ValidationError& e) {
    throw ScenarioError("optimizer", e.what());
  }
  if (forced_strategy == Strategy::FixedBaseline) throw ScenarioError("optimizer.strategy", "not a search strategy");
  if (!(monitoring.relative_drop_threshold_db >= 0.0)) {
    throw ScenarioError("monitoring.relative_drop_threshold_db", "must be non-negative");
  }
  if (monitoring.max_training_rounds < 1) throw ScenarioError("monitoring.max_training_rounds", "must be at least 1");
  if (!(monitoring.evaluation_margin_db >= 0.0)) {
    throw ScenarioError("monitoring.evaluation_margin_db", "must be non-negative");
  }
  if (csi.num_snapshots < 1) throw ScenarioError("csi.num_snapshots", "must be at least 1");
  if (!std::isfinite(csi.snr_db)) throw ScenarioError("csi.snr_db", "must be finite");
  if (!(estimation.grid_resolution_deg > 0.0)) throw ScenarioError("estimation.grid_resolution_deg", "must be positive");
  if (!(estimation.min_peak_separation_deg >= 0.0)) {
    throw ScenarioError("estimation.min_peak_separation_deg", "must be non-negative");
  }
  const AngleBounds& eb = estimation.angle_bounds;
  if (!(eb.lower_deg > 0.0 && eb.upper_deg < 180.0 && eb.lower_deg < eb.upper_deg)) {
    throw ScenarioError("estimation.angle_bounds", "must satisfy 0 < lower < upper < 180");
  }
  if (!(llm.timeout_s > 0.0)) throw ScenarioError("llm.timeout_s", "must be positive");
  if (llm.max_retries < 0) throw ScenarioError("llm.max_retries", "must be non-negative");
}

ScenarioConfig default_scenario() {
  ScenarioConfig cfg;
  cfg.trajectory.num_steps = 50;
  cfg.trajectory.initial_angles = DoASet({40.0, 85.0, 130.0});
  cfg.trajectory.drift = RandomWalkDrift{1.0};
  return cfg;
}

ScenarioConfig parse_scenario(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioError("<root>", std::string("invalid JSON: ") + e.what());
  }
  ScenarioConfig cfg = default_scenario();
  read_sections(root, cfg);
  cfg.validate();
  return cfg;
}

std::string scenario_to_json(const ScenarioConfig& cfg) {
  json j;
  j["schema_version"] = cfg.schema_version;
  j["seed"] = cfg.seed;

  json drift;
  if (const auto* s = std::get_if<ScriptedDrift>(&cfg.trajectory.drift)) {
    drift["type"] = "scripted";
    drift["waypoints"] = json::array();
    for (const auto& w : s->waypoints) drift["waypoints"].push_back(angles_json(w));
  } else {
    drift["type"] = "random_walk";
    drift["sigma_deg_per_step"] = std::get<RandomWalkDrift>(cfg.trajectory.drift).sigma_deg_per_step;
  }
  j["trajectory"] = {{"num_steps", cfg.trajectory.num_steps},
                     {"initial_angles", angles_json(cfg.trajectory.initial_angles)},
                     {"angle_bounds", {cfg.trajectory.angle_bounds.lower_deg, cfg.trajectory.angle_bounds.upper_deg}},
                     {"drift", drift}};
  j["constraints"] = {{"wavelength", cfg.constraints.wavelength},
                      {"num_elements", cfg.constraints.num_elements},
                      {"min_spacing", cfg.constraints.min_spacing},
                      {"position_bound", cfg.constraints.position_bound}};
  j["optimizer"] = {{"restarts", cfg.optimizer.restarts},
                    {"step_size", cfg.optimizer.step_size},
                    {"max_outer_iterations", cfg.optimizer.max_outer_iterations},
                    {"gain_tolerance_db", cfg.optimizer.gain_tolerance_db},
                    {"strategy", cfg.forced_strategy ? (*cfg.forced_strategy == Strategy::CoordinateSearch ? "coordinate"
                                                                                                           : "gradient")
                                                     : "auto"}};
  j["monitoring"] = {{"relative_drop_threshold_db", cfg.monitoring.relative_drop_threshold_db},
                     {"max_training_rounds", cfg.monitoring.max_training_rounds},
                     {"evaluation_margin_db", cfg.monitoring.evaluation_margin_db}};
  j["csi"] = {{"snr_db", cfg.csi.snr_db}, {"num_snapshots", cfg.csi.num_snapshots}};
  j["estimation"] = {{"grid_resolution_deg", cfg.estimation.grid_resolution_deg},
                     {"method", std::string(to_string(cfg.estimation.method))},
                     {"min_peak_separation_deg", cfg.estimation.min_peak_separation_deg},
                     {"angle_bounds", {cfg.estimation.angle_bounds.lower_deg, cfg.estimation.angle_bounds.upper_deg}}};
  j["llm"] = {{"enabled", cfg.llm.enabled},         {"base_url", cfg.llm.base_url},
              {"model", cfg.llm.model_name},        {"api_key_env", cfg.llm.api_key_env},
              {"timeout_s", cfg.llm.timeout_s},     {"max_retries", cfg.llm.max_retries}};
  return j.dump(2) + "\n";
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  auto mix = [](std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  };
  std::uint64_t h = mix(seed);
  h = mix(h ^ a);
  h = mix(h ^ b);
  return mix(h ^ c);
}

}  // namespace maevo
