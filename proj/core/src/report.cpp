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

#include "maevo/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "maevo/errors.hpp"

namespace maevo {
namespace {

using nlohmann::json;

std::string format_angle_list(const DoASet& d) {
  std::string out;
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (k) out += ';';
    out += format_fixed6(d[k]);
  }
  return out;
}

double parse_number(const std::string& text, const char* what) {
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw ValidationError("");
    return v;
  } catch (const std::exception&) {
    throw ValidationError(std::string("malformed ") + what + ": '" + text + "'");
  }
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::string current;
  for (char c : line) {
    if (c == sep) {
      out.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  out.push_back(std::move(current));
  return out;
}

DoASet parse_angle_list(const std::string& text) {
  std::vector<double> angles;
  for (const auto& part : split(text, ';')) angles.push_back(parse_number(part, "angle"));
  return DoASet(std::move(angles));
}

json gain_json(double db) {
  if (std::isfinite(db)) return db;
  if (std::isnan(db)) return "nan";
  return db < 0 ? "-inf" : "inf";
}

double gain_from_json(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_number(v.get<std::string>(), "gain");
  throw ValidationError("gain must be a number or \"-inf\"");
}

}  // namespace

std::string format_fixed6(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value < 0 ? "-inf" : "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

std::string metrics_to_csv(std::span<const MetricsRecord> records) {
  std::string out = std::string(kMetricsHeader) + "\n";
  for (const auto& r : records) {
    out += std::to_string(r.step);
    out += ',';
    out += format_fixed6(r.movable_gain_db);
    out += ',';
    out += format_fixed6(r.fixed_gain_db);
    out += ',';
    out += r.evolved ? "true" : "false";
    out += ',';
    if (r.trigger_reason) out += to_string(*r.trigger_reason);
    out += ',';
    out += format_angle_list(r.true_angles);
    out += ',';
    out += format_angle_list(r.estimated_angles);
    out += '\n';
  }
  return out;
}

std::vector<MetricsRecord> metrics_from_csv(std::string_view csv) {
  std::istringstream in{std::string(csv)};
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) throw ValidationError("metrics table has an unexpected header");
  std::vector<MetricsRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 7) throw ValidationError("metrics row has " + std::to_string(cells.size()) + " columns");
    MetricsRecord r{.step = static_cast<int>(parse_number(cells[0], "step")),
                    .true_angles = parse_angle_list(cells[5]),
                    .estimated_angles = parse_angle_list(cells[6])};
    r.movable_gain_db = parse_number(cells[1], "movable_gain_db");
    r.fixed_gain_db = parse_number(cells[2], "fixed_gain_db");
    if (cells[3] != "true" && cells[3] != "false") throw ValidationError("evolved must be true or false");
    r.evolved = cells[3] == "true";
    if (!cells[4].empty()) {
      r.trigger_reason = parse_trigger_reason(cells[4]);
      if (!r.trigger_reason) throw ValidationError("unknown trigger_reason '" + cells[4] + "'");
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::string events_to_json(std::span<const EvolutionEvent> events) {
  json arr = json::array();
  for (const auto& e : events) {
    json seq = json::array();
    for (AgentRole role : e.agent_sequence) seq.push_back(std::string(to_string(role)));
    json item = {{"trigger_step", e.trigger_step},
                 {"reason", std::string(to_string(e.reason))},
                 {"outcome", std::string(to_string(e.outcome))},
                 {"pre_gain_db", gain_json(e.pre_gain_db)},
                 {"post_gain_db", gain_json(e.post_gain_db)},
                 {"baseline_gain_db", gain_json(e.baseline_gain_db)},
                 {"agent_sequence", seq},
                 {"training_rounds", e.training_rounds}};
    if (!e.error.empty()) item["error"] = e.error;
    arr.push_back(std::move(item));
  }
  const json doc = {{"schema_version", 1}, {"events", arr}};
  return doc.dump(2) + "\n";
}

std::vector<EvolutionEvent> events_from_json(std::string_view json_text) {
  std::vector<EvolutionEvent> events;
  try {
    const json doc = json::parse(json_text);
    for (const auto& item : doc.at("events")) {
      EvolutionEvent e;
      e.trigger_step = item.at("trigger_step").get<int>();
      const auto reason = parse_trigger_reason(item.at("reason").get<std::string>());
      const auto outcome = parse_event_outcome(item.at("outcome").get<std::string>());
      if (!reason || !outcome) throw ValidationError("unknown reason or outcome in event log");
      e.reason = *reason;
      e.outcome = *outcome;
      e.pre_gain_db = gain_from_json(item.at("pre_gain_db"));
      e.post_gain_db = gain_from_json(item.at("post_gain_db"));
      e.baseline_gain_db = gain_from_json(item.at("baseline_gain_db"));
      for (const auto& name : item.at("agent_sequence")) {
        const auto stage = parse_stage(name.get<std::string>());
        const auto role = stage ? role_of(*stage) : std::nullopt;
        if (!role) throw ValidationError("unknown role in agent_sequence");
        e.agent_sequence.push_back(*role);
      }
      e.training_rounds = item.at("training_rounds").get<int>();
      if (item.contains("error")) e.error = item.at("error").get<std::string>();
      events.push_back(std::move(e));
    }
  } catch (const json::exception& ex) {
    throw ValidationError(std::string("malformed event log: ") + ex.what());
  }
  return events;
}

}  // namespace maevo
