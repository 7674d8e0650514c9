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

// Serialized forms of an episode: a CSV gain table (one row per step) and a
// JSON event log.
//
// CSV columns, in order:
//   step,movable_gain_db,fixed_gain_db,evolved,trigger_reason,true_angles,estimated_angles
// Gains and angles carry 6 decimals; angle lists are ';'-separated; -inf gains
// are written as "-inf". The event log keeps full double precision.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "maevo/lifecycle.hpp"

namespace maevo {

inline constexpr const char* kMetricsHeader =
    "step,movable_gain_db,fixed_gain_db,evolved,trigger_reason,true_angles,estimated_angles";

std::string metrics_to_csv(std::span<const MetricsRecord> records);
/// Throws ValidationError on a malformed table.
std::vector<MetricsRecord> metrics_from_csv(std::string_view csv);

std::string events_to_json(std::span<const EvolutionEvent> events);
/// Throws ValidationError on a malformed log.
std::vector<EvolutionEvent> events_from_json(std::string_view json_text);

/// Fixed 6-decimal rendering used by the CSV ("-inf", "inf", "nan" for non-finite).
std::string format_fixed6(double value);

}  // namespace maevo
